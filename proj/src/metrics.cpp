// SPDX-License-Identifier: Apache-2.0

#include "lcs/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lcs/error.hpp"

namespace lcs {

namespace {

constexpr const char* kCsvHeader =
    "image_id,scheme,rate,trial,seed,psnr_db,mse,iterations,wall_ms,status";

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const char* what) {
  if (field == "nan" || field.empty()) return std::nan("");
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw Error(Errc::malformed, std::string("report: bad ") + what + " '" + field + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& field, const char* what) {
  Int v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw Error(Errc::malformed, std::string("report: bad ") + what + " '" + field + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool row_order(const RdRow& a, const RdRow& b) {
  if (a.scheme != b.scheme) return a.scheme < b.scheme;
  if (a.rate != b.rate) return a.rate < b.rate;
  return a.trial < b.trial;
}

void check_image_id(const std::string& id) {
  if (id.find_first_of(",\n\r") != std::string::npos)
    throw Error(Errc::invalid_argument, "image id must not contain commas or newlines");
}

RdRow run_cell(const Image& image, const SweepOptions& options, Scheme scheme, double rate,
               int trial, Image* reconstruction) {
  RdRow row;
  row.scheme = scheme;
  row.rate = rate;
  row.trial = trial;
  row.seed = options.base_seed + static_cast<std::uint64_t>(trial);
  row.psnr_db = std::nan("");
  row.mse = std::nan("");
  const auto start = std::chrono::steady_clock::now();
  try {
    EncodedSample sample;
    if (scheme == Scheme::proposed) {
      const std::size_t line_len = options.line_len == 0 ? image.cols() : options.line_len;
      const LineSet lines = to_lines(image, line_len);
      sample = encode_lines(lines, generate_matrix(rate, line_len, row.seed, options.max_entries));
    } else {
      sample = encode_whole(image, rate, row.seed, options.max_entries);
    }
    Reconstruction rec = reconstruct(sample, options.solver, options.max_entries);
    row.mse = mse(image, rec.image);
    row.psnr_db = psnr(image, rec.image);
    row.iterations = rec.state.iterations;
    if (reconstruction != nullptr) *reconstruction = std::move(rec.image);
  } catch (const DivergenceError& e) {
    row.status = CellStatus::diverged;
    row.message = e.what();
  } catch (const Error& e) {
    row.status = e.code() == Errc::capacity ? CellStatus::skipped_capacity : CellStatus::failed;
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = CellStatus::failed;
    row.message = e.what();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

double mse(const Image& reference, const Image& candidate) {
  if (reference.rows() != candidate.rows() || reference.cols() != candidate.cols())
    throw Error(Errc::dimension, "PSNR operands differ in size");
  const auto a = reference.pixels();
  const auto b = candidate.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

double psnr(const Image& reference, const Image& candidate) {
  const double err = mse(reference, candidate);
  if (err == 0.0) return kPsnrCapDb;
  return 10.0 * std::log10(255.0 * 255.0 / err);
}

const char* to_string(Scheme scheme) noexcept {
  return scheme == Scheme::proposed ? "proposed" : "conventional";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "proposed") return Scheme::proposed;
  if (name == "conventional") return Scheme::conventional;
  throw Error(Errc::invalid_argument, "unknown scheme '" + name + "'");
}

const char* to_string(CellStatus status) noexcept {
  switch (status) {
    case CellStatus::ok: return "ok";
    case CellStatus::skipped_capacity: return "skipped-capacity";
    case CellStatus::diverged: return "diverged";
    case CellStatus::failed: return "failed";
  }
  return "failed";
}

CellStatus parse_cell_status(const std::string& name) {
  for (auto s : {CellStatus::ok, CellStatus::skipped_capacity, CellStatus::diverged, CellStatus::failed})
    if (name == to_string(s)) return s;
  throw Error(Errc::malformed, "report: unknown status '" + name + "'");
}

std::vector<double> RdReport::rates(Scheme scheme) const {
  std::vector<double> out;
  for (const RdMean& m : means)
    if (m.scheme == scheme) out.push_back(m.rate);
  return out;
}

bool RdReport::has_scheme(Scheme scheme) const {
  return std::any_of(means.begin(), means.end(), [&](const RdMean& m) { return m.scheme == scheme; });
}

void SweepOptions::validate() const {
  if (rates.empty()) throw Error(Errc::invalid_argument, "no sampling rates given");
  for (double r : rates)
    if (!(r > 0.0 && r <= 1.0))
      throw Error(Errc::invalid_argument, "sampling rate " + format_double(r) + " outside (0, 1]");
  auto sorted = rates;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(Errc::invalid_argument, "duplicate sampling rate");
  if (trials < 1) throw Error(Errc::invalid_argument, "trials must be at least 1");
  if (schemes.empty()) throw Error(Errc::invalid_argument, "no schemes selected");
  if (jobs < 1) throw Error(Errc::invalid_argument, "jobs must be at least 1");
  solver.validate();
}

std::vector<RdMean> aggregate(const std::vector<RdRow>& rows) {
  std::map<std::pair<Scheme, double>, std::pair<int, double>> groups;
  for (const RdRow& r : rows) {
    auto& [count, sum] = groups[{r.scheme, r.rate}];
    if (r.status == CellStatus::ok) {
      ++count;
      sum += r.psnr_db;
    }
  }
  std::vector<RdMean> out;
  for (const auto& [key, acc] : groups) {
    RdMean m;
    m.scheme = key.first;
    m.rate = key.second;
    m.trials_ok = acc.first;
    if (acc.first > 0) m.mean_psnr_db = acc.second / acc.first;
    out.push_back(m);
  }
  return out;
}

RdReport rd_sweep(const Image& image, const std::string& image_id, const SweepOptions& options,
                  const CellObserver& observer) {
  options.validate();
  check_image_id(image_id);

  struct Cell {
    Scheme scheme;
    double rate;
    int trial;
  };
  std::vector<Cell> cells;
  auto schemes = options.schemes;
  std::sort(schemes.begin(), schemes.end());
  schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());
  auto rates = options.rates;
  std::sort(rates.begin(), rates.end());
  for (Scheme s : schemes)
    for (double r : rates)
      for (int t = 0; t < options.trials; ++t) cells.push_back({s, r, t});

  std::vector<RdRow> rows(cells.size());
  std::vector<Image> images(observer ? cells.size() : 0, Image(1, 1));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++)
      rows[i] = run_cell(image, options, cells[i].scheme, cells[i].rate, cells[i].trial,
                         observer ? &images[i] : nullptr);
  };
  const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(options.jobs), cells.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  if (observer)
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (rows[i].status == CellStatus::ok) observer(rows[i], images[i]);

  RdReport report;
  report.image_id = image_id;
  report.rows = std::move(rows);
  std::stable_sort(report.rows.begin(), report.rows.end(), row_order);
  report.means = aggregate(report.rows);
  return report;
}

std::vector<RateGain> compare_report(const RdReport& a, Scheme scheme_a, const RdReport& b,
                                     Scheme scheme_b) {
  const auto rates_a = a.rates(scheme_a);
  const auto rates_b = b.rates(scheme_b);
  if (rates_a.empty() || rates_b.empty())
    throw Error(Errc::mismatch, "a report has no rows for the requested scheme");
  if (rates_a != rates_b) throw Error(Errc::mismatch, "reports cover different sampling rates");
  const auto mean_of = [](const RdReport& r, Scheme s, double rate) {
    for (const RdMean& m : r.means)
      if (m.scheme == s && m.rate == rate) return m.mean_psnr_db.value_or(std::nan(""));
    return std::nan("");
  };
  std::vector<RateGain> gains;
  for (double rate : rates_a)
    gains.push_back({rate, mean_of(a, scheme_a, rate) - mean_of(b, scheme_b, rate)});
  return gains;
}

void write_csv(const RdReport& report, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const RdRow& r : report.rows) {
    out << report.image_id << ',' << to_string(r.scheme) << ',' << format_double(r.rate) << ','
        << r.trial << ',' << r.seed << ',' << format_double(r.psnr_db) << ','
        << format_double(r.mse) << ',' << r.iterations << ',' << format_double(r.wall_ms) << ','
        << to_string(r.status) << '\n';
  }
}

void write_json(const RdReport& report, std::ostream& out) {
  using nlohmann::json;
  const auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json doc;
  doc["image_id"] = report.image_id;
  doc["psnr_peak"] = 255;
  doc["psnr_cap_db"] = kPsnrCapDb;
  doc["rows"] = json::array();
  for (const RdRow& r : report.rows) {
    json row{{"scheme", to_string(r.scheme)},
             {"rate", r.rate},
             {"trial", r.trial},
             {"seed", r.seed},
             {"status", to_string(r.status)},
             {"psnr_db", number(r.psnr_db)},
             {"mse", number(r.mse)},
             {"iterations", r.iterations},
             {"wall_ms", r.wall_ms}};
    if (!r.message.empty()) row["message"] = r.message;
    doc["rows"].push_back(std::move(row));
  }
  doc["means"] = json::array();
  for (const RdMean& m : report.means)
    doc["means"].push_back({{"scheme", to_string(m.scheme)},
                            {"rate", m.rate},
                            {"trials_ok", m.trials_ok},
                            {"mean_psnr_db", m.mean_psnr_db ? json(*m.mean_psnr_db) : json(nullptr)}});
  out << doc.dump(2) << '\n';
}

void write_gnuplot(const RdReport& report, std::ostream& out) {
  std::vector<Scheme> schemes;
  for (Scheme s : {Scheme::proposed, Scheme::conventional})
    if (report.has_scheme(s)) schemes.push_back(s);
  out << "# rate";
  for (Scheme s : schemes) out << ' ' << to_string(s);
  out << "\n";
  std::vector<double> rates;
  for (const RdMean& m : report.means) rates.push_back(m.rate);
  std::sort(rates.begin(), rates.end());
  rates.erase(std::unique(rates.begin(), rates.end()), rates.end());
  for (double rate : rates) {
    out << format_double(rate);
    for (Scheme s : schemes) {
      std::string cell = "NaN";
      for (const RdMean& m : report.means)
        if (m.scheme == s && m.rate == rate && m.mean_psnr_db) cell = format_double(*m.mean_psnr_db);
      out << ' ' << cell;
    }
    out << '\n';
  }
}

RdReport read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::malformed, "report: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw Error(Errc::malformed, "report: unexpected CSV header");
  RdReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 10)
      throw Error(Errc::malformed, "report: line " + std::to_string(line_no) + " has " +
                                       std::to_string(f.size()) + " fields, expected 10");
    if (report.rows.empty()) report.image_id = f[0];
    RdRow r;
    try {
      r.scheme = parse_scheme(f[1]);
    } catch (const Error&) {
      throw Error(Errc::malformed, "report: unknown scheme '" + f[1] + "'");
    }
    r.rate = parse_double(f[2], "rate");
    r.trial = parse_int<int>(f[3], "trial");
    r.seed = parse_int<std::uint64_t>(f[4], "seed");
    r.psnr_db = parse_double(f[5], "psnr_db");
    r.mse = parse_double(f[6], "mse");
    r.iterations = parse_int<int>(f[7], "iterations");
    r.wall_ms = parse_double(f[8], "wall_ms");
    r.status = parse_cell_status(f[9]);
    if (!(r.rate > 0.0 && r.rate <= 1.0))
      throw Error(Errc::malformed, "report: rate out of range on line " + std::to_string(line_no));
    if (r.status == CellStatus::ok && !std::isfinite(r.psnr_db))
      throw Error(Errc::malformed, "report: ok row without PSNR on line " + std::to_string(line_no));
    report.rows.push_back(std::move(r));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), row_order);
  report.means = aggregate(report.rows);
  return report;
}

namespace {

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  fn(out);
  if (!out) throw Error(Errc::io, "error writing '" + path.string() + "'");
}

}  // namespace

void write_csv(const RdReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& o) { write_csv(report, o); });
}

void write_json(const RdReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& o) { write_json(report, o); });
}

void write_gnuplot(const RdReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& o) { write_gnuplot(report, o); });
}

RdReport read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::not_found, "cannot open report '" + path.string() + "'");
  return read_csv(in);
}

}  // namespace lcs
