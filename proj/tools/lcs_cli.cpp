// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the C API: encode, decode, evaluate, compare.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcs/lcs.h"

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAllCellsFailed = 13;

// Library status n (1..10) exits with n + 2; see README.
int exit_code(lcs_status status) {
  if (status == LCS_OK) return 0;
  if (status >= LCS_ERR_INVALID_ARGUMENT && status <= LCS_ERR_MISMATCH) return static_cast<int>(status) + 2;
  return kExitInternal;
}

int report_error(lcs_status status) {
  std::fprintf(stderr, "lcs: %s: %s\n", lcs_status_name(status), lcs_last_error());
  return exit_code(status);
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ImagePtr = std::unique_ptr<lcs_image, Deleter<lcs_image, lcs_image_free>>;
using SamplePtr = std::unique_ptr<lcs_sample, Deleter<lcs_sample, lcs_sample_free>>;
using ResultPtr = std::unique_ptr<lcs_result, Deleter<lcs_result, lcs_result_free>>;
using ReportPtr = std::unique_ptr<lcs_report, Deleter<lcs_report, lcs_report_free>>;
using GainsPtr = std::unique_ptr<lcs_gains, Deleter<lcs_gains, lcs_gains_free>>;

const auto kRate = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        if (used != s.size()) return "not a number: " + s;
      } catch (const std::exception&) {
        return "not a number: " + s;
      }
      if (!(v > 0.0 && v <= 1.0)) return "rate must lie in (0, 1], got " + s;
      return {};
    },
    "RATE in (0,1]");

const auto kPositive = CLI::Validator(
    [](std::string& s) -> std::string {
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v) && v > 0.0) return {};
      } catch (const std::exception&) {
      }
      return "must be a positive number, got " + s;
    },
    "POSITIVE");

struct SolverFlags {
  lcs_solver_config config{};
  std::string tv = "anisotropic";

  SolverFlags() { lcs_solver_config_default(&config); }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lambda", config.lambda, "Measurement fidelity weight")->check(kPositive);
    cmd->add_option("--beta", config.beta, "Splitting penalty")->check(kPositive);
    cmd->add_option("--tol", config.tol, "Relative-change stopping tolerance")->check(kPositive);
    cmd->add_option("--max-outer", config.max_outer, "Outer iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--max-inner", config.max_inner, "Inner step cap per outer iteration")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tv", tv, "TV flavor")->check(CLI::IsMember({"anisotropic", "isotropic"}));
    cmd->add_option("--threads", config.threads, "Threads for operator products")
        ->check(CLI::PositiveNumber);
  }

  lcs_solver_config resolve() {
    config.tv_flavor = tv == "isotropic" ? LCS_TV_ISOTROPIC : LCS_TV_ANISOTROPIC;
    return config;
  }
};

std::vector<double> parse_rates(const std::string& list) {
  std::vector<double> rates;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string check = item;
    if (const std::string err = kRate(check); !err.empty()) throw CLI::ValidationError("--rates", err);
    rates.push_back(std::stod(item));
  }
  if (rates.empty()) throw CLI::ValidationError("--rates", "empty list");
  return rates;
}

unsigned parse_schemes(const std::string& list) {
  unsigned bits = 0;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "proposed")
      bits |= LCS_SCHEME_PROPOSED;
    else if (item == "conventional")
      bits |= LCS_SCHEME_CONVENTIONAL;
    else
      throw CLI::ValidationError("--schemes", "unknown scheme '" + item + "'");
  }
  if (bits == 0) throw CLI::ValidationError("--schemes", "empty list");
  return bits;
}

unsigned scheme_bit(const std::string& name) {
  return name == "proposed" ? LCS_SCHEME_PROPOSED : LCS_SCHEME_CONVENTIONAL;
}

const char* scheme_name(unsigned bit) { return bit == LCS_SCHEME_PROPOSED ? "proposed" : "conventional"; }

std::string with_suffix(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

// --- encode -----------------------------------------------------------------

struct EncodeArgs {
  std::string input;
  std::string output;
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::size_t line_len = 0;
};

int run_encode(const EncodeArgs& a) {
  lcs_image* raw_image = nullptr;
  if (auto s = lcs_image_load(a.input.c_str(), &raw_image); s != LCS_OK) return report_error(s);
  ImagePtr image(raw_image);

  lcs_sample* raw_sample = nullptr;
  if (auto s = lcs_encode_lines(image.get(), a.rate, a.seed, a.line_len, &raw_sample); s != LCS_OK)
    return report_error(s);
  SamplePtr sample(raw_sample);

  const std::string out = a.output.empty() ? with_suffix(a.input, ".lcs") : a.output;
  if (auto s = lcs_sample_write(sample.get(), out.c_str()); s != LCS_OK) return report_error(s);

  std::printf("wrote %s\n", out.c_str());
  std::printf("image          %ux%u\n", lcs_sample_rows(sample.get()), lcs_sample_cols(sample.get()));
  std::printf("line length    %u\n", lcs_sample_line_len(sample.get()));
  std::printf("M per line     %u\n", lcs_sample_m_per_line(sample.get()));
  std::printf("N lines        %zu\n", lcs_sample_num_lines(sample.get()));
  std::printf("achieved rate  %.6f\n", lcs_sample_achieved_rate(sample.get()));
  std::printf("payload bytes  %llu\n", static_cast<unsigned long long>(lcs_sample_payload_bytes(sample.get())));
  std::printf("seed           %llu\n", static_cast<unsigned long long>(lcs_sample_seed(sample.get())));
  return 0;
}

// --- decode -----------------------------------------------------------------

struct DecodeArgs {
  std::string input;
  std::string output;
  std::string trace;
  SolverFlags solver;
};

int run_decode(DecodeArgs& a) {
  lcs_sample* raw_sample = nullptr;
  if (auto s = lcs_sample_read(a.input.c_str(), &raw_sample); s != LCS_OK) return report_error(s);
  SamplePtr sample(raw_sample);

  const lcs_solver_config config = a.solver.resolve();
  lcs_result* raw_result = nullptr;
  if (auto s = lcs_reconstruct(sample.get(), &config, &raw_result); s != LCS_OK) {
    if (s == LCS_ERR_DIVERGENCE)
      std::fprintf(stderr, "lcs: diverged at outer iteration %d\n", lcs_last_divergence_iteration());
    return report_error(s);
  }
  ResultPtr result(raw_result);

  if (auto s = lcs_image_save(lcs_result_image(result.get()), a.output.c_str()); s != LCS_OK)
    return report_error(s);
  if (!a.trace.empty()) {
    std::ofstream trace(a.trace, std::ios::trunc);
    if (!trace) {
      std::fprintf(stderr, "lcs: cannot write trace '%s'\n", a.trace.c_str());
      return exit_code(LCS_ERR_IO);
    }
    trace << "iteration,objective\n";
    const double* values = lcs_result_trace(result.get());
    trace.precision(17);
    for (std::size_t i = 0; i < lcs_result_trace_len(result.get()); ++i)
      trace << i + 1 << ',' << values[i] << '\n';
  }
  std::printf("wrote %s\n", a.output.c_str());
  std::printf("iterations     %d\n", lcs_result_iterations(result.get()));
  std::printf("rel change     %.3e\n", lcs_result_rel_change(result.get()));
  return 0;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string input;
  std::string rates = "0.05,0.1,0.15,0.2,0.25,0.3";
  int trials = 5;
  std::uint64_t seed = 0;
  std::string schemes = "proposed,conventional";
  std::string out = "report.csv";
  std::string image_id;
  std::size_t line_len = 0;
  std::uint64_t max_entries = lcs_default_max_entries();
  int jobs = 1;
  SolverFlags solver;
};

int run_evaluate(EvaluateArgs& a) {
  const std::vector<double> rates = parse_rates(a.rates);
  lcs_image* raw_image = nullptr;
  if (auto s = lcs_image_load(a.input.c_str(), &raw_image); s != LCS_OK) return report_error(s);
  ImagePtr image(raw_image);

  lcs_eval_options options;
  lcs_eval_options_default(&options);
  options.rates = rates.data();
  options.num_rates = rates.size();
  options.trials = a.trials;
  options.base_seed = a.seed;
  options.schemes = parse_schemes(a.schemes);
  options.line_len = a.line_len;
  options.max_entries = a.max_entries;
  options.jobs = a.jobs;
  options.solver = a.solver.resolve();

  const std::string id = a.image_id.empty() ? std::filesystem::path(a.input).stem().string() : a.image_id;
  const std::string recon_dir = with_suffix(a.out, "_recon");
  lcs_report* raw_report = nullptr;
  if (auto s = lcs_evaluate(image.get(), id.c_str(), &options, recon_dir.c_str(), &raw_report); s != LCS_OK)
    return report_error(s);
  ReportPtr report(raw_report);

  const std::string json = with_suffix(a.out, ".json");
  const std::string dat = with_suffix(a.out, ".dat");
  for (auto [status, path] : {std::pair{lcs_report_write_csv(report.get(), a.out.c_str()), a.out},
                              std::pair{lcs_report_write_json(report.get(), json.c_str()), json},
                              std::pair{lcs_report_write_gnuplot(report.get(), dat.c_str()), dat}}) {
    if (status != LCS_OK) return report_error(status);
    std::printf("wrote %s\n", path.c_str());
  }
  std::printf("reconstructions in %s\n\n", recon_dir.c_str());

  std::printf("%-13s %6s %10s\n", "scheme", "rate", "mean dB");
  for (std::size_t i = 0; i < lcs_report_mean_count(report.get()); ++i) {
    unsigned scheme = 0;
    double rate = 0.0, mean = 0.0;
    lcs_report_mean(report.get(), i, &scheme, &rate, &mean);
    if (std::isnan(mean))
      std::printf("%-13s %6.3g %10s\n", scheme_name(scheme), rate, "-");
    else
      std::printf("%-13s %6.3g %10.2f\n", scheme_name(scheme), rate, mean);
  }
  const std::size_t ok = lcs_report_ok_count(report.get());
  std::printf("\n%zu of %zu cells succeeded\n", ok, lcs_report_row_count(report.get()));
  return ok == 0 ? kExitAllCellsFailed : 0;
}

// --- compare ----------------------------------------------------------------

struct CompareArgs {
  std::string report_a;
  std::string report_b;
  std::string scheme_a;
  std::string scheme_b;
  std::string out;
};

int run_compare(const CompareArgs& a) {
  lcs_report* raw_a = nullptr;
  if (auto s = lcs_report_read_csv(a.report_a.c_str(), &raw_a); s != LCS_OK) return report_error(s);
  ReportPtr ra(raw_a);
  lcs_report* raw_b = nullptr;
  if (auto s = lcs_report_read_csv(a.report_b.c_str(), &raw_b); s != LCS_OK) return report_error(s);
  ReportPtr rb(raw_b);

  // Defaults: proposed from A when present, conventional from B when present.
  const unsigned in_a = lcs_report_schemes(ra.get());
  const unsigned in_b = lcs_report_schemes(rb.get());
  const unsigned sa = !a.scheme_a.empty() ? scheme_bit(a.scheme_a)
                      : (in_a & LCS_SCHEME_PROPOSED) ? unsigned{LCS_SCHEME_PROPOSED} : unsigned{LCS_SCHEME_CONVENTIONAL};
  const unsigned sb = !a.scheme_b.empty() ? scheme_bit(a.scheme_b)
                      : (in_b & LCS_SCHEME_CONVENTIONAL) ? unsigned{LCS_SCHEME_CONVENTIONAL} : unsigned{LCS_SCHEME_PROPOSED};

  lcs_gains* raw_gains = nullptr;
  if (auto s = lcs_compare(ra.get(), sa, rb.get(), sb, &raw_gains); s != LCS_OK) return report_error(s);
  GainsPtr gains(raw_gains);

  std::printf("gain = %s(%s) - %s(%s)\n", scheme_name(sa), a.report_a.c_str(), scheme_name(sb),
              a.report_b.c_str());
  std::printf("%6s %9s\n", "rate", "gain dB");
  for (std::size_t i = 0; i < lcs_gains_count(gains.get()); ++i)
    std::printf("%6.3g %9.2f\n", lcs_gains_rate(gains.get(), i), lcs_gains_db(gains.get(), i));
  if (!a.out.empty()) {
    if (auto s = lcs_gains_write_csv(gains.get(), a.out.c_str()); s != LCS_OK) return report_error(s);
    std::printf("wrote %s\n", a.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-based compressive sensing codec for grayscale images"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(lcs_version()));

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Sample a PGM image line by line into an .lcs file");
  encode->add_option("input", enc.input, "Input PGM (P5, maxval 255)")->required();
  encode->add_option("output", enc.output, "Output .lcs file (default: input with .lcs extension)");
  encode->add_option("--rate", enc.rate, "Sampling rate M/L")->required()->check(kRate);
  encode->add_option("--seed", enc.seed, "Measurement matrix seed")->envname("LCS_SEED");
  encode->add_option("--line-len", enc.line_len, "Pixels per line (default: image width)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 31));

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "Reconstruct a PGM image from an .lcs file");
  decode->add_option("input", dec.input, "Input .lcs file")->required();
  decode->add_option("--out", dec.output, "Output PGM")->required();
  decode->add_option("--trace", dec.trace, "Write per-iteration objective values to this CSV");
  dec.solver.add_to(decode);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Rate-distortion sweep over rates, trials and schemes");
  evaluate->add_option("input", ev.input, "Input PGM")->required();
  evaluate->add_option("--rates", ev.rates, "Comma-separated sampling rates");
  evaluate->add_option("--trials", ev.trials, "Trials per rate; trial t uses seed + t")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", ev.seed, "Base seed")->envname("LCS_SEED");
  evaluate->add_option("--schemes", ev.schemes, "Comma-separated: proposed, conventional");
  evaluate->add_option("--out", ev.out, "CSV report; .json and .dat siblings are written too");
  evaluate->add_option("--image-id", ev.image_id, "Label in the report (default: input file stem)");
  evaluate->add_option("--line-len", ev.line_len, "Pixels per line (default: image width)");
  evaluate->add_option("--max-entries", ev.max_entries, "Entry cap for whole-image operators")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--jobs", ev.jobs, "Cells evaluated concurrently")->check(CLI::PositiveNumber);
  ev.solver.add_to(evaluate);

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Per-rate mean PSNR gain of report A over report B");
  compare->add_option("report_a", cmp.report_a, "CSV report A")->required();
  compare->add_option("report_b", cmp.report_b, "CSV report B")->required();
  compare->add_option("--scheme-a", cmp.scheme_a, "Scheme taken from A (default: proposed if present)")
      ->check(CLI::IsMember({"proposed", "conventional"}));
  compare->add_option("--scheme-b", cmp.scheme_b, "Scheme taken from B (default: conventional if present)")
      ->check(CLI::IsMember({"proposed", "conventional"}));
  compare->add_option("--out", cmp.out, "Also write the gains to this CSV");

  try {
    app.parse(argc, argv);
    if (encode->parsed()) return run_encode(enc);
    if (decode->parsed()) return run_decode(dec);
    if (evaluate->parsed()) return run_evaluate(ev);
    if (compare->parsed()) return run_compare(cmp);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lcs: %s\n", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
