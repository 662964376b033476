// SPDX-License-Identifier: Apache-2.0

#include "lcs/lcs.h"

#include <charconv>
#include <cmath>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <optional>
#include <string>

#include "lcs/codec.hpp"
#include "lcs/error.hpp"
#include "lcs/imaging.hpp"
#include "lcs/metrics.hpp"
#include "lcs/sampling.hpp"
#include "lcs/tvsolver.hpp"

struct lcs_image {
  lcs::Image value;
};

struct lcs_sample {
  lcs::EncodedSample value;
};

struct lcs_result {
  lcs_image image;
  lcs::SolverState state;
};

struct lcs_report {
  lcs::RdReport value;
};

struct lcs_gains {
  std::vector<lcs::RateGain> value;
};

namespace {

thread_local std::string last_error;
thread_local int last_divergence = 0;

lcs_status to_status(lcs::Errc code) {
  switch (code) {
    case lcs::Errc::invalid_argument: return LCS_ERR_INVALID_ARGUMENT;
    case lcs::Errc::dimension: return LCS_ERR_DIMENSION;
    case lcs::Errc::not_found: return LCS_ERR_NOT_FOUND;
    case lcs::Errc::io: return LCS_ERR_IO;
    case lcs::Errc::malformed: return LCS_ERR_MALFORMED;
    case lcs::Errc::unsupported: return LCS_ERR_UNSUPPORTED;
    case lcs::Errc::truncated: return LCS_ERR_TRUNCATED;
    case lcs::Errc::capacity: return LCS_ERR_CAPACITY;
    case lcs::Errc::divergence: return LCS_ERR_DIVERGENCE;
    case lcs::Errc::mismatch: return LCS_ERR_MISMATCH;
  }
  return LCS_ERR_INTERNAL;
}

lcs_status fail(lcs_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class Fn>
lcs_status guarded(Fn&& fn) noexcept {
  last_error.clear();
  last_divergence = 0;
  try {
    fn();
    return LCS_OK;
  } catch (const lcs::DivergenceError& e) {
    last_divergence = e.iteration();
    return fail(LCS_ERR_DIVERGENCE, e.what());
  } catch (const lcs::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LCS_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return fail(LCS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LCS_ERR_INTERNAL, "unknown exception");
  }
}

template <class T>
void require(const T* p, const char* name) {
  if (p == nullptr) throw lcs::Error(lcs::Errc::invalid_argument, std::string(name) + " is null");
}

lcs::SolverConfig from_c(const lcs_solver_config& c) {
  lcs::SolverConfig s;
  s.lambda = c.lambda;
  s.beta = c.beta;
  s.max_outer = c.max_outer;
  s.max_inner = c.max_inner;
  s.tol = c.tol;
  s.tv_flavor = c.tv_flavor == LCS_TV_ISOTROPIC ? lcs::TvFlavor::isotropic : lcs::TvFlavor::anisotropic;
  s.threads = c.threads;
  return s;
}

unsigned scheme_bit(lcs::Scheme s) {
  return s == lcs::Scheme::proposed ? LCS_SCHEME_PROPOSED : LCS_SCHEME_CONVENTIONAL;
}

lcs::Scheme scheme_from_bit(unsigned bit) {
  if (bit == LCS_SCHEME_PROPOSED) return lcs::Scheme::proposed;
  if (bit == LCS_SCHEME_CONVENTIONAL) return lcs::Scheme::conventional;
  throw lcs::Error(lcs::Errc::invalid_argument, "scheme must be exactly one LCS_SCHEME_* value");
}

std::string rate_label(double rate) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, rate);
  return std::string(buf, res.ptr);
}

}  // namespace

extern "C" {

const char* lcs_version(void) { return "1.0.0"; }

const char* lcs_last_error(void) { return last_error.c_str(); }

const char* lcs_status_name(lcs_status status) {
  switch (status) {
    case LCS_OK: return "ok";
    case LCS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LCS_ERR_DIMENSION: return "dimension mismatch";
    case LCS_ERR_NOT_FOUND: return "not found";
    case LCS_ERR_IO: return "i/o error";
    case LCS_ERR_MALFORMED: return "malformed data";
    case LCS_ERR_UNSUPPORTED: return "unsupported format";
    case LCS_ERR_TRUNCATED: return "truncated data";
    case LCS_ERR_CAPACITY: return "capacity exceeded";
    case LCS_ERR_DIVERGENCE: return "solver diverged";
    case LCS_ERR_MISMATCH: return "incompatible inputs";
    case LCS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

lcs_status lcs_image_create(size_t rows, size_t cols, const double* pixels, lcs_image** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    lcs::Image image(rows, cols);
    if (pixels != nullptr) std::copy(pixels, pixels + rows * cols, image.pixels().begin());
    *out = new lcs_image{std::move(image)};
  });
}

lcs_status lcs_image_load(const char* path, lcs_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new lcs_image{lcs::load_image(path)};
  });
}

lcs_status lcs_image_save(const lcs_image* image, const char* path) {
  return guarded([&] {
    require(image, "image");
    require(path, "path");
    lcs::save_image(image->value, path);
  });
}

size_t lcs_image_rows(const lcs_image* image) { return image ? image->value.rows() : 0; }
size_t lcs_image_cols(const lcs_image* image) { return image ? image->value.cols() : 0; }
const double* lcs_image_pixels(const lcs_image* image) {
  return image ? image->value.pixels().data() : nullptr;
}
void lcs_image_free(lcs_image* image) { delete image; }

lcs_status lcs_psnr(const lcs_image* reference, const lcs_image* candidate, double* out_db) {
  return guarded([&] {
    require(reference, "reference");
    require(candidate, "candidate");
    require(out_db, "out_db");
    *out_db = lcs::psnr(reference->value, candidate->value);
  });
}

size_t lcs_measurement_count(double rate, size_t n) {
  try {
    return lcs::measurement_count(rate, n);
  } catch (const std::exception& e) {
    last_error = e.what();
    return 0;
  }
}

lcs_status lcs_encode_lines(const lcs_image* image, double rate, uint64_t seed, size_t line_len,
                            lcs_sample** out) {
  return guarded([&] {
    require(image, "image");
    require(out, "out");
    *out = nullptr;
    const size_t len = line_len == 0 ? image->value.cols() : line_len;
    const lcs::LineSet lines = lcs::to_lines(image->value, len);
    const lcs::SamplingMatrix matrix = lcs::generate_matrix(rate, len, seed);
    *out = new lcs_sample{lcs::encode_lines(lines, matrix)};
  });
}

lcs_status lcs_encode_whole(const lcs_image* image, double rate, uint64_t seed,
                            uint64_t max_entries, lcs_sample** out) {
  return guarded([&] {
    require(image, "image");
    require(out, "out");
    *out = nullptr;
    const uint64_t cap = max_entries == 0 ? lcs::kDefaultMaxMatrixEntries : max_entries;
    *out = new lcs_sample{lcs::encode_whole(image->value, rate, seed, cap)};
  });
}

uint64_t lcs_default_max_entries(void) { return lcs::kDefaultMaxMatrixEntries; }

uint32_t lcs_sample_rows(const lcs_sample* s) { return s ? s->value.source_rows : 0; }
uint32_t lcs_sample_cols(const lcs_sample* s) { return s ? s->value.source_cols : 0; }
uint32_t lcs_sample_line_len(const lcs_sample* s) { return s ? s->value.line_len : 0; }
uint32_t lcs_sample_m_per_line(const lcs_sample* s) { return s ? s->value.m_per_line : 0; }
size_t lcs_sample_num_lines(const lcs_sample* s) { return s ? s->value.num_lines() : 0; }
uint64_t lcs_sample_seed(const lcs_sample* s) { return s ? s->value.seed : 0; }
uint64_t lcs_sample_payload_bytes(const lcs_sample* s) { return s ? s->value.payload_bytes() : 0; }
double lcs_sample_achieved_rate(const lcs_sample* s) { return s ? s->value.achieved_rate() : 0.0; }
const double* lcs_sample_measurements(const lcs_sample* s) {
  return s ? s->value.measurements.data() : nullptr;
}

lcs_status lcs_sample_serialize(const lcs_sample* sample, uint8_t** bytes, size_t* len) {
  return guarded([&] {
    require(sample, "sample");
    require(bytes, "bytes");
    require(len, "len");
    *bytes = nullptr;
    *len = 0;
    const auto data = lcs::serialize(sample->value);
    auto* buffer = static_cast<uint8_t*>(std::malloc(data.size()));
    if (buffer == nullptr) throw std::bad_alloc();
    std::memcpy(buffer, data.data(), data.size());
    *bytes = buffer;
    *len = data.size();
  });
}

lcs_status lcs_sample_deserialize(const uint8_t* bytes, size_t len, lcs_sample** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (bytes == nullptr && len != 0) throw lcs::Error(lcs::Errc::invalid_argument, "bytes is null");
    *out = new lcs_sample{lcs::deserialize(std::span<const uint8_t>(bytes, len))};
  });
}

lcs_status lcs_sample_write(const lcs_sample* sample, const char* path) {
  return guarded([&] {
    require(sample, "sample");
    require(path, "path");
    lcs::write_sample(sample->value, path);
  });
}

lcs_status lcs_sample_read(const char* path, lcs_sample** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new lcs_sample{lcs::read_sample(path)};
  });
}

void lcs_sample_free(lcs_sample* sample) { delete sample; }
void lcs_buffer_free(void* buffer) { std::free(buffer); }

void lcs_solver_config_default(lcs_solver_config* config) {
  if (config == nullptr) return;
  const lcs::SolverConfig d;
  config->lambda = d.lambda;
  config->beta = d.beta;
  config->max_outer = d.max_outer;
  config->max_inner = d.max_inner;
  config->tol = d.tol;
  config->tv_flavor = LCS_TV_ANISOTROPIC;
  config->threads = d.threads;
}

lcs_status lcs_reconstruct(const lcs_sample* sample, const lcs_solver_config* config,
                           lcs_result** out) {
  return guarded([&] {
    require(sample, "sample");
    require(out, "out");
    *out = nullptr;
    const lcs::SolverConfig cfg = config ? from_c(*config) : lcs::SolverConfig{};
    lcs::Reconstruction rec = lcs::reconstruct(sample->value, cfg);
    *out = new lcs_result{lcs_image{std::move(rec.image)}, std::move(rec.state)};
  });
}

const lcs_image* lcs_result_image(const lcs_result* r) { return r ? &r->image : nullptr; }
int lcs_result_iterations(const lcs_result* r) { return r ? r->state.iterations : 0; }
double lcs_result_rel_change(const lcs_result* r) { return r ? r->state.final_rel_change : 0.0; }
size_t lcs_result_trace_len(const lcs_result* r) { return r ? r->state.objective_trace.size() : 0; }
const double* lcs_result_trace(const lcs_result* r) {
  return r ? r->state.objective_trace.data() : nullptr;
}
int lcs_last_divergence_iteration(void) { return last_divergence; }
void lcs_result_free(lcs_result* result) { delete result; }

void lcs_eval_options_default(lcs_eval_options* options) {
  if (options == nullptr) return;
  static const double kRates[] = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  options->rates = kRates;
  options->num_rates = sizeof kRates / sizeof kRates[0];
  options->trials = 5;
  options->base_seed = 0;
  options->schemes = LCS_SCHEME_PROPOSED | LCS_SCHEME_CONVENTIONAL;
  options->line_len = 0;
  options->max_entries = lcs::kDefaultMaxMatrixEntries;
  options->jobs = 1;
  lcs_solver_config_default(&options->solver);
}

lcs_status lcs_evaluate(const lcs_image* image, const char* image_id,
                        const lcs_eval_options* options, const char* recon_dir, lcs_report** out) {
  return guarded([&] {
    require(image, "image");
    require(options, "options");
    require(out, "out");
    *out = nullptr;
    if (options->num_rates > 0) require(options->rates, "options->rates");
    lcs::SweepOptions sweep;
    sweep.rates.assign(options->rates, options->rates + options->num_rates);
    sweep.trials = options->trials;
    sweep.base_seed = options->base_seed;
    sweep.schemes.clear();
    if (options->schemes & LCS_SCHEME_PROPOSED) sweep.schemes.push_back(lcs::Scheme::proposed);
    if (options->schemes & LCS_SCHEME_CONVENTIONAL) sweep.schemes.push_back(lcs::Scheme::conventional);
    sweep.line_len = options->line_len;
    sweep.max_entries = options->max_entries == 0 ? lcs::kDefaultMaxMatrixEntries : options->max_entries;
    sweep.jobs = options->jobs;
    sweep.solver = from_c(options->solver);

    lcs::CellObserver observer;
    std::optional<std::filesystem::path> dir;
    if (recon_dir != nullptr) {
      dir = recon_dir;
      std::error_code ec;
      std::filesystem::create_directories(*dir, ec);
      if (ec) throw lcs::Error(lcs::Errc::io, "cannot create '" + dir->string() + "': " + ec.message());
      observer = [&dir](const lcs::RdRow& row, const lcs::Image& rec) {
        if (row.trial != 0) return;
        lcs::save_image(rec, *dir / (std::string(lcs::to_string(row.scheme)) + "_" +
                                     rate_label(row.rate) + ".pgm"));
      };
    }
    *out = new lcs_report{lcs::rd_sweep(image->value, image_id ? image_id : "image", sweep, observer)};
  });
}

size_t lcs_report_row_count(const lcs_report* r) { return r ? r->value.rows.size() : 0; }

size_t lcs_report_ok_count(const lcs_report* r) {
  if (r == nullptr) return 0;
  size_t n = 0;
  for (const auto& row : r->value.rows) n += row.status == lcs::CellStatus::ok;
  return n;
}

size_t lcs_report_mean_count(const lcs_report* r) { return r ? r->value.means.size() : 0; }

lcs_status lcs_report_mean(const lcs_report* report, size_t i, unsigned* scheme, double* rate,
                           double* mean_psnr_db) {
  return guarded([&] {
    require(report, "report");
    if (i >= report->value.means.size())
      throw lcs::Error(lcs::Errc::dimension, "mean row index out of range");
    const lcs::RdMean& m = report->value.means[i];
    if (scheme) *scheme = scheme_bit(m.scheme);
    if (rate) *rate = m.rate;
    if (mean_psnr_db) *mean_psnr_db = m.mean_psnr_db.value_or(std::nan(""));
  });
}

lcs_status lcs_report_write_csv(const lcs_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    lcs::write_csv(report->value, std::filesystem::path(path));
  });
}

lcs_status lcs_report_write_json(const lcs_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    lcs::write_json(report->value, std::filesystem::path(path));
  });
}

lcs_status lcs_report_write_gnuplot(const lcs_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    lcs::write_gnuplot(report->value, std::filesystem::path(path));
  });
}

lcs_status lcs_report_read_csv(const char* path, lcs_report** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new lcs_report{lcs::read_csv(std::filesystem::path(path))};
  });
}

unsigned lcs_report_schemes(const lcs_report* report) {
  if (report == nullptr) return 0;
  unsigned bits = 0;
  for (const auto& m : report->value.means) bits |= scheme_bit(m.scheme);
  return bits;
}

void lcs_report_free(lcs_report* report) { delete report; }

lcs_status lcs_compare(const lcs_report* a, unsigned scheme_a, const lcs_report* b,
                       unsigned scheme_b, lcs_gains** out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = nullptr;
    *out = new lcs_gains{lcs::compare_report(a->value, scheme_from_bit(scheme_a), b->value,
                                             scheme_from_bit(scheme_b))};
  });
}

size_t lcs_gains_count(const lcs_gains* g) { return g ? g->value.size() : 0; }
double lcs_gains_rate(const lcs_gains* g, size_t i) {
  return g && i < g->value.size() ? g->value[i].rate : std::nan("");
}
double lcs_gains_db(const lcs_gains* g, size_t i) {
  return g && i < g->value.size() ? g->value[i].gain_db : std::nan("");
}

lcs_status lcs_gains_write_csv(const lcs_gains* gains, const char* path) {
  return guarded([&] {
    require(gains, "gains");
    require(path, "path");
    FILE* f = std::fopen(path, "w");
    if (f == nullptr) throw lcs::Error(lcs::Errc::io, std::string("cannot open '") + path + "' for writing");
    std::fprintf(f, "rate,gain_db\n");
    for (const auto& g : gains->value)
      std::fprintf(f, "%s,%.6f\n", rate_label(g.rate).c_str(), g.gain_db);
    if (std::fclose(f) != 0) throw lcs::Error(lcs::Errc::io, std::string("error writing '") + path + "'");
  });
}

void lcs_gains_free(lcs_gains* gains) { delete gains; }

}  // extern "C"
