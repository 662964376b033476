// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lcs/imaging.hpp"
#include "lcs/sampling.hpp"
#include "lcs/tvsolver.hpp"

namespace lcs {

// Reported for identical images so reports stay finite.
inline constexpr double kPsnrCapDb = 99.0;

double mse(const Image& reference, const Image& candidate);
double psnr(const Image& reference, const Image& candidate);

enum class Scheme { proposed, conventional };
const char* to_string(Scheme scheme) noexcept;
Scheme parse_scheme(const std::string& name);

enum class CellStatus { ok, skipped_capacity, diverged, failed };
const char* to_string(CellStatus status) noexcept;
CellStatus parse_cell_status(const std::string& name);

struct RdRow {
  Scheme scheme = Scheme::proposed;
  double rate = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  CellStatus status = CellStatus::ok;
  double psnr_db = 0.0;
  double mse = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  std::string message;
};

struct RdMean {
  Scheme scheme = Scheme::proposed;
  double rate = 0.0;
  int trials_ok = 0;
  std::optional<double> mean_psnr_db;  // empty when no trial succeeded
};

struct RdReport {
  std::string image_id;
  std::vector<RdRow> rows;   // sorted by (scheme, rate, trial)
  std::vector<RdMean> means; // sorted by (scheme, rate)

  std::vector<double> rates(Scheme scheme) const;
  bool has_scheme(Scheme scheme) const;
};

struct SweepOptions {
  std::vector<double> rates{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  int trials = 5;
  std::uint64_t base_seed = 0;
  std::vector<Scheme> schemes{Scheme::proposed, Scheme::conventional};
  std::size_t line_len = 0;  // 0: one line per image row
  SolverConfig solver;
  std::uint64_t max_entries = kDefaultMaxMatrixEntries;
  int jobs = 1;

  void validate() const;
};

/// Called once per successful cell with the clamped reconstruction.
using CellObserver = std::function<void(const RdRow&, const Image&)>;

/// Rate sweep: every (scheme, rate, trial) cell is encoded with seed
/// base_seed + trial, reconstructed, and scored. Cell failures are recorded in
/// the row, not thrown.
RdReport rd_sweep(const Image& image, const std::string& image_id, const SweepOptions& options,
                  const CellObserver& observer = {});

/// Recomputes the per-(scheme, rate) means from the detail rows.
std::vector<RdMean> aggregate(const std::vector<RdRow>& rows);

struct RateGain {
  double rate = 0.0;
  double gain_db = 0.0;
};

/// Per-rate mean PSNR of scheme_a in a minus that of scheme_b in b.
std::vector<RateGain> compare_report(const RdReport& a, Scheme scheme_a, const RdReport& b,
                                     Scheme scheme_b);

void write_csv(const RdReport& report, std::ostream& out);
void write_json(const RdReport& report, std::ostream& out);
/// Whitespace-separated columns: rate, then one mean-PSNR column per scheme.
void write_gnuplot(const RdReport& report, std::ostream& out);
RdReport read_csv(std::istream& in);

void write_csv(const RdReport& report, const std::filesystem::path& path);
void write_json(const RdReport& report, const std::filesystem::path& path);
void write_gnuplot(const RdReport& report, const std::filesystem::path& path);
RdReport read_csv(const std::filesystem::path& path);

}  // namespace lcs
