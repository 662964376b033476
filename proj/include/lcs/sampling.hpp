// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lcs/imaging.hpp"

namespace lcs {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Identifies the generator behind a SamplingMatrix: 64-bit Mersenne Twister
// (std::mt19937_64) feeding a Box-Muller transform, followed by
// Householder row orthonormalization with a positive-diagonal sign fix.
// Bump this when any of those steps changes the produced bytes.
inline constexpr std::uint16_t kPrngMt19937BoxMuller = 1;

// Upper bound on M x N entries a single dense operator may hold (512 MiB of
// doubles). Line operators never come close; whole-image operators do.
inline constexpr std::uint64_t kDefaultMaxMatrixEntries = std::uint64_t{1} << 26;

/// M = round(rate * n), half up.
std::size_t measurement_count(double rate, std::size_t n);

/// Seeded Gaussian measurement operator with orthonormal rows.
class SamplingMatrix {
 public:
  std::size_t m() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t n() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
  std::uint64_t seed() const noexcept { return seed_; }
  double rate() const noexcept { return static_cast<double>(m()) / static_cast<double>(n()); }

  const RowMatrix& entries() const noexcept { return entries_; }
  std::span<const double> row(std::size_t j) const;

  /// y = Phi x for one signal of length n.
  std::vector<double> apply(std::span<const double> x) const;
  /// x = Phi^T y for one measurement vector of length m.
  std::vector<double> apply_transpose(std::span<const double> y) const;

  /// Rebuild the operator from its header fields. Deterministic in
  /// (seed, m, n).
  /// Wraps caller-supplied rows; they must be orthonormal to 1e-10.
  static SamplingMatrix from_rows(RowMatrix rows, std::uint64_t seed = 0);

  static SamplingMatrix regenerate(std::size_t m, std::size_t n, std::uint64_t seed,
                                   std::uint64_t max_entries = kDefaultMaxMatrixEntries);

 private:
  SamplingMatrix(RowMatrix entries, std::uint64_t seed)
      : entries_(std::move(entries)), seed_(seed) {}

  RowMatrix entries_;
  std::uint64_t seed_;
};

SamplingMatrix generate_matrix(double rate, std::size_t n, std::uint64_t seed,
                               std::uint64_t max_entries = kDefaultMaxMatrixEntries);

/// Measurement vectors Y_i of every line plus what the decoder needs to
/// rebuild the operator.
struct EncodedSample {
  std::uint32_t source_rows = 0;
  std::uint32_t source_cols = 0;
  std::uint32_t line_len = 0;
  std::uint32_t m_per_line = 0;
  std::uint64_t seed = 0;
  std::uint16_t prng_id = kPrngMt19937BoxMuller;
  // num_lines x m_per_line, line-major.
  std::vector<double> measurements;

  std::size_t num_lines() const noexcept;
  std::span<const double> line(std::size_t i) const;
  std::uint64_t payload_bytes() const noexcept { return 8 * std::uint64_t{measurements.size()}; }
  /// (M * N) / (rows * cols).
  double achieved_rate() const noexcept;

  /// Throws Errc::dimension / Errc::malformed when the invariants do not hold.
  void validate() const;

  friend bool operator==(const EncodedSample&, const EncodedSample&) = default;
};

/// Incremental line encoder: feed lines in order, one at a time.
class LineEncoder {
 public:
  LineEncoder(const SamplingMatrix& matrix, std::size_t source_rows, std::size_t source_cols);

  /// Y_i = Phi X_i for the next line. Safe to call concurrently through
  /// encode_line() below; push() itself appends and is not.
  void push(std::span<const double> line);
  bool complete() const noexcept { return pushed_ == expected_; }
  std::size_t lines_pushed() const noexcept { return pushed_; }

  EncodedSample finish() &&;

  /// Stateless single-line encode.
  static std::vector<double> encode_line(const SamplingMatrix& matrix, std::span<const double> line);

 private:
  const SamplingMatrix* matrix_;
  EncodedSample sample_;
  std::size_t expected_;
  std::size_t pushed_ = 0;
};

EncodedSample encode_lines(const LineSet& lines, const SamplingMatrix& matrix);

/// Conventional baseline: one operator over the whole vectorized image.
EncodedSample encode_whole(const Image& image, double rate, std::uint64_t seed,
                           std::uint64_t max_entries = kDefaultMaxMatrixEntries);

/// sqrt(n) * max |<row_j(a), col_k(basis)>|.
double coherence(const SamplingMatrix& a, const RowMatrix& basis);

}  // namespace lcs
