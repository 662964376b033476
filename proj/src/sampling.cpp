// SPDX-License-Identifier: Apache-2.0

#include "lcs/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/QR>

#include "lcs/error.hpp"

namespace lcs {

namespace {

// Standard normal stream with a byte-stable definition: mt19937_64 words are
// turned into 53-bit uniforms and paired through Box-Muller.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
    const double u2 = static_cast<double>(engine_() >> 11) * kScale;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

void check_capacity(std::size_t m, std::size_t n, std::uint64_t max_entries) {
  const auto entries = static_cast<long double>(m) * static_cast<long double>(n);
  if (entries > static_cast<long double>(max_entries))
    throw Error(Errc::capacity, "measurement operator of " + std::to_string(m) + "x" +
                                    std::to_string(n) + " entries exceeds the cap of " +
                                    std::to_string(max_entries) + " entries");
}

}  // namespace

std::size_t measurement_count(double rate, std::size_t n) {
  if (!(rate > 0.0 && rate <= 1.0))
    throw Error(Errc::invalid_argument, "sampling rate must lie in (0, 1], got " + std::to_string(rate));
  if (n < 2) throw Error(Errc::invalid_argument, "signal length must be at least 2");
  const auto m = static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 0.5));
  if (m == 0)
    throw Error(Errc::invalid_argument, "rate " + std::to_string(rate) + " on length " +
                                            std::to_string(n) + " yields zero measurements");
  return std::min(m, n);
}

std::span<const double> SamplingMatrix::row(std::size_t j) const {
  if (j >= m()) throw Error(Errc::dimension, "matrix row out of range");
  return {entries_.data() + j * n(), n()};
}

std::vector<double> SamplingMatrix::apply(std::span<const double> x) const {
  if (x.size() != n())
    throw Error(Errc::dimension, "signal length " + std::to_string(x.size()) +
                                     " does not match operator width " + std::to_string(n()));
  std::vector<double> y(m());
  Eigen::Map<Eigen::VectorXd>(y.data(), m()) =
      entries_ * Eigen::Map<const Eigen::VectorXd>(x.data(), n());
  return y;
}

std::vector<double> SamplingMatrix::apply_transpose(std::span<const double> y) const {
  if (y.size() != m())
    throw Error(Errc::dimension, "measurement length " + std::to_string(y.size()) +
                                     " does not match operator height " + std::to_string(m()));
  std::vector<double> x(n());
  Eigen::Map<Eigen::VectorXd>(x.data(), n()) =
      entries_.transpose() * Eigen::Map<const Eigen::VectorXd>(y.data(), m());
  return x;
}

SamplingMatrix SamplingMatrix::regenerate(std::size_t m, std::size_t n, std::uint64_t seed,
                                          std::uint64_t max_entries) {
  if (n < 2) throw Error(Errc::invalid_argument, "signal length must be at least 2");
  if (m < 1 || m > n)
    throw Error(Errc::invalid_argument, "measurement count " + std::to_string(m) +
                                            " outside [1, " + std::to_string(n) + "]");
  check_capacity(m, n, max_entries);

  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(n);

  // Draw row-major so the stream order does not depend on storage order.
  Eigen::MatrixXd gaussian_t(cols, rows);  // G^T, column j = row j of G
  GaussianStream stream(seed);
  for (Eigen::Index j = 0; j < rows; ++j)
    for (Eigen::Index k = 0; k < cols; ++k) gaussian_t(k, j) = stream.next();

  // G^T = Q R; the rows of Phi are the columns of the thin Q, signed so that
  // diag(R) > 0. That makes Phi the Gram-Schmidt orthonormalization of G.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_t);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, rows);
  RowMatrix phi = q.transpose();
  const auto diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < rows; ++j)
    if (diag(j) < 0.0) phi.row(j) *= -1.0;
  return SamplingMatrix(std::move(phi), seed);
}

SamplingMatrix SamplingMatrix::from_rows(RowMatrix rows, std::uint64_t seed) {
  if (rows.rows() < 1 || rows.cols() < 2 || rows.rows() > rows.cols())
    throw Error(Errc::dimension, "operator must be M x N with 1 <= M <= N and N >= 2");
  const RowMatrix gram = rows * rows.transpose();
  const double deviation =
      (gram - RowMatrix::Identity(rows.rows(), rows.rows())).cwiseAbs().maxCoeff();
  if (!(deviation < 1e-10))
    throw Error(Errc::invalid_argument, "operator rows are not orthonormal");
  return SamplingMatrix(std::move(rows), seed);
}

SamplingMatrix generate_matrix(double rate, std::size_t n, std::uint64_t seed,
                               std::uint64_t max_entries) {
  return SamplingMatrix::regenerate(measurement_count(rate, n), n, seed, max_entries);
}

std::size_t EncodedSample::num_lines() const noexcept {
  if (line_len == 0) return 0;
  return static_cast<std::size_t>(source_rows) * source_cols / line_len;
}

std::span<const double> EncodedSample::line(std::size_t i) const {
  if (i >= num_lines()) throw Error(Errc::dimension, "measurement line out of range");
  return std::span<const double>(measurements).subspan(i * m_per_line, m_per_line);
}

double EncodedSample::achieved_rate() const noexcept {
  const auto total = static_cast<double>(source_rows) * source_cols;
  return total > 0 ? static_cast<double>(measurements.size()) / total : 0.0;
}

void EncodedSample::validate() const {
  const std::uint64_t total = std::uint64_t{source_rows} * source_cols;
  if (total == 0) throw Error(Errc::dimension, "sample has an empty source image");
  if (line_len < 2 || total % line_len != 0)
    throw Error(Errc::dimension, "line length " + std::to_string(line_len) +
                                     " does not partition " + std::to_string(total) + " pixels");
  if (m_per_line < 1 || m_per_line > line_len)
    throw Error(Errc::dimension, "measurements per line " + std::to_string(m_per_line) +
                                     " outside [1, " + std::to_string(line_len) + "]");
  if (measurements.size() != num_lines() * m_per_line)
    throw Error(Errc::dimension, "sample holds " + std::to_string(measurements.size()) +
                                     " measurements, header implies " +
                                     std::to_string(num_lines() * m_per_line));
  for (double v : measurements)
    if (!std::isfinite(v)) throw Error(Errc::malformed, "non-finite measurement value");
}

LineEncoder::LineEncoder(const SamplingMatrix& matrix, std::size_t source_rows,
                         std::size_t source_cols)
    : matrix_(&matrix) {
  if (source_rows == 0 || source_cols == 0)
    throw Error(Errc::dimension, "empty source image");
  const std::size_t total = source_rows * source_cols;
  if (total % matrix.n() != 0)
    throw Error(Errc::dimension, "operator width " + std::to_string(matrix.n()) +
                                     " does not divide " + std::to_string(total) + " pixels");
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (source_rows > kMax || source_cols > kMax || matrix.n() > kMax)
    throw Error(Errc::dimension, "dimensions exceed 32-bit header fields");
  expected_ = total / matrix.n();
  sample_.source_rows = static_cast<std::uint32_t>(source_rows);
  sample_.source_cols = static_cast<std::uint32_t>(source_cols);
  sample_.line_len = static_cast<std::uint32_t>(matrix.n());
  sample_.m_per_line = static_cast<std::uint32_t>(matrix.m());
  sample_.seed = matrix.seed();
  sample_.measurements.reserve(expected_ * matrix.m());
}

std::vector<double> LineEncoder::encode_line(const SamplingMatrix& matrix,
                                             std::span<const double> line) {
  return matrix.apply(line);
}

void LineEncoder::push(std::span<const double> line) {
  if (pushed_ == expected_) throw Error(Errc::dimension, "all lines already encoded");
  const auto y = encode_line(*matrix_, line);
  sample_.measurements.insert(sample_.measurements.end(), y.begin(), y.end());
  ++pushed_;
}

EncodedSample LineEncoder::finish() && {
  if (!complete())
    throw Error(Errc::dimension, "encoder finished after " + std::to_string(pushed_) + " of " +
                                     std::to_string(expected_) + " lines");
  return std::move(sample_);
}

EncodedSample encode_lines(const LineSet& lines, const SamplingMatrix& matrix) {
  if (matrix.n() != lines.line_len())
    throw Error(Errc::dimension, "operator width " + std::to_string(matrix.n()) +
                                     " does not match line length " +
                                     std::to_string(lines.line_len()));
  LineEncoder encoder(matrix, lines.source_rows(), lines.source_cols());
  for (std::size_t i = 0; i < lines.num_lines(); ++i) encoder.push(lines.line(i));
  return std::move(encoder).finish();
}

EncodedSample encode_whole(const Image& image, double rate, std::uint64_t seed,
                           std::uint64_t max_entries) {
  const SamplingMatrix matrix = generate_matrix(rate, image.size(), seed, max_entries);
  LineEncoder encoder(matrix, image.rows(), image.cols());
  encoder.push(image.pixels());
  return std::move(encoder).finish();
}

double coherence(const SamplingMatrix& a, const RowMatrix& basis) {
  if (static_cast<std::size_t>(basis.rows()) != a.n())
    throw Error(Errc::dimension, "basis has " + std::to_string(basis.rows()) +
                                     " rows, operator width is " + std::to_string(a.n()));
  constexpr double kUnitTol = 1e-8;
  for (Eigen::Index k = 0; k < basis.cols(); ++k)
    if (std::abs(basis.col(k).norm() - 1.0) > kUnitTol)
      throw Error(Errc::invalid_argument, "basis column " + std::to_string(k) + " is not unit-norm");
  const RowMatrix products = a.entries() * basis;
  return std::sqrt(static_cast<double>(a.n())) * products.cwiseAbs().maxCoeff();
}

}  // namespace lcs
