// SPDX-License-Identifier: Apache-2.0

#include "lcs/tvsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "lcs/error.hpp"

namespace lcs {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

constexpr double kPeak = 255.0;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_size(std::span<const double> x, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0 || x.size() != rows * cols)
    throw Error(Errc::dimension, "vector of length " + std::to_string(x.size()) +
                                     " does not match a " + std::to_string(rows) + "x" +
                                     std::to_string(cols) + " grid");
}

// Runs fn(first, last) over [0, count) split into `threads` contiguous chunks.
template <class Fn>
void parallel_chunks(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2 * workers) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t first = 0; first < count; first += chunk)
    pool.emplace_back([&fn, first, last = std::min(count, first + chunk)] { fn(first, last); });
}

// Lines are multiplied in fixed blocks so results do not depend on the thread count.
constexpr std::size_t kLineBlock = 64;

template <typename Fn>
void for_line_blocks(std::size_t num_lines, int threads, Fn&& fn) {
  const std::size_t blocks = (num_lines + kLineBlock - 1) / kLineBlock;
  parallel_chunks(blocks, threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t b = first; b < last; ++b)
      fn(b * kLineBlock, std::min(num_lines, (b + 1) * kLineBlock));
  });
}

}  // namespace

GradientField grad(std::span<const double> x, std::size_t rows, std::size_t cols) {
  check_size(x, rows, cols);
  GradientField g(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = x.data() + r * cols;
    double* dx = g.dx.data() + r * cols;
    for (std::size_t c = 0; c + 1 < cols; ++c) dx[c] = row[c + 1] - row[c];
    if (r + 1 < rows) {
      const double* below = row + cols;
      double* dy = g.dy.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) dy[c] = below[c] - row[c];
    }
  }
  return g;
}

std::vector<double> grad_adjoint(const GradientField& g) {
  const std::size_t rows = g.rows, cols = g.cols;
  if (rows == 0 || cols == 0 || g.dx.size() != rows * cols || g.dy.size() != rows * cols)
    throw Error(Errc::dimension, "inconsistent gradient field shape");
  std::vector<double> out(rows * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* dx = g.dx.data() + r * cols;
    double* o = out.data() + r * cols;
    for (std::size_t c = 0; c + 1 < cols; ++c) {
      o[c] -= dx[c];
      o[c + 1] += dx[c];
    }
    if (r + 1 < rows) {
      const double* dy = g.dy.data() + r * cols;
      double* below = o + cols;
      for (std::size_t c = 0; c < cols; ++c) {
        o[c] -= dy[c];
        below[c] += dy[c];
      }
    }
  }
  return out;
}

double tv(std::span<const double> x, std::size_t rows, std::size_t cols, TvFlavor flavor) {
  const GradientField g = grad(x, rows, cols);
  double total = 0.0;
  if (flavor == TvFlavor::anisotropic) {
    for (std::size_t i = 0; i < g.dx.size(); ++i) total += std::abs(g.dx[i]) + std::abs(g.dy[i]);
  } else {
    for (std::size_t i = 0; i < g.dx.size(); ++i) total += std::hypot(g.dx[i], g.dy[i]);
  }
  return total;
}

double shrink(double v, double threshold) noexcept {
  const double mag = std::abs(v) - threshold;
  return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}

void shrink(GradientField& g, double threshold, TvFlavor flavor) {
  if (flavor == TvFlavor::anisotropic) {
    for (double& v : g.dx) v = shrink(v, threshold);
    for (double& v : g.dy) v = shrink(v, threshold);
    return;
  }
  for (std::size_t i = 0; i < g.dx.size(); ++i) {
    const double mag = std::hypot(g.dx[i], g.dy[i]);
    const double scale = mag > threshold ? (mag - threshold) / mag : 0.0;
    g.dx[i] *= scale;
    g.dy[i] *= scale;
  }
}

void SolverConfig::validate() const {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(lambda)) throw Error(Errc::invalid_argument, "lambda must be positive");
  if (!positive(beta)) throw Error(Errc::invalid_argument, "beta must be positive");
  if (!positive(tol)) throw Error(Errc::invalid_argument, "tol must be positive");
  if (max_outer < 1) throw Error(Errc::invalid_argument, "max_outer must be at least 1");
  if (max_inner < 1) throw Error(Errc::invalid_argument, "max_inner must be at least 1");
  if (threads < 1) throw Error(Errc::invalid_argument, "threads must be at least 1");
}

MeasurementOperator::MeasurementOperator(SamplingMatrix matrix, std::size_t rows,
                                         std::size_t cols, int threads)
    : matrix_(std::move(matrix)), rows_(rows), cols_(cols), threads_(std::max(1, threads)) {
  if (rows == 0 || cols == 0 || (rows * cols) % matrix_.n() != 0)
    throw Error(Errc::dimension, "operator width " + std::to_string(matrix_.n()) +
                                     " does not partition a " + std::to_string(rows) + "x" +
                                     std::to_string(cols) + " image");
  num_lines_ = rows * cols / matrix_.n();
}

MeasurementOperator MeasurementOperator::for_sample(const EncodedSample& sample,
                                                    std::uint64_t max_entries) {
  sample.validate();
  if (sample.prng_id != kPrngMt19937BoxMuller)
    throw Error(Errc::unsupported, "unknown generator id " + std::to_string(sample.prng_id));
  return MeasurementOperator(
      SamplingMatrix::regenerate(sample.m_per_line, sample.line_len, sample.seed, max_entries),
      sample.source_rows, sample.source_cols);
}

// Lines are consecutive length-L segments, so a row-major image buffer is an
// L x N column-major matrix whose columns are the lines; likewise the
// measurements form an M x N column-major matrix.
void MeasurementOperator::apply(std::span<const double> x, std::span<double> y) const {
  const auto l = static_cast<Eigen::Index>(matrix_.n());
  const auto m = static_cast<Eigen::Index>(matrix_.m());
  if (x.size() != signal_size() || y.size() != measurement_size())
    throw Error(Errc::dimension, "operator apply: size mismatch");
  for_line_blocks(num_lines_, threads_, [&](std::size_t first, std::size_t last) {
    const auto n = static_cast<Eigen::Index>(last - first);
    Eigen::Map<const Eigen::MatrixXd> lines(x.data() + first * l, l, n);
    Eigen::Map<Eigen::MatrixXd> out(y.data() + first * m, m, n);
    out.noalias() = matrix_.entries() * lines;
  });
}

void MeasurementOperator::adjoint(std::span<const double> y, std::span<double> x) const {
  const auto l = static_cast<Eigen::Index>(matrix_.n());
  const auto m = static_cast<Eigen::Index>(matrix_.m());
  if (x.size() != signal_size() || y.size() != measurement_size())
    throw Error(Errc::dimension, "operator adjoint: size mismatch");
  for_line_blocks(num_lines_, threads_, [&](std::size_t first, std::size_t last) {
    const auto n = static_cast<Eigen::Index>(last - first);
    Eigen::Map<const Eigen::MatrixXd> meas(y.data() + first * m, m, n);
    Eigen::Map<Eigen::MatrixXd> out(x.data() + first * l, l, n);
    out.noalias() = matrix_.entries().transpose() * meas;
  });
}

std::vector<double> MeasurementOperator::apply(std::span<const double> x) const {
  std::vector<double> y(measurement_size());
  apply(x, y);
  return y;
}

std::vector<double> MeasurementOperator::adjoint(std::span<const double> y) const {
  std::vector<double> x(signal_size());
  adjoint(y, x);
  return x;
}

std::vector<double> initialize(const EncodedSample& sample) {
  return MeasurementOperator::for_sample(sample).adjoint(sample.measurements);
}

double objective(const MeasurementOperator& op, std::span<const double> y,
                 std::span<const double> x, double lambda, TvFlavor flavor) {
  std::vector<double> residual = op.apply(x);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= y[i];
  return tv(x, op.rows(), op.cols(), flavor) + 0.5 * lambda * dot(residual, residual);
}

XSubproblem::XSubproblem(const MeasurementOperator& op, std::span<const double> y,
                         const GradientField& w, const GradientField& mult, double beta,
                         double lambda)
    : op_(&op), y_(y), target_(w), beta_(beta), lambda_(lambda) {
  if (y.size() != op.measurement_size())
    throw Error(Errc::dimension, "measurement vector does not match operator");
  if (w.rows != op.rows() || w.cols != op.cols() || mult.rows != op.rows() ||
      mult.cols != op.cols())
    throw Error(Errc::dimension, "split variables do not match image shape");
  for (std::size_t i = 0; i < target_.dx.size(); ++i) {
    target_.dx[i] -= mult.dx[i] / beta;
    target_.dy[i] -= mult.dy[i] / beta;
  }
}

double XSubproblem::splitting_value(std::span<const double> x) const {
  const GradientField g = grad(x, op_->rows(), op_->cols());
  double s = 0.0;
  for (std::size_t i = 0; i < g.dx.size(); ++i) {
    const double ex = g.dx[i] - target_.dx[i];
    const double ey = g.dy[i] - target_.dy[i];
    s += ex * ex + ey * ey;
  }
  return 0.5 * beta_ * s;
}

std::vector<double> XSubproblem::splitting_gradient(std::span<const double> x) const {
  GradientField g = grad(x, op_->rows(), op_->cols());
  for (std::size_t i = 0; i < g.dx.size(); ++i) {
    g.dx[i] = beta_ * (g.dx[i] - target_.dx[i]);
    g.dy[i] = beta_ * (g.dy[i] - target_.dy[i]);
  }
  return grad_adjoint(g);
}

double XSubproblem::value(std::span<const double> x) const {
  std::vector<double> residual = op_->apply(x);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= y_[i];
  return splitting_value(x) + 0.5 * lambda_ * dot(residual, residual);
}

std::vector<double> XSubproblem::gradient(std::span<const double> x) const {
  std::vector<double> residual = op_->apply(x);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = lambda_ * (residual[i] - y_[i]);
  std::vector<double> g = splitting_gradient(x);
  const std::vector<double> back = op_->adjoint(residual);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += back[i];
  return g;
}

// argmin_u lambda/2 ||A u - y||^2 + 1/(2 step) ||u - v||^2. Rows of A are
// orthonormal, so the solution moves v along A^T only.
void XSubproblem::fidelity_prox(std::vector<double>& v, double step) const {
  std::vector<double> residual = op_->apply(v);
  const double c = step * lambda_ / (1.0 + step * lambda_);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = c * (residual[i] - y_[i]);
  const std::vector<double> correction = op_->adjoint(residual);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= correction[i];
}

int XSubproblem::minimize(std::vector<double>& x, int max_steps) const {
  // ||D||^2 <= 8 for forward differences on a grid.
  const double min_step = 1.0 / (8.0 * beta_);
  const double max_step = 1e4 * min_step;
  double step = min_step;
  double s_val = splitting_value(x);
  std::vector<double> g = splitting_gradient(x);
  std::vector<double> candidate(x.size());
  std::vector<double> diff(x.size());

  int taken = 0;
  for (; taken < max_steps; ++taken) {
    double s_new = 0.0;
    while (true) {
      for (std::size_t i = 0; i < x.size(); ++i) candidate[i] = x[i] - step * g[i];
      fidelity_prox(candidate, step);
      for (std::size_t i = 0; i < x.size(); ++i) diff[i] = candidate[i] - x[i];
      s_new = splitting_value(candidate);
      const double bound = s_val + dot(g, diff) + dot(diff, diff) / (2.0 * step);
      if (step <= min_step || s_new <= bound + 1e-12 * std::abs(s_val)) break;
      step = std::max(min_step, 0.5 * step);
    }
    const double moved = dot(diff, diff);
    if (moved == 0.0) break;
    std::vector<double> g_new = splitting_gradient(candidate);
    double curvature = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) curvature += diff[i] * (g_new[i] - g[i]);
    // Barzilai-Borwein length for the next step.
    step = curvature > 0.0 ? std::clamp(moved / curvature, min_step, max_step) : min_step;
    x.swap(candidate);
    g.swap(g_new);
    s_val = s_new;
  }
  return taken;
}

Reconstruction reconstruct(const EncodedSample& sample, const SolverConfig& config,
                           std::uint64_t max_entries) {
  config.validate();
  MeasurementOperator op = MeasurementOperator::for_sample(sample, max_entries);
  if (config.threads > 1)
    op = MeasurementOperator(op.matrix(), op.rows(), op.cols(), config.threads);
  const std::size_t rows = op.rows(), cols = op.cols();
  // Solve on intensities scaled to [0, 1] so lambda and beta do not depend on
  // the pixel range.
  std::vector<double> y = sample.measurements;
  for (double& v : y) v /= kPeak;

  // `iterate` follows the ADMM recursion; state.x is the reported estimate,
  // the iterate with the lowest objective from outer iteration 1 onwards.
  SolverState state;
  std::vector<double> iterate = op.adjoint(y);
  state.mult_w = GradientField(rows, cols);
  std::vector<double> previous(iterate.size());
  double best = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= config.max_outer; ++k) {
    // W-update: closed-form shrinkage of D x + mult / beta.
    GradientField w = grad(iterate, rows, cols);
    for (std::size_t i = 0; i < w.dx.size(); ++i) {
      w.dx[i] += state.mult_w.dx[i] / config.beta;
      w.dy[i] += state.mult_w.dy[i] / config.beta;
    }
    shrink(w, 1.0 / config.beta, config.tv_flavor);

    // X-update: descent on the augmented Lagrangian with W fixed.
    previous = iterate;
    XSubproblem(op, y, w, state.mult_w, config.beta, config.lambda)
        .minimize(iterate, config.max_inner);
    if (!all_finite(iterate))
      throw DivergenceError(k, "non-finite image estimate at outer iteration " + std::to_string(k));

    // Multiplier ascent on W = D x.
    const GradientField dx = grad(iterate, rows, cols);
    for (std::size_t i = 0; i < w.dx.size(); ++i) {
      state.mult_w.dx[i] -= config.beta * (w.dx[i] - dx.dx[i]);
      state.mult_w.dy[i] -= config.beta * (w.dy[i] - dx.dy[i]);
    }
    state.w = std::move(w);

    const double value = objective(op, y, iterate, config.lambda, config.tv_flavor);
    if (!std::isfinite(value))
      throw DivergenceError(k, "non-finite objective at outer iteration " + std::to_string(k));
    if (value <= best) {
      best = value;
      state.x = iterate;
    }
    state.objective_trace.push_back(best);
    state.iterations = k;

    const double previous_norm = norm(previous);
    for (std::size_t i = 0; i < previous.size(); ++i) previous[i] = iterate[i] - previous[i];
    state.final_rel_change = norm(previous) / (previous_norm > 0.0 ? previous_norm : 1.0);
    if (state.final_rel_change < config.tol) break;
  }

  for (double& v : state.x) v *= kPeak;
  Image image(rows, cols, state.x);
  image.clamp();
  return Reconstruction{std::move(image), std::move(state)};
}

}  // namespace lcs
