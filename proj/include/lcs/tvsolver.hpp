// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lcs/imaging.hpp"
#include "lcs/sampling.hpp"

namespace lcs {

enum class TvFlavor { anisotropic, isotropic };

/// Forward differences of a rows x cols image. The last column of dx and the
/// last row of dy are zero (replicate boundary).
struct GradientField {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> dx;
  std::vector<double> dy;

  GradientField() = default;
  GradientField(std::size_t r, std::size_t c) : rows(r), cols(c), dx(r * c, 0.0), dy(r * c, 0.0) {}
};

GradientField grad(std::span<const double> x, std::size_t rows, std::size_t cols);
std::vector<double> grad_adjoint(const GradientField& g);

double tv(std::span<const double> x, std::size_t rows, std::size_t cols,
          TvFlavor flavor = TvFlavor::anisotropic);

/// Soft threshold: sign(v) * max(|v| - threshold, 0).
double shrink(double v, double threshold) noexcept;
/// Shrinks a field in place; isotropic shrinks each (dx, dy) pair as a vector.
void shrink(GradientField& g, double threshold, TvFlavor flavor);

struct SolverConfig {
  double lambda = 1e4;   // measurement fidelity weight
  double beta = 32.0;    // splitting penalty for W = DX
  int max_outer = 300;
  int max_inner = 10;
  double tol = 1e-4;     // stop when ||x_k - x_{k-1}|| / ||x_{k-1}|| < tol
  TvFlavor tv_flavor = TvFlavor::anisotropic;
  // Per-line operator products within one iteration; 1 keeps runs bitwise
  // reproducible.
  int threads = 1;

  void validate() const;
};

struct SolverState {
  std::vector<double> x;            // reported estimate, before the final clamp
  GradientField w;                  // split variable W ~ DX
  GradientField mult_w;             // multipliers for W = DX
  // Objective of x after each outer iteration, on intensities scaled to
  // [0, 1]; non-increasing by construction.
  std::vector<double> objective_trace;
  int iterations = 0;
  double final_rel_change = 0.0;
};

struct Reconstruction {
  Image image;
  SolverState state;
};

/// The block-diagonal operator diag(Phi, ..., Phi) acting on a row-major image,
/// applied line by line without materializing the big matrix.
class MeasurementOperator {
 public:
  MeasurementOperator(SamplingMatrix matrix, std::size_t rows, std::size_t cols, int threads = 1);

  /// Builds the operator described by a sample header.
  static MeasurementOperator for_sample(const EncodedSample& sample,
                                        std::uint64_t max_entries = kDefaultMaxMatrixEntries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t signal_size() const noexcept { return rows_ * cols_; }
  std::size_t measurement_size() const noexcept { return matrix_.m() * num_lines_; }
  const SamplingMatrix& matrix() const noexcept { return matrix_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  void adjoint(std::span<const double> y, std::span<double> x) const;

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> adjoint(std::span<const double> y) const;

 private:
  SamplingMatrix matrix_;
  std::size_t rows_;
  std::size_t cols_;
  std::size_t num_lines_;
  int threads_;
};

/// Warm start: per-line back-projection Phi^T Y_i.
std::vector<double> initialize(const EncodedSample& sample);

/// TV(x) + lambda/2 ||A x - y||^2, the quantity recorded in objective_trace.
double objective(const MeasurementOperator& op, std::span<const double> y,
                 std::span<const double> x, double lambda, TvFlavor flavor);

/// The smooth X-subproblem of the augmented Lagrangian for fixed W and
/// multipliers:
///   Q(x) = beta/2 ||D x - W + mult/beta||^2 + lambda/2 ||A x - y||^2.
class XSubproblem {
 public:
  XSubproblem(const MeasurementOperator& op, std::span<const double> y,
              const GradientField& w, const GradientField& mult, double beta, double lambda);

  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;

  /// Runs up to max_steps proximal-gradient steps from x (in place): explicit
  /// steps on the splitting term, closed-form prox on the fidelity term,
  /// Barzilai-Borwein step lengths with backtracking. Never increases value().
  int minimize(std::vector<double>& x, int max_steps) const;

 private:
  double splitting_value(std::span<const double> x) const;
  std::vector<double> splitting_gradient(std::span<const double> x) const;
  void fidelity_prox(std::vector<double>& v, double step) const;

  const MeasurementOperator* op_;
  std::span<const double> y_;
  // W - mult/beta, the target of D x.
  GradientField target_;
  double beta_;
  double lambda_;
};

Reconstruction reconstruct(const EncodedSample& sample, const SolverConfig& config = {},
                           std::uint64_t max_entries = kDefaultMaxMatrixEntries);

}  // namespace lcs
