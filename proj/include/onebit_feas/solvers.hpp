#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "onebit_feas/rng.hpp"
#include "onebit_feas/types.hpp"

namespace obf {

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// A linear feasibility problem B x <= b whose rows are grouped into
/// contiguous blocks. Implementations only expose row/block oracles so the
/// full matrix never has to exist.
class InequalitySystem {
 public:
  virtual ~InequalitySystem() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual double rhs(std::size_t row) const = 0;
  virtual double row_norm_sq(std::size_t row) const = 0;
  virtual double row_dot(std::size_t row, const Vector& x) const = 0;
  virtual Vector row(std::size_t row) const = 0;

  std::size_t block_count() const { return block_offsets_.size() - 1; }
  RowRange block_rows(std::size_t block) const { return {block_offsets_[block], block_offsets_[block + 1]}; }
  std::size_t block_of(std::size_t row) const;
  double block_frobenius_sq(std::size_t block) const { return block_frobenius_sq_[block]; }
  double frobenius_sq() const;

  /// B_l x - b_l.
  virtual Vector block_residual(std::size_t block, const Vector& x) const;
  /// Selected rows stacked as a dense matrix.
  virtual Matrix gather_rows(std::span<const std::size_t> rows) const;
  /// Gram matrix of the selected rows.
  virtual Matrix gram(std::span<const std::size_t> rows) const;
  /// x += sum_a w[a] c_{rows[a]}^T.
  virtual void add_rows(std::span<const std::size_t> rows, const Vector& w, Vector& x) const;
  /// max_i (c_i x - b_i)^+.
  virtual double max_positive_residual(const Vector& x) const;

 protected:
  /// Call once from the derived constructor after rows are available.
  void set_blocks(std::vector<std::size_t> offsets);

 private:
  std::vector<std::size_t> block_offsets_{0};
  std::vector<double> block_frobenius_sq_;
};

/// Explicitly stored B and b.
class DenseInequalitySystem final : public InequalitySystem {
 public:
  /// Rows split into consecutive blocks of `block_size` (the last may be short).
  DenseInequalitySystem(Matrix b_matrix, Vector b_vector, std::size_t block_size);
  DenseInequalitySystem(Matrix b_matrix, Vector b_vector, std::vector<std::size_t> block_offsets);

  std::size_t rows() const override { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t cols() const override { return static_cast<std::size_t>(matrix_.cols()); }
  double rhs(std::size_t row) const override { return rhs_[static_cast<Eigen::Index>(row)]; }
  double row_norm_sq(std::size_t row) const override { return row_norm_sq_[row]; }
  double row_dot(std::size_t row, const Vector& x) const override;
  Vector row(std::size_t row) const override;
  Vector block_residual(std::size_t block, const Vector& x) const override;
  double max_positive_residual(const Vector& x) const override;

  const Matrix& matrix() const { return matrix_; }
  const Vector& rhs_vector() const { return rhs_; }

 private:
  void validate();

  Matrix matrix_;
  Vector rhs_;
  std::vector<double> row_norm_sq_;
};

enum class Algorithm { Rka, Skm, BlockSkm, GaussianSketchBlockSkm };

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::BlockSkm;
  double lambda = 1.0;
  /// SKM sample size; 0 selects min(rows, 100).
  std::size_t gamma = 0;
  /// Block row-selection size; 0 selects default_k_prime(cols).
  std::size_t k_prime = 0;
  std::size_t max_iters = 1000;
  double tol_margin = 1e-9;
  std::optional<double> tol_nmse;
  std::uint64_t seed = 0;
  std::size_t log_stride = 1;
};

/// max(1, min(unknowns / 8, 128)).
std::size_t default_k_prime(std::size_t unknowns);

/// Config with zero-valued gamma / k_prime resolved against `sys`. Throws
/// ErrorCode::InvalidArgument listing the violated constraint.
SolverConfig resolve_config(const SolverConfig& cfg, const InequalitySystem& sys);

/// (c x - b)^+ for an inequality row, c x - b for an equality row.
double projection_coefficient(const Vector& row, double rhs, const Vector& x, bool equality = false);

struct StepOutcome {
  bool updated = false;
  /// Block of the selected row, the sampled block, or the sketch window index.
  std::ptrdiff_t selected_block = -1;
  /// Largest positive residual among the rows considered by the step.
  double residual = 0.0;
};

// Deterministic step kernels. The randomized steps below sample an index and
// call these.

/// Relaxed projection onto a single row: x -= lambda * beta / ||c||^2 * c.
StepOutcome project_onto_row(const InequalitySystem& sys, std::size_t row, Vector& x, double lambda);

/// Motzkin choice over `sample` (largest positive residual, lowest row index on
/// ties), then project_onto_row.
StepOutcome skm_step_on(const InequalitySystem& sys, std::span<const std::size_t> sample, Vector& x,
                        double lambda);

/// Row indices of the k largest entries of `e`, descending, lower index first
/// on ties.
std::vector<std::size_t> top_residual_rows(const Vector& e, std::size_t k);

/// Block SKM steps 2-6 on block `block`: residual, top-k' selection and the
/// relaxed pseudoinverse update x -= lambda * B'^+ (B' x - b')^+.
StepOutcome block_skm_step_on(const InequalitySystem& sys, std::size_t block, std::size_t k_prime, Vector& x,
                              double lambda);

/// First row of the sketch window for placement index alpha: p = k' * alpha.
std::size_t sketch_window_offset(std::size_t k_prime, std::size_t alpha);
/// Number of k'-aligned windows that fit in `rows`.
std::size_t sketch_window_count(std::size_t rows, std::size_t k_prime);
/// k' x k' matrix with i.i.d. N(0, 1) entries.
Matrix gaussian_sketch_matrix(std::size_t k_prime, Rng& rng);

/// Sketch-and-project step on the window of rows [p, p + k') with p =
/// k' * alpha: forms (G B_hat, G b_hat) and applies the same top-residual
/// projection as block_skm_step_on to the sketched rows.
StepOutcome gaussian_sketch_step_on(const InequalitySystem& sys, std::size_t alpha, const Matrix& sketch, Vector& x,
                                    double lambda);

/// Randomized steps with cached sampling distributions.
class Stepper {
 public:
  Stepper(const InequalitySystem& sys, const SolverConfig& cfg, Rng& rng);

  StepOutcome step(Vector& x);

  /// Row with probability ||c_i||^2 / ||B||_F^2.
  std::size_t sample_row();
  /// Block with probability ||B_l||_F^2 / ||B||_F^2.
  std::size_t sample_block();
  /// gamma distinct rows, uniformly.
  std::vector<std::size_t> sample_rows_uniform(std::size_t gamma);
  /// Window placement alpha, uniform over the aligned windows.
  std::size_t sample_window();

  const SolverConfig& config() const { return cfg_; }
  Rng& rng() { return rng_; }

 private:
  const InequalitySystem& sys_;
  SolverConfig cfg_;
  Rng& rng_;
  std::discrete_distribution<std::size_t> row_dist_;
  std::discrete_distribution<std::size_t> block_dist_;
};

StepOutcome rka_step(const InequalitySystem& sys, Vector& x, double lambda, Rng& rng);
StepOutcome skm_step(const InequalitySystem& sys, Vector& x, std::size_t gamma, double lambda, Rng& rng);
StepOutcome block_skm_step(const InequalitySystem& sys, Vector& x, std::size_t k_prime, double lambda, Rng& rng);
StepOutcome gaussian_sketch_step(const InequalitySystem& sys, Vector& x, std::size_t k_prime, double lambda,
                                 Rng& rng);

struct TraceRecord {
  std::size_t iter = 0;
  /// ||x - x*||^2, NaN when no ground truth was supplied.
  double err_sq = 0.0;
  double max_pos_residual = 0.0;
  std::ptrdiff_t selected_block = -1;
  std::int64_t wall_ns = 0;
};

enum class Termination { MaxIters, Feasible, NmseReached, StopRequested };

std::string_view to_string(Termination t);

struct SolverTrace {
  std::vector<TraceRecord> records;
  std::size_t iterations = 0;
  std::int64_t wall_ns = 0;
  Termination termination = Termination::MaxIters;
};

struct SolveResult {
  Vector x;
  SolverTrace trace;
};

/// Called at every logged iteration; returning true stops the run.
using StopPredicate = std::function<bool(const Vector& x, std::size_t iter)>;

struct SolveOptions {
  std::optional<Vector> ground_truth;
  std::optional<Vector> x0;
  StopPredicate stop;
};

/// Iterates the configured step until max_iters, max positive residual <=
/// tol_margin, or ||x - x*||^2 <= tol_nmse ||x*||^2. Stopping rules are
/// evaluated at logged iterations (every log_stride steps, plus the last).
/// Wall time counts step execution only. Throws ErrorCode::NonFinite if the
/// iterate leaves the finite range.
SolveResult solve(const InequalitySystem& sys, const SolverConfig& cfg, const SolveOptions& options = {});

/// (1 - (2 lambda - lambda^2) / kappa^2)^iters * initial_err_sq.
double skm_bound(double kappa, double lambda, std::size_t iters, double initial_err_sq);

/// (1 - c sigma_min^2 log k' / ||B_hat||_F^2)^K * initial_err_sq. Throws
/// ErrorCode::InvalidRate when the factor falls outside [0, 1].
double block_rate_bound(double sigma_min_sq, double frob_sq, std::size_t k_prime, double c, std::size_t iters,
                        double initial_err_sq);

/// trace.csv: iter,err_sq,max_pos_residual,selected_block,wall_ns. With
/// `timing` false the wall_ns column is written as 0.
std::string trace_csv(const SolverTrace& trace, bool timing = true);
void write_trace_csv(const SolverTrace& trace, const std::filesystem::path& path, bool timing = true);

}  // namespace obf
