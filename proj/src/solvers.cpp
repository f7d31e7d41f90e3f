#include "onebit_feas/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "onebit_feas/error.hpp"
#include "onebit_feas/io.hpp"
#include "onebit_feas/linalg.hpp"

namespace obf {

// ---------------------------------------------------------------------------
// InequalitySystem

void InequalitySystem::set_blocks(std::vector<std::size_t> offsets) {
  if (offsets.size() < 2 || offsets.front() != 0 || offsets.back() != rows()) {
    throw Error(ErrorCode::InvalidDims, "block offsets must start at 0 and end at the row count");
  }
  for (std::size_t b = 0; b + 1 < offsets.size(); ++b) {
    if (offsets[b + 1] <= offsets[b]) throw Error(ErrorCode::InvalidDims, "blocks must be non-empty");
  }
  block_offsets_ = std::move(offsets);
  block_frobenius_sq_.assign(block_count(), 0.0);
  for (std::size_t b = 0; b < block_count(); ++b) {
    for (std::size_t i = block_offsets_[b]; i < block_offsets_[b + 1]; ++i) {
      const double nsq = row_norm_sq(i);
      if (!(nsq > 0.0)) throw Error(ErrorCode::InvalidArgument, "row " + std::to_string(i) + " is zero");
      block_frobenius_sq_[b] += nsq;
    }
  }
}

std::size_t InequalitySystem::block_of(std::size_t row) const {
  auto it = std::upper_bound(block_offsets_.begin(), block_offsets_.end(), row);
  return static_cast<std::size_t>(it - block_offsets_.begin()) - 1;
}

double InequalitySystem::frobenius_sq() const {
  return std::accumulate(block_frobenius_sq_.begin(), block_frobenius_sq_.end(), 0.0);
}

Vector InequalitySystem::block_residual(std::size_t block, const Vector& x) const {
  const RowRange r = block_rows(block);
  Vector e(static_cast<Eigen::Index>(r.size()));
  for (std::size_t i = r.begin; i < r.end; ++i) e[static_cast<Eigen::Index>(i - r.begin)] = row_dot(i, x) - rhs(i);
  return e;
}

Matrix InequalitySystem::gather_rows(std::span<const std::size_t> rows) const {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols()));
  for (std::size_t a = 0; a < rows.size(); ++a) out.row(static_cast<Eigen::Index>(a)) = row(rows[a]).transpose();
  return out;
}

Matrix InequalitySystem::gram(std::span<const std::size_t> rows) const {
  const Matrix sel = gather_rows(rows);
  return sel * sel.transpose();
}

void InequalitySystem::add_rows(std::span<const std::size_t> rows, const Vector& w, Vector& x) const {
  x.noalias() += gather_rows(rows).transpose() * w;
}

double InequalitySystem::max_positive_residual(const Vector& x) const {
  double best = 0.0;
  for (std::size_t b = 0; b < block_count(); ++b) best = std::max(best, block_residual(b, x).maxCoeff());
  return best;
}

// ---------------------------------------------------------------------------
// DenseInequalitySystem

namespace {

std::vector<std::size_t> uniform_offsets(std::size_t rows, std::size_t block_size) {
  if (block_size == 0) throw Error(ErrorCode::InvalidDims, "block size must be positive");
  std::vector<std::size_t> offsets;
  for (std::size_t r = 0; r < rows; r += block_size) offsets.push_back(r);
  offsets.push_back(rows);
  return offsets;
}

}  // namespace

DenseInequalitySystem::DenseInequalitySystem(Matrix b_matrix, Vector b_vector, std::size_t block_size)
    : DenseInequalitySystem(std::move(b_matrix), std::move(b_vector),
                            uniform_offsets(static_cast<std::size_t>(b_matrix.rows()), block_size)) {}

DenseInequalitySystem::DenseInequalitySystem(Matrix b_matrix, Vector b_vector, std::vector<std::size_t> block_offsets)
    : matrix_(std::move(b_matrix)), rhs_(std::move(b_vector)) {
  validate();
  set_blocks(std::move(block_offsets));
}

void DenseInequalitySystem::validate() {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) throw Error(ErrorCode::InvalidDims, "empty system");
  if (matrix_.rows() != rhs_.size()) throw Error(ErrorCode::LengthMismatch, "row count differs from rhs length");
  if (!matrix_.allFinite() || !rhs_.allFinite()) throw Error(ErrorCode::NonFinite, "system has non-finite entries");
  row_norm_sq_.resize(static_cast<std::size_t>(matrix_.rows()));
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) row_norm_sq_[static_cast<std::size_t>(i)] = matrix_.row(i).squaredNorm();
}

double DenseInequalitySystem::row_dot(std::size_t row, const Vector& x) const {
  return matrix_.row(static_cast<Eigen::Index>(row)).dot(x);
}

Vector DenseInequalitySystem::row(std::size_t row) const {
  return matrix_.row(static_cast<Eigen::Index>(row)).transpose();
}

Vector DenseInequalitySystem::block_residual(std::size_t block, const Vector& x) const {
  const RowRange r = block_rows(block);
  const auto begin = static_cast<Eigen::Index>(r.begin);
  const auto size = static_cast<Eigen::Index>(r.size());
  return matrix_.middleRows(begin, size) * x - rhs_.segment(begin, size);
}

double DenseInequalitySystem::max_positive_residual(const Vector& x) const {
  return std::max(0.0, (matrix_ * x - rhs_).maxCoeff());
}

// ---------------------------------------------------------------------------
// Config

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Rka: return "rka";
    case Algorithm::Skm: return "skm";
    case Algorithm::BlockSkm: return "block_skm";
    case Algorithm::GaussianSketchBlockSkm: return "gaussian_sketch";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::Rka, Algorithm::Skm, Algorithm::BlockSkm, Algorithm::GaussianSketchBlockSkm}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::MaxIters: return "max_iters";
    case Termination::Feasible: return "feasible";
    case Termination::NmseReached: return "nmse_reached";
    case Termination::StopRequested: return "stop_requested";
  }
  return "unknown";
}

std::size_t default_k_prime(std::size_t unknowns) {
  return std::max<std::size_t>(1, std::min<std::size_t>(unknowns / 8, 128));
}

SolverConfig resolve_config(const SolverConfig& cfg, const InequalitySystem& sys) {
  SolverConfig out = cfg;
  if (!(cfg.lambda > 0.0 && cfg.lambda < 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must lie in (0, 2)");
  }
  if (out.gamma == 0) out.gamma = std::min<std::size_t>(sys.rows(), 100);
  if (out.gamma > sys.rows()) throw Error(ErrorCode::InvalidArgument, "gamma must not exceed the row count");
  if (out.log_stride == 0) throw Error(ErrorCode::InvalidArgument, "log_stride must be positive");
  if (!(out.tol_margin >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol_margin must be non-negative");
  if (out.tol_nmse && !(*out.tol_nmse > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol_nmse must be positive");
  const bool block = out.algorithm == Algorithm::BlockSkm || out.algorithm == Algorithm::GaussianSketchBlockSkm;
  if (block) {
    if (out.k_prime == 0) out.k_prime = std::min(default_k_prime(sys.cols()), sys.rows());
    if (out.k_prime >= sys.cols()) throw Error(ErrorCode::InvalidArgument, "k_prime must be smaller than the unknown count");
    if (out.k_prime > sys.rows()) throw Error(ErrorCode::InvalidArgument, "k_prime must not exceed the row count");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Step kernels

double projection_coefficient(const Vector& row, double rhs, const Vector& x, bool equality) {
  const double r = row.dot(x) - rhs;
  return equality ? r : std::max(r, 0.0);
}

StepOutcome project_onto_row(const InequalitySystem& sys, std::size_t row, Vector& x, double lambda) {
  StepOutcome out;
  out.selected_block = static_cast<std::ptrdiff_t>(sys.block_of(row));
  const double beta = std::max(sys.row_dot(row, x) - sys.rhs(row), 0.0);
  out.residual = beta;
  if (beta == 0.0) return out;
  const std::size_t idx[1] = {row};
  Vector w(1);
  w[0] = -lambda * beta / sys.row_norm_sq(row);
  sys.add_rows(idx, w, x);
  out.updated = true;
  return out;
}

StepOutcome skm_step_on(const InequalitySystem& sys, std::span<const std::size_t> sample, Vector& x,
                        double lambda) {
  if (sample.empty()) throw Error(ErrorCode::InvalidArgument, "empty row sample");
  std::size_t best = sample.front();
  double best_res = -std::numeric_limits<double>::infinity();
  for (std::size_t row : sample) {
    const double res = sys.row_dot(row, x) - sys.rhs(row);
    if (res > best_res || (res == best_res && row < best)) {
      best_res = res;
      best = row;
    }
  }
  return project_onto_row(sys, best, x, lambda);
}

std::vector<std::size_t> top_residual_rows(const Vector& e, std::size_t k) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(e.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, idx.size());
  auto before = [&e](std::size_t a, std::size_t b) {
    const double ea = e[static_cast<Eigen::Index>(a)];
    const double eb = e[static_cast<Eigen::Index>(b)];
    return ea > eb || (ea == eb && a < b);
  };
  if (k < idx.size()) {
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), before);
    idx.resize(k);
  }
  std::sort(idx.begin(), idx.end(), before);
  return idx;
}

namespace {

// Positive parts of the selected residual entries; false if all are zero.
bool positive_parts(const Vector& e, std::span<const std::size_t> top, Vector& out) {
  out.resize(static_cast<Eigen::Index>(top.size()));
  bool any = false;
  for (std::size_t a = 0; a < top.size(); ++a) {
    const double v = std::max(e[static_cast<Eigen::Index>(top[a])], 0.0);
    out[static_cast<Eigen::Index>(a)] = v;
    any = any || v > 0.0;
  }
  return any;
}

}  // namespace

StepOutcome block_skm_step_on(const InequalitySystem& sys, std::size_t block, std::size_t k_prime, Vector& x,
                              double lambda) {
  if (block >= sys.block_count()) throw Error(ErrorCode::IndexOutOfRange, "block index out of range");
  StepOutcome out;
  out.selected_block = static_cast<std::ptrdiff_t>(block);
  const RowRange range = sys.block_rows(block);
  const Vector e = sys.block_residual(block, x);
  out.residual = std::max(e.maxCoeff(), 0.0);
  if (out.residual == 0.0) return out;

  const std::vector<std::size_t> top = top_residual_rows(e, k_prime);
  Vector pos;
  positive_parts(e, top, pos);
  std::vector<std::size_t> rows(top.size());
  for (std::size_t a = 0; a < top.size(); ++a) rows[a] = range.begin + top[a];

  const Vector w = linalg::solve_gram(sys.gram(rows), pos);
  sys.add_rows(rows, -lambda * w, x);
  out.updated = true;
  return out;
}

std::size_t sketch_window_offset(std::size_t k_prime, std::size_t alpha) { return k_prime * alpha; }

std::size_t sketch_window_count(std::size_t rows, std::size_t k_prime) {
  return k_prime == 0 ? 0 : rows / k_prime;
}

Matrix gaussian_sketch_matrix(std::size_t k_prime, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(static_cast<Eigen::Index>(k_prime), static_cast<Eigen::Index>(k_prime));
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  return g;
}

StepOutcome gaussian_sketch_step_on(const InequalitySystem& sys, std::size_t alpha, const Matrix& sketch, Vector& x,
                                    double lambda) {
  const auto k = static_cast<std::size_t>(sketch.rows());
  if (k == 0 || sketch.cols() != sketch.rows()) throw Error(ErrorCode::InvalidDims, "sketch must be k' x k'");
  const std::size_t p = sketch_window_offset(k, alpha);
  if (p + k > sys.rows()) throw Error(ErrorCode::IndexOutOfRange, "sketch window runs past the last row");

  std::vector<std::size_t> window(k);
  std::iota(window.begin(), window.end(), p);
  const Matrix rows_hat = sys.gather_rows(window);
  Vector rhs_hat(static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < k; ++a) rhs_hat[static_cast<Eigen::Index>(a)] = sys.rhs(window[a]);

  const Matrix sb = sketch * rows_hat;
  const Vector sbv = sketch * rhs_hat;
  const Vector e = sb * x - sbv;

  StepOutcome out;
  out.selected_block = static_cast<std::ptrdiff_t>(alpha);
  out.residual = std::max(e.maxCoeff(), 0.0);
  if (out.residual == 0.0) return out;

  const std::vector<std::size_t> top = top_residual_rows(e, k);
  Vector pos;
  positive_parts(e, top, pos);
  Matrix sel(static_cast<Eigen::Index>(top.size()), sb.cols());
  for (std::size_t a = 0; a < top.size(); ++a) sel.row(static_cast<Eigen::Index>(a)) = sb.row(static_cast<Eigen::Index>(top[a]));

  const Vector w = linalg::solve_gram(sel * sel.transpose(), pos);
  x.noalias() -= lambda * (sel.transpose() * w);
  out.updated = true;
  return out;
}

// ---------------------------------------------------------------------------
// Stepper

Stepper::Stepper(const InequalitySystem& sys, const SolverConfig& cfg, Rng& rng)
    : sys_(sys), cfg_(resolve_config(cfg, sys)), rng_(rng) {
  std::vector<double> weights(sys.block_count());
  for (std::size_t b = 0; b < weights.size(); ++b) weights[b] = sys.block_frobenius_sq(b);
  block_dist_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
}

std::size_t Stepper::sample_row() {
  if (row_dist_.probabilities().size() != sys_.rows()) {
    std::vector<double> weights(sys_.rows());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = sys_.row_norm_sq(i);
    row_dist_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
  }
  return row_dist_(rng_);
}

std::size_t Stepper::sample_block() { return block_dist_(rng_); }

std::vector<std::size_t> Stepper::sample_rows_uniform(std::size_t gamma) {
  const std::size_t n = sys_.rows();
  std::vector<std::size_t> out;
  if (gamma >= n) {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  // Floyd's algorithm.
  out.reserve(gamma);
  for (std::size_t j = n - gamma; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng_);
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Stepper::sample_window() {
  const std::size_t count = sketch_window_count(sys_.rows(), cfg_.k_prime);
  std::uniform_int_distribution<std::size_t> pick(0, count - 1);
  return pick(rng_);
}

StepOutcome Stepper::step(Vector& x) {
  switch (cfg_.algorithm) {
    case Algorithm::Rka:
      return project_onto_row(sys_, sample_row(), x, cfg_.lambda);
    case Algorithm::Skm: {
      const auto sample = sample_rows_uniform(cfg_.gamma);
      return skm_step_on(sys_, sample, x, cfg_.lambda);
    }
    case Algorithm::BlockSkm:
      try {
        return block_skm_step_on(sys_, sample_block(), cfg_.k_prime, x, cfg_.lambda);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::SingularGram) throw;
        return block_skm_step_on(sys_, sample_block(), cfg_.k_prime, x, cfg_.lambda);
      }
    case Algorithm::GaussianSketchBlockSkm: {
      try {
        const std::size_t alpha = sample_window();
        const Matrix g = gaussian_sketch_matrix(cfg_.k_prime, rng_);
        return gaussian_sketch_step_on(sys_, alpha, g, x, cfg_.lambda);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::SingularGram) throw;
        const std::size_t alpha = sample_window();
        const Matrix g = gaussian_sketch_matrix(cfg_.k_prime, rng_);
        return gaussian_sketch_step_on(sys_, alpha, g, x, cfg_.lambda);
      }
    }
  }
  return {};
}

namespace {

StepOutcome one_step(const InequalitySystem& sys, Vector& x, SolverConfig cfg, Rng& rng) {
  Stepper stepper(sys, cfg, rng);
  return stepper.step(x);
}

}  // namespace

StepOutcome rka_step(const InequalitySystem& sys, Vector& x, double lambda, Rng& rng) {
  SolverConfig cfg;
  cfg.algorithm = Algorithm::Rka;
  cfg.lambda = lambda;
  return one_step(sys, x, cfg, rng);
}

StepOutcome skm_step(const InequalitySystem& sys, Vector& x, std::size_t gamma, double lambda, Rng& rng) {
  SolverConfig cfg;
  cfg.algorithm = Algorithm::Skm;
  cfg.gamma = gamma;
  cfg.lambda = lambda;
  return one_step(sys, x, cfg, rng);
}

StepOutcome block_skm_step(const InequalitySystem& sys, Vector& x, std::size_t k_prime, double lambda, Rng& rng) {
  SolverConfig cfg;
  cfg.algorithm = Algorithm::BlockSkm;
  cfg.k_prime = k_prime;
  cfg.lambda = lambda;
  return one_step(sys, x, cfg, rng);
}

StepOutcome gaussian_sketch_step(const InequalitySystem& sys, Vector& x, std::size_t k_prime, double lambda,
                                 Rng& rng) {
  SolverConfig cfg;
  cfg.algorithm = Algorithm::GaussianSketchBlockSkm;
  cfg.k_prime = k_prime;
  cfg.lambda = lambda;
  return one_step(sys, x, cfg, rng);
}

// ---------------------------------------------------------------------------
// Driver

SolveResult solve(const InequalitySystem& sys, const SolverConfig& config, const SolveOptions& options) {
  using Clock = std::chrono::steady_clock;
  const SolverConfig cfg = resolve_config(config, sys);
  Rng rng = make_rng(cfg.seed, {stream::kSolver});
  Stepper stepper(sys, cfg, rng);

  SolveResult result;
  if (options.x0) {
    if (static_cast<std::size_t>(options.x0->size()) != sys.cols()) {
      throw Error(ErrorCode::LengthMismatch, "initial point has the wrong length");
    }
    result.x = *options.x0;
  } else {
    result.x = Vector::Zero(static_cast<Eigen::Index>(sys.cols()));
  }
  const Vector* truth = options.ground_truth ? &*options.ground_truth : nullptr;
  if (truth && static_cast<std::size_t>(truth->size()) != sys.cols()) {
    throw Error(ErrorCode::LengthMismatch, "ground truth has the wrong length");
  }
  const double truth_sq = truth ? truth->squaredNorm() : 0.0;
  Vector& x = result.x;
  SolverTrace& trace = result.trace;

  // Records metrics at `iter`; true if a stopping rule fired.
  auto log_and_check = [&](std::size_t iter, std::ptrdiff_t block) {
    TraceRecord rec;
    rec.iter = iter;
    rec.err_sq = truth ? (x - *truth).squaredNorm() : std::numeric_limits<double>::quiet_NaN();
    rec.max_pos_residual = sys.max_positive_residual(x);
    rec.selected_block = block;
    rec.wall_ns = trace.wall_ns;
    trace.records.push_back(rec);
    if (rec.max_pos_residual <= cfg.tol_margin) {
      trace.termination = Termination::Feasible;
      return true;
    }
    if (truth && cfg.tol_nmse && rec.err_sq <= *cfg.tol_nmse * truth_sq) {
      trace.termination = Termination::NmseReached;
      return true;
    }
    if (options.stop && options.stop(x, iter)) {
      trace.termination = Termination::StopRequested;
      return true;
    }
    return false;
  };

  trace.termination = Termination::MaxIters;
  if (log_and_check(0, -1)) return result;
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const auto t0 = Clock::now();
    const StepOutcome step = stepper.step(x);
    trace.wall_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
    trace.iterations = it;
    if (!x.allFinite()) {
      throw Error(ErrorCode::NonFinite, "iterate became non-finite at iteration " + std::to_string(it));
    }
    if (it % cfg.log_stride == 0 || it == cfg.max_iters) {
      if (log_and_check(it, step.selected_block)) return result;
    }
  }
  trace.termination = Termination::MaxIters;
  return result;
}

// ---------------------------------------------------------------------------
// Bounds

double skm_bound(double kappa, double lambda, std::size_t iters, double initial_err_sq) {
  if (!(kappa >= 1.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be at least 1");
  if (!(lambda > 0.0 && lambda < 2.0)) throw Error(ErrorCode::InvalidArgument, "lambda must lie in (0, 2)");
  const double factor = std::max(0.0, 1.0 - (2.0 * lambda - lambda * lambda) / (kappa * kappa));
  return std::pow(factor, static_cast<double>(iters)) * initial_err_sq;
}

double block_rate_bound(double sigma_min_sq, double frob_sq, std::size_t k_prime, double c, std::size_t iters,
                        double initial_err_sq) {
  if (k_prime < 2) throw Error(ErrorCode::InvalidArgument, "k_prime must be at least 2");
  if (!(frob_sq > 0.0)) throw Error(ErrorCode::InvalidArgument, "Frobenius norm must be positive");
  const double factor = 1.0 - c * sigma_min_sq * std::log(static_cast<double>(k_prime)) / frob_sq;
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw Error(ErrorCode::InvalidRate, "rate factor " + std::to_string(factor) + " outside [0, 1]");
  }
  return std::pow(factor, static_cast<double>(iters)) * initial_err_sq;
}

// ---------------------------------------------------------------------------
// Export

std::string trace_csv(const SolverTrace& trace, bool timing) {
  std::string out = "iter,err_sq,max_pos_residual,selected_block,wall_ns\n";
  for (const TraceRecord& r : trace.records) {
    out += std::to_string(r.iter);
    out += ',';
    out += io::format_double(r.err_sq);
    out += ',';
    out += io::format_double(r.max_pos_residual);
    out += ',';
    out += std::to_string(r.selected_block);
    out += ',';
    out += std::to_string(timing ? r.wall_ns : 0);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const SolverTrace& trace, const std::filesystem::path& path, bool timing) {
  io::write_text(path, trace_csv(trace, timing));
}

}  // namespace obf
