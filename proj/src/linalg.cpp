#include "onebit_feas/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "onebit_feas/error.hpp"
#include "onebit_feas/rng.hpp"

namespace obf::linalg {

double sum_of_squares(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return acc;
}

double frobenius_norm_sq(const Matrix& m) {
  return sum_of_squares({m.data(), static_cast<std::size_t>(m.size())});
}

namespace {

// Smallest accepted ratio of Cholesky pivots for an unregularized solve.
// Matches the conditioning that the first regularization level enforces.
constexpr double kPivotRatioFloor = 1e-12;

bool try_cholesky(const Matrix& gram, double shift, bool check_pivots, const Vector& v, Vector& out) {
  Matrix shifted = gram;
  shifted.diagonal().array() += shift;
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  const double lo = diag.minCoeff();
  const double hi = diag.maxCoeff();
  if (!(lo > 0.0) || !std::isfinite(hi)) return false;
  if (check_pivots && (lo * lo) < kPivotRatioFloor * (hi * hi)) return false;
  out = llt.solve(v);
  return out.allFinite();
}

}  // namespace

Vector solve_gram(const Matrix& gram, const Vector& v) {
  if (gram.rows() != gram.cols()) throw Error(ErrorCode::InvalidDims, "Gram matrix must be square");
  if (gram.rows() != v.size()) throw Error(ErrorCode::LengthMismatch, "Gram size differs from right-hand side");
  if (gram.rows() == 0) return Vector();

  Vector out;
  if (try_cholesky(gram, 0.0, true, v, out)) return out;
  const double scale = gram.trace() / static_cast<double>(gram.rows());
  if (std::isfinite(scale) && scale > 0.0) {
    for (double eps : {1e-12, 1e-8}) {
      if (try_cholesky(gram, eps * scale, false, v, out)) return out;
    }
  }
  throw Error(ErrorCode::SingularGram, "row Gram matrix is not invertible after regularization");
}

Vector gram_pseudoinverse_apply(const Matrix& rows, const Vector& v) {
  if (rows.rows() >= rows.cols()) {
    throw Error(ErrorCode::InvalidDims, "row block must have fewer rows than columns");
  }
  if (rows.rows() != v.size()) throw Error(ErrorCode::LengthMismatch, "row count differs from vector length");
  const Matrix gram = rows * rows.transpose();
  return rows.transpose() * solve_gram(gram, v);
}

namespace {

struct PowerRun {
  double value = 0.0;
  Vector vector;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration on S + shift*I. Values reported are for S itself.
PowerRun power_iterate(const Matrix& s, double shift, Vector v, double abs_tol, std::size_t max_iter,
                       Rng& rng) {
  std::normal_distribution<double> normal;
  const auto n = s.rows();
  PowerRun run;
  v.normalize();
  for (std::size_t it = 0; it < max_iter; ++it) {
    run.iterations = it + 1;
    const Vector sv = s * v;
    run.value = v.dot(sv);
    run.residual = (sv - run.value * v).norm();
    if (run.residual <= abs_tol) {
      run.converged = true;
      break;
    }
    Vector w = sv + shift * v;
    const double nw = w.norm();
    if (!(nw > 0.0)) {
      // v sits in the null space of the shifted operator.
      for (Eigen::Index i = 0; i < n; ++i) w[i] = v[i] + normal(rng);
      w.normalize();
    } else {
      w /= nw;
    }
    v = std::move(w);
  }
  run.vector = std::move(v);
  return run;
}

}  // namespace

Eigenpair dominant_eigenpair(const Matrix& m, double tol, std::size_t max_iter) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidDims, "eigenpair requires a square matrix");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const auto n = m.rows();
  if (n == 0) throw Error(ErrorCode::InvalidDims, "empty matrix");
  const Matrix s = 0.5 * (m + m.transpose());
  const Vector ones = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  const double fro = std::sqrt(frobenius_norm_sq(s));
  if (fro == 0.0) return {0.0, ones, 0};

  const double abs_tol = tol * fro;
  Rng rng = make_rng(0, {stream::kPowerIteration, static_cast<std::uint64_t>(n)});

  PowerRun first = power_iterate(s, 0.0, ones, abs_tol, max_iter, rng);
  double shift = 0.0;
  if (first.converged && first.value < 0.0) {
    shift = -first.value;
    first = power_iterate(s, shift, ones, abs_tol, max_iter, rng);
  }

  std::normal_distribution<double> normal;
  Vector restart = first.vector;
  for (Eigen::Index i = 0; i < n; ++i) restart[i] += 0.1 * normal(rng) / std::sqrt(static_cast<double>(n));
  PowerRun second = power_iterate(s, shift, restart, abs_tol, max_iter, rng);

  const PowerRun* best = nullptr;
  for (const PowerRun* r : {&first, &second}) {
    if (r->converged && (best == nullptr || r->value > best->value)) best = r;
  }
  if (best == nullptr) {
    throw Error(ErrorCode::NoConvergence,
                "power iteration residual " + std::to_string(first.residual) + " above tolerance");
  }
  return {best->value, best->vector, first.iterations + second.iterations};
}

double min_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().minCoeff();
}

double scaled_condition_number(const Matrix& m) {
  if (m.rows() < m.cols() || m.cols() == 0) {
    throw Error(ErrorCode::RankDeficient, "matrix cannot have full column rank");
  }
  const double smin = min_singular_value(m);
  if (!(smin > 1e-12)) throw Error(ErrorCode::RankDeficient, "smallest singular value below 1e-12");
  return std::sqrt(frobenius_norm_sq(m)) / smin;
}

}  // namespace obf::linalg
