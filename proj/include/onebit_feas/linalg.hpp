#pragma once

#include <cstddef>
#include <span>

#include "onebit_feas/types.hpp"

namespace obf::linalg {

/// Sum of squares over the storage of a matrix or vector, in storage order.
double sum_of_squares(std::span<const double> values);

double frobenius_norm_sq(const Matrix& m);

/// Solves `gram * w = v` for a symmetric positive (semi)definite Gram matrix.
///
/// A plain Cholesky factorization is used when its pivots are well
/// separated from zero. Otherwise the diagonal is loaded with
/// eps * trace(gram) / k for eps = 1e-12 and then 1e-8. Throws
/// ErrorCode::SingularGram if all three attempts fail.
Vector solve_gram(const Matrix& gram, const Vector& v);

/// Returns rows^T (rows rows^T)^{-1} v for a k x n row block with k < n.
Vector gram_pseudoinverse_apply(const Matrix& rows, const Vector& v);

struct Eigenpair {
  double value = 0.0;
  Vector vector;
  std::size_t iterations = 0;
};

/// Largest (algebraic) eigenpair of the symmetric part (M + M^T) / 2.
///
/// Power iteration from the normalized all-ones vector. A negative dominant
/// eigenvalue triggers a shifted rerun so the result is the top of the
/// spectrum, not the largest magnitude. A second run from a seeded
/// perturbation of the first answer guards against a start vector orthogonal
/// to the top eigenvector. Converged when ||S v - lambda v|| <= tol ||S||_F;
/// otherwise throws ErrorCode::NoConvergence.
Eigenpair dominant_eigenpair(const Matrix& m, double tol = 1e-10, std::size_t max_iter = 20000);

double min_singular_value(const Matrix& m);

/// ||M||_F / sigma_min(M). Throws ErrorCode::RankDeficient when M has fewer
/// rows than columns or sigma_min <= 1e-12.
double scaled_condition_number(const Matrix& m);

}  // namespace obf::linalg
