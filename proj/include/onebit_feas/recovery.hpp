#pragma once

#include "onebit_feas/types.hpp"

namespace obf {

struct LiftedEstimate {
  Matrix x_bar_matrix;
  Vector x_bar;
  double lambda_max = 0.0;
  /// The dominant eigenvalue was negative and has been clamped to zero.
  bool negative_curvature = false;
  double nmse_matrix = 0.0;
  double nmse_signal = 0.0;
};

struct SignalEstimate {
  Vector x_bar;
  double lambda_max = 0.0;
  bool negative_curvature = false;
};

/// Rank-one signal from a lifted estimate: x_bar = sqrt(max(lambda, 0)) v for
/// the top eigenpair of the symmetric part, with the sign fixed so the
/// largest-magnitude entry is positive.
SignalEstimate extract_signal(const Matrix& x_bar);

/// ||X* - X_bar||_F^2 / ||X*||_F^2.
double nmse_matrix(const Matrix& x_star, const Matrix& x_bar);

/// min over s in {-1, +1} of ||x* - s x_bar||^2 / ||x*||^2.
double nmse_signal(const Vector& x_star, const Vector& x_bar);

/// Signal extraction plus both error metrics against x*.
LiftedEstimate evaluate_lifted(const Matrix& x_bar, const Vector& x_star);

}  // namespace obf
