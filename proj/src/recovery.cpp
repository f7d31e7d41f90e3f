#include "onebit_feas/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "onebit_feas/error.hpp"
#include "onebit_feas/linalg.hpp"

namespace obf {

SignalEstimate extract_signal(const Matrix& x_bar) {
  if (x_bar.rows() != x_bar.cols()) throw Error(ErrorCode::InvalidDims, "lifted estimate must be square");
  const linalg::Eigenpair top = linalg::dominant_eigenpair(x_bar);
  SignalEstimate out;
  out.lambda_max = std::max(top.value, 0.0);
  out.negative_curvature = top.value < 0.0;
  out.x_bar = std::sqrt(std::max(top.value, 0.0)) * top.vector;
  Eigen::Index arg = 0;
  out.x_bar.cwiseAbs().maxCoeff(&arg);
  if (out.x_bar.size() > 0 && out.x_bar[arg] < 0.0) out.x_bar = -out.x_bar;
  return out;
}

double nmse_matrix(const Matrix& x_star, const Matrix& x_bar) {
  if (x_star.rows() != x_bar.rows() || x_star.cols() != x_bar.cols()) {
    throw Error(ErrorCode::LengthMismatch, "matrix shapes differ");
  }
  const double ref = linalg::frobenius_norm_sq(x_star);
  if (!(ref > 0.0)) throw Error(ErrorCode::ZeroReference, "reference matrix is zero");
  return linalg::frobenius_norm_sq(x_star - x_bar) / ref;
}

double nmse_signal(const Vector& x_star, const Vector& x_bar) {
  if (x_star.size() != x_bar.size()) throw Error(ErrorCode::LengthMismatch, "signal lengths differ");
  const double ref = x_star.squaredNorm();
  if (!(ref > 0.0)) throw Error(ErrorCode::ZeroReference, "reference signal is zero");
  return std::min((x_star - x_bar).squaredNorm(), (x_star + x_bar).squaredNorm()) / ref;
}

LiftedEstimate evaluate_lifted(const Matrix& x_bar, const Vector& x_star) {
  LiftedEstimate est;
  est.x_bar_matrix = x_bar;
  const SignalEstimate sig = extract_signal(x_bar);
  est.x_bar = sig.x_bar;
  est.lambda_max = sig.lambda_max;
  est.negative_curvature = sig.negative_curvature;
  est.nmse_matrix = nmse_matrix(x_star * x_star.transpose(), x_bar);
  est.nmse_signal = nmse_signal(x_star, sig.x_bar);
  return est;
}

}  // namespace obf
