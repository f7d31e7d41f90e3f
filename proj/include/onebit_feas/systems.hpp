#pragma once

#include <memory>

#include "onebit_feas/onebit.hpp"
#include "onebit_feas/qcs.hpp"
#include "onebit_feas/solvers.hpp"

namespace obf {

/// The one-bit QCS polyhedron in solver form B x <= b with B = -P and
/// b = -vec(R) .* vec(Gamma). Row l*m + j is -r_j^(l) vec(A_j^T)^T and block l
/// holds threshold sequence l. Rows are synthesized from the ensemble.
class QcsInequalitySystem final : public InequalitySystem {
 public:
  explicit QcsInequalitySystem(std::shared_ptr<const Polyhedron> poly);

  std::size_t rows() const override { return poly_->rows(); }
  std::size_t cols() const override { return poly_->unknowns(); }
  double rhs(std::size_t row) const override { return -poly_->rhs()[static_cast<Eigen::Index>(row)]; }
  double row_norm_sq(std::size_t row) const override { return poly_->ensemble().lifted_row_norm_sq(row % m_); }
  double row_dot(std::size_t row, const Vector& x) const override;
  Vector row(std::size_t row) const override;

  Vector block_residual(std::size_t block, const Vector& x) const override;
  Matrix gram(std::span<const std::size_t> rows) const override;
  void add_rows(std::span<const std::size_t> rows, const Vector& w, Vector& x) const override;
  double max_positive_residual(const Vector& x) const override;

  const Polyhedron& polyhedron() const { return *poly_; }

 private:
  double sign(std::size_t row) const { return poly_->record().signs.data()[row]; }

  std::shared_ptr<const Polyhedron> poly_;
  std::size_t m_;
};

/// One-bit system for a plain linear model y = B x: row l*m + j is
/// -r_j^(l) b_j with right-hand side -r_j^(l) tau_j^(l); one block per
/// threshold sequence.
DenseInequalitySystem linear_onebit_system(const Matrix& b, const OneBitRecord& record);

}  // namespace obf
