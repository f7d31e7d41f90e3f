#include "onebit_feas/systems.hpp"

#include <algorithm>

#include "onebit_feas/error.hpp"

namespace obf {

QcsInequalitySystem::QcsInequalitySystem(std::shared_ptr<const Polyhedron> poly)
    : poly_(std::move(poly)), m_(poly_ ? poly_->m() : 0) {
  if (!poly_) throw Error(ErrorCode::InvalidArgument, "null polyhedron");
  std::vector<std::size_t> offsets(poly_->m1() + 1);
  for (std::size_t l = 0; l <= poly_->m1(); ++l) offsets[l] = l * m_;
  set_blocks(std::move(offsets));
}

double QcsInequalitySystem::row_dot(std::size_t row, const Vector& x) const {
  return -sign(row) * poly_->ensemble().lifted_dot(row % m_, x);
}

Vector QcsInequalitySystem::row(std::size_t row) const {
  return -sign(row) * poly_->ensemble().lifted_row(row % m_);
}

Vector QcsInequalitySystem::block_residual(std::size_t block, const Vector& x) const {
  const auto l = static_cast<Eigen::Index>(block);
  const auto& r = poly_->record().signs;
  const auto& g = poly_->record().thresholds.gamma;
  const Vector vx = poly_->ensemble().apply(x);
  // -r .* (V x) + r .* tau
  return -(r.col(l).cwiseProduct(vx)) + r.col(l).cwiseProduct(g.col(l));
}

Matrix QcsInequalitySystem::gram(std::span<const std::size_t> rows) const {
  std::vector<std::size_t> js(rows.size());
  Vector s(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    js[a] = rows[a] % m_;
    s[static_cast<Eigen::Index>(a)] = sign(rows[a]);
  }
  // (-s_a)(-s_b) <V_a, V_b>
  return s.asDiagonal() * poly_->ensemble().lifted_gram(js) * s.asDiagonal();
}

void QcsInequalitySystem::add_rows(std::span<const std::size_t> rows, const Vector& w, Vector& x) const {
  std::vector<std::size_t> js(rows.size());
  Vector sw(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    js[a] = rows[a] % m_;
    sw[static_cast<Eigen::Index>(a)] = -sign(rows[a]) * w[static_cast<Eigen::Index>(a)];
  }
  poly_->ensemble().add_lifted_rows(js, sw, x);
}

double QcsInequalitySystem::max_positive_residual(const Vector& x) const {
  const Vector vx = poly_->ensemble().apply(x);
  const auto& r = poly_->record().signs;
  const auto& g = poly_->record().thresholds.gamma;
  double best = 0.0;
  for (Eigen::Index l = 0; l < r.cols(); ++l)
    for (Eigen::Index j = 0; j < r.rows(); ++j) best = std::max(best, -(r(j, l) * vx[j]) + r(j, l) * g(j, l));
  return best;
}

DenseInequalitySystem linear_onebit_system(const Matrix& b, const OneBitRecord& record) {
  if (static_cast<std::size_t>(b.rows()) != record.m()) {
    throw Error(ErrorCode::LengthMismatch, "linear operator rows differ from record length");
  }
  const auto m = b.rows();
  const auto m1 = static_cast<Eigen::Index>(record.m1());
  Matrix rows(m * m1, b.cols());
  Vector rhs(m * m1);
  for (Eigen::Index l = 0; l < m1; ++l) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double r = record.signs(j, l);
      rows.row(l * m + j) = -r * b.row(j);
      rhs[l * m + j] = -r * record.thresholds.gamma(j, l);
    }
  }
  return DenseInequalitySystem(std::move(rows), std::move(rhs), static_cast<std::size_t>(m));
}

}  // namespace obf
