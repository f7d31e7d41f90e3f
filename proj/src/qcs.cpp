#include "onebit_feas/qcs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"

#include "onebit_feas/error.hpp"
#include "onebit_feas/io.hpp"
#include "onebit_feas/linalg.hpp"
#include "onebit_feas/rng.hpp"

namespace obf {

namespace {

Eigen::Map<const Matrix> as_square(const Vector& xvec, std::size_t n) {
  return {xvec.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)};
}

void check_index(std::size_t j, std::size_t m) {
  if (j >= m) throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(j) + " of " + std::to_string(m));
}

}  // namespace

Vector vec(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

Matrix unvec(const Vector& xvec, std::size_t n) {
  if (static_cast<std::size_t>(xvec.size()) != n * n) throw Error(ErrorCode::LengthMismatch, "vec length is not n^2");
  return as_square(xvec, n);
}

SensingEnsemble SensingEnsemble::rank_one(Matrix vectors, std::uint64_t seed) {
  SensingEnsemble e;
  e.kind_ = EnsembleKind::RankOne;
  e.n_ = static_cast<std::size_t>(vectors.rows());
  e.m_ = static_cast<std::size_t>(vectors.cols());
  e.seed_ = seed;
  e.vectors_ = std::move(vectors);
  e.finalize_norms();
  return e;
}

SensingEnsemble SensingEnsemble::full_rank(std::span<const Matrix> matrices, std::uint64_t seed) {
  if (matrices.empty()) throw Error(ErrorCode::InvalidDims, "empty ensemble");
  SensingEnsemble e;
  e.kind_ = EnsembleKind::FullRank;
  e.n_ = static_cast<std::size_t>(matrices.front().rows());
  e.m_ = matrices.size();
  e.seed_ = seed;
  const auto nn = static_cast<Eigen::Index>(e.n_ * e.n_);
  e.lifted_.resize(static_cast<Eigen::Index>(e.m_), nn);
  for (std::size_t j = 0; j < e.m_; ++j) {
    const Matrix& a = matrices[j];
    if (static_cast<std::size_t>(a.rows()) != e.n_ || a.cols() != a.rows()) {
      throw Error(ErrorCode::InvalidDims, "sensing matrices must all be n x n");
    }
    const Matrix at = a.transpose();
    e.lifted_.row(static_cast<Eigen::Index>(j)) = Eigen::Map<const Vector>(at.data(), nn).transpose();
  }
  e.finalize_norms();
  return e;
}

SensingEnsemble SensingEnsemble::generate(std::size_t n, std::size_t m, EnsembleKind kind, std::uint64_t seed) {
  if (n == 0 || m == 0) throw Error(ErrorCode::InvalidDims, "ensemble needs n >= 1 and m >= 1");
  std::normal_distribution<double> normal;
  const auto ni = static_cast<Eigen::Index>(n);
  if (kind == EnsembleKind::RankOne) {
    Matrix vectors(ni, static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
      Rng rng = make_rng(seed, {j});
      for (Eigen::Index p = 0; p < ni; ++p) vectors(p, static_cast<Eigen::Index>(j)) = normal(rng);
    }
    return rank_one(std::move(vectors), seed);
  }
  SensingEnsemble e;
  e.kind_ = EnsembleKind::FullRank;
  e.n_ = n;
  e.m_ = m;
  e.seed_ = seed;
  e.lifted_.resize(static_cast<Eigen::Index>(m), ni * ni);
  Matrix a(ni, ni);
  for (std::size_t j = 0; j < m; ++j) {
    Rng rng = make_rng(seed, {j});
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
    const Matrix at = a.transpose();
    e.lifted_.row(static_cast<Eigen::Index>(j)) = Eigen::Map<const Vector>(at.data(), ni * ni).transpose();
  }
  e.finalize_norms();
  return e;
}

void SensingEnsemble::finalize_norms() {
  row_norm_sq_.resize(m_);
  frobenius_sq_ = 0.0;
  for (std::size_t j = 0; j < m_; ++j) {
    const auto ji = static_cast<Eigen::Index>(j);
    if (kind_ == EnsembleKind::RankOne) {
      const double a2 = vectors_.col(ji).squaredNorm();
      row_norm_sq_[j] = a2 * a2;
    } else {
      row_norm_sq_[j] = lifted_.row(ji).squaredNorm();
    }
    frobenius_sq_ += row_norm_sq_[j];
  }
}

Matrix SensingEnsemble::matrix(std::size_t j) const {
  check_index(j, m_);
  const auto ji = static_cast<Eigen::Index>(j);
  if (kind_ == EnsembleKind::RankOne) return vectors_.col(ji) * vectors_.col(ji).transpose();
  const Vector row = lifted_.row(ji).transpose();
  return as_square(row, n_).transpose();
}

double SensingEnsemble::quadratic_form(std::size_t j, const Vector& x) const {
  check_index(j, m_);
  const auto ji = static_cast<Eigen::Index>(j);
  if (kind_ == EnsembleKind::RankOne) {
    const double t = vectors_.col(ji).dot(x);
    return t * t;
  }
  const Vector row = lifted_.row(ji).transpose();
  return x.dot(as_square(row, n_) * x);
}

Vector SensingEnsemble::lifted_row(std::size_t j) const {
  check_index(j, m_);
  const auto ji = static_cast<Eigen::Index>(j);
  if (kind_ == EnsembleKind::FullRank) return lifted_.row(ji).transpose();
  const Matrix outer = vectors_.col(ji) * vectors_.col(ji).transpose();
  return vec(outer);
}

double SensingEnsemble::lifted_dot(std::size_t j, const Vector& xvec) const {
  const auto ji = static_cast<Eigen::Index>(j);
  if (kind_ == EnsembleKind::FullRank) return lifted_.row(ji).dot(xvec);
  const auto a = vectors_.col(ji);
  return a.dot(as_square(xvec, n_) * a);
}

Vector SensingEnsemble::apply(const Vector& xvec) const {
  if (static_cast<std::size_t>(xvec.size()) != unknowns()) throw Error(ErrorCode::LengthMismatch, "xvec must have n^2 entries");
  if (kind_ == EnsembleKind::FullRank) return lifted_ * xvec;
  const Matrix xa = as_square(xvec, n_) * vectors_;
  return vectors_.cwiseProduct(xa).colwise().sum().transpose();
}

Matrix SensingEnsemble::lifted_gram(std::span<const std::size_t> js) const {
  const auto k = static_cast<Eigen::Index>(js.size());
  if (kind_ == EnsembleKind::RankOne) {
    Matrix sel(static_cast<Eigen::Index>(n_), k);
    for (Eigen::Index a = 0; a < k; ++a) sel.col(a) = vectors_.col(static_cast<Eigen::Index>(js[a]));
    const Matrix inner = sel.transpose() * sel;
    return inner.cwiseProduct(inner);
  }
  RowMatrix sel(k, lifted_.cols());
  for (Eigen::Index a = 0; a < k; ++a) sel.row(a) = lifted_.row(static_cast<Eigen::Index>(js[a]));
  return sel * sel.transpose();
}

void SensingEnsemble::add_lifted_rows(std::span<const std::size_t> js, const Vector& w, Vector& xvec) const {
  const auto k = static_cast<Eigen::Index>(js.size());
  if (kind_ == EnsembleKind::RankOne) {
    Matrix sel(static_cast<Eigen::Index>(n_), k);
    for (Eigen::Index a = 0; a < k; ++a) sel.col(a) = vectors_.col(static_cast<Eigen::Index>(js[a]));
    Eigen::Map<Matrix> x(xvec.data(), static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    x.noalias() += sel * w.asDiagonal() * sel.transpose();
    return;
  }
  for (Eigen::Index a = 0; a < k; ++a) xvec += w[a] * lifted_.row(static_cast<Eigen::Index>(js[a])).transpose();
}

std::size_t SensingEnsemble::storage_bytes() const {
  return sizeof(double) * (static_cast<std::size_t>(vectors_.size()) + static_cast<std::size_t>(lifted_.size()) +
                           row_norm_sq_.size());
}

Vector lifted_row(const SensingEnsemble& ensemble, std::size_t j) { return ensemble.lifted_row(j); }

ProblemInstance make_instance(Vector x_true, std::shared_ptr<const SensingEnsemble> ensemble) {
  if (!ensemble) throw Error(ErrorCode::InvalidArgument, "null ensemble");
  if (static_cast<std::size_t>(x_true.size()) != ensemble->n()) {
    throw Error(ErrorCode::LengthMismatch, "signal length differs from ensemble dimension");
  }
  ProblemInstance inst;
  inst.sparsity = static_cast<std::size_t>((x_true.array() != 0.0).count());
  inst.y.resize(static_cast<Eigen::Index>(ensemble->m()));
  for (std::size_t j = 0; j < ensemble->m(); ++j) inst.y[static_cast<Eigen::Index>(j)] = ensemble->quadratic_form(j, x_true);
  inst.x_true = std::move(x_true);
  inst.ensemble = std::move(ensemble);
  return inst;
}

ProblemInstance generate_instance(std::size_t n, std::size_t k, std::size_t m, EnsembleKind kind,
                                  std::uint64_t seed) {
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidSparsity, "sparsity must satisfy 1 <= k <= n");
  if (m < 1) throw Error(ErrorCode::InvalidDims, "need at least one measurement");

  Rng rng = make_rng(seed, {stream::kInstance});
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  std::normal_distribution<double> normal;
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < k; ++i) {
    double v = 0.0;
    while (v == 0.0) v = normal(rng);
    x[static_cast<Eigen::Index>(idx[i])] = v;
  }

  auto ensemble = std::make_shared<const SensingEnsemble>(
      SensingEnsemble::generate(n, m, kind, derive_seed(seed, {stream::kEnsemble})));
  ProblemInstance inst = make_instance(std::move(x), std::move(ensemble));
  inst.seed = seed;
  return inst;
}

Polyhedron::Polyhedron(std::shared_ptr<const SensingEnsemble> ensemble, OneBitRecord record)
    : ensemble_(std::move(ensemble)), record_(std::move(record)) {
  if (!ensemble_) throw Error(ErrorCode::InvalidArgument, "null ensemble");
  if (record_.m() != ensemble_->m()) throw Error(ErrorCode::LengthMismatch, "record length differs from ensemble size");
  for (std::size_t j = 0; j < ensemble_->m(); ++j) {
    if (!(ensemble_->lifted_row_norm_sq(j) > 0.0)) throw Error(ErrorCode::InvalidArgument, "zero sensing row");
  }
  rhs_ = stacked_rhs(record_);
}

std::size_t Polyhedron::storage_bytes() const {
  return ensemble_->storage_bytes() +
         sizeof(double) * static_cast<std::size_t>(record_.signs.size() + record_.thresholds.gamma.size() + rhs_.size());
}

Polyhedron build_polyhedron(const ProblemInstance& instance, std::size_t m1, const ThresholdConfig& thresholds,
                            std::uint64_t seed) {
  const double range = thresholds.dynamic_range.value_or(dynamic_range(instance.y));
  ThresholdEnsemble ens = generate_thresholds(instance.m(), m1, range, seed, thresholds.mean);
  return Polyhedron(instance.ensemble, quantize(instance.y, ens));
}

Vector apply_operator(const Polyhedron& poly, const Vector& xvec, std::size_t block) {
  if (block >= poly.m1()) throw Error(ErrorCode::IndexOutOfRange, "block index out of range");
  return poly.record().signs.col(static_cast<Eigen::Index>(block)).cwiseProduct(poly.ensemble().apply(xvec));
}

FeasibilityMargin feasibility_margin(const Polyhedron& poly, const Vector& xvec) {
  const Vector vx = poly.ensemble().apply(xvec);
  const Matrix& r = poly.record().signs;
  const Matrix& g = poly.record().thresholds.gamma;
  FeasibilityMargin out{std::numeric_limits<double>::infinity(), 0};
  for (Eigen::Index l = 0; l < r.cols(); ++l) {
    for (Eigen::Index j = 0; j < r.rows(); ++j) {
      const double margin = r(j, l) * vx[j] - r(j, l) * g(j, l);
      out.min_margin = std::min(out.min_margin, margin);
      if (margin < 0.0) ++out.violated_count;
    }
  }
  return out;
}

void write_instance(const ProblemInstance& instance, const Polyhedron& poly, std::uint64_t threshold_seed,
                    const std::filesystem::path& dir) {
  nlohmann::ordered_json j;
  j["n"] = instance.n();
  j["k"] = instance.sparsity;
  j["m"] = instance.m();
  j["m1"] = poly.m1();
  j["kind"] = instance.ensemble->kind() == EnsembleKind::RankOne ? "rank_one" : "full_rank";
  j["seed"] = instance.seed;
  j["threshold_seed"] = threshold_seed;
  auto support = nlohmann::json::array();
  auto values = nlohmann::json::array();
  for (Eigen::Index i = 0; i < instance.x_true.size(); ++i) {
    if (instance.x_true[i] != 0.0) {
      support.push_back(i);
      values.push_back(instance.x_true[i]);
    }
  }
  j["support"] = support;
  j["values"] = values;
  io::write_text(dir / "instance.json", j.dump(2) + "\n");
  io::write_matrix_csv(dir / "y.csv", instance.y);
  write_record_csv(poly.record(), dir);
}

LinearProblem generate_linear_problem(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || n == 0) throw Error(ErrorCode::InvalidDims, "linear problem needs m, n >= 1");
  std::normal_distribution<double> normal;
  LinearProblem p;
  p.b.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < m; ++j) {
    Rng rng = make_rng(seed, {stream::kEnsemble, j});
    for (std::size_t c = 0; c < n; ++c) p.b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = normal(rng);
  }
  Rng rng = make_rng(seed, {stream::kInstance});
  p.x_true.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < p.x_true.size(); ++c) p.x_true[c] = normal(rng);
  p.y = p.b * p.x_true;
  return p;
}

}  // namespace obf
