#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "onebit_feas/onebit.hpp"
#include "onebit_feas/types.hpp"

namespace obf {

enum class EnsembleKind { RankOne, FullRank };

/// Sensing matrices {A_j} and their lifted rows vec(A_j^T)^T.
///
/// Rank-one ensembles keep only the vectors a_j (A_j = a_j a_j^T) and form
/// lifted rows a_j (x) a_j on demand. Full-rank ensembles keep the lifted
/// operator V (m x n^2, row-major) explicitly.
class SensingEnsemble {
 public:
  /// `vectors` is n x m with column j equal to a_j.
  static SensingEnsemble rank_one(Matrix vectors, std::uint64_t seed = 0);
  static SensingEnsemble full_rank(std::span<const Matrix> matrices, std::uint64_t seed = 0);
  /// a_j ~ N(0, I_n) for rank-one; i.i.d. N(0, 1) entries for full-rank.
  static SensingEnsemble generate(std::size_t n, std::size_t m, EnsembleKind kind, std::uint64_t seed);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t unknowns() const { return n_ * n_; }
  EnsembleKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

  const Matrix& vectors() const { return vectors_; }
  const RowMatrix& lifted() const { return lifted_; }

  Matrix matrix(std::size_t j) const;
  /// x^T A_j x.
  double quadratic_form(std::size_t j, const Vector& x) const;

  Vector lifted_row(std::size_t j) const;
  double lifted_row_norm_sq(std::size_t j) const { return row_norm_sq_[j]; }
  /// Tr(A_j X) for X = reshape(xvec), i.e. row j of V applied to xvec.
  double lifted_dot(std::size_t j, const Vector& xvec) const;
  /// V xvec for all m rows.
  Vector apply(const Vector& xvec) const;
  /// G[a, b] = <V_{js[a]}, V_{js[b]}>.
  Matrix lifted_gram(std::span<const std::size_t> js) const;
  /// xvec += sum_a w[a] V_{js[a]}^T.
  void add_lifted_rows(std::span<const std::size_t> js, const Vector& w, Vector& xvec) const;
  /// ||V||_F^2.
  double frobenius_sq() const { return frobenius_sq_; }
  std::size_t storage_bytes() const;

 private:
  void finalize_norms();

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  EnsembleKind kind_ = EnsembleKind::RankOne;
  std::uint64_t seed_ = 0;
  Matrix vectors_;
  RowMatrix lifted_;
  std::vector<double> row_norm_sq_;
  double frobenius_sq_ = 0.0;
};

/// Vectorization is column-major: vec(X)[p + n*q] = X(p, q).
Vector lifted_row(const SensingEnsemble& ensemble, std::size_t j);
Vector vec(const Matrix& x);
Matrix unvec(const Vector& xvec, std::size_t n);

struct ProblemInstance {
  Vector x_true;
  std::size_t sparsity = 0;
  std::shared_ptr<const SensingEnsemble> ensemble;
  Vector y;
  std::uint64_t seed = 0;

  std::size_t n() const { return static_cast<std::size_t>(x_true.size()); }
  std::size_t m() const { return static_cast<std::size_t>(y.size()); }
  Matrix lifted_truth() const { return x_true * x_true.transpose(); }
  Vector lifted_truth_vec() const { return vec(lifted_truth()); }
};

/// k-sparse x with uniformly random support and N(0, 1) amplitudes, a fresh
/// ensemble, and y_j = x^T A_j x.
ProblemInstance generate_instance(std::size_t n, std::size_t k, std::size_t m, EnsembleKind kind,
                                  std::uint64_t seed);
/// Builds an instance around a given signal and ensemble.
ProblemInstance make_instance(Vector x_true, std::shared_ptr<const SensingEnsemble> ensemble);

struct ThresholdConfig {
  /// Defaults to ||y||_inf.
  std::optional<double> dynamic_range;
  double mean = 0.0;
};

/// The one-bit polyhedron { X : P vec(X) >= vec(R) .* vec(Gamma) } with
/// P = [V^T Omega_1 | ... | V^T Omega_m1]^T. P itself is never formed.
class Polyhedron {
 public:
  Polyhedron(std::shared_ptr<const SensingEnsemble> ensemble, OneBitRecord record);

  const SensingEnsemble& ensemble() const { return *ensemble_; }
  std::shared_ptr<const SensingEnsemble> ensemble_ptr() const { return ensemble_; }
  const OneBitRecord& record() const { return record_; }
  const Vector& rhs() const { return rhs_; }

  std::size_t m() const { return record_.m(); }
  std::size_t m1() const { return record_.m1(); }
  std::size_t rows() const { return m() * m1(); }
  std::size_t unknowns() const { return ensemble_->unknowns(); }
  std::size_t storage_bytes() const;

 private:
  std::shared_ptr<const SensingEnsemble> ensemble_;
  OneBitRecord record_;
  Vector rhs_;
};

Polyhedron build_polyhedron(const ProblemInstance& instance, std::size_t m1, const ThresholdConfig& thresholds,
                            std::uint64_t seed);

/// Omega_l V xvec: entry j is r_j^(l) * Tr(A_j X).
Vector apply_operator(const Polyhedron& poly, const Vector& xvec, std::size_t block);

struct FeasibilityMargin {
  double min_margin = 0.0;
  std::size_t violated_count = 0;
};

/// min over rows of (P vec(X) - rhs) and the number of strictly negative rows.
FeasibilityMargin feasibility_margin(const Polyhedron& poly, const Vector& xvec);

/// instance.json (n, k, m, m1, kind, seed, support, values) plus y.csv, R.csv
/// and Gamma.csv.
void write_instance(const ProblemInstance& instance, const Polyhedron& poly, std::uint64_t threshold_seed,
                    const std::filesystem::path& dir);

/// A plain linear one-bit problem: y = B x with Gaussian B and x.
struct LinearProblem {
  Matrix b;
  Vector x_true;
  Vector y;
};

LinearProblem generate_linear_problem(std::size_t m, std::size_t n, std::uint64_t seed);

}  // namespace obf
