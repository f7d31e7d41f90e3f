#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "onebit_feas/types.hpp"

namespace obf {

/// m1 threshold sequences of length m, stored as the columns of an m x m1
/// matrix. Entries are i.i.d. N(mean, sigma^2).
struct ThresholdEnsemble {
  std::size_t m = 0;
  std::size_t m1 = 0;
  Matrix gamma;
  double mean = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  /// Wraps explicit threshold values (mean/sigma/seed left at zero).
  static ThresholdEnsemble from_matrix(Matrix gamma);
};

/// Sign bits R (m x m1, entries +-1) of y against each threshold sequence.
struct OneBitRecord {
  Matrix signs;
  ThresholdEnsemble thresholds;

  std::size_t m() const { return thresholds.m; }
  std::size_t m1() const { return thresholds.m1; }
};

/// Threshold standard deviation is dynamic_range / 3. Column l is drawn from
/// its own stream derive_seed(seed, {l}), so the first k columns do not depend
/// on m1.
ThresholdEnsemble generate_thresholds(std::size_t m, std::size_t m1, double dynamic_range, std::uint64_t seed,
                                      double mean = 0.0);

/// ||y||_inf.
double dynamic_range(const Vector& y);

/// R[j, l] = sign(y_j - Gamma[j, l]) with sign(0) = +1.
OneBitRecord quantize(const Vector& y, const ThresholdEnsemble& thresholds);

/// vec(R) .* vec(Gamma), column-major: sequence l occupies [l*m, (l+1)*m).
Vector stacked_rhs(const OneBitRecord& record);

/// R.csv (+-1 integers) and Gamma.csv (17 significant digits) in `dir`.
void write_record_csv(const OneBitRecord& record, const std::filesystem::path& dir);
OneBitRecord read_record_csv(const std::filesystem::path& dir);

}  // namespace obf
