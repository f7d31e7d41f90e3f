#include "onebit_feas/onebit.hpp"

#include <cmath>
#include <random>

#include "onebit_feas/error.hpp"
#include "onebit_feas/io.hpp"
#include "onebit_feas/rng.hpp"

namespace obf {

ThresholdEnsemble ThresholdEnsemble::from_matrix(Matrix gamma) {
  ThresholdEnsemble e;
  e.m = static_cast<std::size_t>(gamma.rows());
  e.m1 = static_cast<std::size_t>(gamma.cols());
  e.gamma = std::move(gamma);
  return e;
}

ThresholdEnsemble generate_thresholds(std::size_t m, std::size_t m1, double dynamic_range, std::uint64_t seed,
                                      double mean) {
  if (m == 0 || m1 == 0) throw Error(ErrorCode::InvalidDims, "threshold ensemble needs m >= 1 and m1 >= 1");
  if (!(dynamic_range > 0.0) || !std::isfinite(dynamic_range)) {
    throw Error(ErrorCode::InvalidArgument, "dynamic range must be positive and finite");
  }
  ThresholdEnsemble e;
  e.m = m;
  e.m1 = m1;
  e.mean = mean;
  e.sigma = dynamic_range / 3.0;
  e.seed = seed;
  e.gamma.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m1));
  for (std::size_t l = 0; l < m1; ++l) {
    Rng rng = make_rng(seed, {l});
    std::normal_distribution<double> normal(mean, e.sigma);
    for (std::size_t j = 0; j < m; ++j) e.gamma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = normal(rng);
  }
  return e;
}

double dynamic_range(const Vector& y) { return y.size() == 0 ? 0.0 : y.cwiseAbs().maxCoeff(); }

OneBitRecord quantize(const Vector& y, const ThresholdEnsemble& thresholds) {
  if (static_cast<std::size_t>(y.size()) != thresholds.m) {
    throw Error(ErrorCode::LengthMismatch, "measurement length differs from threshold length");
  }
  OneBitRecord rec;
  rec.thresholds = thresholds;
  rec.signs.resize(thresholds.gamma.rows(), thresholds.gamma.cols());
  for (Eigen::Index l = 0; l < thresholds.gamma.cols(); ++l)
    for (Eigen::Index j = 0; j < thresholds.gamma.rows(); ++j)
      rec.signs(j, l) = (y[j] - thresholds.gamma(j, l) >= 0.0) ? 1.0 : -1.0;
  return rec;
}

Vector stacked_rhs(const OneBitRecord& record) {
  const Matrix prod = record.signs.cwiseProduct(record.thresholds.gamma);
  return Eigen::Map<const Vector>(prod.data(), prod.size());
}

void write_record_csv(const OneBitRecord& record, const std::filesystem::path& dir) {
  io::write_matrix_csv(dir / "R.csv", record.signs, io::CsvNumbers::Integer);
  io::write_matrix_csv(dir / "Gamma.csv", record.thresholds.gamma);
}

OneBitRecord read_record_csv(const std::filesystem::path& dir) {
  OneBitRecord rec;
  rec.signs = io::read_matrix_csv(dir / "R.csv");
  rec.thresholds = ThresholdEnsemble::from_matrix(io::read_matrix_csv(dir / "Gamma.csv"));
  if (rec.signs.rows() != rec.thresholds.gamma.rows() || rec.signs.cols() != rec.thresholds.gamma.cols()) {
    throw Error(ErrorCode::ParseError, "R.csv and Gamma.csv shapes differ");
  }
  for (Eigen::Index i = 0; i < rec.signs.size(); ++i) {
    const double s = rec.signs.data()[i];
    if (s != 1.0 && s != -1.0) throw Error(ErrorCode::ParseError, "R.csv entries must be +1 or -1");
  }
  return rec;
}

}  // namespace obf
