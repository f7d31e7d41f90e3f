#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "onebit_feas/error.hpp"
#include "onebit_feas/onebit.hpp"
#include "onebit_feas/rng.hpp"

using namespace obf;

namespace {

Matrix single(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

Vector vec1(double v) {
  Vector x(1);
  x(0) = v;
  return x;
}

}  // namespace

TEST_CASE("quantize examples") {
  CHECK(quantize(vec1(0.5), ThresholdEnsemble::from_matrix(single(0.2))).signs(0, 0) == 1.0);
  CHECK(quantize(vec1(0.1), ThresholdEnsemble::from_matrix(single(0.7))).signs(0, 0) == -1.0);
  CHECK(quantize(vec1(0.3), ThresholdEnsemble::from_matrix(single(0.3))).signs(0, 0) == 1.0);
}

TEST_CASE("quantize rejects a length mismatch") {
  try {
    quantize(Vector::Zero(3), ThresholdEnsemble::from_matrix(Matrix::Zero(2, 2)));
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("stacked_rhs examples") {
  Matrix g(2, 1);
  g << 0.2, 0.5;
  OneBitRecord rec = quantize(Vector::Zero(2), ThresholdEnsemble::from_matrix(g));
  rec.signs << 1, -1;
  const Vector s = stacked_rhs(rec);
  CHECK(s(0) == doctest::Approx(0.2));
  CHECK(s(1) == doctest::Approx(-0.5));

  Matrix g2(2, 3);
  g2 << 1, 2, 3, 4, 5, 6;
  OneBitRecord all_pos = quantize(Vector::Constant(2, 10.0), ThresholdEnsemble::from_matrix(g2));
  const Vector s2 = stacked_rhs(all_pos);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(s2(i) == g2.data()[i]);

  OneBitRecord one = quantize(vec1(-3.0), ThresholdEnsemble::from_matrix(single(-1.5)));
  CHECK(one.signs(0, 0) == -1.0);
  CHECK(stacked_rhs(one)(0) == 1.5);
}

TEST_CASE("generate_thresholds scale and determinism") {
  const auto a = generate_thresholds(2, 3, 3.0, 42);
  const auto b = generate_thresholds(2, 3, 3.0, 42);
  CHECK(a.gamma == b.gamma);
  CHECK(a.sigma == 1.0);
  CHECK(a.gamma.rows() == 2);
  CHECK(a.gamma.cols() == 3);

  const double range = 2.4;
  const auto big = generate_thresholds(10000, 10, range, 7);
  const double mean = big.gamma.mean();
  const double var = (big.gamma.array() - mean).square().sum() / (big.gamma.size() - 1);
  const double expected = (range / 3) * (range / 3);
  CHECK(std::abs(var - expected) <= 0.05 * expected);
}

TEST_CASE("generate_thresholds columns are nested across m1") {
  const auto small = generate_thresholds(20, 3, 1.0, 5);
  const auto large = generate_thresholds(20, 8, 1.0, 5);
  CHECK(large.gamma.leftCols(3) == small.gamma);
}

TEST_CASE("generate_thresholds sample mean stays near zero across seeds") {
  const std::size_t m = 50, m1 = 4;
  int outside = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto t = generate_thresholds(m, m1, 3.0, seed);
    if (std::abs(t.gamma.mean()) > 4.0 * t.sigma / std::sqrt(double(m * m1))) ++outside;
  }
  // 4 sigma is exceeded with probability ~6e-5 per seed.
  CHECK(outside <= 4);
}

TEST_CASE("generate_thresholds argument errors") {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ValidationError;
  };
  CHECK(code([] { generate_thresholds(0, 2, 1.0, 1); }) == ErrorCode::InvalidDims);
  CHECK(code([] { generate_thresholds(2, 0, 1.0, 1); }) == ErrorCode::InvalidDims);
  CHECK(code([] { generate_thresholds(2, 2, 0.0, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("quantizer consistency, idempotence and locality") {
  Rng rng(99);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    Vector y(6);
    for (auto& v : y) v = nd(rng);
    const auto ens = generate_thresholds(6, 4, dynamic_range(y), trial);
    const auto rec = quantize(y, ens);
    const Matrix lhs = rec.signs.array() * (y.replicate(1, 4) - ens.gamma).array();
    CHECK((lhs.array() >= 0.0).all());
    CHECK((rec.signs.array().abs() == 1.0).all());
    CHECK(quantize(y, ens).signs == rec.signs);

    // Reflect one threshold through y: the bit flips, nothing else moves.
    auto moved = ens;
    moved.gamma(2, 1) = 2 * y(2) - ens.gamma(2, 1);
    if (moved.gamma(2, 1) == y(2)) continue;
    const Matrix diff = quantize(y, moved).signs - rec.signs;
    CHECK((diff.array() != 0.0).count() == 1);
    CHECK(diff(2, 1) != 0.0);
  }
}

TEST_CASE("record csv round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "onebit_feas_record_test";
  std::filesystem::remove_all(dir);
  Vector y(3);
  y << 0.3, -1.2, 0.9;
  const auto rec = quantize(y, generate_thresholds(3, 2, 1.2, 17));
  write_record_csv(rec, dir);
  const auto back = read_record_csv(dir);
  CHECK(back.signs == rec.signs);
  CHECK(back.thresholds.gamma == rec.thresholds.gamma);
  std::filesystem::remove_all(dir);
}
