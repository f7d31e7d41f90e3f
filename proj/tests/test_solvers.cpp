#include <cmath>
#include <numeric>

#include "doctest.h"
#include "onebit_feas/error.hpp"
#include "onebit_feas/linalg.hpp"
#include "onebit_feas/onebit.hpp"
#include "onebit_feas/qcs.hpp"
#include "onebit_feas/rng.hpp"
#include "onebit_feas/solvers.hpp"
#include "onebit_feas/systems.hpp"

using namespace obf;

namespace {

Matrix gaussian(Eigen::Index r, Eigen::Index c, Rng& rng) {
  std::normal_distribution<double> nd;
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = nd(rng);
  return m;
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ValidationError;
}

// B x <= B x_f + slack with slack >= 0, so x_f is feasible.
DenseInequalitySystem consistent_system(std::size_t rows, std::size_t cols, std::size_t block, Rng& rng,
                                        Vector& x_feas, double slack = 0.5) {
  const Matrix b = gaussian(rows, cols, rng);
  x_feas = gaussian(cols, 1, rng);
  std::uniform_real_distribution<double> u(0.0, slack);
  Vector rhs = b * x_feas;
  for (auto& r : rhs) r += u(rng);
  return DenseInequalitySystem(b, rhs, block);
}

std::shared_ptr<const Polyhedron> small_polyhedron(EnsembleKind kind, std::uint64_t seed) {
  const auto inst = generate_instance(4, 2, 12, kind, seed);
  return std::make_shared<const Polyhedron>(build_polyhedron(inst, 3, {}, seed + 1));
}

DenseInequalitySystem densify(const InequalitySystem& sys) {
  Matrix b(sys.rows(), sys.cols());
  Vector rhs(sys.rows());
  std::vector<std::size_t> offsets{0};
  for (std::size_t i = 0; i < sys.rows(); ++i) {
    b.row(i) = sys.row(i).transpose();
    rhs(i) = sys.rhs(i);
  }
  for (std::size_t l = 0; l < sys.block_count(); ++l) offsets.push_back(sys.block_rows(l).end);
  return DenseInequalitySystem(b, rhs, offsets);
}

}  // namespace

TEST_CASE("projection_coefficient examples") {
  CHECK(projection_coefficient(v2(1, 0), 1, v2(2, 0)) == 1.0);
  CHECK(projection_coefficient(v2(1, 0), 1, v2(-3, 0)) == 0.0);
  CHECK(projection_coefficient(v2(1, 1), 2, v2(1, 1)) == 0.0);
  CHECK(projection_coefficient(v2(1, 0), 1, v2(-3, 0), true) == -4.0);
}

TEST_CASE("rka examples") {
  Matrix b(1, 2);
  b << 2, 0;
  const DenseInequalitySystem sys(b, Vector::Constant(1, 2.0), 1);
  Rng rng(1);

  Vector x = v2(3, 5);
  rka_step(sys, x, 1.0, rng);
  CHECK(sys.row_dot(0, x) == doctest::Approx(2.0));
  CHECK(x(1) == 5.0);

  Vector y = v2(0, 1);
  const Vector before = y;
  rka_step(sys, y, 1.0, rng);
  CHECK(y == before);

  // Residual 4 halves under lambda = 0.5.
  Vector z = v2(3, 0);
  rka_step(sys, z, 0.5, rng);
  CHECK(sys.row_dot(0, z) - sys.rhs(0) == doctest::Approx(2.0));
}

TEST_CASE("rka samples rows proportionally to their squared norms") {
  Matrix b(3, 2);
  b << 1, 0, 0, 2, 1, 1;  // norms^2 1, 4, 2
  const DenseInequalitySystem sys(b, Vector::Zero(3), 1);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::Rka;
  Rng rng(5);
  Stepper st(sys, cfg, rng);
  std::vector<double> counts(3, 0.0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) counts[st.sample_row()] += 1;
  const double p[3] = {1 / 7.0, 4 / 7.0, 2 / 7.0};
  for (int i = 0; i < 3; ++i) CHECK(std::abs(counts[i] / draws - p[i]) <= 3 * std::sqrt(p[i] * (1 - p[i]) / draws));
}

TEST_CASE("skm Motzkin choice and tie-break") {
  Matrix b(3, 2);
  b << 1, 0, 0, 1, 1, 0;
  Vector rhs(3);
  rhs << 0, 0, -1;
  const DenseInequalitySystem sys(b, rhs, 3);
  std::vector<std::size_t> all(3);
  std::iota(all.begin(), all.end(), std::size_t{0});

  // Residuals 2, 1, 3: row 2 wins.
  Vector x = v2(2, 1);
  auto out = skm_step_on(sys, all, x, 1.0);
  CHECK(out.updated);
  CHECK(x(0) == doctest::Approx(-1.0));

  // Residuals 1, 1 on rows 0 and 1: lower index wins.
  const DenseInequalitySystem tie(b.topRows(2), Vector::Zero(2), 2);
  Vector t = v2(1, 1);
  skm_step_on(tie, std::vector<std::size_t>{1, 0}, t, 1.0);
  CHECK(t(0) == doctest::Approx(0.0));
  CHECK(t(1) == 1.0);

  // Full sample through the Stepper is deterministic.
  SolverConfig cfg;
  cfg.algorithm = Algorithm::Skm;
  cfg.gamma = 3;
  Vector a = v2(2, 1), c = v2(2, 1);
  Rng r1(1), r2(99);
  Stepper(sys, cfg, r1).step(a);
  Stepper(sys, cfg, r2).step(c);
  CHECK(a == c);
}

TEST_CASE("skm with gamma one matches the single-row projection") {
  Rng gen(8);
  Vector xf;
  const auto sys = consistent_system(30, 6, 30, gen, xf);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::Skm;
  cfg.gamma = 1;
  cfg.lambda = 0.7;
  Rng rng(3);
  Stepper st(sys, cfg, rng);
  for (int i = 0; i < 50; ++i) {
    Vector x = gaussian(6, 1, gen) * 3;
    Rng probe = st.rng();
    Stepper mirror(sys, cfg, probe);
    const std::size_t row = mirror.sample_rows_uniform(1).front();
    Vector expected = x;
    project_onto_row(sys, row, expected, 0.7);
    st.step(x);
    CHECK((x - expected).norm() <= 1e-12);
  }
}

TEST_CASE("block skm examples") {
  Matrix b(1, 2);
  b << 2, 0;
  const DenseInequalitySystem sys(b, Vector::Constant(1, 2.0), 1);
  Vector x = v2(3, 0);
  block_skm_step_on(sys, 0, 1, x, 1.0);
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == 0.0);

  Vector y = v2(0, 0);
  const auto out = block_skm_step_on(sys, 0, 1, y, 1.0);
  CHECK_FALSE(out.updated);
  CHECK(y == v2(0, 0));

  // Two orthonormal rows in R^3, both violated: one step lands on both faces.
  Matrix o = Matrix::Zero(2, 3);
  o(0, 0) = 1;
  o(1, 1) = 1;
  const DenseInequalitySystem two(o, v2(1, -2), 2);
  Vector z(3);
  z << 4, 1, 7;
  block_skm_step_on(two, 0, 2, z, 1.0);
  CHECK(z(0) == doctest::Approx(1.0));
  CHECK(z(1) == doctest::Approx(-2.0));
  CHECK(z(2) == 7.0);
}

TEST_CASE("top_residual_rows orders by value then index") {
  Vector e(6);
  e << 1, 3, -2, 3, 0.5, 2;
  const auto top = top_residual_rows(e, 4);
  CHECK(top == std::vector<std::size_t>{1, 3, 5, 0});
  CHECK(top_residual_rows(e, 10).size() == 6);
}

TEST_CASE("block skm with k' = 1 is a Motzkin projection within the block") {
  Rng gen(17);
  Vector xf;
  const auto sys = consistent_system(40, 8, 10, gen, xf);
  for (int i = 0; i < 40; ++i) {
    Vector x = gaussian(8, 1, gen) * 2;
    const std::size_t block = i % 4;
    const RowRange r = sys.block_rows(block);
    std::vector<std::size_t> rows(r.size());
    std::iota(rows.begin(), rows.end(), r.begin);
    Vector expected = x;
    skm_step_on(sys, rows, expected, 1.0);
    block_skm_step_on(sys, block, 1, x, 1.0);
    CHECK((x - expected).norm() <= 1e-12);
  }
}

TEST_CASE("identity sketch matches block skm on the window") {
  Rng gen(23);
  Vector xf;
  const auto sys = consistent_system(30, 8, 3, gen, xf);
  for (int i = 0; i < 30; ++i) {
    Vector a = gaussian(8, 1, gen) * 2;
    Vector b = a;
    const std::size_t alpha = i % sketch_window_count(30, 3);
    block_skm_step_on(sys, alpha, 3, a, 0.9);
    gaussian_sketch_step_on(sys, alpha, Matrix::Identity(3, 3), b, 0.9);
    CHECK((a - b).norm() <= 1e-12);
  }
}

TEST_CASE("sketch window placement") {
  CHECK(sketch_window_offset(2, 1) == 2);
  CHECK(sketch_window_count(6, 2) == 3);
  CHECK(sketch_window_count(7, 2) == 3);
  Matrix b = Matrix::Identity(6, 6);
  const DenseInequalitySystem sys(b.topRows(6).leftCols(6), Vector::Zero(6), 6);
  Vector x = Vector::Ones(6);
  gaussian_sketch_step_on(sys, 1, Matrix::Identity(2, 2), x, 1.0);
  // Only coordinates 2 and 3 (rows 3-4) are touched.
  Vector expected = Vector::Ones(6);
  expected(2) = expected(3) = 0.0;
  CHECK((x - expected).norm() <= 1e-12);
  Vector y = Vector::Ones(6);
  CHECK(code_of([&] { gaussian_sketch_step_on(sys, 3, Matrix::Identity(2, 2), y, 1.0); }) ==
        ErrorCode::IndexOutOfRange);
}

TEST_CASE("single-row steps never move away from a feasible point") {
  Rng gen(31);
  for (int sys_i = 0; sys_i < 5; ++sys_i) {
    Vector xf;
    const auto sys = consistent_system(60, 10, 12, gen, xf);
    for (Algorithm a : {Algorithm::Rka, Algorithm::Skm}) {
      SolverConfig cfg;
      cfg.algorithm = a;
      cfg.gamma = 10;
      Rng rng = make_rng(sys_i, {static_cast<std::uint64_t>(a)});
      Stepper st(sys, resolve_config(cfg, sys), rng);
      Vector x = xf + 5 * gaussian(10, 1, gen);
      for (int i = 0; i < 200; ++i) {
        const double before = (x - xf).squaredNorm();
        st.step(x);
        CHECK((x - xf).squaredNorm() <= before + 1e-9);
      }
    }
  }
}

TEST_CASE("block steps onto active violated rows never move away from the solution") {
  // Zero slack makes every row active at x_f. A block update is a projection
  // onto an affine set through x_f when every selected residual is positive.
  Rng gen(37);
  std::size_t checked_block = 0, checked_sketch = 0;
  for (int sys_i = 0; sys_i < 5; ++sys_i) {
    Vector xf;
    const auto sys = consistent_system(60, 10, 12, gen, xf, 0.0);
    Rng rng(100 + sys_i);
    Vector x = xf + 5 * gaussian(10, 1, gen);
    Vector y = x;
    std::uniform_int_distribution<std::size_t> pick_block(0, 4), pick_window(0, 14);
    for (int i = 0; i < 200; ++i) {
      const std::size_t block = pick_block(rng);
      const Vector e = sys.block_residual(block, x);
      const auto top = top_residual_rows(e, 4);
      const double before = (x - xf).squaredNorm();
      block_skm_step_on(sys, block, 4, x, 1.0);
      if (e(static_cast<Eigen::Index>(top.back())) > 0.0) {
        CHECK((x - xf).squaredNorm() <= before + 1e-9);
        ++checked_block;
      }

      const std::size_t alpha = pick_window(rng);
      const Matrix g = gaussian_sketch_matrix(4, rng);
      const Matrix rows = sys.matrix().middleRows(4 * alpha, 4);
      const Vector es = g * (rows * y - sys.rhs_vector().segment(4 * alpha, 4));
      const double before_y = (y - xf).squaredNorm();
      gaussian_sketch_step_on(sys, alpha, g, y, 1.0);
      if (es.minCoeff() > 0.0) {
        CHECK((y - xf).squaredNorm() <= before_y + 1e-9);
        ++checked_sketch;
      }
    }
  }
  CHECK(checked_block >= 200);
  CHECK(checked_sketch >= 50);
}

TEST_CASE("block sampling follows block Frobenius norms") {
  Matrix b(6, 2);
  b << 1, 0, 0, 1, 2, 0, 0, 2, 3, 0, 0, 0.5;
  const DenseInequalitySystem sys(b, Vector::Zero(6), std::vector<std::size_t>{0, 2, 4, 6});
  const double total = b.squaredNorm();
  const double p[3] = {2 / total, 8 / total, 9.25 / total};
  SolverConfig cfg;
  cfg.k_prime = 1;
  Rng rng(77);
  Stepper st(sys, cfg, rng);
  const int draws = 100000;
  std::vector<double> counts(3, 0.0);
  for (int i = 0; i < draws; ++i) counts[st.sample_block()] += 1;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(counts[i] / draws - p[i]) <= 3 * std::sqrt(p[i] * (1 - p[i]) / draws));
}

TEST_CASE("one-bit blocks share the Frobenius norm of V") {
  for (auto kind : {EnsembleKind::RankOne, EnsembleKind::FullRank}) {
    const auto poly = small_polyhedron(kind, 4);
    const QcsInequalitySystem sys(poly);
    CHECK(sys.block_count() == 3);
    const DenseInequalitySystem dense = densify(sys);
    for (std::size_t l = 0; l < 3; ++l) {
      const RowRange r = dense.block_rows(l);
      const double direct = dense.matrix().middleRows(r.begin, r.size()).squaredNorm();
      CHECK(direct == doctest::Approx(poly->ensemble().frobenius_sq()).epsilon(1e-14));
      CHECK(sys.block_frobenius_sq(l) == doctest::Approx(direct).epsilon(1e-14));
    }
  }
}

TEST_CASE("one-bit system oracles agree with explicit rows") {
  Rng gen(41);
  for (auto kind : {EnsembleKind::RankOne, EnsembleKind::FullRank}) {
    const auto poly = small_polyhedron(kind, 9);
    const QcsInequalitySystem sys(poly);
    const DenseInequalitySystem dense = densify(sys);
    // Rows are -r_j^(l) vec(A_j^T)^T.
    for (std::size_t i = 0; i < sys.rows(); ++i) {
      const std::size_t j = i % 12, l = i / 12;
      const Vector expected = -poly->record().signs(j, l) * lifted_row(poly->ensemble(), j);
      CHECK((sys.row(i) - expected).norm() == 0.0);
    }
    const Vector x = gaussian(16, 1, gen);
    for (std::size_t l = 0; l < 3; ++l) {
      CHECK((sys.block_residual(l, x) - dense.block_residual(l, x)).norm() <= 1e-10);
    }
    const std::vector<std::size_t> sel{1, 13, 30, 5};
    CHECK((sys.gram(sel) - dense.gram(sel)).norm() <= 1e-10 * dense.gram(sel).norm());
    const Vector w = gaussian(4, 1, gen);
    Vector a = x, b = x;
    sys.add_rows(sel, w, a);
    dense.add_rows(sel, w, b);
    CHECK((a - b).norm() <= 1e-10 * b.norm());
    CHECK(sys.max_positive_residual(x) == doctest::Approx(dense.max_positive_residual(x)));
    Vector s1 = x, s2 = x;
    block_skm_step_on(sys, 2, 3, s1, 1.0);
    block_skm_step_on(dense, 2, 3, s2, 1.0);
    CHECK((s1 - s2).norm() <= 1e-9 * s2.norm());
  }
}

TEST_CASE("linear one-bit system") {
  Matrix b(2, 2);
  b << 1, 0, 0, 1;
  Vector y = v2(1, -1);
  Matrix g(2, 2);
  g << 0.5, 2, 0, -3;
  const auto rec = quantize(y, ThresholdEnsemble::from_matrix(g));
  const auto sys = linear_onebit_system(b, rec);
  CHECK(sys.rows() == 4);
  CHECK(sys.block_count() == 2);
  // y_0 = 1 > 0.5: r = +1, row -b_0, rhs -0.5.
  CHECK(sys.row(0) == -b.row(0).transpose());
  CHECK(sys.rhs(0) == -0.5);
  // y_0 = 1 < 2: r = -1, row b_0, rhs 2.
  CHECK(sys.row(2) == b.row(0).transpose());
  CHECK(sys.rhs(2) == 2.0);
  CHECK(sys.max_positive_residual(y) == 0.0);
}

TEST_CASE("zero rows are rejected") {
  Matrix b = Matrix::Identity(2, 2);
  b(1, 1) = 0;
  CHECK(code_of([&] { DenseInequalitySystem s(b, Vector::Zero(2), 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("resolve_config") {
  Rng gen(2);
  Vector xf;
  const auto sys = consistent_system(300, 20, 100, gen, xf);
  SolverConfig cfg;
  const auto r = resolve_config(cfg, sys);
  CHECK(r.gamma == 100);
  CHECK(r.k_prime == default_k_prime(20));
  CHECK(default_k_prime(4096) == 128);
  CHECK(default_k_prime(64) == 8);
  CHECK(default_k_prime(4) == 1);
  auto bad = cfg;
  bad.lambda = 2.0;
  CHECK(code_of([&] { resolve_config(bad, sys); }) == ErrorCode::InvalidArgument);
  bad = cfg;
  bad.k_prime = 20;
  CHECK(code_of([&] { resolve_config(bad, sys); }) == ErrorCode::InvalidArgument);
  bad = cfg;
  bad.algorithm = Algorithm::Skm;
  bad.gamma = 301;
  CHECK(code_of([&] { resolve_config(bad, sys); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("solve termination") {
  Matrix b = Matrix::Identity(2, 2);
  const DenseInequalitySystem at_zero(b, Vector::Zero(2), 1);
  SolverConfig cfg;
  cfg.k_prime = 1;
  const auto r0 = solve(at_zero, cfg);
  CHECK(r0.trace.iterations == 0);
  CHECK(r0.trace.termination == Termination::Feasible);
  CHECK(r0.x == Vector::Zero(2));

  Rng gen(55);
  Vector xf;
  const auto sys = consistent_system(80, 6, 20, gen, xf);
  SolveOptions opts;
  opts.x0 = Vector::Constant(6, 10.0);
  for (Algorithm a : {Algorithm::Rka, Algorithm::Skm, Algorithm::BlockSkm}) {
    SolverConfig c;
    c.algorithm = a;
    c.k_prime = 3;
    c.max_iters = 20000;
    c.tol_margin = 1e-8;
    const auto res = solve(sys, c, opts);
    CHECK(res.trace.termination == Termination::Feasible);
    Vector resid = sys.matrix() * res.x - sys.rhs_vector();
    CHECK(resid.maxCoeff() <= 1e-8);
    CHECK(res.trace.records.back().max_pos_residual == doctest::Approx(std::max(resid.maxCoeff(), 0.0)));
  }
}

TEST_CASE("a negative sketch weight reverses the sketched inequality") {
  Matrix b(2, 2);
  b << 1, 0, 0, 1;
  const DenseInequalitySystem sys(b, Vector::Zero(2), 1);
  // x satisfies row 0 strictly; the sketched row -b_0 x <= 0 does not hold.
  Vector x = v2(-1, 5);
  Matrix g = Matrix::Constant(1, 1, -2.0);
  const auto out = gaussian_sketch_step_on(sys, 0, g, x, 1.0);
  CHECK(out.updated);
  CHECK(x(0) == doctest::Approx(0.0));
  CHECK(x(1) == 5.0);
}

TEST_CASE("stable solvers stay finite across a seeded grid") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng gen(seed);
    Vector xf;
    const auto sys = consistent_system(60, 8, 15, gen, xf);
    for (Algorithm a : {Algorithm::Rka, Algorithm::Skm, Algorithm::BlockSkm}) {
      for (double lambda : {0.3, 1.0, 1.7}) {
        SolverConfig c;
        c.algorithm = a;
        c.lambda = lambda;
        c.k_prime = 4;
        c.max_iters = 500;
        c.seed = seed;
        SolveOptions opts;
        opts.ground_truth = xf;
        const auto res = solve(sys, c, opts);
        CHECK(res.x.allFinite());
        CHECK(std::isfinite(res.trace.records.back().max_pos_residual));
      }
    }
  }
}

TEST_CASE("solve stops on the ground-truth tolerance") {
  Rng gen(56);
  Vector xf;
  // Zero slack: x_f is the unique feasible point.
  const auto sys = consistent_system(120, 5, 30, gen, xf, 0.0);
  SolverConfig cfg;
  cfg.k_prime = 4;
  cfg.max_iters = 5000;
  cfg.tol_margin = 0.0;
  cfg.tol_nmse = 1e-6;
  SolveOptions opts;
  opts.ground_truth = xf;
  const auto res = solve(sys, cfg, opts);
  CHECK(res.trace.termination == Termination::NmseReached);
  CHECK((res.x - xf).squaredNorm() <= 1e-6 * xf.squaredNorm());
  for (const auto& rec : res.trace.records) {
    CHECK(std::isfinite(rec.err_sq));
    CHECK(rec.err_sq >= 0.0);
  }
}

TEST_CASE("solve is deterministic under a fixed seed") {
  const auto poly = small_polyhedron(EnsembleKind::RankOne, 12);
  const QcsInequalitySystem sys(poly);
  for (Algorithm a : {Algorithm::Rka, Algorithm::Skm, Algorithm::BlockSkm, Algorithm::GaussianSketchBlockSkm}) {
    SolverConfig cfg;
    cfg.algorithm = a;
    cfg.k_prime = 3;
    cfg.max_iters = 300;
    cfg.seed = 1234;
    cfg.log_stride = 7;
    SolveOptions opts;
    opts.ground_truth = Vector::Zero(16);
    const auto r1 = solve(sys, cfg, opts);
    const auto r2 = solve(sys, cfg, opts);
    CHECK(r1.x == r2.x);
    CHECK(trace_csv(r1.trace, false) == trace_csv(r2.trace, false));
    CHECK(r1.trace.records.size() <= cfg.max_iters / cfg.log_stride + 2);
  }
}

TEST_CASE("solve stop predicate and logging stride") {
  Rng gen(60);
  Vector xf;
  const auto sys = consistent_system(50, 5, 10, gen, xf, 0.0);
  SolverConfig cfg;
  cfg.k_prime = 2;
  cfg.max_iters = 100;
  cfg.log_stride = 10;
  cfg.tol_margin = 0.0;
  SolveOptions opts;
  opts.stop = [](const Vector&, std::size_t iter) { return iter >= 30; };
  const auto res = solve(sys, cfg, opts);
  CHECK(res.trace.termination == Termination::StopRequested);
  CHECK(res.trace.iterations == 30);
  REQUIRE(res.trace.records.size() == 4);
  CHECK(res.trace.records[3].iter == 30);
  CHECK(std::isnan(res.trace.records[0].err_sq));

  const std::string csv = trace_csv(res.trace, false);
  CHECK(csv.rfind("iter,err_sq,max_pos_residual,selected_block,wall_ns\n", 0) == 0);
}

TEST_CASE("solve raises NonFinite") {
  Matrix b(1, 2);
  b << 1e300, 1e300;
  const DenseInequalitySystem sys(b, Vector::Constant(1, -1e300), 1);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::Rka;
  SolveOptions opts;
  opts.x0 = v2(1e300, 1e300);
  CHECK(code_of([&] { solve(sys, cfg, opts); }) == ErrorCode::NonFinite);
}

TEST_CASE("skm_bound") {
  CHECK(skm_bound(1.0, 1.0, 3, 2.0) == 0.0);
  CHECK(skm_bound(2.0, 1.0, 2, 1.0) == doctest::Approx(0.5625));
  CHECK(skm_bound(3.0, 0.8, 0, 4.5) == 4.5);
  CHECK(skm_bound(3.0, 0.8, 5, 1.0) < skm_bound(3.0, 0.8, 4, 1.0));
  CHECK(code_of([] { skm_bound(0.5, 1.0, 1, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { skm_bound(2.0, 2.0, 1, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("block_rate_bound") {
  // c chosen so the factor is 0.9.
  const double frob = 10.0, sigma = 1.0;
  const double c = 0.1 * frob / (sigma * std::log(2.0));
  CHECK(block_rate_bound(sigma, frob, 2, c, 10, 1.0) == doctest::Approx(std::pow(0.9, 10)));
  CHECK(block_rate_bound(sigma, frob, 2, c, 0, 3.0) == 3.0);
  CHECK(block_rate_bound(0.0, frob, 4, 0.5, 25, 2.0) == 2.0);
  CHECK(code_of([] { block_rate_bound(1.0, 1.0, 8, 5.0, 3, 1.0); }) == ErrorCode::InvalidRate);
  CHECK(code_of([] { block_rate_bound(1.0, 1.0, 1, 0.5, 3, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("algorithm names") {
  for (Algorithm a : {Algorithm::Rka, Algorithm::Skm, Algorithm::BlockSkm, Algorithm::GaussianSketchBlockSkm}) {
    CHECK(parse_algorithm(to_string(a)) == a);
  }
  CHECK_FALSE(parse_algorithm("kaczmarz").has_value());
}
