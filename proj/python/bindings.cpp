#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "onebit_feas/error.hpp"
#include "onebit_feas/experiments.hpp"
#include "onebit_feas/linalg.hpp"
#include "onebit_feas/onebit.hpp"
#include "onebit_feas/qcs.hpp"
#include "onebit_feas/recovery.hpp"
#include "onebit_feas/solvers.hpp"
#include "onebit_feas/systems.hpp"

namespace py = pybind11;
using namespace obf;

namespace {

SolverConfig make_config(Algorithm algorithm, double lambda, std::size_t gamma, std::size_t k_prime,
                         std::size_t max_iters, double tol_margin, std::optional<double> tol_nmse, std::uint64_t seed,
                         std::size_t log_stride) {
  SolverConfig c;
  c.algorithm = algorithm;
  c.lambda = lambda;
  c.gamma = gamma;
  c.k_prime = k_prime;
  c.max_iters = max_iters;
  c.tol_margin = tol_margin;
  c.tol_nmse = tol_nmse;
  c.seed = seed;
  c.log_stride = log_stride;
  return c;
}

py::dict trace_dict(const SolverTrace& t) {
  std::vector<std::size_t> iter;
  std::vector<double> err, resid;
  std::vector<std::ptrdiff_t> block;
  for (const auto& r : t.records) {
    iter.push_back(r.iter);
    err.push_back(r.err_sq);
    resid.push_back(r.max_pos_residual);
    block.push_back(r.selected_block);
  }
  py::dict d;
  d["iter"] = iter;
  d["err_sq"] = err;
  d["max_pos_residual"] = resid;
  d["selected_block"] = block;
  d["iterations"] = t.iterations;
  d["wall_ns"] = t.wall_ns;
  d["termination"] = std::string(to_string(t.termination));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "One-bit quadratic compressed sensing with randomized Kaczmarz-family feasibility solvers";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::enum_<EnsembleKind>(m, "EnsembleKind")
      .value("RankOne", EnsembleKind::RankOne)
      .value("FullRank", EnsembleKind::FullRank);
  py::enum_<Algorithm>(m, "Algorithm")
      .value("Rka", Algorithm::Rka)
      .value("Skm", Algorithm::Skm)
      .value("BlockSkm", Algorithm::BlockSkm)
      .value("GaussianSketchBlockSkm", Algorithm::GaussianSketchBlockSkm);

  // linalg
  m.def("frobenius_norm_sq", &linalg::frobenius_norm_sq);
  m.def("gram_pseudoinverse_apply", &linalg::gram_pseudoinverse_apply, py::arg("rows"), py::arg("v"));
  m.def(
      "dominant_eigenpair",
      [](const Matrix& mat, double tol, std::size_t max_iter) {
        const auto p = linalg::dominant_eigenpair(mat, tol, max_iter);
        return py::make_tuple(p.value, p.vector);
      },
      py::arg("m"), py::arg("tol") = 1e-10, py::arg("max_iter") = 20000);
  m.def("scaled_condition_number", &linalg::scaled_condition_number);

  // onebit
  py::class_<ThresholdEnsemble>(m, "ThresholdEnsemble")
      .def_static("from_matrix", &ThresholdEnsemble::from_matrix)
      .def_readonly("gamma", &ThresholdEnsemble::gamma)
      .def_readonly("sigma", &ThresholdEnsemble::sigma)
      .def_readonly("seed", &ThresholdEnsemble::seed);
  py::class_<OneBitRecord>(m, "OneBitRecord")
      .def_readonly("signs", &OneBitRecord::signs)
      .def_readonly("thresholds", &OneBitRecord::thresholds);
  m.def("generate_thresholds", &generate_thresholds, py::arg("m"), py::arg("m1"), py::arg("dynamic_range"),
        py::arg("seed"), py::arg("mean") = 0.0);
  m.def("quantize", &quantize, py::arg("y"), py::arg("thresholds"));
  m.def("stacked_rhs", &stacked_rhs);

  // qcs
  py::class_<SensingEnsemble, std::shared_ptr<SensingEnsemble>>(m, "SensingEnsemble")
      .def_static("generate", &SensingEnsemble::generate, py::arg("n"), py::arg("m"), py::arg("kind"), py::arg("seed"))
      .def_property_readonly("n", &SensingEnsemble::n)
      .def_property_readonly("m", &SensingEnsemble::m)
      .def("matrix", &SensingEnsemble::matrix)
      .def("lifted_row", &SensingEnsemble::lifted_row)
      .def("apply", &SensingEnsemble::apply);
  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_readonly("x_true", &ProblemInstance::x_true)
      .def_readonly("y", &ProblemInstance::y)
      .def_readonly("sparsity", &ProblemInstance::sparsity)
      .def_property_readonly("ensemble", [](const ProblemInstance& p) { return std::const_pointer_cast<SensingEnsemble>(p.ensemble); })
      .def("lifted_truth", &ProblemInstance::lifted_truth);
  m.def("generate_instance", &generate_instance, py::arg("n"), py::arg("k"), py::arg("m"), py::arg("kind"),
        py::arg("seed"));
  py::class_<Polyhedron, std::shared_ptr<Polyhedron>>(m, "Polyhedron")
      .def_property_readonly("rows", &Polyhedron::rows)
      .def_property_readonly("m1", &Polyhedron::m1)
      .def_property_readonly("rhs", &Polyhedron::rhs)
      .def_property_readonly("record", &Polyhedron::record)
      .def("apply_operator", [](const Polyhedron& p, const Vector& x, std::size_t l) { return apply_operator(p, x, l); })
      .def("feasibility_margin", [](const Polyhedron& p, const Vector& x) {
        const auto f = feasibility_margin(p, x);
        return py::make_tuple(f.min_margin, f.violated_count);
      });
  m.def(
      "build_polyhedron",
      [](const ProblemInstance& inst, std::size_t m1, std::uint64_t seed, std::optional<double> range) {
        ThresholdConfig cfg;
        cfg.dynamic_range = range;
        return std::make_shared<Polyhedron>(build_polyhedron(inst, m1, cfg, seed));
      },
      py::arg("instance"), py::arg("m1"), py::arg("seed"), py::arg("dynamic_range") = py::none());
  m.def("vec", &vec);
  m.def("unvec", &unvec);

  // solvers
  m.def(
      "solve_polyhedron",
      [](std::shared_ptr<Polyhedron> poly, Algorithm algorithm, double lambda, std::size_t gamma, std::size_t k_prime,
         std::size_t max_iters, double tol_margin, std::optional<double> tol_nmse, std::uint64_t seed,
         std::size_t log_stride, std::optional<Vector> ground_truth) {
        const QcsInequalitySystem sys(poly);
        SolveOptions opts;
        opts.ground_truth = std::move(ground_truth);
        py::gil_scoped_release release;
        auto res = solve(sys, make_config(algorithm, lambda, gamma, k_prime, max_iters, tol_margin, tol_nmse, seed, log_stride),
                         opts);
        py::gil_scoped_acquire acquire;
        return py::make_tuple(res.x, trace_dict(res.trace));
      },
      py::arg("poly"), py::arg("algorithm") = Algorithm::BlockSkm, py::arg("lambda_") = 1.0, py::arg("gamma") = 0,
      py::arg("k_prime") = 0, py::arg("max_iters") = 1000, py::arg("tol_margin") = 1e-9, py::arg("tol_nmse") = py::none(),
      py::arg("seed") = 0, py::arg("log_stride") = 1, py::arg("ground_truth") = py::none());
  m.def(
      "solve_dense",
      [](const Matrix& b, const Vector& rhs, std::size_t block_size, Algorithm algorithm, double lambda,
         std::size_t gamma, std::size_t k_prime, std::size_t max_iters, double tol_margin, std::uint64_t seed,
         std::size_t log_stride, std::optional<Vector> ground_truth) {
        const DenseInequalitySystem sys(b, rhs, block_size);
        SolveOptions opts;
        opts.ground_truth = std::move(ground_truth);
        auto res = solve(sys, make_config(algorithm, lambda, gamma, k_prime, max_iters, tol_margin, std::nullopt, seed,
                                          log_stride),
                         opts);
        return py::make_tuple(res.x, trace_dict(res.trace));
      },
      py::arg("b"), py::arg("rhs"), py::arg("block_size"), py::arg("algorithm") = Algorithm::BlockSkm,
      py::arg("lambda_") = 1.0, py::arg("gamma") = 0, py::arg("k_prime") = 0, py::arg("max_iters") = 1000,
      py::arg("tol_margin") = 1e-9, py::arg("seed") = 0, py::arg("log_stride") = 1,
      py::arg("ground_truth") = py::none());
  m.def("projection_coefficient", &projection_coefficient, py::arg("row"), py::arg("rhs"), py::arg("x"),
        py::arg("equality") = false);
  m.def("skm_bound", &skm_bound, py::arg("kappa"), py::arg("lambda_"), py::arg("iters"), py::arg("initial_err_sq"));
  m.def("block_rate_bound", &block_rate_bound, py::arg("sigma_min_sq"), py::arg("frob_sq"), py::arg("k_prime"),
        py::arg("c"), py::arg("iters"), py::arg("initial_err_sq"));

  // recovery
  m.def("extract_signal", [](const Matrix& x) {
    const auto s = extract_signal(x);
    return py::make_tuple(s.x_bar, s.lambda_max);
  });
  m.def("nmse_matrix", &nmse_matrix);
  m.def("nmse_signal", &nmse_signal);

  // experiments
  m.def("validate_config", [](const std::filesystem::path& p) { return canonical_config(validate_config(p)); });
  m.def(
      "run_experiment",
      [](const std::filesystem::path& config, std::optional<std::filesystem::path> out, std::optional<std::uint64_t> seed,
         std::size_t workers) {
        const auto cfg = validate_config(config);
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = run_experiment(cfg, {out, seed, workers});
        }
        py::dict d;
        d["output_dir"] = s.output_dir;
        d["files"] = s.files;
        d["exit_code"] = s.exit_code;
        if (s.table1) {
          py::dict t;
          t["samples"] = s.table1->samples;
          t["cpu_seconds"] = s.table1->cpu_seconds;
          t["nmse"] = s.table1->nmse;
          t["converged"] = s.table1->converged;
          d["table1"] = t;
        }
        return d;
      },
      py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(), py::arg("workers") = 1);
}
