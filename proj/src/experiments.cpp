#include "onebit_feas/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "onebit_feas/io.hpp"
#include "onebit_feas/recovery.hpp"
#include "onebit_feas/systems.hpp"

namespace obf {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Fig1: return "fig1";
    case ExperimentKind::Fig2: return "fig2";
    case ExperimentKind::Fig3: return "fig3";
    case ExperimentKind::Table1: return "table1";
  }
  return "unknown";
}

std::string_view to_string(EnsembleKind kind) {
  return kind == EnsembleKind::RankOne ? "rank_one" : "full_rank";
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(ErrorCode code, std::vector<std::string> violations)
    : Error(code, join(violations)), violations_(std::move(violations)) {}

SolverConfig ExperimentConfig::solver_config(Algorithm algorithm, std::uint64_t solver_seed) const {
  SolverConfig s;
  s.algorithm = algorithm;
  s.lambda = lambda;
  s.gamma = gamma;
  s.k_prime = k_prime;
  s.max_iters = max_iters;
  s.tol_margin = tol_margin;
  s.tol_nmse = tol_nmse;
  s.seed = solver_seed;
  s.log_stride = log_stride;
  return s;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

class FieldReader {
 public:
  FieldReader(const nlohmann::json& j, std::vector<std::string>& errors) : j_(j), errors_(errors) {}

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  void missing(const char* key) { errors_.push_back(std::string("missing required field '") + key + "'"); }

  template <class T>
  bool read_count(const char* key, T& out, bool required) {
    if (!has(key)) {
      if (required) missing(key);
      return false;
    }
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.template get<long long>() >= 0)) {
      errors_.push_back(std::string("field '") + key + "' must be a non-negative integer");
      return false;
    }
    out = v.template get<T>();
    return true;
  }

  bool read_real(const char* key, double& out, bool required) {
    if (!has(key)) {
      if (required) missing(key);
      return false;
    }
    const auto& v = j_.at(key);
    if (!v.is_number()) {
      errors_.push_back(std::string("field '") + key + "' must be a number");
      return false;
    }
    out = v.get<double>();
    return true;
  }

  bool read_bool(const char* key, bool& out) {
    if (!has(key)) return false;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) {
      errors_.push_back(std::string("field '") + key + "' must be true or false");
      return false;
    }
    out = v.get<bool>();
    return true;
  }

  bool read_string(const char* key, std::string& out, bool required) {
    if (!has(key)) {
      if (required) missing(key);
      return false;
    }
    const auto& v = j_.at(key);
    if (!v.is_string()) {
      errors_.push_back(std::string("field '") + key + "' must be a string");
      return false;
    }
    out = v.get<std::string>();
    return true;
  }

  template <class T>
  bool read_list(const char* key, std::vector<T>& out, bool required) {
    if (!has(key)) {
      if (required) missing(key);
      return false;
    }
    const auto& v = j_.at(key);
    if (!v.is_array()) {
      errors_.push_back(std::string("field '") + key + "' must be an array");
      return false;
    }
    out.clear();
    for (const auto& item : v) {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!item.is_string()) {
          errors_.push_back(std::string("field '") + key + "' must contain strings");
          return false;
        }
      } else {
        if (!item.is_number_integer() || item.template get<long long>() < 0) {
          errors_.push_back(std::string("field '") + key + "' must contain non-negative integers");
          return false;
        }
      }
      out.push_back(item.get<T>());
    }
    return true;
  }

 private:
  const nlohmann::json& j_;
  std::vector<std::string>& errors_;
};

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields = {
      "experiment", "n",          "k",          "m",           "m1",          "kind",
      "trials",     "solvers",    "lambda",     "gamma",       "k_prime",     "max_iters",
      "tol_margin", "tol_nmse",   "dynamic_range", "nmse_target", "seed",    "output_dir",
      "log_stride", "record_timing", "dump_instances"};
  return fields;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError(ErrorCode::ParseError, {"config must be a JSON object"});
  std::vector<std::string> errors;
  for (const auto& item : j.items()) {
    if (!known_fields().count(item.key())) errors.push_back("unknown field '" + item.key() + "'");
  }

  FieldReader r(j, errors);
  ExperimentConfig cfg;

  std::string experiment;
  bool have_experiment = false;
  if (r.read_string("experiment", experiment, true)) {
    have_experiment = true;
    if (experiment == "fig1") cfg.experiment = ExperimentKind::Fig1;
    else if (experiment == "fig2") cfg.experiment = ExperimentKind::Fig2;
    else if (experiment == "fig3") cfg.experiment = ExperimentKind::Fig3;
    else if (experiment == "table1") cfg.experiment = ExperimentKind::Table1;
    else {
      errors.push_back("field 'experiment' must be one of fig1, fig2, fig3, table1");
      have_experiment = false;
    }
  }
  const bool lifted = !have_experiment || cfg.experiment != ExperimentKind::Fig3;

  if (r.read_count("n", cfg.n, true) && cfg.n < 1) errors.push_back("field 'n' must be at least 1");
  if (r.read_count("m", cfg.m, true) && cfg.m < 1) errors.push_back("field 'm' must be at least 1");
  if (lifted) {
    if (r.read_count("k", cfg.k, true) && (cfg.k < 1 || (cfg.n >= 1 && cfg.k > cfg.n))) {
      errors.push_back("field 'k' must satisfy 1 <= k <= n");
    }
  } else {
    r.read_count("k", cfg.k, false);
  }

  if (r.read_list("m1", cfg.m1, true)) {
    if (cfg.m1.empty()) errors.push_back("field 'm1' must not be empty");
    if (std::any_of(cfg.m1.begin(), cfg.m1.end(), [](std::size_t v) { return v < 1; })) {
      errors.push_back("field 'm1' entries must be at least 1");
    }
    if (have_experiment && cfg.experiment != ExperimentKind::Fig1 && cfg.experiment != ExperimentKind::Fig2 &&
        cfg.m1.size() != 1) {
      errors.push_back("field 'm1' must list exactly one value for " + std::string(to_string(cfg.experiment)));
    }
  }

  if (have_experiment) {
    cfg.kind = cfg.experiment == ExperimentKind::Fig2 ? EnsembleKind::FullRank : EnsembleKind::RankOne;
  }
  std::string kind;
  if (r.read_string("kind", kind, false)) {
    if (kind != "rank_one" && kind != "full_rank") {
      errors.push_back("field 'kind' must be rank_one or full_rank");
    } else {
      const EnsembleKind parsed = kind == "rank_one" ? EnsembleKind::RankOne : EnsembleKind::FullRank;
      if (have_experiment && cfg.experiment == ExperimentKind::Fig1 && parsed != EnsembleKind::RankOne) {
        errors.push_back("field 'kind' must be rank_one for fig1");
      } else if (have_experiment && cfg.experiment == ExperimentKind::Fig2 && parsed != EnsembleKind::FullRank) {
        errors.push_back("field 'kind' must be full_rank for fig2");
      }
      cfg.kind = parsed;
    }
  }

  if (r.read_count("trials", cfg.trials, false) && cfg.trials < 1) errors.push_back("field 'trials' must be at least 1");

  std::vector<std::string> solver_names;
  if (r.read_list("solvers", solver_names, false)) {
    if (solver_names.empty()) errors.push_back("field 'solvers' must not be empty");
    for (const auto& name : solver_names) {
      if (auto a = parse_algorithm(name)) {
        cfg.solvers.push_back(*a);
      } else {
        errors.push_back("field 'solvers' has unknown solver '" + name +
                         "' (expected rka, skm, block_skm, gaussian_sketch)");
      }
    }
    if (have_experiment && cfg.experiment != ExperimentKind::Fig3 && cfg.solvers.size() > 1) {
      errors.push_back("field 'solvers' must name a single solver for " + std::string(to_string(cfg.experiment)));
    }
  }
  if (cfg.solvers.empty() && solver_names.empty()) {
    if (have_experiment && cfg.experiment == ExperimentKind::Fig3) {
      cfg.solvers = {Algorithm::Rka, Algorithm::Skm, Algorithm::BlockSkm};
    } else {
      cfg.solvers = {Algorithm::BlockSkm};
    }
  }

  if (r.read_real("lambda", cfg.lambda, false) && !(cfg.lambda > 0.0 && cfg.lambda < 2.0)) {
    errors.push_back("field 'lambda' must lie in the open interval (0, 2)");
  }
  r.read_count("gamma", cfg.gamma, false);
  if (r.read_count("k_prime", cfg.k_prime, false) && cfg.k_prime > 0 && cfg.n >= 1) {
    const std::size_t unknowns = lifted ? cfg.n * cfg.n : cfg.n;
    if (cfg.k_prime >= unknowns) errors.push_back("field 'k_prime' must be smaller than the unknown count");
    if (cfg.m >= 1 && cfg.k_prime > cfg.m) errors.push_back("field 'k_prime' must not exceed m");
  }
  if (cfg.gamma > 0 && cfg.m >= 1 && !cfg.m1.empty()) {
    const std::size_t rows = cfg.m * *std::min_element(cfg.m1.begin(), cfg.m1.end());
    if (cfg.gamma > rows) errors.push_back("field 'gamma' must not exceed the row count m * m1");
  }
  if (r.read_count("max_iters", cfg.max_iters, false) && cfg.max_iters < 1) {
    errors.push_back("field 'max_iters' must be at least 1");
  }
  if (r.read_real("tol_margin", cfg.tol_margin, false) && !(cfg.tol_margin >= 0.0)) {
    errors.push_back("field 'tol_margin' must be non-negative");
  }
  double v = 0.0;
  if (r.read_real("tol_nmse", v, false)) {
    if (!(v > 0.0)) errors.push_back("field 'tol_nmse' must be positive");
    cfg.tol_nmse = v;
  }
  if (r.read_real("dynamic_range", v, false)) {
    if (!(v > 0.0)) errors.push_back("field 'dynamic_range' must be positive");
    cfg.dynamic_range = v;
  }
  if (r.read_real("nmse_target", cfg.nmse_target, false) && !(cfg.nmse_target > 0.0)) {
    errors.push_back("field 'nmse_target' must be positive");
  }
  r.read_count("seed", cfg.seed, false);
  r.read_string("output_dir", cfg.output_dir, false);
  if (r.read_count("log_stride", cfg.log_stride, false) && cfg.log_stride < 1) {
    errors.push_back("field 'log_stride' must be at least 1");
  }
  r.read_bool("record_timing", cfg.record_timing);
  r.read_bool("dump_instances", cfg.dump_instances);

  if (!errors.empty()) throw ConfigError(ErrorCode::ValidationError, std::move(errors));
  return cfg;
}

ExperimentConfig validate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ErrorCode::ParseError, {"cannot open " + path.string()});
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ErrorCode::ParseError, {path.string() + ": " + e.what()});
  }
  return parse_config(j);
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = std::string(to_string(cfg.experiment));
  j["n"] = cfg.n;
  j["k"] = cfg.k;
  j["m"] = cfg.m;
  j["m1"] = cfg.m1;
  j["kind"] = std::string(to_string(cfg.kind));
  j["trials"] = cfg.trials;
  auto solvers = nlohmann::ordered_json::array();
  for (Algorithm a : cfg.solvers) solvers.push_back(std::string(to_string(a)));
  j["solvers"] = solvers;
  j["lambda"] = cfg.lambda;
  j["gamma"] = cfg.gamma;
  j["k_prime"] = cfg.k_prime;
  j["max_iters"] = cfg.max_iters;
  j["tol_margin"] = cfg.tol_margin;
  j["tol_nmse"] = cfg.tol_nmse ? nlohmann::ordered_json(*cfg.tol_nmse) : nlohmann::ordered_json(nullptr);
  j["dynamic_range"] = cfg.dynamic_range ? nlohmann::ordered_json(*cfg.dynamic_range) : nlohmann::ordered_json(nullptr);
  j["nmse_target"] = cfg.nmse_target;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["log_stride"] = cfg.log_stride;
  j["record_timing"] = cfg.record_timing;
  j["dump_instances"] = cfg.dump_instances;
  return j;
}

std::string canonical_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Runners

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return derive_seed(master, {stream::kTrial, trial});
}

std::vector<AggregatePoint> aggregate_traces(const std::vector<const SolverTrace*>& traces,
                                             const std::vector<double>& ref_sq) {
  if (traces.size() != ref_sq.size()) throw Error(ErrorCode::LengthMismatch, "one reference norm per trace");
  std::set<std::size_t> grid;
  for (const SolverTrace* t : traces)
    for (const TraceRecord& r : t->records) grid.insert(r.iter);
  std::vector<AggregatePoint> out;
  out.reserve(grid.size());
  std::vector<std::size_t> cursor(traces.size(), 0);
  for (std::size_t iter : grid) {
    double sum = 0.0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& recs = traces[i]->records;
      while (cursor[i] + 1 < recs.size() && recs[cursor[i] + 1].iter <= iter) ++cursor[i];
      sum += recs[cursor[i]].err_sq / ref_sq[i];
    }
    out.push_back({iter, sum / static_cast<double>(traces.size())});
  }
  return out;
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct Context {
  ExperimentConfig cfg;
  std::filesystem::path out;
  std::size_t workers = 1;
};

Context make_context(const ExperimentConfig& cfg, const RunOptions& opts) {
  Context ctx{cfg, opts.output_dir.value_or(std::filesystem::path(cfg.output_dir)), opts.workers};
  if (opts.seed) ctx.cfg.seed = *opts.seed;
  std::filesystem::create_directories(ctx.out);
  io::write_text(ctx.out / "config.json", canonical_config(ctx.cfg));
  return ctx;
}

std::string aggregate_csv_rows(const std::string& prefix, const std::vector<AggregatePoint>& points) {
  std::string out;
  for (const auto& p : points) out += prefix + std::to_string(p.iter) + "," + io::format_double(p.mean_nmse) + "\n";
  return out;
}

struct SweepRun {
  SolverTrace trace;
  double ref_sq = 0.0;
  std::shared_ptr<const Polyhedron> poly;
};

struct SweepTrial {
  ProblemInstance instance;
  std::uint64_t threshold_seed = 0;
  std::vector<SweepRun> runs;  // one per m1
};

RunSummary run_m1_sweep(const ExperimentConfig& config, const RunOptions& opts, EnsembleKind required,
                        const char* name) {
  if (config.kind != required) {
    throw ConfigError(ErrorCode::ValidationError,
                      {std::string(name) + " requires kind " + std::string(to_string(required))});
  }
  const Context ctx = make_context(config, opts);
  const ExperimentConfig& cfg = ctx.cfg;
  const Algorithm algorithm = cfg.solvers.front();

  std::vector<SweepTrial> trials(cfg.trials);
  parallel_for(cfg.trials, ctx.workers, [&](std::size_t t) {
    const std::uint64_t ts = trial_seed(cfg.seed, t);
    SweepTrial& trial = trials[t];
    trial.instance = generate_instance(cfg.n, cfg.k, cfg.m, cfg.kind, ts);
    trial.threshold_seed = derive_seed(ts, {stream::kThresholds});
    const Vector truth = trial.instance.lifted_truth_vec();
    const double ref = truth.squaredNorm();
    for (std::size_t m1 : cfg.m1) {
      ThresholdConfig thr;
      thr.dynamic_range = cfg.dynamic_range;
      auto poly = std::make_shared<const Polyhedron>(build_polyhedron(trial.instance, m1, thr, trial.threshold_seed));
      QcsInequalitySystem sys(poly);
      SolveOptions so;
      so.ground_truth = truth;
      SolveResult res = solve(sys, cfg.solver_config(algorithm, derive_seed(ts, {stream::kSolver, m1})), so);
      trial.runs.push_back({std::move(res.trace), ref, cfg.dump_instances ? poly : nullptr});
    }
  });

  RunSummary summary;
  summary.output_dir = ctx.out;
  std::string aggregate = "m1,iter,mean_nmse\n";
  std::string finals = "m1,trial,iterations,termination,final_nmse\n";
  for (std::size_t i = 0; i < cfg.m1.size(); ++i) {
    const std::size_t m1 = cfg.m1[i];
    std::vector<const SolverTrace*> traces;
    std::vector<double> refs;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const SweepRun& run = trials[t].runs[i];
      traces.push_back(&run.trace);
      refs.push_back(run.ref_sq);
      const auto path = ctx.out / ("trace_m1_" + std::to_string(m1) + "_trial_" + std::to_string(t) + ".csv");
      write_trace_csv(run.trace, path, cfg.record_timing);
      summary.files.push_back(path);
      finals += std::to_string(m1) + "," + std::to_string(t) + "," + std::to_string(run.trace.iterations) + "," +
                std::string(to_string(run.trace.termination)) + "," +
                io::format_double(run.trace.records.back().err_sq / run.ref_sq) + "\n";
      if (run.poly) {
        const auto dir = ctx.out / ("instance_m1_" + std::to_string(m1) + "_trial_" + std::to_string(t));
        write_instance(trials[t].instance, *run.poly, trials[t].threshold_seed, dir);
        summary.files.push_back(dir);
      }
    }
    aggregate += aggregate_csv_rows(std::to_string(m1) + ",", aggregate_traces(traces, refs));
  }
  io::write_text(ctx.out / "nmse_vs_iter_m1.csv", aggregate);
  io::write_text(ctx.out / "final_nmse.csv", finals);
  summary.files.push_back(ctx.out / "nmse_vs_iter_m1.csv");
  summary.files.push_back(ctx.out / "final_nmse.csv");
  return summary;
}

}  // namespace

RunSummary run_fig1(const ExperimentConfig& cfg, const RunOptions& opts) {
  return run_m1_sweep(cfg, opts, EnsembleKind::RankOne, "fig1");
}

RunSummary run_fig2(const ExperimentConfig& cfg, const RunOptions& opts) {
  return run_m1_sweep(cfg, opts, EnsembleKind::FullRank, "fig2");
}

RunSummary run_fig3(const ExperimentConfig& config, const RunOptions& opts) {
  const Context ctx = make_context(config, opts);
  const ExperimentConfig& cfg = ctx.cfg;
  const std::size_t m1 = cfg.m1.front();
  const std::size_t n_solvers = cfg.solvers.size();

  // traces[t][s]
  std::vector<std::vector<SolverTrace>> traces(cfg.trials);
  std::vector<double> refs(cfg.trials);
  parallel_for(cfg.trials, ctx.workers, [&](std::size_t t) {
    const std::uint64_t ts = trial_seed(cfg.seed, t);
    const LinearProblem problem = generate_linear_problem(cfg.m, cfg.n, ts);
    const double range = cfg.dynamic_range.value_or(dynamic_range(problem.y));
    const OneBitRecord rec =
        quantize(problem.y, generate_thresholds(cfg.m, m1, range, derive_seed(ts, {stream::kThresholds})));
    const DenseInequalitySystem sys = linear_onebit_system(problem.b, rec);
    refs[t] = problem.x_true.squaredNorm();
    for (std::size_t s = 0; s < n_solvers; ++s) {
      SolveOptions so;
      so.ground_truth = problem.x_true;
      traces[t].push_back(solve(sys, cfg.solver_config(cfg.solvers[s], derive_seed(ts, {stream::kSolver, s})), so).trace);
    }
  });

  RunSummary summary;
  summary.output_dir = ctx.out;
  std::string finals = "solver,trial,iterations,final_nmse\n";
  for (std::size_t s = 0; s < n_solvers; ++s) {
    const std::string name(to_string(cfg.solvers[s]));
    std::vector<const SolverTrace*> ts;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      ts.push_back(&traces[t][s]);
      const auto path = ctx.out / ("trace_" + name + "_trial_" + std::to_string(t) + ".csv");
      write_trace_csv(traces[t][s], path, cfg.record_timing);
      summary.files.push_back(path);
      finals += name + "," + std::to_string(t) + "," + std::to_string(traces[t][s].iterations) + "," +
                io::format_double(traces[t][s].records.back().err_sq / refs[t]) + "\n";
    }
    const auto path = ctx.out / ("fig3_" + name + ".csv");
    io::write_text(path, "iter,mean_nmse\n" + aggregate_csv_rows("", aggregate_traces(ts, refs)));
    summary.files.push_back(path);
  }
  io::write_text(ctx.out / "fig3_final.csv", finals);
  summary.files.push_back(ctx.out / "fig3_final.csv");
  return summary;
}

RunSummary run_table1(const ExperimentConfig& config, const RunOptions& opts) {
  const Context ctx = make_context(config, opts);
  const ExperimentConfig& cfg = ctx.cfg;
  const std::size_t m1 = cfg.m1.front();
  const Algorithm algorithm = cfg.solvers.front();

  struct TrialOutcome {
    SolverTrace trace;
    double nmse = 0.0;
  };
  std::vector<TrialOutcome> outcomes(cfg.trials);
  parallel_for(cfg.trials, ctx.workers, [&](std::size_t t) {
    const std::uint64_t ts = trial_seed(cfg.seed, t);
    const ProblemInstance inst = generate_instance(cfg.n, cfg.k, cfg.m, cfg.kind, ts);
    ThresholdConfig thr;
    thr.dynamic_range = cfg.dynamic_range;
    auto poly = std::make_shared<const Polyhedron>(build_polyhedron(inst, m1, thr, derive_seed(ts, {stream::kThresholds})));
    QcsInequalitySystem sys(poly);
    SolveOptions so;
    so.ground_truth = inst.lifted_truth_vec();
    so.stop = [&](const Vector& x, std::size_t) {
      return nmse_signal(inst.x_true, extract_signal(unvec(x, cfg.n)).x_bar) <= cfg.nmse_target;
    };
    SolveResult res = solve(sys, cfg.solver_config(algorithm, derive_seed(ts, {stream::kSolver, m1})), so);
    outcomes[t].nmse = nmse_signal(inst.x_true, extract_signal(unvec(res.x, cfg.n)).x_bar);
    outcomes[t].trace = std::move(res.trace);
  });

  RunSummary summary;
  summary.output_dir = ctx.out;
  Table1Result result;
  result.samples = cfg.m * m1;
  result.converged = true;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto path = ctx.out / ("trace_trial_" + std::to_string(t) + ".csv");
    write_trace_csv(outcomes[t].trace, path, cfg.record_timing);
    summary.files.push_back(path);
    result.cpu_seconds += static_cast<double>(outcomes[t].trace.wall_ns) * 1e-9;
    result.nmse += outcomes[t].nmse;
    result.converged = result.converged && outcomes[t].nmse <= cfg.nmse_target;
  }
  result.cpu_seconds /= static_cast<double>(cfg.trials);
  result.nmse /= static_cast<double>(cfg.trials);
  if (!cfg.record_timing) result.cpu_seconds = 0.0;

  nlohmann::ordered_json j;
  j["samples"] = result.samples;
  j["cpu_seconds"] = result.cpu_seconds;
  j["nmse"] = result.nmse;
  j["converged"] = result.converged;
  io::write_text(ctx.out / "table1.json", j.dump(2) + "\n");
  summary.files.push_back(ctx.out / "table1.json");
  summary.table1 = result;
  summary.exit_code = result.converged ? 0 : 3;
  return summary;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  switch (cfg.experiment) {
    case ExperimentKind::Fig1: return run_fig1(cfg, opts);
    case ExperimentKind::Fig2: return run_fig2(cfg, opts);
    case ExperimentKind::Fig3: return run_fig3(cfg, opts);
    case ExperimentKind::Table1: return run_table1(cfg, opts);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown experiment");
}

}  // namespace obf
