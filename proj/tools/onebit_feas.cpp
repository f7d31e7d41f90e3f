#include <iostream>

#include "CLI11.hpp"
#include "onebit_feas/experiments.hpp"

namespace {

constexpr int kExitValidation = 2;

void report(const obf::ConfigError& e) {
  for (const auto& v : e.violations()) std::cerr << "error: " << v << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-bit quadratic compressed sensing via randomized feasibility solvers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t workers = 1;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "JSON config file")->required();
  auto* out_opt = run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--workers", workers, "Worker threads for independent trials")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides seed)");

  auto* validate = app.add_subcommand("validate", "Check a config and print it with defaults resolved");
  validate->add_option("config", config_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    const obf::ExperimentConfig cfg = obf::validate_config(config_path);
    if (validate->parsed()) {
      std::cout << obf::canonical_config(cfg);
      return 0;
    }
    obf::RunOptions opts;
    if (*out_opt) opts.output_dir = out_dir;
    if (*seed_opt) opts.seed = seed;
    opts.workers = workers;
    const obf::RunSummary summary = obf::run_experiment(cfg, opts);
    std::cout << "wrote " << summary.files.size() << " files to " << summary.output_dir.string() << "\n";
    if (summary.table1) {
      const auto& t = *summary.table1;
      std::cout << "samples=" << t.samples << " cpu_seconds=" << t.cpu_seconds << " nmse=" << t.nmse
                << " converged=" << (t.converged ? "true" : "false") << "\n";
    }
    if (summary.exit_code == 3) std::cerr << "error: budget exceeded before reaching nmse_target\n";
    return summary.exit_code;
  } catch (const obf::ConfigError& e) {
    report(e);
    return kExitValidation;
  } catch (const obf::Error& e) {
    std::cerr << "error [" << obf::to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
}
