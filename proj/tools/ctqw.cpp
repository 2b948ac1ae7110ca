// Command-line front end: simulate, benchmark, validate.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ctqw/app.hpp"
#include "ctqw/config.hpp"
#include "ctqw/errors.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> precision;
  std::optional<std::string> backend;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Override the master seed");
    cmd->add_option("--workers", workers, "Worker threads (0 = all cores); beats CTQW_WORKERS")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--precision", precision, "Wave-function precision")
        ->check(CLI::IsMember({"single", "double"}));
    cmd->add_option("--backend", backend, "Propagation backend")
        ->check(CLI::IsMember({"eigen", "rk4", "taylor"}));
  }

  void apply(ctqw::RunConfig& c) const {
    if (const char* env = std::getenv("CTQW_WORKERS"); env && *env) {
      try {
        const int w = std::stoi(env);
        if (w < 0) throw std::invalid_argument("negative");
        c.workers = w;
      } catch (const std::exception&) {
        throw ctqw::ConfigError(std::string("CTQW_WORKERS must be a non-negative integer, got '") +
                                env + "'");
      }
    }
    if (workers) c.workers = *workers;
    if (seed) c.master_seed = *seed;
    if (precision) c.precision = ctqw::parse_precision(*precision);
    if (backend) c.stepper.backend = ctqw::parse_backend(*backend);
    c.validate();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble simulator for many-particle quantum walks on noisy lattices"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  Overrides sim_over, bench_over;

  auto* sim = app.add_subcommand("simulate", "Run one ensemble and write observables and profile");
  sim->add_option("--config", config_path, "Run configuration file")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim_over.add_to(sim);

  std::string plan_path;
  std::vector<std::uint64_t> meshes;
  std::vector<std::int64_t> post_rates, realizations;
  int repetitions = 1;
  auto* bench = app.add_subcommand("benchmark", "Sweep mesh size, post-processing rate and R");
  bench->add_option("--config", config_path, "Template run configuration")->required();
  bench->add_option("--out", out_dir, "Output directory")->required();
  bench->add_option("--plan", plan_path, "Plan file (meshes, post_rates, realizations, repetitions)");
  bench->add_option("--meshes", meshes, "Target N^m values")->delimiter(',');
  bench->add_option("--post-rates", post_rates, "Post-processing rates")->delimiter(',');
  bench->add_option("--realizations", realizations, "Realization counts")->delimiter(',');
  bench->add_option("--repetitions", repetitions, "Repetitions per point");
  bench_over.add_to(bench);

  app.add_subcommand("validate", "Run the invariant suite on tiny instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ctqw::exit_codes::kConfig;
  }

  try {
    if (app.got_subcommand("validate")) {
      return ctqw::validate_invariants(std::cout) ? ctqw::exit_codes::kSuccess
                                                  : ctqw::exit_codes::kNumeric;
    }

    if (app.got_subcommand("simulate")) {
      ctqw::RunConfig config = ctqw::load_config(config_path);
      sim_over.apply(config);
      const auto outcome = ctqw::simulate(config, out_dir);
      if (outcome.exit_code != 0) {
        std::cerr << "error: " << outcome.error << "\n";
        return outcome.exit_code;
      }
      const auto& r = outcome.report;
      std::cout << "completed " << config.steps << " steps x " << config.realizations
                << " realizations in " << r.total_seconds << " s; outputs in " << out_dir << "\n";
      return 0;
    }

    ctqw::RunConfig config = ctqw::load_config(config_path);
    bench_over.apply(config);
    ctqw::BenchmarkPlan plan;
    if (!plan_path.empty()) plan = ctqw::load_plan(plan_path);
    if (!meshes.empty()) plan.meshes = meshes;
    if (!post_rates.empty()) plan.post_rates = post_rates;
    if (!realizations.empty()) plan.realizations = realizations;
    if (plan.meshes.empty()) plan.meshes = {config.space.dim()};
    if (plan.post_rates.empty()) plan.post_rates = {config.post_rate};
    if (plan.realizations.empty()) plan.realizations = {config.realizations};
    if (plan_path.empty() || bench->count("--repetitions")) plan.repetitions = repetitions;
    const auto summary = ctqw::benchmark(plan, config, out_dir);
    std::cout << summary.rows << " benchmark rows, " << summary.failures << " failures; see "
              << out_dir << "\n";
    return 0;
  } catch (const ctqw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ctqw::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
