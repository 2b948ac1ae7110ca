#include "ctqw/app.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>
#include <random>

#include <json.hpp>

#include "ctqw/errors.hpp"
#include "ctqw/snapshot.hpp"

namespace ctqw {

namespace fs = std::filesystem;

namespace {

std::string fmt_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_summary(std::ostream& log, const RunReport& report) {
  log << "# summary\n";
  log << "workers = " << report.workers << "\n";
  log << "snapshots = " << report.snapshots << "\n";
  log << "total_seconds = " << fmt_number(report.total_seconds) << "\n";
  log << "wall_seconds = " << fmt_number(report.wall_seconds) << "\n";
  for (std::size_t s = 0; s < kStageNames.size(); ++s)
    log << "stage." << kStageNames[s] << " = " << fmt_number(report.profile.seconds[s])
        << " s over " << report.profile.calls[s] << " calls\n";
  log << "io_seconds = " << fmt_number(report.profile.io_seconds) << "\n";
  log << "noise_switches = " << report.noise_switches << "\n";
  log << "hamiltonian_entries_rewritten = " << report.hamiltonian_updates << "\n";
  log << "max_norm_deviation = " << fmt_number(report.max_norm_deviation) << "\n";
  log << "norm_corrections = " << report.norm_corrections << "\n";
  for (const auto& e : report.norm_events)
    log << "norm_correction realization=" << e.realization << " step=" << e.step
        << " deviation=" << fmt_number(e.deviation) << "\n";
  if (report.norm_corrections > static_cast<std::int64_t>(report.norm_events.size()))
    log << "(further norm corrections not listed)\n";
}

}  // namespace

std::string profile_json(const RunConfig& config, const RunReport& report) {
  nlohmann::ordered_json j;
  j["total_seconds"] = report.total_seconds;
  j["wall_seconds"] = report.wall_seconds;
  j["stage_sum_seconds"] = report.profile.stage_sum();
  j["io_seconds"] = report.profile.io_seconds;
  auto& stages = j["stages"];
  for (std::size_t s = 0; s < kStageNames.size(); ++s) {
    stages[std::string(kStageNames[s])] = {{"seconds", report.profile.seconds[s]},
                                           {"calls", report.profile.calls[s]}};
  }
  j["rows"] = config.space.dim();
  j["realizations"] = config.realizations;
  j["steps"] = config.steps;
  j["post_rate"] = config.post_rate;
  j["backend"] = std::string(to_string(config.stepper.backend));
  j["precision"] = std::string(to_string(config.precision));
  j["workers"] = report.workers;
  j["snapshots"] = report.snapshots;
  j["norm_corrections"] = report.norm_corrections;
  j["max_norm_deviation"] = report.max_norm_deviation;
  j["noise_switches"] = report.noise_switches;
  j["memory_bytes"] = {{"density", report.memory.density},
                       {"states", report.memory.states},
                       {"hamiltonians", report.memory.hamiltonians},
                       {"topology", report.memory.topology},
                       {"eigen", report.memory.eigen},
                       {"workspace", report.memory.workspace},
                       {"total", report.memory.total()}};
  return j.dump(2) + "\n";
}

SimulationOutcome simulate(const RunConfig& config, const fs::path& out_dir) {
  SimulationOutcome outcome;
  std::ofstream log;
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    log = open_out(out_dir / kRunLogFile);
    log << "# effective configuration\n" << to_config_text(config) << "\n";
    log.flush();

    auto csv = open_out(out_dir / kObservablesFile);
    csv << "time,name,component_index,value\n";
    std::vector<std::string> manifest = {kObservablesFile, kProfileFile, kRunLogFile};

    OutputSinks sinks;
    sinks.snapshot = [&](const SnapshotEvent& ev) {
      for (const auto& row : ev.rows)
        csv << fmt_number(row.time) << ',' << row.name << ',' << row.component << ','
            << fmt_number(row.value) << '\n';
      if (!csv) throw IoError("failed writing " + (out_dir / kObservablesFile).string());
      if (config.write_snapshots) {
        char name[40];
        std::snprintf(name, sizeof name, "rho_step%06lld.bin", static_cast<long long>(ev.step));
        std::visit([&](const auto* rho) { write_density_snapshot(*rho, out_dir / name); },
                   ev.density);
        manifest.emplace_back(name);
      }
    };

    outcome.report = run(config, sinks);
    outcome.report.outputs = manifest;
    csv.close();

    auto profile = open_out(out_dir / kProfileFile);
    profile << profile_json(config, outcome.report);

    write_summary(log, outcome.report);
    log << "# outputs\n";
    for (const auto& f : manifest) log << f << "\n";
    log << "status = ok\n";
  } catch (const Error& e) {
    outcome.exit_code = exit_code(e);
    outcome.error = e.what();
  } catch (const std::bad_alloc&) {
    outcome.exit_code = exit_codes::kCapacity;
    outcome.error = "out of memory";
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.error = e.what();
  }
  if (outcome.exit_code != 0 && log.is_open()) {
    log << "error: " << outcome.error << "\n";
    log << "status = failed (exit " << outcome.exit_code << ")\n";
  }
  return outcome;
}

RunConfig config_for_mesh(const RunConfig& base, std::uint64_t mesh_target) {
  const auto& lat = base.space.lattice();
  const int m = base.space.particles();
  const double per_dim = std::pow(static_cast<double>(mesh_target), 1.0 / (m * lat.q()));
  const int n = std::max(2, static_cast<int>(std::lround(per_dim)));
  std::vector<int> dims(lat.q(), n);
  RunConfig c = base;
  c.space = JointSpace(LatticeTopology(dims, lat.k_half(), lat.boundary()), m);
  c.initial_state.positions.clear();
  c.initial_state.amplitudes.clear();
  if (c.initial_state.kind == InitialKind::custom_vector) c.initial_state.kind = InitialKind::product;
  c.reference_positions.clear();
  return c;
}

BenchmarkSummary benchmark(const BenchmarkPlan& plan, const RunConfig& config_template,
                           const fs::path& out_dir) {
  plan.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string());
  auto csv = open_out(out_dir / kBenchmarkFile);
  auto failures = open_out(out_dir / kBenchmarkFailuresFile);
  csv << "mesh_target,rows,post_rate,realizations,repetition,steps,total_seconds";
  for (auto name : kStageNames) csv << ',' << name << "_seconds";
  csv << ",io_seconds,density_fraction\n";
  failures << "mesh_target,post_rate,realizations,repetition,exit_code,error\n";

  BenchmarkSummary summary;
  for (auto mesh : plan.meshes)
    for (auto post_rate : plan.post_rates)
      for (auto r : plan.realizations)
        for (int rep = 0; rep < plan.repetitions; ++rep) {
          try {
            RunConfig c = config_for_mesh(config_template, mesh);
            c.realizations = r;
            c.post_rate = post_rate;
            const RunReport rep_report = run(c);
            const auto& p = rep_report.profile;
            csv << mesh << ',' << c.space.dim() << ',' << post_rate << ',' << r << ',' << rep << ','
                << c.steps << ',' << fmt_number(rep_report.total_seconds);
            for (double s : p.seconds) csv << ',' << fmt_number(s);
            csv << ',' << fmt_number(p.io_seconds) << ','
                << fmt_number(p.seconds[kDensityAndPostprocessing] / rep_report.total_seconds)
                << '\n';
            csv.flush();
            ++summary.rows;
          } catch (const std::exception& e) {
            const auto* err = dynamic_cast<const Error*>(&e);
            std::string msg = e.what();
            for (auto& ch : msg)
              if (ch == ',' || ch == '\n') ch = ';';
            failures << mesh << ',' << post_rate << ',' << r << ',' << rep << ','
                     << (err ? exit_code(*err) : 1) << ',' << msg << '\n';
            ++summary.failures;
          }
        }
  if (!csv || !failures) throw IoError("failed writing benchmark output");
  return summary;
}

}  // namespace ctqw
