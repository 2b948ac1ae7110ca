#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctqw/config.hpp"
#include "ctqw/ensemble.hpp"

namespace ctqw {

inline constexpr const char* kObservablesFile = "observables.csv";
inline constexpr const char* kProfileFile = "profile.json";
inline constexpr const char* kRunLogFile = "run.log";
inline constexpr const char* kBenchmarkFile = "benchmark.csv";
inline constexpr const char* kBenchmarkFailuresFile = "benchmark_failures.csv";

struct SimulationOutcome {
  int exit_code = 0;
  std::string error;  // diagnostic when exit_code != 0
  RunReport report;
};

// Runs the ensemble and writes observables.csv, profile.json, run.log and,
// when enabled, rho_step<NNNNNN>.bin snapshots into out_dir. Errors are
// logged to run.log and reported through the exit code, never thrown.
SimulationOutcome simulate(const RunConfig& config, const std::filesystem::path& out_dir);

std::string profile_json(const RunConfig& config, const RunReport& report);

// N^m = target is met as closely as the lattice rank allows.
RunConfig config_for_mesh(const RunConfig& base, std::uint64_t mesh_target);

struct BenchmarkSummary {
  std::size_t rows = 0;
  std::size_t failures = 0;
};

// One benchmark.csv row per (mesh, post_rate, R, repetition); failing points
// go to benchmark_failures.csv and the sweep continues.
BenchmarkSummary benchmark(const BenchmarkPlan& plan, const RunConfig& config_template,
                           const std::filesystem::path& out_dir);

// Invariant suite on tiny instances; one PASS/FAIL line per check.
bool validate_invariants(std::ostream& out);

}  // namespace ctqw
