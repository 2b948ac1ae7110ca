#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctqw/density.hpp"
#include "ctqw/hamiltonian.hpp"
#include "ctqw/lattice.hpp"
#include "ctqw/noise.hpp"
#include "ctqw/observables.hpp"
#include "ctqw/propagators.hpp"

namespace ctqw {

enum class Precision { single, double_ };

Precision parse_precision(std::string_view name);
std::string_view to_string(Precision p);

enum class InitialKind { single_site, product, symmetrized_pair, antisymmetrized_pair, custom_vector };

InitialKind parse_initial_kind(std::string_view name);
std::string_view to_string(InitialKind k);

struct InitialStateSpec {
  InitialKind kind = InitialKind::product;
  // single_site: one site shared by every particle; product and pair kinds:
  // one site per particle. Empty means adjacent central sites.
  std::vector<SiteIndex> positions;
  // custom_vector only; normalized on construction.
  std::vector<std::complex<double>> amplitudes;
};

// Positions the state is built from, with defaults applied.
std::vector<SiteIndex> initial_positions(const InitialStateSpec& spec, const JointSpace& space);

template <class Real>
std::vector<std::complex<Real>> make_initial_state(const InitialStateSpec& spec,
                                                   const JointSpace& space);

inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{8} << 30;

struct RunConfig {
  JointSpace space;
  CouplingModel model;
  NoiseSpec noise;
  StepperConfig stepper;
  std::int64_t realizations = 1000;
  std::int64_t steps = 1500;
  std::int64_t post_rate = 100;
  std::uint64_t master_seed = 0;
  InitialStateSpec initial_state;
  int workers = 0;  // 0 = all available
  Precision precision = Precision::single;
  ObservableSet observables = default_observables();
  // Sites displacements are measured from; empty means the initial positions.
  std::vector<SiteIndex> reference_positions;
  // Also post-process t = 0 before the first step.
  bool snapshot_initial = false;
  bool write_snapshots = false;
  std::uint64_t memory_budget = kDefaultMemoryBudget;
  std::uint64_t dense_cap = kDefaultDenseCap;

  double t_max() const noexcept { return static_cast<double>(steps) * stepper.dt; }
  void validate() const;
};

enum class DensityLayout { packed, full };

struct MemoryEstimate {
  std::uint64_t density = 0;       // ensemble density matrix
  std::uint64_t states = 0;        // R wave functions
  std::uint64_t hamiltonians = 0;  // R reduced Hamiltonians
  std::uint64_t topology = 0;      // shared index table
  std::uint64_t eigen = 0;         // R decompositions, eigen backend only
  std::uint64_t workspace = 0;     // per-worker scratch
  std::uint64_t total() const noexcept {
    return density + states + hamiltonians + topology + eigen + workspace;
  }
};

MemoryEstimate estimate_memory(const RunConfig& config,
                               DensityLayout layout = DensityLayout::packed);

inline constexpr std::array<std::string_view, 4> kStageNames = {
    "initialization", "wavefunction_evolution", "hamiltonian_update",
    "density_and_postprocessing"};

enum Stage : int {
  kInitialization = 0,
  kWavefunctionEvolution = 1,
  kHamiltonianUpdate = 2,
  kDensityAndPostprocessing = 3,
};

struct StageProfile {
  std::array<double, 4> seconds{};
  std::array<std::int64_t, 4> calls{};
  double io_seconds = 0.0;  // sink callbacks, excluded from every stage

  double stage_sum() const noexcept {
    return seconds[0] + seconds[1] + seconds[2] + seconds[3];
  }
};

struct NormEvent {
  std::int64_t realization = 0;
  std::int64_t step = 0;
  double deviation = 0.0;
};

using DensitySnapshot = std::variant<const DensityMatrix<float>*, const DensityMatrix<double>*>;

struct SnapshotEvent {
  std::int64_t step = 0;
  double time = 0.0;
  const std::vector<ObservableRow>& rows;
  DensitySnapshot density;
};

struct OutputSinks {
  std::function<void(const SnapshotEvent&)> snapshot;
};

inline constexpr std::size_t kMaxLoggedNormEvents = 100;

struct RunReport {
  StageProfile profile;
  double total_seconds = 0.0;  // wall time of run() minus io_seconds
  double wall_seconds = 0.0;
  std::int64_t snapshots = 0;
  std::int64_t norm_corrections = 0;
  // Largest |<psi|psi> - 1| seen by any norm check, before correction.
  double max_norm_deviation = 0.0;
  std::vector<NormEvent> norm_events;  // first kMaxLoggedNormEvents corrections
  std::int64_t noise_switches = 0;
  std::int64_t hamiltonian_updates = 0;
  int workers = 1;
  MemoryEstimate memory;
  std::optional<DensityMatrix<double>> final_density;
  std::vector<std::string> outputs;  // filled in by the caller that writes files
};

int resolve_workers(int requested);

RunReport run(const RunConfig& config, const OutputSinks& sinks = {});

}  // namespace ctqw
