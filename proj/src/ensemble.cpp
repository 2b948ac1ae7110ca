#include "ctqw/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "ctqw/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ctqw {

Precision parse_precision(std::string_view name) {
  if (name == "single") return Precision::single;
  if (name == "double") return Precision::double_;
  throw ConfigError("precision must be \"single\" or \"double\", got \"" + std::string(name) + "\"");
}

std::string_view to_string(Precision p) { return p == Precision::single ? "single" : "double"; }

InitialKind parse_initial_kind(std::string_view name) {
  if (name == "single_site") return InitialKind::single_site;
  if (name == "product") return InitialKind::product;
  if (name == "symmetrized_pair") return InitialKind::symmetrized_pair;
  if (name == "antisymmetrized_pair") return InitialKind::antisymmetrized_pair;
  if (name == "custom_vector") return InitialKind::custom_vector;
  throw ConfigError("unknown initial_state \"" + std::string(name) +
                    "\"; valid: single_site, product, symmetrized_pair, antisymmetrized_pair, "
                    "custom_vector");
}

std::string_view to_string(InitialKind k) {
  switch (k) {
    case InitialKind::single_site: return "single_site";
    case InitialKind::product: return "product";
    case InitialKind::symmetrized_pair: return "symmetrized_pair";
    case InitialKind::antisymmetrized_pair: return "antisymmetrized_pair";
    case InitialKind::custom_vector: return "custom_vector";
  }
  return "product";
}

std::vector<SiteIndex> initial_positions(const InitialStateSpec& spec, const JointSpace& space) {
  const auto& lat = space.lattice();
  const int m = space.particles();
  const SiteIndex center = lat.center();

  if (spec.kind == InitialKind::single_site || spec.kind == InitialKind::custom_vector) {
    SiteIndex x = center;
    if (spec.kind == InitialKind::single_site && !spec.positions.empty()) {
      if (spec.positions.size() != 1)
        throw ConfigError("single_site initial state takes exactly one position");
      x = spec.positions.front();
    }
    if (x < 0 || x >= lat.sites()) throw ConfigError("initial position out of range");
    return std::vector<SiteIndex>(m, x);
  }

  if (spec.positions.empty()) {
    std::vector<SiteIndex> pos(m, center);
    for (int p = 1; p < m; ++p) {
      const auto next = lat.hop(center, 0, p, +1);
      if (!next) throw ConfigError("lattice too small for the default initial positions");
      pos[p] = *next;
    }
    return pos;
  }
  if (spec.positions.size() != static_cast<std::size_t>(m))
    throw ConfigError("initial_positions needs one site per particle (" + std::to_string(m) + ")");
  for (SiteIndex x : spec.positions)
    if (x < 0 || x >= lat.sites()) throw ConfigError("initial position out of range");
  return spec.positions;
}

template <class Real>
std::vector<std::complex<Real>> make_initial_state(const InitialStateSpec& spec,
                                                   const JointSpace& space) {
  using C = std::complex<Real>;
  std::vector<C> psi(space.dim(), C{});

  if (spec.kind == InitialKind::custom_vector) {
    if (spec.amplitudes.size() != space.dim())
      throw ConfigError("custom initial vector needs " + std::to_string(space.dim()) +
                        " amplitudes, got " + std::to_string(spec.amplitudes.size()));
    double norm2 = 0.0;
    for (const auto& a : spec.amplitudes) norm2 += std::norm(a);
    if (!(norm2 > 0.0) || !std::isfinite(norm2))
      throw ConfigError("custom initial vector must have finite nonzero norm");
    const double scale = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < psi.size(); ++i)
      psi[i] = {static_cast<Real>(spec.amplitudes[i].real() * scale),
                static_cast<Real>(spec.amplitudes[i].imag() * scale)};
    return psi;
  }

  const auto pos = initial_positions(spec, space);
  const bool pair = spec.kind == InitialKind::symmetrized_pair ||
                    spec.kind == InitialKind::antisymmetrized_pair;
  if (!pair) {
    psi[joint_index(pos, space)] = C{1};
    return psi;
  }

  if (space.particles() != 2) throw ConfigError("pair initial states need m = 2");
  if (pos[0] == pos[1]) {
    if (spec.kind == InitialKind::antisymmetrized_pair)
      throw ConfigError("antisymmetrized pair vanishes for coincident positions");
    psi[joint_index(pos, space)] = C{1};
    return psi;
  }
  const std::vector<SiteIndex> swapped{pos[1], pos[0]};
  const auto amp = static_cast<Real>(1.0 / std::sqrt(2.0));
  const Real sign = spec.kind == InitialKind::symmetrized_pair ? Real{1} : Real{-1};
  psi[joint_index(pos, space)] = C{amp};
  psi[joint_index(swapped, space)] = C{sign * amp};
  return psi;
}

template std::vector<std::complex<float>> make_initial_state<float>(const InitialStateSpec&,
                                                                    const JointSpace&);
template std::vector<std::complex<double>> make_initial_state<double>(const InitialStateSpec&,
                                                                      const JointSpace&);

void RunConfig::validate() const {
  if (space.dim() == 0) throw ConfigError("joint space is empty");
  model.validate(space.lattice());
  noise.validate();
  stepper.validate();
  if (realizations < 1) throw ConfigError("realizations (R) must be >= 1");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (post_rate < 1 || post_rate > steps)
    throw ConfigError("post_rate must satisfy 1 <= post_rate <= steps");
  if (!reference_positions.empty() &&
      reference_positions.size() != static_cast<std::size_t>(space.particles()))
    throw ConfigError("reference_positions needs one site per particle");
  for (SiteIndex x : reference_positions)
    if (x < 0 || x >= space.lattice().sites()) throw ConfigError("reference position out of range");
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return std::max(1u, std::thread::hardware_concurrency());
#endif
}

MemoryEstimate estimate_memory(const RunConfig& config, DensityLayout layout) {
  if (config.realizations < 1) throw ConfigError("realizations (R) must be >= 1");
  const std::uint64_t d = config.space.dim();
  const std::uint64_t r = static_cast<std::uint64_t>(config.realizations);
  const std::uint64_t complex_bytes = config.precision == Precision::single ? 8 : 16;
  const std::uint64_t width = static_cast<std::uint64_t>(config.space.forward_slots()) + 1;

  MemoryEstimate m;
  m.density = (layout == DensityLayout::packed ? d * (d + 1) / 2 : d * d) * complex_bytes;
  m.states = r * d * complex_bytes;
  m.hamiltonians = r * d * width * complex_bytes;
  m.topology = d * static_cast<std::uint64_t>(config.space.row_width()) * sizeof(JointIndex);
  if (config.stepper.backend == Backend::eigen)
    m.eigen = r * (d * d * complex_bytes + d * complex_bytes / 2);
  m.workspace = static_cast<std::uint64_t>(resolve_workers(config.workers)) * 3 * d * complex_bytes;
  return m;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::uint64_t kFinalDensityCap = 4096;

template <class Real>
struct Realization {
  NoiseProcess noise;
  ReducedHamiltonian<Real> h;
  std::vector<std::complex<Real>> psi;
  std::optional<EigenDecomposition<Real>> decomp;
  bool stale = true;
  NormCheck last_check;
  std::int64_t switches = 0;
  std::int64_t updates = 0;
};

template <class Real>
struct Workspace {
  std::vector<std::complex<Real>> out, aux, tmp;
  explicit Workspace(std::uint64_t d) : out(d), aux(d), tmp(d) {}
};

// First failure by realization index, so the reported error does not depend
// on scheduling.
class FailureSlot {
 public:
  void record(std::int64_t realization, std::exception_ptr ep) {
    std::lock_guard lock(mutex_);
    if (!ep_ || realization < realization_) {
      realization_ = realization;
      ep_ = std::move(ep);
    }
  }
  void rethrow(std::int64_t step) const {
    if (!ep_) return;
    try {
      std::rethrow_exception(ep_);
    } catch (const NormFailure& e) {
      throw NormFailure(e.deviation(), static_cast<long>(realization_), static_cast<long>(step));
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (realization " + std::to_string(realization_) +
                         ", step " + std::to_string(step) + ")");
    }
  }

 private:
  std::mutex mutex_;
  std::int64_t realization_ = std::numeric_limits<std::int64_t>::max();
  std::exception_ptr ep_;
};

int thread_id() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

template <class Real>
RunReport run_impl(const RunConfig& config, const OutputSinks& sinks) {
  const auto t_start = Clock::now();
  RunReport report;
  report.workers = resolve_workers(config.workers);
  const int workers = report.workers;
  const JointSpace& space = config.space;
  const StepperConfig& stepper = config.stepper;
  const double hbar = config.model.hbar;
  const std::int64_t count = config.realizations;
  const std::uint64_t d = space.dim();

  // Stage timers are contiguous laps: each interval of the run is charged to
  // exactly one stage or to IO.
  auto mark = t_start;
  auto lap = [&](int stage) {
    const auto now = Clock::now();
    report.profile.seconds[stage] += std::chrono::duration<double>(now - mark).count();
    report.profile.calls[stage] += 1;
    mark = now;
  };

  const TopologyMatrix topology = build_topology(space);
  const auto initial = make_initial_state<Real>(config.initial_state, space);
  std::vector<SiteIndex> reference = config.reference_positions;
  if (reference.empty()) reference = initial_positions(config.initial_state, space);

  std::vector<Realization<Real>> reals(static_cast<std::size_t>(count));
  std::vector<Workspace<Real>> ws;
  ws.reserve(workers);
  for (int w = 0; w < workers; ++w) ws.emplace_back(d);
  FailureSlot init_failure;

#pragma omp parallel for num_threads(workers) schedule(static)
  for (std::int64_t r = 0; r < count; ++r) {
    try {
      auto& rz = reals[r];
      rz.noise = NoiseProcess(config.noise, space.lattice(),
                              realization_seed(config.master_seed, static_cast<std::uint64_t>(r)));
      rz.h = assemble<Real>(space, topology, config.model, rz.noise, static_cast<long>(r));
      rz.psi = initial;
    } catch (...) {
      init_failure.record(r, std::current_exception());
    }
  }
  init_failure.rethrow(0);
  lap(kInitialization);

  auto post_process = [&](std::int64_t step, double time) {
    std::vector<std::vector<std::complex<Real>>> states;
    states.reserve(reals.size());
    for (auto& rz : reals) states.push_back(std::move(rz.psi));
    DensityMatrix<Real> rho = accumulate_density<Real>(states, time, workers);
    for (std::size_t r = 0; r < reals.size(); ++r) reals[r].psi = std::move(states[r]);
    const auto rows = compute_observables(rho, space, config.observables, reference);
    if (step == config.steps && d <= kFinalDensityCap)
      report.final_density = rho.template cast<double>();
    lap(kDensityAndPostprocessing);
    ++report.snapshots;

    if (sinks.snapshot) {
      sinks.snapshot(SnapshotEvent{step, time, rows, DensitySnapshot{&rho}});
      const auto now = Clock::now();
      report.profile.io_seconds += std::chrono::duration<double>(now - mark).count();
      mark = now;
    }
  };

  if (config.snapshot_initial) post_process(0, 0.0);

  for (std::int64_t step = 1; step <= config.steps; ++step) {
    const double t_prev = static_cast<double>(step - 1) * stepper.dt;
    const double t_now = static_cast<double>(step) * stepper.dt;

    // Stage 2: wave-function evolution and norm control.
    FailureSlot evolve_failure;
#pragma omp parallel for num_threads(workers) schedule(static)
    for (std::int64_t r = 0; r < count; ++r) {
      auto& rz = reals[r];
      auto& w = ws[thread_id()];
      try {
        switch (stepper.backend) {
          case Backend::eigen:
            if (rz.stale || !rz.decomp) {
              rz.decomp = diagonalize<Real>(densify<Real>(rz.h, topology, config.dense_cap));
              rz.stale = false;
            }
            step_eigen<Real>(*rz.decomp, rz.psi, w.out, stepper.dt, hbar);
            break;
          case Backend::rk4:
            step_rk4<Real>(rz.h, topology, rz.psi, w.out, w.aux, w.tmp, stepper.dt, hbar);
            break;
          case Backend::taylor:
            step_taylor<Real>(rz.h, topology, rz.psi, w.out, w.aux, stepper.dt, hbar,
                              stepper.taylor_order);
            break;
        }
        std::swap(rz.psi, w.out);
        rz.last_check = check_norm<Real>(rz.psi, stepper.tol_norm, stepper.tol_fail,
                                         stepper.renormalize);
      } catch (...) {
        evolve_failure.record(r, std::current_exception());
      }
    }
    evolve_failure.rethrow(step);
    for (std::int64_t r = 0; r < count; ++r) {
      const auto& c = reals[r].last_check;
      report.max_norm_deviation = std::max(report.max_norm_deviation, c.deviation);
      if (!c.corrected) continue;
      ++report.norm_corrections;
      if (report.norm_events.size() < kMaxLoggedNormEvents)
        report.norm_events.push_back({r, step, c.deviation});
    }
    lap(kWavefunctionEvolution);

    // Stage 3: noise switching and Hamiltonian update.
#pragma omp parallel for num_threads(workers) schedule(static)
    for (std::int64_t r = 0; r < count; ++r) {
      auto& rz = reals[r];
      const AdvanceResult adv = rz.noise.advance(t_prev, stepper.dt);
      rz.switches += adv.switches;
      if (adv.changed) {
        rz.updates += static_cast<std::int64_t>(
            update<Real>(rz.h, space, topology, config.model, rz.noise));
        rz.stale = true;
      }
    }
    lap(kHamiltonianUpdate);

    // Stage 4: ensemble density matrix and observables.
    if (step % config.post_rate == 0) post_process(step, t_now);
  }

  for (const auto& rz : reals) {
    report.noise_switches += rz.switches;
    report.hamiltonian_updates += rz.updates;
  }
  report.profile.seconds[kHamiltonianUpdate] +=
      std::chrono::duration<double>(Clock::now() - mark).count();
  report.wall_seconds = seconds_since(t_start);
  report.total_seconds = report.wall_seconds - report.profile.io_seconds;
  return report;
}

}  // namespace

RunReport run(const RunConfig& config, const OutputSinks& sinks) {
  config.validate();
  const MemoryEstimate mem = estimate_memory(config);
  if (mem.total() > config.memory_budget)
    throw CapacityError("estimated memory " + std::to_string(mem.total()) +
                        " bytes exceeds the budget of " + std::to_string(config.memory_budget) +
                        " bytes");
  if (config.stepper.backend == Backend::eigen && config.space.dim() > config.dense_cap)
    throw CapacityError("eigen backend needs N^m <= dense_cap (" +
                        std::to_string(config.dense_cap) + ")");

  RunReport report = config.precision == Precision::single ? run_impl<float>(config, sinks)
                                                           : run_impl<double>(config, sinks);
  report.memory = mem;
  return report;
}

}  // namespace ctqw
