#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "ctqw/lattice.hpp"

namespace ctqw {

enum class NoiseTarget { tunneling, onsite, both };

NoiseTarget parse_noise_target(std::string_view name);
std::string_view to_string(NoiseTarget t);

// Random telegraph noise: each element holds one of `levels` and redraws it
// uniformly after exponentially distributed waiting times of mean 1/rate.
struct NoiseSpec {
  NoiseTarget target = NoiseTarget::tunneling;
  std::vector<double> levels{0.0};
  double switch_rate = 0.0;

  bool is_static() const noexcept { return switch_rate == 0.0; }
  bool on_links() const noexcept { return target != NoiseTarget::onsite; }
  bool on_sites() const noexcept { return target != NoiseTarget::tunneling; }
  void validate() const;
};

// Per-realization seed; independent of scheduling order.
inline std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t realization) {
  return master_seed ^ realization;
}

struct AdvanceResult {
  bool changed = false;     // some element ended the step with a new value
  std::int64_t switches = 0;  // switching events fired, including no-op redraws
};

// Noise lives on single-particle lattice links and sites; the Hamiltonian
// lifts it to the joint space. Elements outside the noise target
// stay at zero and never switch.
class NoiseProcess {
 public:
  NoiseProcess() = default;
  NoiseProcess(const NoiseSpec& spec, const LatticeTopology& lattice, std::uint64_t seed);

  // Processes every switching time in (t, t + dt]. Values are piecewise
  // constant at step resolution: the last redraw inside the window wins.
  AdvanceResult advance(double t, double dt);

  std::span<const double> link_values() const noexcept { return link_value_; }
  std::span<const double> site_values() const noexcept { return site_value_; }
  std::span<const double> link_next_switch() const noexcept { return link_next_; }
  std::span<const double> site_next_switch() const noexcept { return site_next_; }

  // Elements whose value differs from the previous step, valid until the next advance().
  std::span<const std::int64_t> changed_links() const noexcept { return changed_links_; }
  std::span<const std::int64_t> changed_sites() const noexcept { return changed_sites_; }

  const NoiseSpec& spec() const noexcept { return spec_; }
  double time() const noexcept { return now_; }

 private:
  double draw_level();
  double draw_wait();
  void advance_elements(std::vector<double>& value, std::vector<double>& next,
                        const std::vector<std::uint8_t>& active, double horizon,
                        std::vector<std::int64_t>& changed, AdvanceResult& result);

  NoiseSpec spec_;
  std::mt19937_64 rng_;
  double now_ = 0.0;
  std::vector<double> link_value_, link_next_;
  std::vector<double> site_value_, site_next_;
  std::vector<std::uint8_t> link_active_, site_active_;
  std::vector<std::int64_t> changed_links_, changed_sites_;
};

inline NoiseProcess init_process(const NoiseSpec& spec, const LatticeTopology& lattice,
                                 std::uint64_t seed) {
  return NoiseProcess(spec, lattice, seed);
}

}  // namespace ctqw
