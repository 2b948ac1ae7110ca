#include "ctqw/noise.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ctqw/errors.hpp"

namespace ctqw {

NoiseTarget parse_noise_target(std::string_view name) {
  if (name == "tunneling") return NoiseTarget::tunneling;
  if (name == "onsite") return NoiseTarget::onsite;
  if (name == "both") return NoiseTarget::both;
  throw ConfigError("noise_target must be one of tunneling, onsite, both; got \"" +
                    std::string(name) + "\"");
}

std::string_view to_string(NoiseTarget t) {
  switch (t) {
    case NoiseTarget::tunneling: return "tunneling";
    case NoiseTarget::onsite: return "onsite";
    case NoiseTarget::both: return "both";
  }
  return "tunneling";
}

void NoiseSpec::validate() const {
  if (levels.empty()) throw ConfigError("noise levels must be non-empty");
  for (double v : levels)
    if (!std::isfinite(v)) throw ConfigError("noise levels must be finite");
  if (!std::isfinite(switch_rate) || switch_rate < 0.0)
    throw ConfigError("switch_rate must be finite and >= 0");
}

NoiseProcess::NoiseProcess(const NoiseSpec& spec, const LatticeTopology& lattice,
                           std::uint64_t seed)
    : spec_(spec), rng_(seed) {
  spec_.validate();
  const auto inf = std::numeric_limits<double>::infinity();

  link_value_.assign(static_cast<std::size_t>(lattice.link_count()), 0.0);
  link_next_.assign(link_value_.size(), inf);
  link_active_.assign(link_value_.size(), 0);
  site_value_.assign(static_cast<std::size_t>(lattice.sites()), 0.0);
  site_next_.assign(site_value_.size(), inf);
  site_active_.assign(site_value_.size(), 0);

  if (spec_.on_links()) {
    for (SiteIndex x = 0; x < lattice.sites(); ++x) {
      for (int f = 0; f < lattice.links_per_site(); ++f) {
        const auto& mv = lattice.forward_moves()[f];
        if (lattice.hop(x, mv.direction, mv.offset, +1)) link_active_[lattice.link_id(x, f)] = 1;
      }
    }
  }
  if (spec_.on_sites()) site_active_.assign(site_value_.size(), 1);

  for (std::size_t e = 0; e < link_value_.size(); ++e) {
    if (!link_active_[e]) continue;
    link_value_[e] = draw_level();
    link_next_[e] = draw_wait();
  }
  for (std::size_t e = 0; e < site_value_.size(); ++e) {
    if (!site_active_[e]) continue;
    site_value_[e] = draw_level();
    site_next_[e] = draw_wait();
  }
}

double NoiseProcess::draw_level() {
  if (spec_.levels.size() == 1) return spec_.levels.front();
  std::uniform_int_distribution<std::size_t> pick(0, spec_.levels.size() - 1);
  return spec_.levels[pick(rng_)];
}

double NoiseProcess::draw_wait() {
  if (spec_.is_static()) return std::numeric_limits<double>::infinity();
  std::exponential_distribution<double> wait(spec_.switch_rate);
  return wait(rng_);
}

void NoiseProcess::advance_elements(std::vector<double>& value, std::vector<double>& next,
                                    const std::vector<std::uint8_t>& active, double horizon,
                                    std::vector<std::int64_t>& changed, AdvanceResult& result) {
  for (std::size_t e = 0; e < value.size(); ++e) {
    if (!active[e] || next[e] > horizon) continue;
    const double before = value[e];
    while (next[e] <= horizon) {
      value[e] = draw_level();
      next[e] += draw_wait();
      ++result.switches;
    }
    if (value[e] != before) changed.push_back(static_cast<std::int64_t>(e));
  }
}

AdvanceResult NoiseProcess::advance(double t, double dt) {
  if (!(dt > 0.0)) throw ConfigError("noise advance needs dt > 0");
  changed_links_.clear();
  changed_sites_.clear();
  AdvanceResult result;
  const double horizon = t + dt;
  if (!spec_.is_static()) {
    advance_elements(link_value_, link_next_, link_active_, horizon, changed_links_, result);
    advance_elements(site_value_, site_next_, site_active_, horizon, changed_sites_, result);
  }
  result.changed = !changed_links_.empty() || !changed_sites_.empty();
  now_ = horizon;
  return result;
}

}  // namespace ctqw
