#include "ctqw/hamiltonian.hpp"

#include <cmath>
#include <string>

#include "ctqw/errors.hpp"

namespace ctqw {

void CouplingModel::validate(const LatticeTopology& lattice) const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("hbar must be finite and > 0");
  if (!std::isfinite(onsite_energy) || !std::isfinite(tunneling) || !std::isfinite(interaction))
    throw ConfigError("couplings must be finite");
  if (!tunneling_per_direction.empty()) {
    if (static_cast<int>(tunneling_per_direction.size()) != lattice.q())
      throw ConfigError("tunneling_per_direction needs one value per lattice direction (" +
                        std::to_string(lattice.q()) + ")");
    for (double c : tunneling_per_direction)
      if (!std::isfinite(c)) throw ConfigError("couplings must be finite");
  }
}

namespace {

// Shared by assemble() and update() so both produce bit-identical entries.
double hop_value(const LatticeTopology& lat, const CouplingModel& model, const NoiseProcess& noise,
                 SiteIndex site, int move) {
  return model.tunneling_along(lat.forward_moves()[move].direction) +
         noise.link_values()[lat.link_id(site, move)];
}

double diagonal_value(const CouplingModel& model, const NoiseProcess& noise,
                      std::span<const SiteIndex> pos) {
  double d = 0.0;
  for (SiteIndex x : pos) d += model.onsite_energy + noise.site_values()[x];
  int pairs = 0;
  for (std::size_t a = 0; a < pos.size(); ++a)
    for (std::size_t b = a + 1; b < pos.size(); ++b)
      if (pos[a] == pos[b]) ++pairs;
  return d + model.interaction * pairs;
}

void check_shape(const JointSpace& space, const TopologyMatrix& topology) {
  if (topology.rows() != space.dim() || topology.forward_slots() != space.forward_slots())
    throw ConfigError("topology does not match the joint space");
}

// Calls fn(alpha) for every joint row with particle p sitting on `site`.
template <class Fn>
void for_rows_with(const JointSpace& space, int p, SiteIndex site, Fn&& fn) {
  const std::uint64_t low = particle_stride(space, p);
  const std::uint64_t n = static_cast<std::uint64_t>(space.lattice().sites());
  const std::uint64_t high = space.dim() / (low * n);
  for (std::uint64_t h = 0; h < high; ++h)
    for (std::uint64_t l = 0; l < low; ++l)
      fn(h * low * n + static_cast<std::uint64_t>(site) * low + l);
}

}  // namespace

template <class Real>
ReducedHamiltonian<Real> assemble(const JointSpace& space, const TopologyMatrix& topology,
                                  const CouplingModel& model, const NoiseProcess& noise,
                                  long realization_id) {
  check_shape(space, topology);
  const auto& lat = space.lattice();
  model.validate(lat);
  const int per_particle = lat.links_per_site();
  ReducedHamiltonian<Real> h(space.dim(), space.forward_slots(), realization_id);

  for (std::uint64_t alpha = 0; alpha < space.dim(); ++alpha) {
    const auto pos = joint_positions(static_cast<JointIndex>(alpha), space);
    h.at(alpha, 0) = {static_cast<Real>(diagonal_value(model, noise, pos)), Real{0}};
    for (int p = 0; p < space.particles(); ++p) {
      for (int f = 0; f < per_particle; ++f) {
        const int slot = 1 + p * per_particle + f;
        if (topology.at(alpha, slot) == kNoNeighbor) continue;
        h.at(alpha, slot) = {static_cast<Real>(hop_value(lat, model, noise, pos[p], f)), Real{0}};
      }
    }
  }
  return h;
}

template <class Real>
std::uint64_t update(ReducedHamiltonian<Real>& h, const JointSpace& space,
                     const TopologyMatrix& topology, const CouplingModel& model,
                     const NoiseProcess& noise) {
  const auto& lat = space.lattice();
  const int per_particle = lat.links_per_site();
  std::uint64_t rewritten = 0;

  for (std::int64_t link : noise.changed_links()) {
    const SiteIndex site = link / per_particle;
    const int f = static_cast<int>(link % per_particle);
    const auto value = static_cast<Real>(hop_value(lat, model, noise, site, f));
    for (int p = 0; p < space.particles(); ++p) {
      const int slot = 1 + p * per_particle + f;
      for_rows_with(space, p, site, [&](std::uint64_t alpha) {
        if (topology.at(alpha, slot) == kNoNeighbor) return;
        h.at(alpha, slot) = {value, Real{0}};
        ++rewritten;
      });
    }
  }

  for (std::int64_t site : noise.changed_sites()) {
    for (int p = 0; p < space.particles(); ++p) {
      for_rows_with(space, p, site, [&](std::uint64_t alpha) {
        // Rows with several particles on `site` are visited once per particle;
        // only the first visit counts as a rewrite.
        const auto pos = joint_positions(static_cast<JointIndex>(alpha), space);
        for (int earlier = 0; earlier < p; ++earlier)
          if (pos[earlier] == site) return;
        h.at(alpha, 0) = {static_cast<Real>(diagonal_value(model, noise, pos)), Real{0}};
        ++rewritten;
      });
    }
  }
  return rewritten;
}

template <class Real>
void apply(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology,
           std::span<const std::complex<Real>> psi, std::span<std::complex<Real>> out) {
  const std::uint64_t rows = topology.rows();
  const int forward = topology.forward_slots();
  const int width = topology.cols_per_row();
  const JointIndex* idx = topology.indices().data();
  const auto* vals = h.values().data();
  const int hw = h.width();

  for (std::uint64_t alpha = 0; alpha < rows; ++alpha) {
    const JointIndex* row = idx + alpha * width;
    const auto* hv = vals + alpha * hw;
    std::complex<Real> acc = hv[0] * psi[alpha];
    for (int s = 1; s <= forward; ++s) {
      const JointIndex beta = row[s];
      if (beta != kNoNeighbor) acc += hv[s] * psi[beta];
    }
    for (int s = 1; s <= forward; ++s) {
      const JointIndex beta = row[forward + s];
      if (beta != kNoNeighbor) acc += std::conj(vals[beta * hw + s]) * psi[beta];
    }
    out[alpha] = acc;
  }
}

template <class Real>
DenseMatrix<Real> densify(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology,
                          std::uint64_t cap) {
  const std::uint64_t rows = topology.rows();
  if (rows > cap)
    throw CapacityError("dense Hamiltonian of " + std::to_string(rows) +
                        " rows exceeds the dense cap of " + std::to_string(cap));
  const auto n = static_cast<Eigen::Index>(rows);
  DenseMatrix<Real> a = DenseMatrix<Real>::Zero(n, n);
  for (std::uint64_t alpha = 0; alpha < rows; ++alpha) {
    const auto i = static_cast<Eigen::Index>(alpha);
    a(i, i) = {h.at(alpha, 0).real(), Real{0}};
    for (int s = 1; s <= topology.forward_slots(); ++s) {
      const JointIndex beta = topology.at(alpha, s);
      if (beta == kNoNeighbor) continue;
      const auto j = static_cast<Eigen::Index>(beta);
      a(i, j) += h.at(alpha, s);
      a(j, i) += std::conj(h.at(alpha, s));
    }
  }
  return a;
}

template <class Real>
double gershgorin_bound(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology) {
  const int forward = topology.forward_slots();
  double bound = 0.0;
  for (std::uint64_t alpha = 0; alpha < topology.rows(); ++alpha) {
    double sum = std::abs(std::complex<double>(h.at(alpha, 0)));
    for (int s = 1; s <= forward; ++s) {
      if (topology.at(alpha, s) != kNoNeighbor)
        sum += std::abs(std::complex<double>(h.at(alpha, s)));
      const JointIndex beta = topology.at(alpha, forward + s);
      if (beta != kNoNeighbor) sum += std::abs(std::complex<double>(h.at(beta, s)));
    }
    bound = std::max(bound, sum);
  }
  return bound;
}

#define CTQW_INSTANTIATE(Real)                                                                  \
  template ReducedHamiltonian<Real> assemble<Real>(const JointSpace&, const TopologyMatrix&,     \
                                                   const CouplingModel&, const NoiseProcess&,    \
                                                   long);                                        \
  template std::uint64_t update<Real>(ReducedHamiltonian<Real>&, const JointSpace&,              \
                                      const TopologyMatrix&, const CouplingModel&,               \
                                      const NoiseProcess&);                                      \
  template void apply<Real>(const ReducedHamiltonian<Real>&, const TopologyMatrix&,              \
                            std::span<const std::complex<Real>>, std::span<std::complex<Real>>); \
  template DenseMatrix<Real> densify<Real>(const ReducedHamiltonian<Real>&,                      \
                                           const TopologyMatrix&, std::uint64_t);                \
  template double gershgorin_bound<Real>(const ReducedHamiltonian<Real>&, const TopologyMatrix&);

CTQW_INSTANTIATE(float)
CTQW_INSTANTIATE(double)

#undef CTQW_INSTANTIATE

}  // namespace ctqw
