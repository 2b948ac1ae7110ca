#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ctqw/lattice.hpp"
#include "ctqw/noise.hpp"

namespace ctqw {

// Deterministic couplings. Energies are in units of the tunneling amplitude
// and times in hbar/c unless configured otherwise.
struct CouplingModel {
  double onsite_energy = 0.0;
  double tunneling = 1.0;
  // Optional per-direction override of `tunneling`; empty means uniform.
  std::vector<double> tunneling_per_direction;
  // Added once per pair of particles sharing a site.
  double interaction = 0.0;
  double hbar = 1.0;

  double tunneling_along(int direction) const {
    return tunneling_per_direction.empty() ? tunneling : tunneling_per_direction[direction];
  }
  void validate(const LatticeTopology& lattice) const;
};

inline constexpr std::uint64_t kDefaultDenseCap = 4096;

template <class Real>
using DenseMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

// Diagonal plus forward-hop values of one realization's Hamiltonian, aligned
// with slots 0..F of the shared TopologyMatrix. Backward hops are the complex
// conjugates of their partner rows and are generated during traversal.
template <class Real>
class ReducedHamiltonian {
 public:
  using value_type = std::complex<Real>;

  ReducedHamiltonian() = default;
  ReducedHamiltonian(std::uint64_t rows, int forward_slots, long realization_id = 0)
      : rows_(rows),
        width_(forward_slots + 1),
        realization_id_(realization_id),
        values_(rows * static_cast<std::uint64_t>(forward_slots + 1)) {}

  std::uint64_t rows() const noexcept { return rows_; }
  int width() const noexcept { return width_; }
  int forward_slots() const noexcept { return width_ - 1; }
  long realization_id() const noexcept { return realization_id_; }

  value_type& at(std::uint64_t alpha, int slot) noexcept { return values_[alpha * width_ + slot]; }
  const value_type& at(std::uint64_t alpha, int slot) const noexcept {
    return values_[alpha * width_ + slot];
  }
  std::span<value_type> values() noexcept { return values_; }
  std::span<const value_type> values() const noexcept { return values_; }

  friend bool operator==(const ReducedHamiltonian&, const ReducedHamiltonian&) = default;

 private:
  std::uint64_t rows_ = 0;
  int width_ = 1;
  long realization_id_ = 0;
  std::vector<value_type> values_;
};

template <class Real>
ReducedHamiltonian<Real> assemble(const JointSpace& space, const TopologyMatrix& topology,
                                  const CouplingModel& model, const NoiseProcess& noise,
                                  long realization_id = 0);

// Rewrites only the entries fed by lattice elements the last noise advance
// changed. Returns the number of stored entries rewritten.
template <class Real>
std::uint64_t update(ReducedHamiltonian<Real>& h, const JointSpace& space,
                     const TopologyMatrix& topology, const CouplingModel& model,
                     const NoiseProcess& noise);

// out = H psi. `out` must not alias `psi`.
template <class Real>
void apply(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology,
           std::span<const std::complex<Real>> psi, std::span<std::complex<Real>> out);

template <class Real>
std::vector<std::complex<Real>> apply(const ReducedHamiltonian<Real>& h,
                                      const TopologyMatrix& topology,
                                      std::span<const std::complex<Real>> psi) {
  std::vector<std::complex<Real>> out(psi.size());
  apply<Real>(h, topology, psi, out);
  return out;
}

template <class Real>
DenseMatrix<Real> densify(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology,
                          std::uint64_t cap = kDefaultDenseCap);

// Largest absolute row sum of the full operator; bounds the spectral radius.
template <class Real>
double gershgorin_bound(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology);

}  // namespace ctqw
