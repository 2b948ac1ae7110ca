#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctqw/density.hpp"
#include "ctqw/lattice.hpp"

namespace ctqw {

enum class Observable {
  populations,
  joint_distribution,
  position_mean_variance,
  purity,
  participation_ratio,
};

Observable parse_observable(std::string_view name);
std::string_view to_string(Observable o);

using ObservableSet = std::vector<Observable>;

ObservableSet default_observables();

// One CSV row of observables.csv.
struct ObservableRow {
  double time = 0.0;
  std::string name;
  std::int64_t component = 0;
  double value = 0.0;
};

// P(x): diagonal weight of joint states with a particle on x, counted once per
// particle, so the sum over sites is m.
template <class Real>
std::vector<double> populations(const DensityMatrix<Real>& rho, const JointSpace& space);

struct Spreading {
  std::vector<double> mean;      // per direction, displacement from the reference site
  std::vector<double> variance;  // per direction, second moment about the reference site
  bool wrapped = false;
};

// Per-particle marginals measured on the covering line around each particle's
// reference site, then averaged over particles. Displacements are taken in
// [-N_i/2, N_i/2), so values are meaningful only before the wavefront wraps;
// `wrapped` flags population above 1e-3 within two sites of the antipode.
template <class Real>
Spreading position_variance(const DensityMatrix<Real>& rho, const JointSpace& space,
                            const std::vector<SiteIndex>& reference_positions);

template <class Real>
double purity(const DensityMatrix<Real>& rho);

// 1 / sum_alpha rho_aa^2
template <class Real>
double participation_ratio(const DensityMatrix<Real>& rho);

inline constexpr std::uint64_t kTraceDistanceCap = 256;

template <class Real>
double trace_distance(const DensityMatrix<Real>& a, const DensityMatrix<Real>& b,
                      std::uint64_t cap = kTraceDistanceCap);

template <class Real>
std::vector<ObservableRow> compute_observables(const DensityMatrix<Real>& rho,
                                               const JointSpace& space,
                                               const ObservableSet& selection,
                                               const std::vector<SiteIndex>& reference_positions);

}  // namespace ctqw
