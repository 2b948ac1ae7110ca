#include "ctqw/observables.hpp"

#include <cmath>
#include <string>

#include "ctqw/errors.hpp"

namespace ctqw {

namespace {
constexpr double kWrapThreshold = 1e-3;
constexpr int kWrapMargin = 2;
}  // namespace

Observable parse_observable(std::string_view name) {
  if (name == "populations") return Observable::populations;
  if (name == "joint_distribution") return Observable::joint_distribution;
  if (name == "position_mean_variance") return Observable::position_mean_variance;
  if (name == "purity") return Observable::purity;
  if (name == "participation_ratio") return Observable::participation_ratio;
  throw ConfigError("unknown observable \"" + std::string(name) +
                    "\"; valid: populations, joint_distribution, position_mean_variance, "
                    "purity, participation_ratio");
}

std::string_view to_string(Observable o) {
  switch (o) {
    case Observable::populations: return "populations";
    case Observable::joint_distribution: return "joint_distribution";
    case Observable::position_mean_variance: return "position_mean_variance";
    case Observable::purity: return "purity";
    case Observable::participation_ratio: return "participation_ratio";
  }
  return "populations";
}

ObservableSet default_observables() {
  return {Observable::populations, Observable::position_mean_variance, Observable::purity,
          Observable::participation_ratio};
}

namespace {

template <class Real>
void check_dims(const DensityMatrix<Real>& rho, const JointSpace& space) {
  if (rho.dim() != space.dim())
    throw ConfigError("density matrix dimension " + std::to_string(rho.dim()) +
                      " does not match N^m = " + std::to_string(space.dim()));
}

// marginal[p][x]: diagonal weight with particle p on site x.
template <class Real>
std::vector<std::vector<double>> marginals(const DensityMatrix<Real>& rho, const JointSpace& space) {
  const auto n = static_cast<std::uint64_t>(space.lattice().sites());
  std::vector<std::vector<double>> out(space.particles(), std::vector<double>(n, 0.0));
  for (std::uint64_t alpha = 0; alpha < rho.dim(); ++alpha) {
    const double w = static_cast<double>(rho(alpha, alpha).real());
    std::uint64_t rest = alpha;
    for (int p = space.particles(); p-- > 0;) {
      out[p][rest % n] += w;
      rest /= n;
    }
  }
  return out;
}

}  // namespace

template <class Real>
std::vector<double> populations(const DensityMatrix<Real>& rho, const JointSpace& space) {
  check_dims(rho, space);
  const auto per_particle = marginals(rho, space);
  std::vector<double> pop(per_particle.front().size(), 0.0);
  for (const auto& m : per_particle)
    for (std::size_t x = 0; x < m.size(); ++x) pop[x] += m[x];
  return pop;
}

template <class Real>
Spreading position_variance(const DensityMatrix<Real>& rho, const JointSpace& space,
                            const std::vector<SiteIndex>& reference_positions) {
  check_dims(rho, space);
  const auto& lat = space.lattice();
  if (reference_positions.size() != static_cast<std::size_t>(space.particles()))
    throw ConfigError("need one reference position per particle");

  const auto per_particle = marginals(rho, space);
  const int q = lat.q();
  Spreading s;
  s.mean.assign(q, 0.0);
  s.variance.assign(q, 0.0);
  const bool periodic = lat.boundary() == Boundary::periodic;

  for (int p = 0; p < space.particles(); ++p) {
    const auto ref = lat.coordinates(reference_positions[p]);
    std::vector<double> near_antipode(q, 0.0);
    for (SiteIndex x = 0; x < lat.sites(); ++x) {
      const double w = per_particle[p][x];
      if (w == 0.0) continue;
      const auto c = lat.coordinates(x);
      for (int i = 0; i < q; ++i) {
        const int n = lat.dims()[i];
        int d = c[i] - ref[i];
        if (periodic) {
          d = ((d % n) + n) % n;
          if (d >= n - n / 2) d -= n;  // into [-N/2, N/2)
          if (std::abs(d) >= n / 2 - kWrapMargin) near_antipode[i] += w;
        }
        s.mean[i] += w * d;
        s.variance[i] += w * static_cast<double>(d) * d;
      }
    }
    for (int i = 0; i < q; ++i)
      if (near_antipode[i] > kWrapThreshold) s.wrapped = true;
  }
  for (int i = 0; i < q; ++i) {
    s.mean[i] /= space.particles();
    s.variance[i] /= space.particles();
  }
  return s;
}

template <class Real>
double purity(const DensityMatrix<Real>& rho) {
  double diag = 0.0, off = 0.0;
  for (std::uint64_t i = 0; i < rho.dim(); ++i) {
    for (std::uint64_t j = 0; j < i; ++j) off += static_cast<double>(std::norm(rho(i, j)));
    diag += static_cast<double>(std::norm(rho(i, i)));
  }
  return diag + 2.0 * off;
}

template <class Real>
double participation_ratio(const DensityMatrix<Real>& rho) {
  double s = 0.0;
  for (std::uint64_t i = 0; i < rho.dim(); ++i) {
    const double p = static_cast<double>(rho(i, i).real());
    s += p * p;
  }
  return s > 0.0 ? 1.0 / s : 0.0;
}

template <class Real>
double trace_distance(const DensityMatrix<Real>& a, const DensityMatrix<Real>& b,
                      std::uint64_t cap) {
  if (a.dim() != b.dim()) throw ConfigError("trace distance needs equal dimensions");
  if (a.dim() > cap)
    throw CapacityError("trace distance limited to " + std::to_string(cap) + " rows");
  const DenseMatrix<double> diff = a.to_dense() - b.to_dense();
  Eigen::SelfAdjointEigenSolver<DenseMatrix<double>> solver(diff, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

template <class Real>
std::vector<ObservableRow> compute_observables(const DensityMatrix<Real>& rho,
                                               const JointSpace& space,
                                               const ObservableSet& selection,
                                               const std::vector<SiteIndex>& reference_positions) {
  std::vector<ObservableRow> rows;
  const double t = rho.time();
  for (Observable o : selection) {
    switch (o) {
      case Observable::populations: {
        const auto pop = populations(rho, space);
        for (std::size_t x = 0; x < pop.size(); ++x)
          rows.push_back({t, "population", static_cast<std::int64_t>(x), pop[x]});
        break;
      }
      case Observable::joint_distribution:
        for (std::uint64_t a = 0; a < rho.dim(); ++a)
          rows.push_back({t, "joint_probability", static_cast<std::int64_t>(a),
                          static_cast<double>(rho(a, a).real())});
        break;
      case Observable::position_mean_variance: {
        const auto s = position_variance(rho, space, reference_positions);
        for (std::size_t i = 0; i < s.mean.size(); ++i)
          rows.push_back({t, "position_mean", static_cast<std::int64_t>(i), s.mean[i]});
        for (std::size_t i = 0; i < s.variance.size(); ++i)
          rows.push_back({t, "position_variance", static_cast<std::int64_t>(i), s.variance[i]});
        rows.push_back({t, "wrap_flag", 0, s.wrapped ? 1.0 : 0.0});
        break;
      }
      case Observable::purity:
        rows.push_back({t, "purity", 0, purity(rho)});
        break;
      case Observable::participation_ratio:
        rows.push_back({t, "participation_ratio", 0, participation_ratio(rho)});
        break;
    }
  }
  return rows;
}

#define CTQW_INSTANTIATE(Real)                                                                   \
  template std::vector<double> populations<Real>(const DensityMatrix<Real>&, const JointSpace&); \
  template Spreading position_variance<Real>(const DensityMatrix<Real>&, const JointSpace&,      \
                                             const std::vector<SiteIndex>&);                    \
  template double purity<Real>(const DensityMatrix<Real>&);                                      \
  template double participation_ratio<Real>(const DensityMatrix<Real>&);                         \
  template double trace_distance<Real>(const DensityMatrix<Real>&, const DensityMatrix<Real>&,   \
                                       std::uint64_t);                                           \
  template std::vector<ObservableRow> compute_observables<Real>(                                 \
      const DensityMatrix<Real>&, const JointSpace&, const ObservableSet&,                       \
      const std::vector<SiteIndex>&);

CTQW_INSTANTIATE(float)
CTQW_INSTANTIATE(double)

#undef CTQW_INSTANTIATE

}  // namespace ctqw
