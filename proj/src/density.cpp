#include "ctqw/density.hpp"

#include <cmath>
#include <string>

#include "ctqw/errors.hpp"

namespace ctqw {

template <class Real>
DenseMatrix<double> DensityMatrix<Real>::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  DenseMatrix<double> a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto v = (*this)(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      a(i, j) = {static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }
  return a;
}

template <class Real>
DensityMatrix<Real> accumulate_density(std::span<const std::vector<std::complex<Real>>> states,
                                       double time, int workers) {
  if (states.empty()) throw ConfigError("density accumulation needs at least one state");
  const std::uint64_t dim = states.front().size();
  for (const auto& s : states)
    if (s.size() != dim) throw ConfigError("states of different dimension cannot be averaged");

  DensityMatrix<Real> rho(dim, time);
  rho.set_sample_count(states.size());
  auto packed = rho.packed();
  const auto count = static_cast<std::int64_t>(dim);
  const Real inv = static_cast<Real>(1.0 / static_cast<double>(states.size()));

  // Rows are independent; within a row every entry accumulates realizations
  // in index order.
#pragma omp parallel for num_threads(workers > 0 ? workers : 1) schedule(dynamic, 8)
  for (std::int64_t i = 0; i < count; ++i) {
    std::complex<Real>* row = packed.data() + DensityMatrix<Real>::packed_index(i, 0);
    for (const auto& psi : states) {
      const std::complex<Real> a = psi[i];
      if (a == std::complex<Real>{}) continue;
      for (std::int64_t j = 0; j <= i; ++j) row[j] += a * std::conj(psi[j]);
    }
    for (std::int64_t j = 0; j <= i; ++j) row[j] *= inv;
  }
  return rho;
}

template <class Real>
DensityMatrix<Real> accumulate_density(std::span<const WaveFunction<Real>> states, int workers) {
  if (states.empty()) throw ConfigError("density accumulation needs at least one state");
  const double t0 = states.front().time;
  std::vector<std::vector<std::complex<Real>>> amps;
  amps.reserve(states.size());
  for (const auto& wf : states) {
    if (wf.time != t0)
      throw ConfigError("cannot average states with different time tags (" + std::to_string(t0) +
                        " vs " + std::to_string(wf.time) + ")");
    amps.push_back(wf.amplitudes);
  }
  return accumulate_density<Real>(std::span<const std::vector<std::complex<Real>>>(amps), t0,
                                  workers);
}

template <class Real>
double min_eigenvalue(const DensityMatrix<Real>& rho, std::uint64_t cap) {
  if (rho.dim() > cap)
    throw CapacityError("dense eigenvalue path limited to " + std::to_string(cap) + " rows");
  Eigen::SelfAdjointEigenSolver<DenseMatrix<double>> solver(rho.to_dense(),
                                                            Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  return solver.eigenvalues()[0];
}

template class DensityMatrix<float>;
template class DensityMatrix<double>;

#define CTQW_INSTANTIATE(Real)                                                                   \
  template DensityMatrix<Real> accumulate_density<Real>(                                         \
      std::span<const std::vector<std::complex<Real>>>, double, int);                            \
  template DensityMatrix<Real> accumulate_density<Real>(std::span<const WaveFunction<Real>>,     \
                                                        int);                                    \
  template double min_eigenvalue<Real>(const DensityMatrix<Real>&, std::uint64_t);

CTQW_INSTANTIATE(float)
CTQW_INSTANTIATE(double)

#undef CTQW_INSTANTIATE

}  // namespace ctqw
