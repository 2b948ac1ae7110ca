#include "ctqw/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctqw/errors.hpp"

namespace ctqw {

Backend parse_backend(std::string_view name) {
  if (name == "eigen") return Backend::eigen;
  if (name == "rk4") return Backend::rk4;
  if (name == "taylor") return Backend::taylor;
  throw ConfigError("backend must be one of eigen, rk4, taylor; got \"" + std::string(name) + "\"");
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::eigen: return "eigen";
    case Backend::rk4: return "rk4";
    case Backend::taylor: return "taylor";
  }
  return "taylor";
}

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be finite and > 0");
  if (taylor_order < 1 || taylor_order > kMaxTaylorOrder)
    throw ConfigError("taylor_order must lie in [1, " + std::to_string(kMaxTaylorOrder) + "]");
  if (!(tol_norm >= 0.0) || !(tol_norm < tol_fail))
    throw ConfigError("norm tolerances need 0 <= tol_norm < tol_fail");
}

template <class Real>
EigenDecomposition<Real> diagonalize(const DenseMatrix<Real>& a) {
  if (a.rows() != a.cols()) throw NumericError("diagonalize needs a square matrix");
  const double scale = std::max(1.0, static_cast<double>(a.cwiseAbs().maxCoeff()));
  const double asym = static_cast<double>((a - a.adjoint()).cwiseAbs().maxCoeff());
  const double tol = std::is_same_v<Real, float> ? 1e-5 : 1e-12;
  if (asym > tol * scale)
    throw NumericError("matrix is not Hermitian (max |A - A^H| = " + std::to_string(asym) + ")");

  Eigen::SelfAdjointEigenSolver<DenseMatrix<Real>> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <class Real>
void step_eigen(const EigenDecomposition<Real>& decomp, std::span<const std::complex<Real>> psi,
                std::span<std::complex<Real>> out, double dt, double hbar) {
  using C = std::complex<Real>;
  using Vec = Eigen::Matrix<C, Eigen::Dynamic, 1>;
  const auto n = static_cast<Eigen::Index>(psi.size());
  Eigen::Map<const Vec> in(psi.data(), n);
  Vec coeff = decomp.eigenvectors.adjoint() * in;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double phase = -static_cast<double>(decomp.eigenvalues[j]) * dt / hbar;
    coeff[j] *= C(static_cast<Real>(std::cos(phase)), static_cast<Real>(std::sin(phase)));
  }
  Eigen::Map<Vec>(out.data(), n).noalias() = decomp.eigenvectors * coeff;
}

namespace {

// dst = -(i/hbar) H src
template <class Real>
void derivative(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology,
                std::span<const std::complex<Real>> src, std::span<std::complex<Real>> dst,
                double hbar) {
  apply<Real>(h, topology, src, dst);
  const std::complex<Real> factor(Real{0}, static_cast<Real>(-1.0 / hbar));
  for (auto& v : dst) v *= factor;
}

}  // namespace

template <class Real>
void step_rk4(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology,
              std::span<const std::complex<Real>> psi, std::span<std::complex<Real>> out,
              std::span<std::complex<Real>> k, std::span<std::complex<Real>> tmp, double dt,
              double hbar) {
  const std::size_t n = psi.size();
  const Real sixth = static_cast<Real>(dt / 6.0);
  const Real third = static_cast<Real>(dt / 3.0);
  const Real half = static_cast<Real>(dt / 2.0);
  const Real full = static_cast<Real>(dt);

  std::copy(psi.begin(), psi.end(), out.begin());

  derivative<Real>(h, topology, psi, k, hbar);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += sixth * k[i];
    tmp[i] = psi[i] + half * k[i];
  }
  derivative<Real>(h, topology, tmp, k, hbar);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += third * k[i];
    tmp[i] = psi[i] + half * k[i];
  }
  derivative<Real>(h, topology, tmp, k, hbar);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += third * k[i];
    tmp[i] = psi[i] + full * k[i];
  }
  derivative<Real>(h, topology, tmp, k, hbar);
  for (std::size_t i = 0; i < n; ++i) out[i] += sixth * k[i];
}

template <class Real>
void step_taylor(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology,
                 std::span<std::complex<Real>> psi_consumed, std::span<std::complex<Real>> out,
                 std::span<std::complex<Real>> aux, double dt, double hbar, int order) {
  std::copy(psi_consumed.begin(), psi_consumed.end(), out.begin());
  std::span<std::complex<Real>> phi = psi_consumed;
  std::span<std::complex<Real>> next = aux;
  for (int j = 1; j <= order; ++j) {
    apply<Real>(h, topology, phi, next);
    const std::complex<Real> factor(Real{0}, static_cast<Real>(-dt / (hbar * j)));
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] *= factor;
      out[i] += next[i];
    }
    std::swap(phi, next);
  }
}

template <class Real>
double squared_norm(std::span<const std::complex<Real>> psi) {
  double s = 0.0;
  for (const auto& v : psi) s += static_cast<double>(std::norm(v));
  return s;
}

template <class Real>
NormCheck check_norm(std::span<std::complex<Real>> psi, double tol_norm, double tol_fail,
                     bool renormalize) {
  const double norm2 = squared_norm<Real>(psi);
  NormCheck result{std::abs(norm2 - 1.0), false};
  if (!(result.deviation <= tol_fail)) throw NormFailure(result.deviation, -1, -1);
  if (result.deviation > tol_norm && renormalize) {
    const auto scale = static_cast<Real>(1.0 / std::sqrt(norm2));
    for (auto& v : psi) v *= scale;
    result.corrected = true;
  }
  return result;
}

#define CTQW_INSTANTIATE(Real)                                                                   \
  template EigenDecomposition<Real> diagonalize<Real>(const DenseMatrix<Real>&);                  \
  template void step_eigen<Real>(const EigenDecomposition<Real>&,                                 \
                                 std::span<const std::complex<Real>>,                             \
                                 std::span<std::complex<Real>>, double, double);                  \
  template void step_rk4<Real>(const ReducedHamiltonian<Real>&, const TopologyMatrix&,            \
                               std::span<const std::complex<Real>>,                               \
                               std::span<std::complex<Real>>, std::span<std::complex<Real>>,      \
                               std::span<std::complex<Real>>, double, double);                    \
  template void step_taylor<Real>(const ReducedHamiltonian<Real>&, const TopologyMatrix&,         \
                                  std::span<std::complex<Real>>, std::span<std::complex<Real>>,   \
                                  std::span<std::complex<Real>>, double, double, int);            \
  template double squared_norm<Real>(std::span<const std::complex<Real>>);                        \
  template NormCheck check_norm<Real>(std::span<std::complex<Real>>, double, double, bool);

CTQW_INSTANTIATE(float)
CTQW_INSTANTIATE(double)

#undef CTQW_INSTANTIATE

}  // namespace ctqw
