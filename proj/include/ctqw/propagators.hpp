#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ctqw/hamiltonian.hpp"

namespace ctqw {

template <class Real>
struct WaveFunction {
  std::vector<std::complex<Real>> amplitudes;
  double time = 0.0;
};

enum class Backend { eigen, rk4, taylor };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend b);

inline constexpr int kMaxTaylorOrder = 32;

struct StepperConfig {
  Backend backend = Backend::taylor;
  double dt = 0.02;
  int taylor_order = 4;
  double tol_norm = 1e-6;
  double tol_fail = 1e-3;
  bool renormalize = true;

  void validate() const;
};

// Spectral data of one Hermitian matrix; eigenvalues ascending, eigenvectors
// stored column-wise.
template <class Real>
struct EigenDecomposition {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> eigenvalues;
  DenseMatrix<Real> eigenvectors;
};

template <class Real>
EigenDecomposition<Real> diagonalize(const DenseMatrix<Real>& hermitian);

// psi' = sum_j exp(-i e_j dt / hbar) |w_j><w_j|psi>. `out` must not alias `psi`.
template <class Real>
void step_eigen(const EigenDecomposition<Real>& decomp, std::span<const std::complex<Real>> psi,
                std::span<std::complex<Real>> out, double dt, double hbar);

// Classical RK4 on d psi/dt = -(i/hbar) H psi. `k` and `tmp` are scratch of
// the state size; none of the buffers may alias.
template <class Real>
void step_rk4(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology,
              std::span<const std::complex<Real>> psi, std::span<std::complex<Real>> out,
              std::span<std::complex<Real>> k, std::span<std::complex<Real>> tmp, double dt,
              double hbar);

// Truncated Taylor series of exp(-i H dt / hbar) of order `order`, summed term
// by term as Phi(j) = -(i dt / (j hbar)) H Phi(j-1). The input state buffer is
// consumed as one of the two Phi buffers, so besides the double-buffered state
// a single auxiliary vector is needed whatever the order.
template <class Real>
void step_taylor(const ReducedHamiltonian<Real>& h, const TopologyMatrix& topology,
                 std::span<std::complex<Real>> psi_consumed, std::span<std::complex<Real>> out,
                 std::span<std::complex<Real>> aux, double dt, double hbar, int order);

// Value-returning conveniences; they allocate their own scratch.
template <class Real>
std::vector<std::complex<Real>> step_eigen(const EigenDecomposition<Real>& decomp,
                                           std::span<const std::complex<Real>> psi, double dt,
                                           double hbar) {
  std::vector<std::complex<Real>> out(psi.size());
  step_eigen<Real>(decomp, psi, out, dt, hbar);
  return out;
}

template <class Real>
std::vector<std::complex<Real>> step_rk4(const ReducedHamiltonian<Real>& h,
                                         const TopologyMatrix& topology,
                                         std::span<const std::complex<Real>> psi, double dt,
                                         double hbar) {
  std::vector<std::complex<Real>> out(psi.size()), k(psi.size()), tmp(psi.size());
  step_rk4<Real>(h, topology, psi, out, k, tmp, dt, hbar);
  return out;
}

template <class Real>
std::vector<std::complex<Real>> step_taylor(const ReducedHamiltonian<Real>& h,
                                            const TopologyMatrix& topology,
                                            std::span<const std::complex<Real>> psi, double dt,
                                            double hbar, int order) {
  std::vector<std::complex<Real>> phi(psi.begin(), psi.end()), out(psi.size()), aux(psi.size());
  step_taylor<Real>(h, topology, phi, out, aux, dt, hbar, order);
  return out;
}

struct NormCheck {
  double deviation = 0.0;  // | <psi|psi> - 1 |
  bool corrected = false;
};

// Passes psi through when the deviation is within tol_norm, rescales it to
// unit norm (when renormalize is set) up to tol_fail, and throws NormFailure
// beyond that.
template <class Real>
NormCheck check_norm(std::span<std::complex<Real>> psi, double tol_norm, double tol_fail,
                     bool renormalize);

template <class Real>
double squared_norm(std::span<const std::complex<Real>> psi);

}  // namespace ctqw
