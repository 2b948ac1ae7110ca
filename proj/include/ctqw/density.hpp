#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "ctqw/hamiltonian.hpp"
#include "ctqw/propagators.hpp"

namespace ctqw {

// Ensemble-averaged density matrix, lower triangle packed row-major:
// entry (i, j) with i >= j lives at i(i+1)/2 + j.
template <class Real>
class DensityMatrix {
 public:
  using value_type = std::complex<Real>;

  DensityMatrix() = default;
  explicit DensityMatrix(std::uint64_t dim, double time = 0.0)
      : dim_(dim), time_(time), packed_(packed_size(dim)) {}

  static constexpr std::uint64_t packed_size(std::uint64_t dim) { return dim * (dim + 1) / 2; }
  static constexpr std::uint64_t packed_index(std::uint64_t i, std::uint64_t j) {
    return i * (i + 1) / 2 + j;
  }

  std::uint64_t dim() const noexcept { return dim_; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }
  std::uint64_t sample_count() const noexcept { return samples_; }
  void set_sample_count(std::uint64_t n) noexcept { samples_ = n; }

  // Full-matrix view: the upper triangle is the conjugate of the stored lower one.
  value_type operator()(std::uint64_t i, std::uint64_t j) const noexcept {
    return i >= j ? packed_[packed_index(i, j)] : std::conj(packed_[packed_index(j, i)]);
  }
  value_type& lower(std::uint64_t i, std::uint64_t j) noexcept {
    return packed_[packed_index(i, j)];
  }

  std::span<value_type> packed() noexcept { return packed_; }
  std::span<const value_type> packed() const noexcept { return packed_; }

  double trace() const noexcept {
    double t = 0.0;
    for (std::uint64_t i = 0; i < dim_; ++i) t += static_cast<double>(packed_[packed_index(i, i)].real());
    return t;
  }

  DenseMatrix<double> to_dense() const;

  template <class Other>
  DensityMatrix<Other> cast() const {
    DensityMatrix<Other> out(dim_, time_);
    out.set_sample_count(samples_);
    auto dst = out.packed();
    for (std::size_t k = 0; k < packed_.size(); ++k)
      dst[k] = {static_cast<Other>(packed_[k].real()), static_cast<Other>(packed_[k].imag())};
    return out;
  }

  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  std::uint64_t dim_ = 0;
  double time_ = 0.0;
  std::uint64_t samples_ = 0;
  std::vector<value_type> packed_;
};

// Average of |psi_r><psi_r| over the given states. Each entry is summed in
// realization order, so the result is bit-identical for any `workers`.
template <class Real>
DensityMatrix<Real> accumulate_density(std::span<const std::vector<std::complex<Real>>> states,
                                       double time, int workers = 1);

// Checks that all wave functions share a time tag before averaging.
template <class Real>
DensityMatrix<Real> accumulate_density(std::span<const WaveFunction<Real>> states,
                                       int workers = 1);

// Smallest eigenvalue of the full Hermitian matrix (dense path).
template <class Real>
double min_eigenvalue(const DensityMatrix<Real>& rho, std::uint64_t cap = 256);

}  // namespace ctqw
