#include <doctest.h>

#include <random>

#include "ctqw/density.hpp"
#include "ctqw/errors.hpp"
#include "ctqw/observables.hpp"
#include "oracle.hpp"

using namespace ctqw;
using oracle::C;

namespace {

std::vector<C> basis(std::size_t n, std::size_t k) {
  std::vector<C> v(n, 0.0);
  v[k] = 1.0;
  return v;
}

DensityMatrix<double> mix(const std::vector<std::vector<C>>& states) {
  return accumulate_density<double>(std::span<const std::vector<C>>(states), 0.0, 1);
}

}  // namespace

TEST_CASE("packed lower-triangle indexing") {
  CHECK(DensityMatrix<double>::packed_size(4) == 10);
  CHECK(DensityMatrix<double>::packed_index(0, 0) == 0);
  CHECK(DensityMatrix<double>::packed_index(2, 1) == 4);
  CHECK(DensityMatrix<double>::packed_index(3, 3) == 9);
  DensityMatrix<double> rho(3);
  rho.lower(2, 0) = C(0.1, 0.2);
  CHECK(rho(2, 0) == C(0.1, 0.2));
  CHECK(rho(0, 2) == C(0.1, -0.2));
}

TEST_CASE("single pure state gives purity one") {
  std::mt19937_64 rng(1);
  const auto rho = mix({oracle::to_std(oracle::random_state(12, rng))});
  CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.sample_count() == 1);
}

TEST_CASE("two orthogonal states give an equal mixture") {
  const auto rho = mix({basis(4, 1), basis(4, 3)});
  CHECK(purity(rho) == doctest::Approx(0.5));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.to_dense());
  CHECK(es.eigenvalues()[2] == doctest::Approx(0.5));
  CHECK(es.eigenvalues()[3] == doctest::Approx(0.5));
  CHECK(std::abs(es.eigenvalues()[0]) < 1e-15);
}

TEST_CASE("accumulation matches a naive outer-product sum") {
  std::mt19937_64 rng(2);
  std::vector<std::vector<C>> states;
  Eigen::MatrixXcd naive = Eigen::MatrixXcd::Zero(8, 8);
  for (int r = 0; r < 50; ++r) {
    const auto v = oracle::random_state(8, rng);
    naive += v * v.adjoint();
    states.push_back(oracle::to_std(v));
  }
  naive /= 50.0;
  const auto rho = mix(states);
  CHECK((rho.to_dense() - naive).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(min_eigenvalue(rho) >= -1e-12);
  CHECK(purity(rho) == doctest::Approx((naive * naive).trace().real()).epsilon(1e-12));
}

TEST_CASE("accumulation is bit-identical for any worker count") {
  std::mt19937_64 rng(3);
  std::vector<std::vector<std::complex<float>>> states;
  for (int r = 0; r < 30; ++r) {
    const auto v = oracle::random_state(97, rng);
    states.emplace_back(v.data(), v.data() + v.size());
  }
  const std::span<const std::vector<std::complex<float>>> view(states);
  const auto one = accumulate_density<float>(view, 1.0, 1);
  for (int w : {2, 3, 8}) CHECK(accumulate_density<float>(view, 1.0, w) == one);
}

TEST_CASE("accumulation errors") {
  std::vector<WaveFunction<double>> wfs(2);
  wfs[0] = {basis(3, 0), 0.5};
  wfs[1] = {basis(3, 1), 0.75};
  CHECK_THROWS_AS(accumulate_density<double>(std::span<const WaveFunction<double>>(wfs)), ConfigError);
  wfs[1].time = 0.5;
  const auto rho = accumulate_density<double>(std::span<const WaveFunction<double>>(wfs));
  CHECK(rho.time() == 0.5);
  CHECK_THROWS_AS(mix({basis(3, 0), basis(4, 0)}), ConfigError);
  CHECK_THROWS_AS(mix({}), ConfigError);
  CHECK_THROWS_AS(min_eigenvalue(DensityMatrix<double>(300)), CapacityError);
}

TEST_CASE("purity limits") {
  // Maximally mixed on d states.
  std::vector<std::vector<C>> all;
  for (int k = 0; k < 6; ++k) all.push_back(basis(6, k));
  CHECK(purity(mix(all)) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("trace distance examples and metric properties") {
  std::mt19937_64 rng(4);
  const auto a = mix({basis(2, 0)});
  CHECK(trace_distance(a, a) == doctest::Approx(0.0).scale(1.0));
  CHECK(trace_distance(a, mix({basis(2, 1)})) == doctest::Approx(1.0));
  CHECK(trace_distance(a, mix({basis(2, 0), basis(2, 1)})) == doctest::Approx(0.5));

  for (int trial = 0; trial < 20; ++trial) {
    auto random_rho = [&] {
      std::vector<std::vector<C>> s;
      for (int r = 0; r < 3; ++r) s.push_back(oracle::to_std(oracle::random_state(16, rng)));
      return mix(s);
    };
    const auto x = random_rho(), y = random_rho(), z = random_rho();
    const double xy = trace_distance(x, y), yx = trace_distance(y, x);
    CHECK(xy == doctest::Approx(yx).epsilon(1e-12));
    CHECK(xy <= trace_distance(x, z) + trace_distance(z, y) + 1e-12);
    CHECK(xy >= 0.0);
    CHECK(xy <= 1.0 + 1e-12);
  }
}

TEST_CASE("cast keeps metadata") {
  auto rho = mix({basis(3, 2)});
  rho.set_time(2.5);
  const auto f = rho.cast<float>();
  CHECK(f.time() == 2.5);
  CHECK(f.sample_count() == 1);
  CHECK(f(2, 2) == std::complex<float>(1.0f));
}
