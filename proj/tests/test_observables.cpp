#include <doctest.h>

#include <random>

#include "ctqw/density.hpp"
#include "ctqw/errors.hpp"
#include "ctqw/observables.hpp"
#include "oracle.hpp"

using namespace ctqw;
using oracle::C;

namespace {

DensityMatrix<double> pure(const std::vector<C>& psi) {
  const std::vector<std::vector<C>> one{psi};
  return accumulate_density<double>(std::span<const std::vector<C>>(one), 0.0, 1);
}

std::vector<C> at(const JointSpace& s, std::vector<SiteIndex> pos) {
  std::vector<C> v(s.dim(), 0.0);
  v[joint_index(pos, s)] = 1.0;
  return v;
}

}  // namespace

TEST_CASE("populations of basis and mixed states") {
  const JointSpace one(build_lattice(1, {5}, {1}, Boundary::periodic), 1);
  const auto p = populations(pure(at(one, {3})), one);
  CHECK(p == std::vector<double>{0, 0, 0, 1, 0});

  const JointSpace two(build_lattice(1, {5}, {1}, Boundary::periodic), 2);
  const auto p2 = populations(pure(at(two, {1, 1})), two);
  CHECK(p2[1] == 2.0);

  std::vector<std::vector<C>> all;
  for (SiteIndex x = 0; x < 5; ++x) all.push_back(at(one, {x}));
  const auto mixed = accumulate_density<double>(std::span<const std::vector<C>>(all), 0.0, 1);
  for (double v : populations(mixed, one)) CHECK(v == doctest::Approx(0.2));
  CHECK(participation_ratio(mixed) == doctest::Approx(5.0));
}

TEST_CASE("populations sum to the particle number") {
  std::mt19937_64 rng(6);
  const JointSpace s(build_lattice(2, {3, 3}, {1, 1}, Boundary::periodic), 2);
  const auto rho = pure(oracle::to_std(oracle::random_state(s.dim(), rng)));
  double sum = 0.0;
  for (double v : populations(rho, s)) sum += v;
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("localized state has zero spread") {
  const JointSpace s(build_lattice(1, {21}, {1}, Boundary::periodic), 2);
  const auto sp = position_variance(pure(at(s, {10, 11})), s, {10, 11});
  CHECK(sp.variance[0] == 0.0);
  CHECK(sp.mean[0] == 0.0);
  CHECK_FALSE(sp.wrapped);
}

TEST_CASE("displacement is measured on the covering line") {
  const JointSpace s(build_lattice(1, {11}, {1}, Boundary::periodic), 1);
  // Site 1 seen from 9 is three steps forward across the seam (9, 10, 0, 1).
  const auto sp = position_variance(pure(at(s, {1})), s, {9});
  CHECK(sp.mean[0] == 3.0);
  CHECK(sp.variance[0] == 9.0);
  // Near the antipode the wrap flag is raised.
  const auto far = position_variance(pure(at(s, {4})), s, {9});
  CHECK(far.wrapped);
}

TEST_CASE("noiseless ring spreads as 2 c^2 t^2") {
  const int n = 101;
  const double c = 0.8, hbar = 1.0;
  const JointSpace s(build_lattice(1, {n}, {1}, Boundary::periodic), 1);
  oracle::Lattice lat{{n}, {1}, true};
  CouplingModel model;
  model.tunneling = c;
  const auto h = oracle::hamiltonian(lat, 1, model, {}, {});
  for (double t : {1.0, 3.0, 8.0}) {
    const auto psi = oracle::propagator(h, t, hbar) * oracle::to_eigen(at(s, {50}));
    const auto sp = position_variance(pure(oracle::to_std(psi)), s, {50});
    CHECK_FALSE(sp.wrapped);
    CHECK(sp.variance[0] == doctest::Approx(2 * c * c * t * t).epsilon(1e-8));
    CHECK(std::abs(sp.mean[0]) < 1e-10);
  }
}

TEST_CASE("compute_observables emits named rows for the selection") {
  const JointSpace s(build_lattice(1, {6}, {1}, Boundary::periodic), 2);
  auto rho = pure(at(s, {2, 3}));
  rho.set_time(1.25);
  const auto rows = compute_observables(rho, s,
                                        {Observable::populations, Observable::joint_distribution,
                                         Observable::position_mean_variance, Observable::purity,
                                         Observable::participation_ratio},
                                        {2, 3});
  std::size_t pops = 0, joint = 0;
  for (const auto& r : rows) {
    CHECK(r.time == 1.25);
    pops += r.name == "population";
    joint += r.name == "joint_probability";
    if (r.name == "purity") CHECK(r.value == doctest::Approx(1.0));
    if (r.name == "participation_ratio") CHECK(r.value == doctest::Approx(1.0));
  }
  CHECK(pops == 6);
  CHECK(joint == 36);
  CHECK(rows.size() == 6 + 36 + 1 + 1 + 1 + 1 + 1);

  CHECK_THROWS_AS(parse_observable("entropy"), ConfigError);
  CHECK(default_observables().size() == 4);
}

TEST_CASE("dimension and reference checks") {
  const JointSpace s(build_lattice(1, {4}, {1}, Boundary::periodic), 1);
  const JointSpace t(build_lattice(1, {5}, {1}, Boundary::periodic), 1);
  const auto rho = pure(at(s, {1}));
  CHECK_THROWS_AS(populations(rho, t), ConfigError);
  CHECK_THROWS_AS(position_variance(rho, s, {1, 2}), ConfigError);
  CHECK_THROWS_AS(trace_distance(rho, pure(at(t, {1}))), ConfigError);
}
