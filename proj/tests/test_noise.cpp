#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ctqw/errors.hpp"
#include "ctqw/noise.hpp"

using namespace ctqw;

namespace {

NoiseSpec two_level(double nu, double gamma, NoiseTarget target = NoiseTarget::tunneling) {
  NoiseSpec s;
  s.target = target;
  s.levels = {-nu, nu};
  s.switch_rate = gamma;
  return s;
}

// Largest gap between the empirical CDF of `xs` and the exponential(rate) CDF.
double ks_statistic(std::vector<double> xs, double rate) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = 1.0 - std::exp(-rate * xs[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

}  // namespace

TEST_CASE("zero level set gives a deterministic process") {
  const auto ring = build_lattice(1, {12}, {1}, Boundary::periodic);
  NoiseSpec s;
  s.levels = {0.0};
  s.switch_rate = 2.0;
  s.target = NoiseTarget::both;
  NoiseProcess p(s, ring, 7);
  for (int i = 0; i < 50; ++i) p.advance(0.1 * i, 0.1);
  for (double v : p.link_values()) CHECK(v == 0.0);
  for (double v : p.site_values()) CHECK(v == 0.0);
}

TEST_CASE("static disorder stays frozen") {
  const auto ring = build_lattice(1, {40}, {1}, Boundary::periodic);
  NoiseProcess p(two_level(0.3, 0.0), ring, 11);
  const std::vector<double> before(p.link_values().begin(), p.link_values().end());
  std::set<double> seen(before.begin(), before.end());
  CHECK(seen == std::set<double>{-0.3, 0.3});
  for (int i = 0; i < 100; ++i) {
    const auto r = p.advance(0.5 * i, 0.5);
    CHECK_FALSE(r.changed);
    CHECK(r.switches == 0);
  }
  CHECK(std::equal(before.begin(), before.end(), p.link_values().begin()));
}

TEST_CASE("single level never changes even when switches fire") {
  const auto ring = build_lattice(1, {20}, {1}, Boundary::periodic);
  NoiseSpec s;
  s.levels = {0.25};
  s.switch_rate = 5.0;
  NoiseProcess p(s, ring, 3);
  std::int64_t fired = 0;
  for (int i = 0; i < 40; ++i) {
    const auto r = p.advance(0.1 * i, 0.1);
    fired += r.switches;
    CHECK_FALSE(r.changed);
  }
  CHECK(fired > 0);
}

TEST_CASE("same seed replays identically, different seeds differ") {
  const auto torus = build_lattice(2, {6, 6}, {1, 1}, Boundary::periodic);
  const auto spec = two_level(0.2, 0.7, NoiseTarget::both);
  NoiseProcess a(spec, torus, realization_seed(99, 4));
  NoiseProcess b(spec, torus, realization_seed(99, 4));
  NoiseProcess c(spec, torus, realization_seed(99, 5));
  bool differs = false;
  for (int i = 0; i < 200; ++i) {
    const auto ra = a.advance(0.05 * i, 0.05);
    const auto rb = b.advance(0.05 * i, 0.05);
    c.advance(0.05 * i, 0.05);
    REQUIRE(ra.switches == rb.switches);
    REQUIRE(std::equal(a.link_values().begin(), a.link_values().end(), b.link_values().begin()));
    REQUIRE(std::equal(a.site_values().begin(), a.site_values().end(), b.site_values().begin()));
    REQUIRE(std::equal(a.link_next_switch().begin(), a.link_next_switch().end(),
                       b.link_next_switch().begin()));
    differs = differs || !std::equal(a.link_values().begin(), a.link_values().end(), c.link_values().begin());
  }
  CHECK(differs);
  CHECK(realization_seed(99, 4) == (99u ^ 4u));
}

TEST_CASE("values stay in the level set and next switch stays ahead of time") {
  const auto ring = build_lattice(1, {30}, {2}, Boundary::periodic);
  NoiseSpec s;
  s.levels = {-1.0, 0.5, 2.0};
  s.switch_rate = 3.0;
  s.target = NoiseTarget::both;
  NoiseProcess p(s, ring, 5);
  const std::set<double> levels(s.levels.begin(), s.levels.end());
  for (int i = 0; i < 100; ++i) {
    const double t = 0.03 * i;
    const auto r = p.advance(t, 0.03);
    for (double v : p.link_values()) REQUIRE(levels.count(v) == 1);
    for (double v : p.site_values()) REQUIRE(levels.count(v) == 1);
    for (double n : p.link_next_switch()) REQUIRE(n > t + 0.03);
    for (double n : p.site_next_switch()) REQUIRE(n > t + 0.03);
    REQUIRE(r.changed == (!p.changed_links().empty() || !p.changed_sites().empty()));
  }
}

TEST_CASE("noise target selects links or sites") {
  const auto ring = build_lattice(1, {10}, {1}, Boundary::periodic);
  NoiseProcess links(two_level(1.0, 0.0, NoiseTarget::tunneling), ring, 1);
  for (double v : links.site_values()) CHECK(v == 0.0);
  for (double v : links.link_values()) CHECK(std::abs(v) == 1.0);
  NoiseProcess sites(two_level(1.0, 0.0, NoiseTarget::onsite), ring, 1);
  for (double v : sites.link_values()) CHECK(v == 0.0);
  for (double v : sites.site_values()) CHECK(std::abs(v) == 1.0);
}

TEST_CASE("open boundary links beyond the edge carry no noise") {
  const auto chain = build_lattice(1, {6}, {1}, Boundary::open);
  NoiseProcess p(two_level(1.0, 1.0), chain, 2);
  CHECK(p.link_values()[chain.link_id(5, 0)] == 0.0);
  CHECK(std::isinf(p.link_next_switch()[chain.link_id(5, 0)]));
  CHECK(std::abs(p.link_values()[chain.link_id(4, 0)]) == 1.0);
}

TEST_CASE("noise parameter validation") {
  NoiseSpec s;
  s.levels = {};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.levels = {1.0};
  s.switch_rate = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.switch_rate = std::nan("");
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(parse_noise_target("hopping"), ConfigError);
  const auto ring = build_lattice(1, {5}, {1}, Boundary::periodic);
  NoiseProcess p(two_level(1.0, 1.0), ring, 0);
  CHECK_THROWS_AS(p.advance(0.0, 0.0), ConfigError);
}

TEST_CASE("waiting times are exponential (KS test at alpha = 0.01)") {
  const double gamma = 0.8;
  const auto ring = build_lattice(1, {10000}, {1}, Boundary::periodic);
  NoiseProcess p(two_level(1.0, gamma), ring, 2024);
  // Initial waits are fresh exponential draws.
  std::vector<double> waits(p.link_next_switch().begin(), p.link_next_switch().end());
  REQUIRE(waits.size() == 10000);
  CHECK(ks_statistic(waits, gamma) < 1.628 / std::sqrt(10000.0));

  // Intervals between consecutive switches of the first element of each link.
  std::vector<double> intervals;
  const double dt = 0.01;
  std::vector<double> last(p.link_next_switch().begin(), p.link_next_switch().end());
  for (int step = 0; intervals.size() < 10000; ++step) {
    p.advance(step * dt, dt);
    const auto next = p.link_next_switch();
    for (std::size_t e = 0; e < next.size() && intervals.size() < 10000; ++e) {
      if (next[e] != last[e]) {
        intervals.push_back(next[e] - last[e]);
        last[e] = next[e];
      }
    }
  }
  // A step may hide several switches of one element; that happens with
  // probability ~ (gamma dt)^2 and is invisible at this sample size.
  CHECK(ks_statistic(intervals, gamma) < 1.628 / std::sqrt(10000.0));
}

TEST_CASE("two-level occupation is balanced in stationarity") {
  const auto ring = build_lattice(1, {1000}, {1}, Boundary::periodic);
  NoiseProcess p(two_level(1.0, 1.0), ring, 77);
  std::int64_t up = 0, total = 0;
  for (int i = 0; i < 100; ++i) {
    p.advance(5.0 * i, 5.0);
    for (double v : p.link_values()) {
      up += v > 0;
      ++total;
    }
  }
  REQUIRE(total == 100000);
  CHECK(std::abs(static_cast<double>(up) / total - 0.5) < 0.02);
}

TEST_CASE("mean switch count per element is gamma T") {
  const double gamma = 0.4, horizon = 25.0, dt = 0.05;
  const auto ring = build_lattice(1, {10000}, {1}, Boundary::periodic);
  NoiseProcess p(two_level(1.0, gamma), ring, 31337);
  std::int64_t switches = 0;
  const int steps = static_cast<int>(std::lround(horizon / dt));
  for (int i = 0; i < steps; ++i) switches += p.advance(i * dt, dt).switches;
  const double mean = static_cast<double>(switches) / 10000.0;
  CHECK(mean == doctest::Approx(gamma * horizon).epsilon(0.05));
}
