#include <doctest.h>

#include <algorithm>
#include <set>

#include "ctqw/errors.hpp"
#include "ctqw/lattice.hpp"
#include "oracle.hpp"

using namespace ctqw;

namespace {

std::set<JointIndex> row_set(const TopologyMatrix& t, std::uint64_t alpha) {
  std::set<JointIndex> s;
  for (auto b : t.row(alpha))
    if (b != kNoNeighbor) s.insert(b);
  return s;
}

}  // namespace

TEST_CASE("ring and torus geometry") {
  const auto ring = build_lattice(1, {5}, {1}, Boundary::periodic);
  CHECK(ring.sites() == 5);
  CHECK(ring.neighbor_count() == 2);

  const auto torus = build_lattice(2, {4, 4}, {1, 1}, Boundary::periodic);
  CHECK(torus.sites() == 16);
  CHECK(torus.neighbor_count() == 4);

  const JointSpace pair(build_lattice(1, {31}, {1}, Boundary::periodic), 2);
  CHECK(pair.k_total() == 2);
  CHECK(pair.dim() == 961);
}

TEST_CASE("lattice validation names the offending direction") {
  CHECK_THROWS_AS(build_lattice(2, {5}, {1, 1}, Boundary::periodic), ConfigError);
  try {
    build_lattice(2, {8, 4}, {1, 2}, Boundary::periodic);
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("direction 1") != std::string::npos);
  }
  CHECK_THROWS_AS(build_lattice(1, {5}, {0}, Boundary::periodic), ConfigError);
  CHECK_THROWS_AS(parse_boundary("twisted"), ConfigError);
}

TEST_CASE("joint index is mixed radix over particle positions") {
  const JointSpace two(build_lattice(1, {5}, {1}, Boundary::periodic), 2);
  const std::vector<SiteIndex> pos{2, 3};
  CHECK(joint_index(pos, two) == 13);
  CHECK(joint_positions(13, two) == pos);

  const JointSpace one(build_lattice(1, {5}, {1}, Boundary::periodic), 1);
  for (SiteIndex x = 0; x < 5; ++x) CHECK(joint_index(std::vector<SiteIndex>{x}, one) == x);

  CHECK_THROWS_AS(joint_index(std::vector<SiteIndex>{5, 0}, two), IndexError);
  CHECK_THROWS_AS(joint_index(std::vector<SiteIndex>{-1, 0}, two), IndexError);
  CHECK_THROWS_AS(joint_index(std::vector<SiteIndex>{1}, two), IndexError);
  CHECK_THROWS_AS(joint_positions(25, two), IndexError);
}

TEST_CASE("joint index round trip over the whole space") {
  const JointSpace s(build_lattice(2, {3, 4}, {1, 1}, Boundary::open), 3);
  for (JointIndex a = 0; a < s.dim(); ++a) REQUIRE(joint_index(joint_positions(a, s), s) == a);
}

TEST_CASE("topology rows follow the one-particle-moves rule") {
  const JointSpace one(build_lattice(1, {5}, {1}, Boundary::periodic), 1);
  const auto t1 = build_topology(one);
  CHECK(t1.at(0, 0) == 0);
  CHECK(row_set(t1, 0) == std::set<JointIndex>{0, 4, 1});

  const JointSpace two(build_lattice(1, {5}, {1}, Boundary::periodic), 2);
  const auto t2 = build_topology(two);
  const auto a = joint_index(std::vector<SiteIndex>{2, 3}, two);
  std::set<JointIndex> expected{a};
  for (auto p : {std::vector<SiteIndex>{1, 3}, {3, 3}, {2, 2}, {2, 4}})
    expected.insert(joint_index(p, two));
  CHECK(row_set(t2, a) == expected);
  CHECK(t2.valid_count(a) == 4);

  const JointSpace ten(build_lattice(1, {10}, {1}, Boundary::periodic), 2);
  CHECK(ten.filling_factor() == doctest::Approx(0.05));
}

TEST_CASE("periodic 1-D single particle rows have 2k+1 entries") {
  for (int k : {1, 2, 3}) {
    const JointSpace s(build_lattice(1, {9}, {k}, Boundary::periodic), 1);
    const auto t = build_topology(s);
    for (std::uint64_t a = 0; a < s.dim(); ++a) REQUIRE(row_set(t, a).size() == std::size_t(2 * k + 1));
  }
}

TEST_CASE("topology is symmetric and matches the dense oracle pattern") {
  struct Case {
    std::vector<int> dims, k;
    Boundary b;
    int m;
  };
  for (const auto& c : {Case{{7}, {2}, Boundary::periodic, 2}, Case{{5}, {1}, Boundary::open, 3},
                        Case{{4, 3}, {1, 1}, Boundary::open, 2}, Case{{5, 6}, {2, 1}, Boundary::periodic, 2}}) {
    const JointSpace s(LatticeTopology(c.dims, c.k, c.b), c.m);
    const auto t = build_topology(s);
    REQUIRE(s.dim() <= 10000);

    // Forward slot f and backward slot F+f must be mutual.
    const int f_slots = t.forward_slots();
    for (std::uint64_t a = 0; a < s.dim(); ++a)
      for (int f = 1; f <= f_slots; ++f) {
        const auto b = t.at(a, f);
        if (b == kNoNeighbor) continue;
        REQUIRE(t.at(b, f_slots + f) == a);
      }

    oracle::Lattice lat{c.dims, c.k, c.b == Boundary::periodic};
    CouplingModel unit;
    const auto h = oracle::hamiltonian(lat, c.m, unit, {}, {});
    for (std::uint64_t a = 0; a < s.dim(); ++a) {
      std::set<JointIndex> expected{static_cast<JointIndex>(a)};
      for (Eigen::Index b = 0; b < h.cols(); ++b)
        if (h(static_cast<Eigen::Index>(a), b) != 0.0) expected.insert(static_cast<JointIndex>(b));
      const auto got = row_set(t, a);
      REQUIRE(got == expected);
      for (auto b : got) REQUIRE(row_set(t, b).count(static_cast<JointIndex>(a)) == 1);
      REQUIRE(t.valid_count(a) + 1 == got.size());
    }
  }
}

TEST_CASE("joint space larger than the index type is a capacity error") {
  CHECK_THROWS_AS(JointSpace(build_lattice(1, {70000}, {1}, Boundary::periodic), 2), CapacityError);
}
