#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <set>
#include <string>

#include "ctqw/app.hpp"
#include "ctqw/errors.hpp"

namespace ctqw {

namespace {

using C = std::complex<double>;

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string on success
};

std::vector<C> random_state(std::uint64_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<C> v(d);
  double n2 = 0.0;
  for (auto& x : v) {
    x = {g(rng), g(rng)};
    n2 += std::norm(x);
  }
  for (auto& x : v) x /= std::sqrt(n2);
  return v;
}

NoiseSpec rtn(double nu, double rate, NoiseTarget target = NoiseTarget::both) {
  NoiseSpec s;
  s.target = target;
  s.levels = {-nu, nu};
  s.switch_rate = rate;
  return s;
}

std::string check_topology() {
  for (const auto& space :
       {JointSpace(LatticeTopology({5}, {1}, Boundary::periodic), 2),
        JointSpace(LatticeTopology({4, 3}, {1, 1}, Boundary::open), 2),
        JointSpace(LatticeTopology({7}, {2}, Boundary::periodic), 1)}) {
    const auto topo = build_topology(space);
    std::vector<std::set<JointIndex>> rows(topo.rows());
    for (std::uint64_t a = 0; a < topo.rows(); ++a)
      for (int s = 1; s < topo.cols_per_row(); ++s)
        if (topo.at(a, s) != kNoNeighbor) rows[a].insert(topo.at(a, s));
    for (std::uint64_t a = 0; a < topo.rows(); ++a)
      for (JointIndex b : rows[a])
        if (!rows[b].count(static_cast<JointIndex>(a))) return "asymmetric topology row";
    for (std::uint64_t a = 0; a < space.dim(); ++a)
      if (joint_index(joint_positions(static_cast<JointIndex>(a), space), space) != a)
        return "joint index round trip failed";
  }
  return {};
}

std::string check_hamiltonian() {
  const JointSpace space(LatticeTopology({5}, {1}, Boundary::periodic), 2);
  const auto topo = build_topology(space);
  CouplingModel model;
  model.onsite_energy = 0.3;
  model.interaction = 0.7;
  const NoiseProcess noise(rtn(0.4, 1.0), space.lattice(), 7);
  const auto h = assemble<double>(space, topo, model, noise);
  const auto dense = densify(h, topo);
  if ((dense - dense.adjoint()).cwiseAbs().maxCoeff() != 0.0) return "densified H not Hermitian";
  std::mt19937_64 rng(1);
  const auto psi = random_state(space.dim(), rng);
  const auto hpsi = apply<double>(h, topo, psi);
  const Eigen::VectorXcd ref = dense * Eigen::Map<const Eigen::VectorXcd>(psi.data(), psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (std::abs(hpsi[i] - ref[static_cast<Eigen::Index>(i)]) > 1e-12) return "apply != dense product";
  return {};
}

std::string check_propagators() {
  const JointSpace space(LatticeTopology({8}, {1}, Boundary::periodic), 1);
  const auto topo = build_topology(space);
  const NoiseProcess noise(rtn(0.3, 0.2), space.lattice(), 3);
  const auto h = assemble<double>(space, topo, CouplingModel{}, noise);
  std::mt19937_64 rng(2);
  const auto psi = random_state(space.dim(), rng);
  const double dt = 0.1 / gershgorin_bound(h, topo);
  const auto a = step_taylor<double>(h, topo, psi, dt, 1.0, 4);
  const auto b = step_rk4<double>(h, topo, psi, dt, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-12) return "Taylor(4) and RK4 disagree";
  const auto decomp = diagonalize(densify(h, topo));
  const auto e = step_eigen<double>(decomp, psi, dt, 1.0);
  if (std::abs(squared_norm<double>(e) - 1.0) > 1e-10) return "spectral step not unitary";
  return {};
}

std::string check_ensemble() {
  RunConfig c;
  c.space = JointSpace(LatticeTopology({6}, {1}, Boundary::periodic), 2);
  c.noise = rtn(0.5, 0.5, NoiseTarget::tunneling);
  c.stepper.dt = 0.02;
  c.realizations = 8;
  c.steps = 20;
  c.post_rate = 5;
  c.precision = Precision::double_;
  c.workers = 1;
  std::string failure;
  OutputSinks sinks;
  sinks.snapshot = [&](const SnapshotEvent& ev) {
    const auto* rho = std::get<const DensityMatrix<double>*>(ev.density);
    if (std::abs(rho->trace() - 1.0) > 1e-6) failure = "trace off";
    if (min_eigenvalue(*rho) < -1e-8) failure = "density not PSD";
    const double p = purity(*rho);
    if (p > 1.0 + 1e-8 || p < 1.0 / static_cast<double>(rho->dim())) failure = "purity out of range";
  };
  run(c, sinks);
  return failure;
}

}  // namespace

bool validate_invariants(std::ostream& out) {
  const std::vector<Check> checks = {
      {"topology symmetry and joint indexing", check_topology},
      {"hamiltonian hermiticity and sparse apply", check_hamiltonian},
      {"taylor/rk4 coincidence and spectral unitarity", check_propagators},
      {"density matrix trace, positivity and purity", check_ensemble},
  };
  bool ok = true;
  for (const auto& check : checks) {
    std::string failure;
    try {
      failure = check.run();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    if (failure.empty()) {
      out << "PASS " << check.name << "\n";
    } else {
      ok = false;
      out << "FAIL " << check.name << ": " << failure << "\n";
    }
  }
  return ok;
}

}  // namespace ctqw
