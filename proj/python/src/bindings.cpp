#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ctqw/app.hpp"
#include "ctqw/config.hpp"
#include "ctqw/ensemble.hpp"
#include "ctqw/errors.hpp"
#include "ctqw/snapshot.hpp"

namespace py = pybind11;
using namespace ctqw;

namespace {

using C = std::complex<double>;
using CArray = py::array_t<C, py::array::c_style | py::array::forcecast>;

std::vector<C> to_vector(const CArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D complex array");
  return {a.data(), a.data() + a.size()};
}

CArray to_array(const std::vector<C>& v) {
  CArray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// One realization's Hamiltonian in double precision, bundled with the shared
// topology it is aligned to.
class Hamiltonian {
 public:
  Hamiltonian(JointSpace space, CouplingModel model, NoiseSpec noise, std::uint64_t seed)
      : space_(std::move(space)),
        model_(std::move(model)),
        topology_(build_topology(space_)),
        noise_(noise, space_.lattice(), seed),
        h_(assemble<double>(space_, topology_, model_, noise_)) {}

  CArray apply_to(const CArray& psi) const { return to_array(apply<double>(h_, topology_, check(psi))); }
  DenseMatrix<double> dense(std::uint64_t cap) const { return densify(h_, topology_, cap); }
  double bound() const { return gershgorin_bound(h_, topology_); }

  CArray taylor(const CArray& psi, double dt, int order) const {
    return to_array(step_taylor<double>(h_, topology_, check(psi), dt, model_.hbar, order));
  }
  CArray rk4(const CArray& psi, double dt) const {
    return to_array(step_rk4<double>(h_, topology_, check(psi), dt, model_.hbar));
  }
  CArray eigen(const CArray& psi, double dt) const {
    const auto decomp = diagonalize(densify(h_, topology_));
    return to_array(step_eigen<double>(decomp, check(psi), dt, model_.hbar));
  }

  // Advances the noise by one step and refreshes the affected entries.
  py::dict advance(double t, double dt) {
    const auto res = noise_.advance(t, dt);
    std::uint64_t rewritten = 0;
    if (res.changed) rewritten = update<double>(h_, space_, topology_, model_, noise_);
    py::dict d;
    d["changed"] = res.changed;
    d["switches"] = res.switches;
    d["entries_rewritten"] = rewritten;
    return d;
  }

  const TopologyMatrix& topology() const { return topology_; }
  const JointSpace& space() const { return space_; }

 private:
  std::vector<C> check(const CArray& psi) const {
    auto v = to_vector(psi);
    if (v.size() != space_.dim())
      throw py::value_error("state has " + std::to_string(v.size()) + " amplitudes, expected " +
                            std::to_string(space_.dim()));
    return v;
  }

  JointSpace space_;
  CouplingModel model_;
  TopologyMatrix topology_;
  NoiseProcess noise_;
  ReducedHamiltonian<double> h_;
};

DensityMatrix<double> density_from_states(const py::array_t<C, py::array::c_style | py::array::forcecast>& states) {
  if (states.ndim() != 2) throw py::value_error("expected an (R, dim) complex array");
  const auto r = static_cast<std::size_t>(states.shape(0));
  const auto d = static_cast<std::size_t>(states.shape(1));
  std::vector<std::vector<C>> v(r);
  for (std::size_t i = 0; i < r; ++i) v[i].assign(states.data() + i * d, states.data() + (i + 1) * d);
  return accumulate_density<double>(std::span<const std::vector<C>>(v), 0.0, 1);
}

py::dict report_to_dict(const RunConfig& config, const RunReport& r) {
  py::dict d;
  py::dict stages;
  for (std::size_t s = 0; s < kStageNames.size(); ++s)
    stages[py::str(std::string(kStageNames[s]))] =
        py::dict(py::arg("seconds") = r.profile.seconds[s], py::arg("calls") = r.profile.calls[s]);
  d["stages"] = stages;
  d["io_seconds"] = r.profile.io_seconds;
  d["total_seconds"] = r.total_seconds;
  d["wall_seconds"] = r.wall_seconds;
  d["snapshots"] = r.snapshots;
  d["norm_corrections"] = r.norm_corrections;
  d["max_norm_deviation"] = r.max_norm_deviation;
  d["noise_switches"] = r.noise_switches;
  d["workers"] = r.workers;
  d["memory_bytes"] = r.memory.total();
  if (r.final_density) d["final_density"] = r.final_density->to_dense();
  d["rows"] = config.space.dim();
  return d;
}

}  // namespace

PYBIND11_MODULE(_ctqw, m) {
  m.doc() = "Many-particle continuous-time quantum walks on noisy lattices";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<JointSpace>(m, "JointSpace")
      .def(py::init([](std::vector<int> dims, std::vector<int> k_half, const std::string& boundary,
                       int particles) {
             if (k_half.empty()) k_half.assign(dims.size(), 1);
             return JointSpace(LatticeTopology(std::move(dims), std::move(k_half),
                                               parse_boundary(boundary)),
                               particles);
           }),
           py::arg("dims"), py::arg("k_half") = std::vector<int>{},
           py::arg("boundary") = "periodic", py::arg("m") = 1)
      .def_property_readonly("dim", &JointSpace::dim)
      .def_property_readonly("m", &JointSpace::particles)
      .def_property_readonly("sites", [](const JointSpace& s) { return s.lattice().sites(); })
      .def_property_readonly("k_total", &JointSpace::k_total)
      .def_property_readonly("filling_factor", &JointSpace::filling_factor)
      .def("joint_index",
           [](const JointSpace& s, const std::vector<SiteIndex>& pos) { return joint_index(pos, s); })
      .def("joint_positions",
           [](const JointSpace& s, JointIndex alpha) { return joint_positions(alpha, s); });

  m.def("topology", [](const JointSpace& space) {
    const auto topo = build_topology(space);
    py::array_t<std::int64_t> idx({static_cast<py::ssize_t>(topo.rows()),
                                   static_cast<py::ssize_t>(topo.cols_per_row())});
    auto* out = idx.mutable_data();
    for (std::size_t i = 0; i < topo.indices().size(); ++i)
      out[i] = topo.indices()[i] == kNoNeighbor ? -1 : static_cast<std::int64_t>(topo.indices()[i]);
    return idx;
  }, "Topology table as an int array; -1 marks missing neighbors.");

  py::class_<CouplingModel>(m, "CouplingModel")
      .def(py::init([](double onsite, double tunneling, double interaction, double hbar) {
             CouplingModel c;
             c.onsite_energy = onsite;
             c.tunneling = tunneling;
             c.interaction = interaction;
             c.hbar = hbar;
             return c;
           }),
           py::arg("onsite_energy") = 0.0, py::arg("tunneling") = 1.0,
           py::arg("interaction") = 0.0, py::arg("hbar") = 1.0)
      .def_readwrite("onsite_energy", &CouplingModel::onsite_energy)
      .def_readwrite("tunneling", &CouplingModel::tunneling)
      .def_readwrite("interaction", &CouplingModel::interaction)
      .def_readwrite("hbar", &CouplingModel::hbar);

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def(py::init([](std::vector<double> levels, double rate, const std::string& target) {
             NoiseSpec s;
             s.levels = std::move(levels);
             s.switch_rate = rate;
             s.target = parse_noise_target(target);
             s.validate();
             return s;
           }),
           py::arg("levels") = std::vector<double>{0.0}, py::arg("switch_rate") = 0.0,
           py::arg("target") = "tunneling")
      .def_readonly("levels", &NoiseSpec::levels)
      .def_readonly("switch_rate", &NoiseSpec::switch_rate);

  py::class_<Hamiltonian>(m, "Hamiltonian")
      .def(py::init<JointSpace, CouplingModel, NoiseSpec, std::uint64_t>(), py::arg("space"),
           py::arg("model") = CouplingModel{}, py::arg("noise") = NoiseSpec{}, py::arg("seed") = 0)
      .def("apply", &Hamiltonian::apply_to, py::arg("psi"))
      .def("dense", &Hamiltonian::dense, py::arg("cap") = kDefaultDenseCap)
      .def("gershgorin_bound", &Hamiltonian::bound)
      .def("step_taylor", &Hamiltonian::taylor, py::arg("psi"), py::arg("dt"), py::arg("order") = 4)
      .def("step_rk4", &Hamiltonian::rk4, py::arg("psi"), py::arg("dt"))
      .def("step_eigen", &Hamiltonian::eigen, py::arg("psi"), py::arg("dt"))
      .def("advance_noise", &Hamiltonian::advance, py::arg("t"), py::arg("dt"));

  m.def("density_matrix", [](const py::array_t<C, py::array::c_style | py::array::forcecast>& states) {
    return density_from_states(states).to_dense();
  }, py::arg("states"), "Ensemble average of |psi><psi| over the rows of `states`.");

  m.def("purity", [](const py::array_t<C, py::array::c_style | py::array::forcecast>& states) {
    return purity(density_from_states(states));
  }, py::arg("states"));

  m.def("trace_distance", [](const py::array_t<C, py::array::c_style | py::array::forcecast>& a,
                             const py::array_t<C, py::array::c_style | py::array::forcecast>& b) {
    return trace_distance(density_from_states(a), density_from_states(b));
  }, py::arg("states_a"), py::arg("states_b"));

  py::class_<RunConfig>(m, "RunConfig")
      .def_property_readonly("rows", [](const RunConfig& c) { return c.space.dim(); })
      .def_readwrite("realizations", &RunConfig::realizations)
      .def_readwrite("steps", &RunConfig::steps)
      .def_readwrite("post_rate", &RunConfig::post_rate)
      .def_readwrite("master_seed", &RunConfig::master_seed)
      .def_readwrite("workers", &RunConfig::workers)
      .def("to_text", &to_config_text);

  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def("load_config", [](const std::filesystem::path& p) { return load_config(p); }, py::arg("path"));

  m.def("run", [](const RunConfig& config) {
    RunReport r;
    {
      py::gil_scoped_release release;
      r = run(config);
    }
    return report_to_dict(config, r);
  }, py::arg("config"));

  m.def("simulate", [](const RunConfig& config, const std::filesystem::path& out_dir) {
    SimulationOutcome o;
    {
      py::gil_scoped_release release;
      o = simulate(config, out_dir);
    }
    return py::make_tuple(o.exit_code, o.error);
  }, py::arg("config"), py::arg("out_dir"), "Returns (exit_code, error message).");

  m.def("estimate_memory", [](const RunConfig& config) {
    const auto e = estimate_memory(config);
    py::dict d;
    d["density"] = e.density;
    d["states"] = e.states;
    d["hamiltonians"] = e.hamiltonians;
    d["topology"] = e.topology;
    d["eigen"] = e.eigen;
    d["workspace"] = e.workspace;
    d["total"] = e.total();
    return d;
  }, py::arg("config"));

  m.def("read_density_snapshot", [](const std::filesystem::path& p) {
    return std::visit([](const auto& rho) { return rho.to_dense(); }, read_density_snapshot(p));
  }, py::arg("path"));

  m.def("validate", []() {
    std::ostringstream out;
    const bool ok = validate_invariants(out);
    return py::make_tuple(ok, out.str());
  });
}
