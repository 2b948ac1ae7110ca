#include "ctqw/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <toml.hpp>

#include "ctqw/errors.hpp"

namespace ctqw {

namespace {

using Scalar = ConfigValue::Scalar;

int line_of(const toml::node& n) { return static_cast<int>(n.source().begin.line); }

Scalar to_scalar(const toml::node& n, std::string_view key) {
  if (const auto* v = n.as_boolean()) return v->get();
  if (const auto* v = n.as_integer()) return v->get();
  if (const auto* v = n.as_floating_point()) return v->get();
  if (const auto* v = n.as_string()) return v->get();
  throw ConfigError("line " + std::to_string(line_of(n)) + ", key '" + std::string(key) +
                    "': unsupported value type");
}

}  // namespace

ConfigTable parse_config_table(std::string_view text) {
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError("line " + std::to_string(e.source().begin.line) + ": " +
                      std::string(e.description()));
  }
  ConfigTable table;
  for (const auto& [k, node] : doc) {
    const std::string key(k.str());
    ConfigValue v;
    v.line = line_of(node);
    if (node.is_table())
      throw ConfigError("line " + std::to_string(v.line) + ": sections are not supported; use flat keys");
    if (const auto* arr = node.as_array()) {
      std::vector<Scalar> items;
      for (const auto& item : *arr) {
        if (item.is_array() || item.is_table())
          throw ConfigError("line " + std::to_string(v.line) + ", key '" + key +
                            "': nested arrays are not supported");
        items.push_back(to_scalar(item, key));
      }
      v.value = std::move(items);
    } else {
      v.value = to_scalar(node, key);
    }
    table.emplace(key, std::move(v));
  }
  return table;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "q",           "dims",           "k_half",
      "boundary",    "m",              "onsite_energy",
      "tunneling",   "tunneling_per_direction", "interaction",
      "hbar",        "noise_target",   "noise_levels",
      "noise_amplitude", "switch_rate", "backend",
      "dt",          "taylor_order",   "tol_norm",
      "tol_fail",    "renormalize",    "R",
      "steps",       "post_rate",      "seed",
      "workers",     "precision",      "initial_state",
      "initial_positions", "initial_amplitudes_re", "initial_amplitudes_im",
      "reference_positions", "observables", "snapshot_initial",
      "write_snapshots", "memory_budget_mb", "dense_cap",
  };
  return keys;
}

namespace {

class Reader {
 public:
  explicit Reader(const ConfigTable& t) : table_(t) {}

  bool has(std::string_view key) const { return table_.find(key) != table_.end(); }

  std::int64_t integer(std::string_view key, std::int64_t fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    return as_int(scalar(*v, key), key, v->line);
  }
  double real(std::string_view key, double fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    return as_real(scalar(*v, key), key, v->line);
  }
  bool boolean(std::string_view key, bool fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    const auto& s = scalar(*v, key);
    if (const auto* b = std::get_if<bool>(&s)) return *b;
    fail(key, v->line, "expected true or false");
  }
  std::string string(std::string_view key, std::string fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    const auto& s = scalar(*v, key);
    if (const auto* str = std::get_if<std::string>(&s)) return *str;
    fail(key, v->line, "expected a quoted string");
  }
  std::vector<std::int64_t> integers(std::string_view key) const {
    std::vector<std::int64_t> out;
    if (const auto* v = find(key))
      for (const auto& s : array(*v, key)) out.push_back(as_int(s, key, v->line));
    return out;
  }
  std::vector<double> reals(std::string_view key) const {
    std::vector<double> out;
    if (const auto* v = find(key))
      for (const auto& s : array(*v, key)) out.push_back(as_real(s, key, v->line));
    return out;
  }
  std::vector<std::string> strings(std::string_view key) const {
    std::vector<std::string> out;
    if (const auto* v = find(key))
      for (const auto& s : array(*v, key)) {
        const auto* str = std::get_if<std::string>(&s);
        if (!str) fail(key, v->line, "expected an array of strings");
        out.push_back(*str);
      }
    return out;
  }

 private:
  const ConfigValue* find(std::string_view key) const {
    const auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }
  [[noreturn]] static void fail(std::string_view key, int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ", key '" + std::string(key) + "': " + msg);
  }
  static const Scalar& scalar(const ConfigValue& v, std::string_view key) {
    if (const auto* s = std::get_if<Scalar>(&v.value)) return *s;
    fail(key, v.line, "expected a scalar, got an array");
  }
  static const std::vector<Scalar>& array(const ConfigValue& v, std::string_view key) {
    if (const auto* a = std::get_if<std::vector<Scalar>>(&v.value)) return *a;
    fail(key, v.line, "expected an array");
  }
  static std::int64_t as_int(const Scalar& s, std::string_view key, int line) {
    if (const auto* i = std::get_if<std::int64_t>(&s)) return *i;
    fail(key, line, "expected an integer");
  }
  static double as_real(const Scalar& s, std::string_view key, int line) {
    if (const auto* i = std::get_if<std::int64_t>(&s)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&s)) {
      if (!std::isfinite(*d)) fail(key, line, "value must be finite");
      return *d;
    }
    fail(key, line, "expected a number");
  }

  const ConfigTable& table_;
};

std::string valid_key_list() {
  std::string out;
  for (const auto& k : config_keys()) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

std::vector<int> to_ints(const std::vector<std::int64_t>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  const ConfigTable table = parse_config_table(text);
  const auto& keys = config_keys();
  for (const auto& [key, value] : table)
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("line " + std::to_string(value.line) + ": unknown key '" + key +
                        "'; valid keys: " + valid_key_list());

  const Reader in(table);
  if (!in.has("dims")) throw ConfigError("missing required key 'dims'");
  const auto dims = to_ints(in.integers("dims"));
  auto k_half = to_ints(in.integers("k_half"));
  if (k_half.empty()) k_half.assign(dims.size(), 1);
  const int q = static_cast<int>(in.integer("q", static_cast<std::int64_t>(dims.size())));
  const auto lattice =
      build_lattice(q, dims, k_half, parse_boundary(in.string("boundary", "periodic")));

  RunConfig c;
  c.space = JointSpace(lattice, static_cast<int>(in.integer("m", 1)));

  c.model.onsite_energy = in.real("onsite_energy", 0.0);
  c.model.tunneling = in.real("tunneling", 1.0);
  c.model.tunneling_per_direction = in.reals("tunneling_per_direction");
  c.model.interaction = in.real("interaction", 0.0);
  c.model.hbar = in.real("hbar", 1.0);

  c.noise.target = parse_noise_target(in.string("noise_target", "tunneling"));
  if (in.has("noise_levels") && in.has("noise_amplitude"))
    throw ConfigError("set either noise_levels or noise_amplitude, not both");
  if (in.has("noise_levels")) {
    c.noise.levels = in.reals("noise_levels");
  } else {
    const double nu = in.real("noise_amplitude", 0.1);
    c.noise.levels = nu == 0.0 ? std::vector<double>{0.0} : std::vector<double>{-nu, nu};
  }
  c.noise.switch_rate = in.real("switch_rate", 0.1);

  c.stepper.backend = parse_backend(in.string("backend", "taylor"));
  c.stepper.dt = in.real("dt", 0.02);
  c.stepper.taylor_order = static_cast<int>(in.integer("taylor_order", 4));
  c.stepper.tol_norm = in.real("tol_norm", 1e-6);
  c.stepper.tol_fail = in.real("tol_fail", 1e-3);
  c.stepper.renormalize = in.boolean("renormalize", true);

  c.realizations = in.integer("R", 1000);
  c.steps = in.integer("steps", 1500);
  c.post_rate = in.integer("post_rate", std::min<std::int64_t>(100, std::max<std::int64_t>(c.steps, 1)));
  const auto seed = in.integer("seed", 0);
  if (seed < 0) throw ConfigError("seed must be >= 0");
  c.master_seed = static_cast<std::uint64_t>(seed);
  const auto workers = in.integer("workers", 0);
  if (workers < 0) throw ConfigError("workers must be >= 0");
  c.workers = static_cast<int>(workers);
  c.precision = parse_precision(in.string("precision", "single"));

  c.initial_state.kind = parse_initial_kind(in.string("initial_state", "product"));
  for (auto x : in.integers("initial_positions")) c.initial_state.positions.push_back(x);
  const auto re = in.reals("initial_amplitudes_re");
  const auto im = in.reals("initial_amplitudes_im");
  if (!im.empty() && im.size() != re.size())
    throw ConfigError("initial_amplitudes_im must match initial_amplitudes_re in length");
  for (std::size_t i = 0; i < re.size(); ++i)
    c.initial_state.amplitudes.emplace_back(re[i], im.empty() ? 0.0 : im[i]);
  if (c.initial_state.kind == InitialKind::custom_vector && re.empty())
    throw ConfigError("custom_vector initial state needs initial_amplitudes_re");
  // Fail early on bad positions or amplitudes.
  (void)make_initial_state<double>(c.initial_state, c.space);

  for (auto x : in.integers("reference_positions")) c.reference_positions.push_back(x);
  if (in.has("observables")) {
    c.observables.clear();
    for (const auto& name : in.strings("observables")) c.observables.push_back(parse_observable(name));
  }
  c.snapshot_initial = in.boolean("snapshot_initial", false);
  c.write_snapshots = in.boolean("write_snapshots", false);
  const auto budget_mb = in.integer("memory_budget_mb", static_cast<std::int64_t>(kDefaultMemoryBudget >> 20));
  if (budget_mb < 1) throw ConfigError("memory_budget_mb must be >= 1");
  c.memory_budget = static_cast<std::uint64_t>(budget_mb) << 20;
  const auto cap = in.integer("dense_cap", static_cast<std::int64_t>(kDefaultDenseCap));
  if (cap < 1) throw ConfigError("dense_cap must be >= 1");
  c.dense_cap = static_cast<std::uint64_t>(cap);

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

template <class T, class F>
std::string fmt_array(const std::vector<T>& v, F&& f) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += f(v[i]);
  }
  return out + "]";
}

std::string quote(std::string_view s) { return "\"" + std::string(s) + "\""; }

}  // namespace

std::string to_config_text(const RunConfig& c) {
  const auto& lat = c.space.lattice();
  auto as_int = [](auto x) { return std::to_string(x); };
  std::ostringstream o;
  o << "q = " << lat.q() << "\n";
  o << "dims = " << fmt_array(lat.dims(), as_int) << "\n";
  o << "k_half = " << fmt_array(lat.k_half(), as_int) << "\n";
  o << "boundary = " << quote(to_string(lat.boundary())) << "\n";
  o << "m = " << c.space.particles() << "\n";
  o << "onsite_energy = " << fmt_real(c.model.onsite_energy) << "\n";
  o << "tunneling = " << fmt_real(c.model.tunneling) << "\n";
  if (!c.model.tunneling_per_direction.empty())
    o << "tunneling_per_direction = " << fmt_array(c.model.tunneling_per_direction, fmt_real) << "\n";
  o << "interaction = " << fmt_real(c.model.interaction) << "\n";
  o << "hbar = " << fmt_real(c.model.hbar) << "\n";
  o << "noise_target = " << quote(to_string(c.noise.target)) << "\n";
  o << "noise_levels = " << fmt_array(c.noise.levels, fmt_real) << "\n";
  o << "switch_rate = " << fmt_real(c.noise.switch_rate) << "\n";
  o << "backend = " << quote(to_string(c.stepper.backend)) << "\n";
  o << "dt = " << fmt_real(c.stepper.dt) << "\n";
  o << "taylor_order = " << c.stepper.taylor_order << "\n";
  o << "tol_norm = " << fmt_real(c.stepper.tol_norm) << "\n";
  o << "tol_fail = " << fmt_real(c.stepper.tol_fail) << "\n";
  o << "renormalize = " << (c.stepper.renormalize ? "true" : "false") << "\n";
  o << "R = " << c.realizations << "\n";
  o << "steps = " << c.steps << "\n";
  o << "post_rate = " << c.post_rate << "\n";
  o << "seed = " << c.master_seed << "\n";
  o << "workers = " << c.workers << "\n";
  o << "precision = " << quote(to_string(c.precision)) << "\n";
  o << "initial_state = " << quote(to_string(c.initial_state.kind)) << "\n";
  if (!c.initial_state.positions.empty())
    o << "initial_positions = " << fmt_array(c.initial_state.positions, as_int) << "\n";
  if (!c.initial_state.amplitudes.empty()) {
    std::vector<double> re, im;
    for (const auto& a : c.initial_state.amplitudes) {
      re.push_back(a.real());
      im.push_back(a.imag());
    }
    o << "initial_amplitudes_re = " << fmt_array(re, fmt_real) << "\n";
    o << "initial_amplitudes_im = " << fmt_array(im, fmt_real) << "\n";
  }
  if (!c.reference_positions.empty())
    o << "reference_positions = " << fmt_array(c.reference_positions, as_int) << "\n";
  std::vector<std::string> obs;
  for (auto ob : c.observables) obs.emplace_back(to_string(ob));
  o << "observables = " << fmt_array(obs, quote) << "\n";
  o << "snapshot_initial = " << (c.snapshot_initial ? "true" : "false") << "\n";
  o << "write_snapshots = " << (c.write_snapshots ? "true" : "false") << "\n";
  o << "memory_budget_mb = " << (c.memory_budget >> 20) << "\n";
  o << "dense_cap = " << c.dense_cap << "\n";
  return o.str();
}

void BenchmarkPlan::validate() const {
  if (meshes.empty() || post_rates.empty() || realizations.empty())
    throw ConfigError("benchmark plan needs non-empty meshes, post_rates and realizations");
  if (repetitions < 1) throw ConfigError("benchmark repetitions must be >= 1");
  for (auto m : meshes)
    if (m < 2) throw ConfigError("benchmark mesh sizes must be >= 2");
  for (auto p : post_rates)
    if (p < 1) throw ConfigError("benchmark post_rates must be >= 1");
  for (auto r : realizations)
    if (r < 1) throw ConfigError("benchmark realization counts must be >= 1");
}

BenchmarkPlan parse_plan(std::string_view text) {
  const ConfigTable table = parse_config_table(text);
  static const std::vector<std::string> keys = {"meshes", "post_rates", "realizations",
                                                "repetitions"};
  for (const auto& [key, value] : table)
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("line " + std::to_string(value.line) + ": unknown plan key '" + key +
                        "'; valid keys: meshes, post_rates, realizations, repetitions");
  const Reader in(table);
  BenchmarkPlan plan;
  for (auto v : in.integers("meshes")) {
    if (v < 0) throw ConfigError("mesh sizes must be positive");
    plan.meshes.push_back(static_cast<std::uint64_t>(v));
  }
  plan.post_rates = in.integers("post_rates");
  plan.realizations = in.integers("realizations");
  plan.repetitions = static_cast<int>(in.integer("repetitions", 1));
  plan.validate();
  return plan;
}

BenchmarkPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read plan file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_plan(buf.str());
}

}  // namespace ctqw
