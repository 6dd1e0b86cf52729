#include "lcbl/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lcbl/constants.hpp"
#include "lcbl/error.hpp"
#include "lcbl/measures.hpp"

namespace lcbl {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::config_error, msg); }

Vec vector_of(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) fail(std::string(what) + " must be a non-empty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(std::string(what) + " must hold numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

template <class T>
T value_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(std::string("bad value for '") + key + "'");
  }
}

PotentialPtr build_potential(const Json& spec) {
  const std::string kind = value_or<std::string>(spec, "kind", "");
  PotentialPtr p;
  if (kind == "gaussian") {
    p = make_gaussian(value_or<int>(spec, "n", 1));
  } else if (kind == "quadratic") {
    if (!spec.contains("matrix") || !spec["matrix"].is_array()) fail("quadratic measure needs 'matrix'");
    const Json& rows = spec["matrix"];
    const auto n = static_cast<Eigen::Index>(rows.size());
    Mat a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec row = vector_of(rows[static_cast<std::size_t>(i)], "matrix row");
      if (row.size() != n) fail("quadratic matrix must be square");
      a.row(i) = row.transpose();
    }
    p = make_quadratic(a);
  } else if (kind == "radial") {
    const int n = value_or<int>(spec, "n", 2);
    if (!spec.contains("phi")) fail("radial measure needs 'phi'");
    const Json& phi = spec["phi"];
    if (phi.is_string()) {
      p = make_radial(radial_profile(phi.get<std::string>()), n);
    } else if (phi.is_object()) {
      p = make_radial(polynomial_profile(value_or<double>(phi, "a", 0.0), value_or<double>(phi, "b", 0.0)), n);
    } else {
      fail("radial 'phi' must be a name or {a, b}");
    }
  } else if (kind == "cosh") {
    p = make_cosh(value_or<int>(spec, "n", 1));
  } else {
    return nullptr;
  }
  if (spec.contains("regularize")) p = regularize(p, value_or<double>(spec, "regularize", 0.0));
  return p;
}

MeasurePtr build_piecewise(const Json& spec) {
  const std::string kind = value_or<std::string>(spec, "kind", "");
  if (kind == "piecewise") {
    const Vec b = vector_of(spec.value("breakpoints", Json()), "breakpoints");
    const Vec d = vector_of(spec.value("densities", Json()), "densities");
    return make_piecewise_1d(std::vector<double>(b.data(), b.data() + b.size()),
                             std::vector<double>(d.data(), d.data() + d.size()));
  }
  if (kind == "uniform") {
    const double lo = value_or<double>(spec, "lo", -1.0);
    const double hi = value_or<double>(spec, "hi", 1.0);
    return make_piecewise_1d({lo, hi}, {1.0});
  }
  if (kind == "spike") {
    return spike_measure(value_or<double>(spec, "eps", 0.1));
  }
  if (kind == "gap") {
    return gap_measure(value_or<double>(spec, "gap", 0.1));
  }
  fail("unknown measure kind '" + kind + "'");
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double parse_p(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  fail("bad p value " + j.dump());
}

std::vector<double> parse_p_list(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const double p = parse_p(Json(item));
    if (!(p >= 1.0)) fail("p must be >= 1, got " + item);
    out.push_back(p);
  }
  if (out.empty()) fail("empty p list");
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.text = text;
  cfg.hash = fnv1a(text);
  try {
    cfg.raw = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  const Json& j = cfg.raw;
  if (!j.is_object()) fail("config must be a JSON object");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  cfg.tol = value_or<double>(j, "tolerance", cfg.tol);
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    cfg.nodes = value_or<std::size_t>(g, "nodes", cfg.nodes);
    cfg.nodes_3d = value_or<std::size_t>(g, "nodes_3d", cfg.nodes_3d);
    cfg.tail_tol = value_or<double>(g, "tail_tol", cfg.tail_tol);
  }
  if (j.contains("p")) {
    if (!j["p"].is_array()) fail("'p' must be an array");
    cfg.p_values.clear();
    for (const Json& p : j["p"]) cfg.p_values.push_back(parse_p(p));
  }
  if (j.contains("monte_carlo")) {
    const Json& mc = j["monte_carlo"];
    cfg.monte_carlo = value_or<bool>(mc, "enabled", false);
    cfg.mc_samples = value_or<std::size_t>(mc, "samples", cfg.mc_samples);
  }
  if (j.contains("poisson")) {
    const Json& ps = j["poisson"];
    if (ps.contains("stencil")) cfg.poisson.stencil = stencil_from_string(value_or<std::string>(ps, "stencil", ""));
    cfg.poisson.tolerance = value_or<double>(ps, "tolerance", cfg.poisson.tolerance);
    cfg.poisson.max_iterations = value_or<int>(ps, "max_iterations", cfg.poisson.max_iterations);
    cfg.poisson_node_limit = value_or<std::size_t>(ps, "node_limit", cfg.poisson_node_limit);
  }
  if (j.contains("measures")) {
    if (!j["measures"].is_array()) fail("'measures' must be an array");
    for (const Json& m : j["measures"]) {
      if (!m.is_object() || !m.contains("id") || !m["id"].is_string()) fail("every measure needs a string 'id'");
      const std::string id = m["id"].get<std::string>();
      for (const auto& [existing, spec] : cfg.measures) {
        if (existing == id) fail("duplicate measure id '" + id + "'");
      }
      cfg.measures.emplace_back(id, m);
    }
  }
  if (j.contains("suites")) {
    if (!j["suites"].is_object()) fail("'suites' must be an object");
    cfg.suites = j["suites"];
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  if (cfg.monte_carlo && !cfg.seed) fail("seed required");
  if (!(cfg.tol > 0.0)) fail("tolerance must be positive");
  if (cfg.nodes < kMinNodesPerAxis || cfg.nodes_3d < kMinNodesPerAxis) fail("grid needs at least 16 nodes per axis");
  for (double p : cfg.p_values) {
    if (!(p >= 1.0)) fail("p values must be >= 1");
  }
}

TestFunction parse_function(const Json& j, int n) {
  if (!j.is_object()) fail("function spec must be an object");
  const std::string kind = value_or<std::string>(j, "kind", "");
  const int axis = value_or<int>(j, "axis", 0);
  if (axis < 0 || axis >= n) fail("function axis out of range");
  auto coefficients = [&]() {
    const Vec c = vector_of(j.value("coefficients", Json()), "coefficients");
    if (c.size() != n) fail("coefficients must have one entry per dimension");
    return c;
  };
  if (kind == "coordinate") return coordinate_function(axis);
  if (kind == "tanh") return tanh_function(axis);
  if (kind == "square") return square_function(axis, value_or<double>(j, "shift", 0.0));
  if (kind == "linear") return linear_function(coefficients(), value_or<double>(j, "offset", 0.0));
  if (kind == "constant") return constant_function(n, value_or<double>(j, "value", 1.0));
  if (kind == "exp-linear") return exp_linear_function(coefficients());
  if (kind == "tilt") return tilt_function(coefficients(), value_or<double>(j, "amplitude", 0.5));
  fail("unknown function kind '" + kind + "'");
}

MeasureRegistry::MeasureRegistry(const RunConfig& cfg) : cfg_(cfg) {
  for (const auto& [id, spec] : cfg.measures) entries_[id] = Entry{spec, nullptr, nullptr, nullptr};
}

bool MeasureRegistry::contains(const std::string& id) const { return entries_.count(id) > 0; }

MeasureRegistry::Entry& MeasureRegistry::entry(const std::string& id) {
  auto it = entries_.find(id);
  if (it == entries_.end()) fail("unknown measure id '" + id + "'");
  Entry& e = it->second;
  if (!e.potential && !e.measure) {
    e.potential = build_potential(e.spec);
    if (!e.potential) e.measure = build_piecewise(e.spec);
  }
  return e;
}

std::size_t MeasureRegistry::nodes_for(const Entry& e) const {
  if (e.spec.contains("nodes")) return value_or<std::size_t>(e.spec, "nodes", cfg_.nodes);
  const int n = e.potential ? e.potential->dimension() : 1;
  return n >= 3 ? cfg_.nodes_3d : cfg_.nodes;
}

int MeasureRegistry::dimension(const std::string& id) {
  Entry& e = entry(id);
  return e.potential ? e.potential->dimension() : e.measure->dimension();
}

bool MeasureRegistry::smooth(const std::string& id) { return entry(id).potential != nullptr; }

QuadraturePtr MeasureRegistry::quadrature(const std::string& id) {
  Entry& e = entry(id);
  if (!e.quadrature) {
    if (e.potential) {
      e.quadrature = reference_quadrature(e.potential, nodes_for(e), cfg_.tail_tol);
      e.measure = e.quadrature->measure;
    } else {
      e.quadrature = piecewise_quadrature(e.measure, nodes_for(e));
    }
  }
  return e.quadrature;
}

MeasurePtr MeasureRegistry::measure(const std::string& id) {
  Entry& e = entry(id);
  if (!e.measure) quadrature(id);
  return e.measure;
}

PotentialPtr MeasureRegistry::potential(const std::string& id) { return entry(id).potential; }

MeasurePtr MeasureRegistry::inline_measure(const Json& spec) {
  if (build_potential(spec)) fail("inline measures must be piecewise; declare smooth measures by id");
  return build_piecewise(spec);
}

}  // namespace lcbl
