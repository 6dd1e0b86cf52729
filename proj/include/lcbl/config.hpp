#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcbl/field.hpp"
#include "lcbl/operators.hpp"
#include "lcbl/quadrature.hpp"
#include "lcbl/report.hpp"

namespace lcbl {

/// A parsed run configuration. The schema is described in docs/config.md.
struct RunConfig {
  std::string text;
  Json raw;
  std::uint64_t hash = 0;

  std::optional<std::uint64_t> seed;
  double tol = kDefaultTolerance;
  std::size_t nodes = 129;
  std::size_t nodes_3d = 65;
  double tail_tol = 1e-10;
  std::vector<double> p_values{2.0, 3.0, 4.0, 8.0, std::numeric_limits<double>::infinity()};
  bool monte_carlo = false;
  std::size_t mc_samples = 200000;
  PoissonOptions poisson;
  std::size_t poisson_node_limit = 70000;

  /// Measure specs keyed by id, in file order.
  std::vector<std::pair<std::string, Json>> measures;
  Json suites = Json::object();
};

/// FNV-1a 64-bit.
std::uint64_t fnv1a(std::string_view bytes);

RunConfig parse_config(const std::string& text);
/// Throws io-error when the file cannot be read.
RunConfig load_config(const std::string& path);
/// Throws config-error "seed required" when Monte Carlo is on without a seed.
void validate(const RunConfig& cfg);

/// "2,3,inf" -> {2, 3, inf}.
std::vector<double> parse_p_list(const std::string& list);
/// A p value from a JSON number or the string "inf".
double parse_p(const Json& j);

/// Test functions: {"kind": "coordinate"|"tanh"|"square"|"linear"|"constant"|
/// "exp-linear"|"tilt", ...} on R^n.
TestFunction parse_function(const Json& j, int n);

/// Builds and caches measures and their reference quadratures by id.
class MeasureRegistry {
 public:
  explicit MeasureRegistry(const RunConfig& cfg);

  bool contains(const std::string& id) const;
  int dimension(const std::string& id);
  bool smooth(const std::string& id);
  MeasurePtr measure(const std::string& id);
  /// Null for piecewise measures.
  PotentialPtr potential(const std::string& id);
  QuadraturePtr quadrature(const std::string& id);
  /// Builds an anonymous measure from an inline spec.
  MeasurePtr inline_measure(const Json& spec);

 private:
  struct Entry {
    Json spec;
    PotentialPtr potential;
    MeasurePtr measure;
    QuadraturePtr quadrature;
  };
  Entry& entry(const std::string& id);
  std::size_t nodes_for(const Entry& e) const;

  const RunConfig& cfg_;
  std::map<std::string, Entry> entries_;
};

}  // namespace lcbl
