#include <cmath>

#include "gen.hpp"
#include "lcbl/config.hpp"
#include "lcbl/error.hpp"

using namespace lcbl;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::invalid_input;
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c.tol == 1e-3);
  CHECK(c.nodes == 129);
  CHECK(c.nodes_3d == 65);
  CHECK(c.p_values.size() == 5);
  CHECK(std::isinf(c.p_values.back()));
  CHECK_FALSE(c.seed.has_value());
}

TEST_CASE("p lists") {
  const auto p = parse_p_list("2,4,inf");
  REQUIRE(p.size() == 3);
  CHECK(p[1] == 4.0);
  CHECK(std::isinf(p[2]));
  CHECK(kind_of([] { parse_p_list("2,x"); }) == ErrorKind::config_error);
  CHECK(kind_of([] { parse_p_list("0.5"); }) == ErrorKind::config_error);
  CHECK(kind_of([] { parse_p_list(""); }) == ErrorKind::config_error);
}

TEST_CASE("monte carlo requires a seed") {
  const RunConfig c = parse_config(R"({"monte_carlo": {"enabled": true}})");
  try {
    validate(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.detail() == "seed required");
  }
  validate(parse_config(R"({"seed": 4, "monte_carlo": {"enabled": true}})"));
}

TEST_CASE("malformed configs") {
  CHECK(kind_of([] { parse_config("{"); }) == ErrorKind::config_error);
  CHECK(kind_of([] { parse_config("[]"); }) == ErrorKind::config_error);
  CHECK(kind_of([] { parse_config(R"({"seed": -1})"); }) == ErrorKind::config_error);
  CHECK(kind_of([] { parse_config(R"({"measures": [{"id": "a"}, {"id": "a"}]})"); }) == ErrorKind::config_error);
  CHECK(kind_of([] { load_config("/nonexistent/config.json"); }) == ErrorKind::io_error);
}

TEST_CASE("hash follows the bytes") {
  CHECK(parse_config("{}").hash == parse_config("{}").hash);
  CHECK(parse_config("{}").hash != parse_config("{ }").hash);
  CHECK(fnv1a("") == 14695981039346656037ULL);
}

TEST_CASE("measure registry") {
  RunConfig c = parse_config(R"({"grid": {"nodes": 33},
    "measures": [{"id": "g", "kind": "gaussian", "n": 2},
                 {"id": "u", "kind": "uniform", "lo": 0, "hi": 2},
                 {"id": "bad", "kind": "pyramid"}]})");
  MeasureRegistry reg(c);
  CHECK(reg.dimension("g") == 2);
  CHECK(reg.smooth("g"));
  CHECK(reg.quadrature("g")->size() == 33 * 33);
  CHECK(reg.quadrature("g") == reg.quadrature("g"));
  CHECK_FALSE(reg.smooth("u"));
  CHECK(reg.measure("u")->mass_between(0.0, 2.0) == doctest::Approx(1.0));
  CHECK(kind_of([&] { reg.measure("bad"); }) == ErrorKind::config_error);
  CHECK(kind_of([&] { reg.measure("missing"); }) == ErrorKind::config_error);
}

TEST_CASE("function specs") {
  Vec x(2);
  x << 0.5, -1.0;
  CHECK(parse_function(Json::parse(R"({"kind": "coordinate", "axis": 1})"), 2).value(x) == -1.0);
  CHECK(parse_function(Json::parse(R"({"kind": "linear", "coefficients": [2, 1], "offset": 1})"), 2).value(x) == 1.0);
  CHECK(parse_function(Json::parse(R"({"kind": "square", "shift": 1})"), 2).value(x) == 1.25);
  CHECK(kind_of([] { parse_function(Json::parse(R"({"kind": "coordinate", "axis": 2})"), 2); }) ==
        ErrorKind::config_error);
  CHECK(kind_of([] { parse_function(Json::parse(R"({"kind": "linear", "coefficients": [1]})"), 2); }) ==
        ErrorKind::config_error);
}
