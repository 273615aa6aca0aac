#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "smfg/app/config.hpp"

using namespace smfg;
using namespace smfg::app;

namespace {

std::string pointer_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

const char* kMinimal =
    R"js({"variant": "standard", "n": 100, "potential": "sin(2*pi*x)",
        "flow": "gradient", "t_max": 1})js";

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const RunSpec s = parse_config(kMinimal);
  CHECK(s.variant == Variant::Standard);
  CHECK(s.dimension == 1);
  CHECK(s.n == 100);
  CHECK(s.flow == FlowKind::Gradient);
  CHECK(s.drift == "0");
  CHECK(s.u0 == "0");
  CHECK(s.flow_config.t_max == 1.0);
  CHECK(s.flow_config.rtol == FlowConfig{}.rtol);
  CHECK(s.flow_config.atol == FlowConfig{}.atol);
  CHECK(s.flow_config.residual_stop == 1e-9);
  CHECK(s.flow_config.record_interval() == doctest::Approx(0.01));
  CHECK(s.flow_config.integrator == IntegratorKind::AdaptiveExplicitRK);
  CHECK_FALSE(s.compare_exact);
  CHECK(s.potential_expr != nullptr);

  const RunSpec echo = parse_config(to_json(s));
  CHECK(echo.n == s.n);
  CHECK(echo.potential == s.potential);
  CHECK(echo.flow_config.rtol == s.flow_config.rtol);
}

TEST_CASE("schema errors name the field") {
  CHECK(pointer_of(R"js({"n": 100, "potential": "0", "flow": "monotone", "t_max": 1})js") ==
        "/m0");
  CHECK(pointer_of(R"js({"n": 100, "potential": "0", "flow": "gradient"})js") == "/t_max");
  CHECK(pointer_of(R"js({"n": 100, "potential": "0", "flow": "gradient", "t_max": 1,
                       "colour": 1})js") == "/colour");
  CHECK(pointer_of(R"js({"n": 2, "potential": "0", "flow": "gradient", "t_max": 1})js") == "/n");
  CHECK(pointer_of(R"js({"n": 10.5, "potential": "0", "flow": "gradient", "t_max": 1})js") ==
        "/n");
  CHECK(pointer_of(R"js({"n": 10, "potential": "sin(", "flow": "gradient", "t_max": 1})js") ==
        "/potential");
  CHECK(pointer_of(R"js({"n": 10, "potential": "y", "flow": "gradient", "t_max": 1})js") ==
        "/potential");
  CHECK(pointer_of(R"js({"n": 10, "potential": "0", "flow": "gradient", "t_max": -1})js") ==
        "/t_max");
  CHECK(pointer_of(R"js({"n": 10, "potential": "0", "flow": "gradient", "t_max": 1,
                       "rtol": 0})js") == "/rtol");
  CHECK(pointer_of(R"js({"n": 10, "potential": "0", "flow": "gradient", "t_max": 1,
                       "integrator": "bdf"})js") == "/integrator");
  CHECK(pointer_of(R"js({"n": 10, "potential": "0", "flow": "sideways", "t_max": 1})js") ==
        "/flow");
  CHECK(pointer_of(R"js({"variant": "congestion", "n": 10, "potential": "0",
                       "flow": "gradient", "t_max": 1})js") == "/flow");
  CHECK(pointer_of(R"js({"variant": "congestion", "n": 10, "potential": "0", "drift": "x",
                       "flow": "monotone", "m0": "1", "t_max": 1})js") == "/drift");
  CHECK(pointer_of(R"js({"dimension": 2, "n": 10, "potential": "0", "drift": "0.1",
                       "flow": "monotone", "m0": "1", "t_max": 1})js") == "/drift");
  CHECK(pointer_of(R"js({"dimension": 3, "n": 10, "potential": "0",
                       "flow": "gradient", "t_max": 1})js") == "/dimension");
  CHECK(pointer_of(R"js({"n": 10, "potential": "0", "flow": "gradient", "t_max": 1,
                       "m0": "1"})js") == "/m0");
  CHECK(pointer_of(R"js({"n": 10, "potential": "0", "drift": "cos(2*pi*x)",
                       "flow": "gradient", "t_max": 1, "compare_exact": true})js") == "/psi");
  CHECK(pointer_of(R"js({"dimension": 2, "n": 10, "potential": "sin(2*pi*x)+sin(2*pi*y)",
                       "flow": "monotone", "m0": "1", "t_max": 1,
                       "compare_exact": true})js") == "/potential_1d");
  CHECK(pointer_of("[1, 2]") == "");
  CHECK(pointer_of("{not json") == "");
}

TEST_CASE("the 2-D experiment transcribes") {
  const RunSpec s = parse_config(R"js({
    "variant": "standard", "dimension": 2, "n": 20,
    "potential": "sin(2*pi*x) + sin(2*pi*y)",
    "potential_1d": "sin(2*pi*x)",
    "flow": "monotone",
    "m0": "1 + 0.3*cos(x - 3*y)",
    "u0": "0.4*cos(x + 2*y)",
    "t_max": 50, "record_every": 1, "compare_exact": true})js");
  CHECK(s.dimension == 2);
  CHECK(s.n == 20);
  CHECK(s.flow == FlowKind::Monotone);
  CHECK(evaluate(*s.m0_expr, 0.0, 0.0) == doctest::Approx(1.3));
  CHECK(evaluate(*s.u0_expr, 0.0, 0.0) == doctest::Approx(0.4));
  CHECK(s.flow_config.record_interval() == 1.0);
  CHECK(s.compare_exact);
}

TEST_CASE("files") {
  CHECK_THROWS_AS(load_config("/nonexistent/dir/config.json"), IoError);
  const auto path = std::filesystem::temp_directory_path() / "smfg_config_test.json";
  {
    std::ofstream out(path);
    out << kMinimal;
  }
  CHECK(load_config(path).n == 100);
  std::filesystem::remove(path);
}
