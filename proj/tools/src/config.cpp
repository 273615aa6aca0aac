#include "smfg/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "smfg/grid.hpp"

namespace smfg::app {

using nlohmann::json;

std::string_view to_string(FlowKind kind) noexcept {
  return kind == FlowKind::Gradient ? "gradient" : "monotone";
}

ConfigError::ConfigError(std::string pointer, const std::string& message)
    : UsageError("config " + (pointer.empty() ? std::string("/") : pointer) +
                 ": " + message),
      pointer_(std::move(pointer)) {}

namespace {

const std::set<std::string> kKeys = {
    "variant", "dimension", "n",        "flow",          "potential",
    "drift",   "u0",        "m0",       "psi",           "potential_1d",
    "t_max",   "rtol",      "atol",     "residual_stop", "max_steps",
    "record_every", "integrator", "output", "compare_exact"};

std::string pointer(const std::string& key) { return "/" + key; }

const json* find(const json& doc, const std::string& key) {
  auto it = doc.find(key);
  return it == doc.end() ? nullptr : &*it;
}

std::string get_string(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_string()) throw ConfigError(pointer(key), "expected a string");
  return v.get<std::string>();
}

double get_number(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(pointer(key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(pointer(key), "expected a finite number");
  return d;
}

long get_integer(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) throw ConfigError(pointer(key), "expected an integer");
  return v.get<long>();
}

double positive(const json& doc, const std::string& key) {
  const double d = get_number(doc, key);
  if (!(d > 0.0)) throw ConfigError(pointer(key), "must be positive");
  return d;
}

ExprPtr parse_field(const std::string& key, const std::string& text, int dim) {
  ExprPtr e;
  try {
    e = parse_expression(text);
  } catch (const ParseError& err) {
    throw ConfigError(pointer(key), err.what());
  }
  if (dim == 1 && uses_y(*e)) {
    throw ConfigError(pointer(key), "y is not a variable of a 1-D problem");
  }
  return e;
}

/// True when the expression vanishes at every node of an n-point grid.
bool vanishes(const Expr& e, int n, int dim) {
  const PeriodicGrid grid = dim == 1 ? PeriodicGrid::line(n) : PeriodicGrid::square(n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid.coordinate_of(k, 0);
    const double y = dim == 2 ? grid.coordinate_of(k, 1) : 0.0;
    if (evaluate(e, x, y) != 0.0) return false;
  }
  return true;
}

}  // namespace

RunSpec parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigError("", std::string("invalid JSON: ") + err.what());
  }
  if (!doc.is_object()) throw ConfigError("", "expected a JSON object");
  for (const auto& item : doc.items()) {
    if (!kKeys.contains(item.key())) {
      throw ConfigError(pointer(item.key()), "unknown key");
    }
  }
  for (const char* key : {"n", "potential", "flow", "t_max"}) {
    if (!find(doc, key)) throw ConfigError(pointer(key), "required field is missing");
  }

  RunSpec spec;
  if (find(doc, "variant")) {
    const std::string v = get_string(doc, "variant");
    if (v == "standard") {
      spec.variant = Variant::Standard;
    } else if (v == "congestion") {
      spec.variant = Variant::Congestion;
    } else {
      throw ConfigError("/variant", "expected \"standard\" or \"congestion\"");
    }
  }
  if (find(doc, "dimension")) {
    const long d = get_integer(doc, "dimension");
    if (d != 1 && d != 2) throw ConfigError("/dimension", "expected 1 or 2");
    spec.dimension = static_cast<int>(d);
  }
  const long n = get_integer(doc, "n");
  if (n < 3 || n > 100000) throw ConfigError("/n", "expected an integer in 3..100000");
  spec.n = static_cast<int>(n);

  const std::string flow = get_string(doc, "flow");
  if (flow == "gradient") {
    spec.flow = FlowKind::Gradient;
  } else if (flow == "monotone") {
    spec.flow = FlowKind::Monotone;
  } else {
    throw ConfigError("/flow", "expected \"gradient\" or \"monotone\"");
  }
  if (spec.flow == FlowKind::Gradient && spec.variant == Variant::Congestion) {
    throw ConfigError("/flow", "the congestion variant needs the monotone flow");
  }

  const int dim = spec.dimension;
  spec.potential = get_string(doc, "potential");
  spec.potential_expr = parse_field("potential", spec.potential, dim);
  if (find(doc, "drift")) spec.drift = get_string(doc, "drift");
  spec.drift_expr = parse_field("drift", spec.drift, dim);
  if ((spec.variant == Variant::Congestion || dim == 2) &&
      !vanishes(*spec.drift_expr, spec.n, dim)) {
    throw ConfigError("/drift", "congestion and 2-D problems carry no drift");
  }
  if (find(doc, "u0")) spec.u0 = get_string(doc, "u0");
  spec.u0_expr = parse_field("u0", spec.u0, dim);
  if (find(doc, "m0")) {
    if (spec.flow != FlowKind::Monotone) {
      throw ConfigError("/m0", "only the monotone flow takes an initial density");
    }
    spec.m0 = get_string(doc, "m0");
    spec.m0_expr = parse_field("m0", spec.m0, dim);
  } else if (spec.flow == FlowKind::Monotone) {
    throw ConfigError("/m0", "required when flow is \"monotone\"");
  }

  FlowConfig& cfg = spec.flow_config;
  cfg.t_max = positive(doc, "t_max");
  if (find(doc, "rtol")) cfg.rtol = positive(doc, "rtol");
  if (find(doc, "atol")) cfg.atol = positive(doc, "atol");
  if (find(doc, "residual_stop")) {
    cfg.residual_stop = get_number(doc, "residual_stop");
    if (cfg.residual_stop < 0.0) {
      throw ConfigError("/residual_stop", "must not be negative");
    }
  }
  if (find(doc, "max_steps")) {
    cfg.max_steps = get_integer(doc, "max_steps");
    if (cfg.max_steps < 1) throw ConfigError("/max_steps", "must be at least 1");
  }
  if (find(doc, "record_every")) cfg.record_every = positive(doc, "record_every");
  if (find(doc, "integrator")) {
    const std::string kind = get_string(doc, "integrator");
    if (kind == "rk45") {
      cfg.integrator = IntegratorKind::AdaptiveExplicitRK;
    } else if (kind == "implicit_euler") {
      cfg.integrator = IntegratorKind::ImplicitEuler;
    } else {
      throw ConfigError("/integrator", "expected \"rk45\" or \"implicit_euler\"");
    }
  }
  if (find(doc, "output")) {
    spec.output = get_string(doc, "output");
    if (spec.output.empty()) throw ConfigError("/output", "must not be empty");
  }
  if (find(doc, "compare_exact")) {
    if (!doc["compare_exact"].is_boolean()) {
      throw ConfigError("/compare_exact", "expected true or false");
    }
    spec.compare_exact = doc["compare_exact"].get<bool>();
  }
  if (find(doc, "psi")) {
    spec.psi = get_string(doc, "psi");
    spec.psi_expr = parse_field("psi", spec.psi, 1);
  }
  if (find(doc, "potential_1d")) {
    spec.potential_1d = get_string(doc, "potential_1d");
    spec.potential_1d_expr = parse_field("potential_1d", spec.potential_1d, 1);
  }
  if (spec.compare_exact) {
    if (dim == 1 && !vanishes(*spec.drift_expr, spec.n, 1) && !spec.psi_expr) {
      throw ConfigError("/psi", "exact comparison with a drift needs psi, b = psi'");
    }
    if (dim == 2 && !spec.potential_1d_expr) {
      throw ConfigError("/potential_1d",
                        "2-D exact comparison needs V with W(x, y) = V(x) + V(y)");
    }
  }
  return spec;
}

RunSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return parse_config(text.str());
}

std::string to_json(const RunSpec& spec, int indent) {
  const FlowConfig& cfg = spec.flow_config;
  json doc = {
      {"variant", spec.variant == Variant::Standard ? "standard" : "congestion"},
      {"dimension", spec.dimension},
      {"n", spec.n},
      {"flow", std::string(to_string(spec.flow))},
      {"potential", spec.potential},
      {"drift", spec.drift},
      {"u0", spec.u0},
      {"t_max", cfg.t_max},
      {"rtol", cfg.rtol},
      {"atol", cfg.atol},
      {"residual_stop", cfg.residual_stop},
      {"max_steps", cfg.max_steps},
      {"record_every", cfg.record_interval()},
      {"integrator", std::string(to_string(cfg.integrator))},
      {"output", spec.output},
      {"compare_exact", spec.compare_exact},
  };
  if (spec.m0_expr) doc["m0"] = spec.m0;
  if (spec.psi_expr) doc["psi"] = spec.psi;
  if (spec.potential_1d_expr) doc["potential_1d"] = spec.potential_1d;
  return doc.dump(indent);
}

}  // namespace smfg::app
