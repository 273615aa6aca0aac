#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "smfg/app/expr.hpp"
#include "smfg/error.hpp"
#include "smfg/hamiltonian.hpp"
#include "smfg/ode.hpp"

namespace smfg::app {

enum class FlowKind { Gradient, Monotone };

std::string_view to_string(FlowKind kind) noexcept;

/// Schema violation; pointer() is the JSON pointer of the offending field.
class ConfigError : public UsageError {
 public:
  ConfigError(std::string pointer, const std::string& message);
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A validated run configuration. Expression fields keep their source text
/// next to the parsed tree.
struct RunSpec {
  Variant variant = Variant::Standard;
  int dimension = 1;
  int n = 0;
  FlowKind flow = FlowKind::Gradient;

  std::string potential;
  std::string drift = "0";
  std::string u0 = "0";
  std::string m0;            // required for the monotone flow
  std::string psi;           // drift antiderivative, for exact comparison
  std::string potential_1d;  // V with W(x, y) = V(x) + V(y), 2-D comparison

  ExprPtr potential_expr;
  ExprPtr drift_expr;
  ExprPtr u0_expr;
  ExprPtr m0_expr;
  ExprPtr psi_expr;
  ExprPtr potential_1d_expr;

  FlowConfig flow_config;
  std::string output = "smfg_output";
  bool compare_exact = false;
};

/// Parses and validates a JSON document. Unknown keys are rejected.
/// Required: n, potential, flow, t_max, and m0 when flow is "monotone".
RunSpec parse_config(std::string_view json_text);

/// Reads the file and parses it; throws IoError when it cannot be read.
RunSpec load_config(const std::filesystem::path& path);

/// The run config as a JSON document with every default filled in.
std::string to_json(const RunSpec& spec, int indent = 2);

}  // namespace smfg::app
