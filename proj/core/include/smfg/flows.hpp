#pragma once

#include <vector>

#include "smfg/grid.hpp"
#include "smfg/hamiltonian.hpp"
#include "smfg/ode.hpp"
#include "smfg/operators.hpp"

namespace smfg {

/// Diagnostics of the flow at one record time.
struct TrajectorySample {
  double t = 0.0;
  double phi = 0.0;            // energy_phi(u)
  double residual = 0.0;       // stationary residual, max of the four norms
  double mass = 0.0;           // h^dim * sum(m)
  double sum_u = 0.0;          // sum(u)
  double max_abs_u = 0.0;
  double hbar = 0.0;           // H(t) for the monotone flow, ln(phi) otherwise
  double min_m = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  /// Filled when FlowConfig::keep_snapshots is set; one per sample.
  std::vector<GridFunction> m_snapshots;
  std::vector<GridFunction> u_snapshots;
  IntegratorStats stats;
  StopReason stop = StopReason::Horizon;
};

struct FlowResult {
  MfgState state;
  Residual residual;
  Trajectory trajectory;
};

/// -L*_u exp(G(u)): the gradient flow of energy_phi up to the constant
/// factor h^dim, which only rescales time.
GridFunction gradient_rhs(const GridFunction& u, const ProblemData& data);

struct MonotoneRate {
  GridFunction dm;
  GridFunction du;
  double hbar = 0.0;  // the mass-preserving shift H(t)
};

/// dm = G(u) - ln m - H(t), du = -L*_u m, with H(t) = hbar_rate(m, u).
/// For congestion data the blocks come from congestion_terms.
MonotoneRate monotonic_rhs(const GridFunction& m, const GridFunction& u,
                           const ProblemData& data);

/// Runs the gradient flow from u0 (projected to mean zero) and normalizes
/// the limit. Standard variant only.
FlowResult solve_gradient_flow(const ProblemData& data, const GridFunction& u0,
                               const FlowConfig& cfg);

/// Runs the monotone flow from (m0, u0); m0 is rescaled to unit mass and u0
/// projected to mean zero. Works in 1-D and 2-D and for both variants.
FlowResult solve_monotonic_flow(const ProblemData& data, const GridFunction& m0,
                                const GridFunction& u0, const FlowConfig& cfg);

}  // namespace smfg
