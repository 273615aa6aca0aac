#pragma once

#include "smfg/grid.hpp"
#include "smfg/hamiltonian.hpp"

namespace smfg {

/// Density, value function and effective Hamiltonian of a discrete MFG.
struct MfgState {
  GridFunction m;
  GridFunction u;
  double hbar = 0.0;
};

/// Throws DomainError if m has a nonpositive entry, mass(m) is off by more
/// than 1e-8, or sum(u) exceeds 1e-8 * n * max|u|.
void require_admissible(const MfgState& state);

/// The two blocks of the coupled operator A[m; u].
struct OperatorBlocks {
  GridFunction hj;  // -G(u) + ln m   (congestion: -hj + ln m)
  GridFunction fp;  // L*_u m         (congestion: L*_u sqrt(m))
};

/// Evaluates A[m; u]. Throws DomainError unless m > 0 everywhere.
OperatorBlocks a_apply(const GridFunction& m, const GridFunction& u,
                       const ProblemData& data);

struct Residual {
  double hj_linf = 0.0;
  double hj_l2 = 0.0;
  double fp_linf = 0.0;
  double fp_l2 = 0.0;

  /// Largest of the four norms; used as the steady-state test.
  double max() const noexcept;
};

/// Norms of -G(u) + ln m + hbar and of L*_u m at the given state.
Residual residual(const MfgState& state, const ProblemData& data);

/// phi(u) = h^dim * sum exp(G(u)). Convex in u.
double energy_phi(const GridFunction& u, const ProblemData& data);

/// Gradient of energy_phi: h^dim * L*_u exp(G(u)).
GridFunction phi_gradient(const GridFunction& u, const ProblemData& data);

/// ln(h^dim * sum exp(G(u))), the constant that gives exp(G(u) - hbar)
/// unit mass.
double hbar_from_u(const GridFunction& u, const ProblemData& data);

/// Builds the normalized state (exp(G(u) - hbar), u, hbar) from a critical
/// point of energy_phi.
MfgState state_from_u(const GridFunction& u, const ProblemData& data);

/// Mean of G(u) - ln m (congestion: of hj - ln m). Subtracting it from the
/// density rate of the monotone flow makes that rate sum to zero; at a
/// solution it equals the effective Hamiltonian.
double hbar_rate(const GridFunction& m, const GridFunction& u,
                 const ProblemData& data);

/// A Euclidean pairing and the magnitude of the terms that went into it,
/// so callers can judge rounding.
struct Pairing {
  double value = 0.0;
  double scale = 0.0;
};

/// <A[theta; v] + [hbar; 0], [theta; v] - [m; u]>. Nonnegative for every
/// admissible test pair exactly when the state solves the stationary
/// system. Throws DomainError unless theta > 0.
Pairing variational_inequality(const MfgState& state, const GridFunction& theta,
                               const GridFunction& v, const ProblemData& data);

/// <A[m; u] - A[theta; v], [m; u] - [theta; v]>, nonnegative for the
/// standard variant.
Pairing monotonicity_gap(const GridFunction& m, const GridFunction& u,
                         const GridFunction& theta, const GridFunction& v,
                         const ProblemData& data);

}  // namespace smfg
