#pragma once

#include <functional>
#include <string_view>

#include "smfg/grid.hpp"
#include "smfg/operators.hpp"

namespace smfg {

enum class Provenance { ZeroMeanDrift, GradientDrift, Congestion, Separable2D };

std::string_view to_string(Provenance p) noexcept;

/// A closed-form stationary solution sampled on a grid.
struct ExactSolution {
  GridFunction u;
  GridFunction m;
  double hbar = 0.0;
  Provenance provenance = Provenance::ZeroMeanDrift;

  MfgState state() const { return {m, u, hbar}; }
};

using RealFunction = std::function<double(double)>;

/// Integral over [0, 1] of a smooth 1-periodic f by the trapezoid rule on
/// 16, 32, 64, ... nodes. Returns once two consecutive refinements change
/// the estimate by less than tol. Throws QuadratureError after 24 doublings
/// or on a non-finite sample.
double quadrature(const RealFunction& f, double tol = 1e-12);

/// u = 0, m = e^V / Z, hbar = ln Z with Z the integral of e^V.
ExactSolution exact_zero_drift(const RealFunction& V, const PeriodicGrid& grid);

/// Drift b = psi'. u = -psi, m = e^{V - psi'^2/2} / Z, hbar = ln Z.
/// psi must have zero mean.
ExactSolution exact_gradient_drift(const RealFunction& psi,
                                   const RealFunction& psi_x,
                                   const RealFunction& V,
                                   const PeriodicGrid& grid);

/// The congestion model shares the zero-drift solution.
ExactSolution exact_congestion(const RealFunction& V, const PeriodicGrid& grid);

/// Potential W(x, y) = V(x) + V(y) on a square grid: w = 0,
/// theta = e^{V(x)} e^{V(y)} / Z^2, hbar = 2 ln Z.
ExactSolution exact_2d_separable(const RealFunction& V,
                                 const PeriodicGrid& grid);

struct ErrorReport {
  double u_linf = 0.0;
  double u_l2 = 0.0;
  double m_linf = 0.0;
  double m_l2 = 0.0;
  double hbar_err = 0.0;
};

/// Norms of state - exact; no mean-zero normalization is applied to u.
ErrorReport error_report(const MfgState& state, const ExactSolution& exact);

}  // namespace smfg
