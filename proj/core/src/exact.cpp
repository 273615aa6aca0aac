#include "smfg/exact.hpp"

#include <cmath>
#include <string>

#include "smfg/error.hpp"

namespace smfg {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::ZeroMeanDrift: return "zero_mean_drift";
    case Provenance::GradientDrift: return "gradient_drift";
    case Provenance::Congestion: return "congestion";
    case Provenance::Separable2D: return "separable_2d";
  }
  return "unknown";
}

namespace {

double checked(const RealFunction& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw QuadratureError("integrand is not finite at x = " + std::to_string(x));
  }
  return v;
}

void require_dim(const PeriodicGrid& grid, int dim, const char* what) {
  if (grid.dim() != dim) {
    throw UsageError(std::string(what) + " needs a " + std::to_string(dim) +
                     "-D grid");
  }
}

}  // namespace

double quadrature(const RealFunction& f, double tol) {
  if (!(tol > 0.0)) throw UsageError("quadrature tolerance must be positive");
  long n = 16;
  double acc = 0.0;
  for (long i = 0; i < n; ++i) acc += checked(f, static_cast<double>(i) / n);
  double estimate = acc / n;
  int agreements = 0;
  for (int doubling = 0; doubling < 24; ++doubling) {
    double mid = 0.0;
    for (long i = 0; i < n; ++i) mid += checked(f, (i + 0.5) / n);
    acc += mid;
    n *= 2;
    const double next = acc / n;
    agreements = std::abs(next - estimate) < tol ? agreements + 1 : 0;
    estimate = next;
    if (agreements == 2) return estimate;
  }
  throw QuadratureError("trapezoid rule did not settle to " +
                        std::to_string(tol) + " after 24 doublings");
}

ExactSolution exact_zero_drift(const RealFunction& V, const PeriodicGrid& grid) {
  require_dim(grid, 1, "exact_zero_drift");
  const double z = quadrature([&](double x) { return std::exp(V(x)); });
  GridFunction m = GridFunction::sample(grid, [&](double x) {
    return std::exp(V(x)) / z;
  });
  return {GridFunction(grid), std::move(m), std::log(z),
          Provenance::ZeroMeanDrift};
}

ExactSolution exact_gradient_drift(const RealFunction& psi,
                                   const RealFunction& psi_x,
                                   const RealFunction& V,
                                   const PeriodicGrid& grid) {
  require_dim(grid, 1, "exact_gradient_drift");
  auto density = [&](double x) {
    const double b = psi_x(x);
    return std::exp(V(x) - 0.5 * b * b);
  };
  const double z = quadrature(density);
  GridFunction m =
      GridFunction::sample(grid, [&](double x) { return density(x) / z; });
  GridFunction u = GridFunction::sample(grid, [&](double x) { return -psi(x); });
  return {std::move(u), std::move(m), std::log(z), Provenance::GradientDrift};
}

ExactSolution exact_congestion(const RealFunction& V, const PeriodicGrid& grid) {
  ExactSolution s = exact_zero_drift(V, grid);
  s.provenance = Provenance::Congestion;
  return s;
}

ExactSolution exact_2d_separable(const RealFunction& V,
                                 const PeriodicGrid& grid) {
  require_dim(grid, 2, "exact_2d_separable");
  const double z = quadrature([&](double x) { return std::exp(V(x)); });
  GridFunction m = GridFunction::sample(grid, [&](double x, double y) {
    return std::exp(V(x)) / z * (std::exp(V(y)) / z);
  });
  return {GridFunction(grid), std::move(m), 2.0 * std::log(z),
          Provenance::Separable2D};
}

ErrorReport error_report(const MfgState& state, const ExactSolution& exact) {
  require_same_grid(state.u, exact.u, "error_report");
  require_same_grid(state.m, exact.m, "error_report");
  const PeriodicGrid& grid = state.u.grid();
  std::vector<double> du(grid.size());
  std::vector<double> dm(grid.size());
  for (std::size_t k = 0; k < du.size(); ++k) {
    du[k] = state.u[k] - exact.u[k];
    dm[k] = state.m[k] - exact.m[k];
  }
  const Norms nu = norms(grid, du);
  const Norms nm = norms(grid, dm);
  return {nu.linf, nu.l2, nm.linf, nm.l2, std::abs(state.hbar - exact.hbar)};
}

}  // namespace smfg
