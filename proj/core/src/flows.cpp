#include "smfg/flows.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smfg/error.hpp"

namespace smfg {

namespace {

/// Scratch buffers for right-hand-side evaluations of one solve.
class FlowKernel {
 public:
  explicit FlowKernel(const ProblemData& data)
      : data_(data),
        g_(data.grid().size()),
        w_(data.grid().size()),
        grad_(data.grid().size() * data.grid().dim()) {}

  void gradient(std::span<const double> u, std::span<double> du) {
    kernel::evaluate(data_, u, g_, grad_);
    for (std::size_t k = 0; k < g_.size(); ++k) w_[k] = std::exp(g_[k]);
    kernel::adjoint(data_.grid(), grad_, w_, du);
    for (double& v : du) v = -v;
  }

  /// Fills both rates and returns the shift H(t).
  double monotone(std::span<const double> m, std::span<const double> u,
                  std::span<double> dm, std::span<double> du) {
    kernel::evaluate(data_, u, g_, grad_);
    const auto V = data_.potential().values();
    const bool congestion = data_.variant() == Variant::Congestion;
    double total = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      double hj = g_[k];
      if (congestion) {
        w_[k] = std::sqrt(m[k]);
        hj = (g_[k] - V[k]) / w_[k] + V[k];
      } else {
        w_[k] = m[k];
      }
      dm[k] = hj - std::log(m[k]);
      total += dm[k];
    }
    const double shift = total / static_cast<double>(m.size());
    for (double& v : dm) v -= shift;
    kernel::adjoint(data_.grid(), grad_, w_, du);
    for (double& v : du) v = -v;
    return shift;
  }

 private:
  const ProblemData& data_;
  std::vector<double> g_;
  std::vector<double> w_;
  std::vector<GradPair> grad_;
};

double max_abs(std::span<const double> v) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  return mx;
}

TrajectorySample describe(double t, const MfgState& s, const ProblemData& data,
                          double phi) {
  TrajectorySample out;
  out.t = t;
  out.phi = phi;
  out.residual = residual(s, data).max();
  out.mass = mass(s.m);
  out.sum_u = sum(s.u);
  out.max_abs_u = max_abs(s.u.values());
  out.hbar = s.hbar;
  out.min_m = *std::min_element(s.m.values().begin(), s.m.values().end());
  return out;
}

void push(Trajectory& traj, const FlowConfig& cfg, TrajectorySample sample,
          const MfgState& s) {
  traj.samples.push_back(sample);
  if (cfg.keep_snapshots) {
    traj.m_snapshots.push_back(s.m);
    traj.u_snapshots.push_back(s.u);
  }
}

MfgState monotone_state(const PeriodicGrid& grid, std::span<const double> y,
                        const ProblemData& data) {
  const std::size_t n = grid.size();
  GridFunction m(grid, std::vector<double>(y.begin(), y.begin() + n));
  GridFunction u(grid, std::vector<double>(y.begin() + n, y.end()));
  const double hbar = hbar_rate(m, u, data);
  return {std::move(m), std::move(u), hbar};
}

}  // namespace

GridFunction gradient_rhs(const GridFunction& u, const ProblemData& data) {
  require_same_grid(u, data.potential(), "gradient_rhs");
  FlowKernel kern(data);
  GridFunction out(data.grid());
  kern.gradient(u.values(), out.values());
  return out;
}

MonotoneRate monotonic_rhs(const GridFunction& m, const GridFunction& u,
                           const ProblemData& data) {
  require_same_grid(m, u, "monotonic_rhs");
  require_same_grid(u, data.potential(), "monotonic_rhs");
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k] > 0.0)) throw DomainError("monotonic_rhs: density must be positive");
  }
  FlowKernel kern(data);
  MonotoneRate out{GridFunction(data.grid()), GridFunction(data.grid()), 0.0};
  out.hbar = kern.monotone(m.values(), u.values(), out.dm.values(),
                           out.du.values());
  return out;
}

FlowResult solve_gradient_flow(const ProblemData& data, const GridFunction& u0,
                               const FlowConfig& cfg) {
  if (data.variant() != Variant::Standard) {
    throw UsageError("the gradient flow needs the standard variant");
  }
  require_same_grid(u0, data.potential(), "solve_gradient_flow");
  const PeriodicGrid grid = data.grid();

  FlowKernel kern(data);
  Trajectory traj;
  OdeSystem sys;
  sys.rhs = [&kern](std::span<const double> y, std::span<double> dy) {
    kern.gradient(y, dy);
  };
  sys.project = [](std::span<double> y) { mean_zero_project_in_place(y); };
  auto state_of = [&](std::span<const double> y) {
    return state_from_u(GridFunction(grid, std::vector<double>(y.begin(), y.end())),
                        data);
  };
  if (cfg.residual_stop > 0.0) {
    sys.steady = [&](double, std::span<const double> y) {
      return residual(state_of(y), data).max() <= cfg.residual_stop;
    };
  }
  sys.record = [&](double t, std::span<const double> y) {
    const MfgState s = state_of(y);
    push(traj, cfg, describe(t, s, data, std::exp(s.hbar)), s);
  };

  auto run = integrate(sys, std::vector<double>(u0.vector()), cfg);
  traj.stats = run.stats;
  traj.stop = run.stop;
  MfgState state = state_of(run.y);
  Residual res = residual(state, data);
  return {std::move(state), res, std::move(traj)};
}

FlowResult solve_monotonic_flow(const ProblemData& data, const GridFunction& m0,
                                const GridFunction& u0, const FlowConfig& cfg) {
  require_same_grid(m0, data.potential(), "solve_monotonic_flow");
  require_same_grid(u0, data.potential(), "solve_monotonic_flow");
  const PeriodicGrid grid = data.grid();
  const std::size_t n = grid.size();

  const double m_mass = mass(m0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(m0[k] > 0.0)) {
      throw DomainError("initial density must be positive everywhere");
    }
  }
  std::vector<double> y0(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    y0[k] = m0[k] / m_mass;
    y0[n + k] = u0[k];
  }

  FlowKernel kern(data);
  Trajectory traj;
  OdeSystem sys;
  sys.positive_prefix = n;
  sys.rhs = [&kern, n](std::span<const double> y, std::span<double> dy) {
    kern.monotone(y.first(n), y.subspan(n), dy.first(n), dy.subspan(n));
  };
  sys.project = [n](std::span<double> y) {
    mean_zero_project_in_place(y.subspan(n));
  };
  if (cfg.residual_stop > 0.0) {
    sys.steady = [&](double, std::span<const double> y) {
      return residual(monotone_state(grid, y, data), data).max() <=
             cfg.residual_stop;
    };
  }
  sys.record = [&](double t, std::span<const double> y) {
    const MfgState s = monotone_state(grid, y, data);
    push(traj, cfg, describe(t, s, data, energy_phi(s.u, data)), s);
  };

  auto run = integrate(sys, std::move(y0), cfg);
  traj.stats = run.stats;
  traj.stop = run.stop;
  MfgState state = monotone_state(grid, run.y, data);
  Residual res = residual(state, data);
  return {std::move(state), res, std::move(traj)};
}

}  // namespace smfg
