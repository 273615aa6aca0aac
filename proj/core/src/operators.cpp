#include "smfg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "smfg/error.hpp"

namespace smfg {

namespace {

void require_positive(const GridFunction& m, const char* what) {
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k] > 0.0)) {
      throw DomainError(std::string(what) + ": density must be positive, entry " +
                        std::to_string(k) + " is " + std::to_string(m[k]));
    }
  }
}

double log_sum_exp(std::span<const double> g) {
  const double top = *std::max_element(g.begin(), g.end());
  double acc = 0.0;
  for (double v : g) acc += std::exp(v - top);
  return top + std::log(acc);
}

/// Returns the first block (with the log term) and second block of A.
OperatorBlocks blocks(const GridFunction& m, const GridFunction& u,
                      const ProblemData& data) {
  require_same_grid(m, u, "a_apply");
  require_same_grid(u, data.potential(), "a_apply");
  require_positive(m, "a_apply");
  if (data.variant() == Variant::Congestion) {
    auto terms = congestion_terms(u, m, data);
    for (std::size_t k = 0; k < m.size(); ++k) {
      terms.hj[k] = -terms.hj[k] + std::log(m[k]);
    }
    return {std::move(terms.hj), std::move(terms.fp)};
  }
  GridFunction g = g_apply(u, data);
  for (std::size_t k = 0; k < m.size(); ++k) g[k] = -g[k] + std::log(m[k]);
  return {std::move(g), adjoint_apply(u, m, data)};
}

}  // namespace

void require_admissible(const MfgState& state) {
  require_same_grid(state.m, state.u, "MfgState");
  require_positive(state.m, "MfgState");
  const double mass_err = std::abs(mass(state.m) - 1.0);
  if (mass_err > 1e-8) {
    throw DomainError("MfgState: mass is off by " + std::to_string(mass_err));
  }
  const auto uv = state.u.values();
  double umax = 0.0;
  for (double v : uv) umax = std::max(umax, std::abs(v));
  const double s = std::abs(sum(state.u));
  if (s > 1e-8 * static_cast<double>(uv.size()) * umax) {
    throw DomainError("MfgState: u is not mean-zero (sum " + std::to_string(s) +
                      ")");
  }
}

OperatorBlocks a_apply(const GridFunction& m, const GridFunction& u,
                       const ProblemData& data) {
  return blocks(m, u, data);
}

double Residual::max() const noexcept {
  return std::max({hj_linf, hj_l2, fp_linf, fp_l2});
}

Residual residual(const MfgState& state, const ProblemData& data) {
  auto a = blocks(state.m, state.u, data);
  for (std::size_t k = 0; k < a.hj.size(); ++k) a.hj[k] += state.hbar;
  const Norms hj = norms(a.hj);
  const Norms fp = norms(a.fp);
  return {hj.linf, hj.l2, fp.linf, fp.l2};
}

double energy_phi(const GridFunction& u, const ProblemData& data) {
  const GridFunction g = g_apply(u, data);
  double acc = 0.0;
  for (double v : g.values()) acc += std::exp(v);
  return data.grid().cell_volume() * acc;
}

GridFunction phi_gradient(const GridFunction& u, const ProblemData& data) {
  GridFunction w = g_apply(u, data);
  for (double& v : w.values()) v = std::exp(v);
  GridFunction out = adjoint_apply(u, w, data);
  for (double& v : out.values()) v *= data.grid().cell_volume();
  return out;
}

double hbar_from_u(const GridFunction& u, const ProblemData& data) {
  const GridFunction g = g_apply(u, data);
  return std::log(data.grid().cell_volume()) + log_sum_exp(g.values());
}

MfgState state_from_u(const GridFunction& u, const ProblemData& data) {
  GridFunction m = g_apply(u, data);
  const double hbar =
      std::log(data.grid().cell_volume()) + log_sum_exp(m.values());
  for (double& v : m.values()) v = std::exp(v - hbar);
  return {std::move(m), u, hbar};
}

double hbar_rate(const GridFunction& m, const GridFunction& u,
                 const ProblemData& data) {
  const auto a = blocks(m, u, data);
  // a.hj = -(G - ln m); the rate is the mean of G - ln m.
  const auto v = a.hj.values();
  return -std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

Pairing variational_inequality(const MfgState& state, const GridFunction& theta,
                               const GridFunction& v, const ProblemData& data) {
  require_same_grid(state.m, theta, "variational_inequality");
  require_same_grid(state.u, v, "variational_inequality");
  auto a = blocks(theta, v, data);
  Pairing out;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double first = a.hj[k] + state.hbar;
    const double dm = theta[k] - state.m[k];
    const double du = v[k] - state.u[k];
    out.value += first * dm + a.fp[k] * du;
    out.scale += std::abs(first * dm) + std::abs(a.fp[k] * du);
  }
  return out;
}

Pairing monotonicity_gap(const GridFunction& m, const GridFunction& u,
                         const GridFunction& theta, const GridFunction& v,
                         const ProblemData& data) {
  require_same_grid(m, theta, "monotonicity_gap");
  require_same_grid(u, v, "monotonicity_gap");
  const auto a = blocks(m, u, data);
  const auto b = blocks(theta, v, data);
  Pairing out;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double t1 = (a.hj[k] - b.hj[k]) * (m[k] - theta[k]);
    const double t2 = (a.fp[k] - b.fp[k]) * (u[k] - v[k]);
    out.value += t1 + t2;
    out.scale += std::abs(t1) + std::abs(t2);
  }
  return out;
}

}  // namespace smfg
