#include "smfg/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smfg/error.hpp"

namespace smfg {

namespace {

bool identically_zero(const GridFunction& f) {
  return std::all_of(f.values().begin(), f.values().end(),
                     [](double v) { return v == 0.0; });
}

}  // namespace

ProblemData::ProblemData(GridFunction potential, GridFunction drift,
                         Variant variant)
    : potential_(std::move(potential)),
      drift_(std::move(drift)),
      variant_(variant) {
  require_same_grid(potential_, drift_, "ProblemData");
  if (!identically_zero(drift_)) {
    if (variant_ == Variant::Congestion) {
      throw UsageError("the congestion model takes no drift");
    }
    if (grid().dim() != 1) {
      throw UsageError("2-D problems take no drift");
    }
  }
}

ProblemData::ProblemData(GridFunction potential, Variant variant)
    : ProblemData(potential, GridFunction(potential.grid()), variant) {}

ProblemData ProblemData::from_functions(PeriodicGrid grid,
                                        const std::function<double(double)>& V,
                                        const std::function<double(double)>& b,
                                        Variant variant) {
  return ProblemData(GridFunction::sample(grid, V),
                     GridFunction::sample(grid, b), variant);
}

double fq(StencilPair s) noexcept {
  const double m = std::max({s.p, s.q, 0.0});
  return 0.5 * m * m;
}

GradPair fq_grad(StencilPair s) noexcept {
  const double m = std::max({s.p, s.q, 0.0});
  if (m == 0.0) return {};
  if (s.p >= s.q) return {m, 0.0};
  return {0.0, m};
}

DriftTerm fd_and_grad(StencilPair s, double b) noexcept {
  if (b <= 0.0) return {-b * s.p, {-b, 0.0}};
  return {b * s.q, {0.0, b}};
}

namespace kernel {

void evaluate(const ProblemData& data, std::span<const double> u,
              std::span<double> g, std::span<GradPair> grad) {
  const auto& grid = data.grid();
  const int dim = grid.dim();
  const auto V = data.potential().values();
  const auto b = data.drift().values();
  for (std::size_t k = 0; k < u.size(); ++k) {
    double acc = V[k];
    for (int axis = 0; axis < dim; ++axis) {
      const StencilPair s = stencil_at(grid, u, k, axis);
      GradPair d = fq_grad(s);
      acc += fq(s);
      if (dim == 1) {
        const DriftTerm fd = fd_and_grad(s, b[k]);
        acc += fd.value;
        d.dp += fd.grad.dp;
        d.dq += fd.grad.dq;
      }
      grad[k * dim + axis] = d;
    }
    g[k] = acc;
  }
}

void linearized(const PeriodicGrid& grid, std::span<const GradPair> grad,
                std::span<const double> v, std::span<double> out) {
  const int dim = grid.dim();
  for (std::size_t k = 0; k < v.size(); ++k) {
    double acc = 0.0;
    for (int axis = 0; axis < dim; ++axis) {
      const StencilPair s = stencil_at(grid, v, k, axis);
      const GradPair& d = grad[k * dim + axis];
      acc += d.dp * s.p + d.dq * s.q;
    }
    out[k] = acc;
  }
}

void adjoint(const PeriodicGrid& grid, std::span<const GradPair> grad,
             std::span<const double> w, std::span<double> out) {
  const int dim = grid.dim();
  const double inv_h = grid.n();
  for (std::size_t k = 0; k < w.size(); ++k) {
    double acc = 0.0;
    for (int axis = 0; axis < dim; ++axis) {
      const std::size_t prev = grid.neighbor(k, axis, -1);
      const std::size_t next = grid.neighbor(k, axis, +1);
      const GradPair& here = grad[k * dim + axis];
      acc += -grad[prev * dim + axis].dp * w[prev] +
             (here.dp + here.dq) * w[k] - grad[next * dim + axis].dq * w[next];
    }
    out[k] = acc * inv_h;
  }
}

}  // namespace kernel

namespace {

struct Evaluated {
  std::vector<double> g;
  std::vector<GradPair> grad;
};

Evaluated evaluate(const GridFunction& u, const ProblemData& data) {
  require_same_grid(u, data.potential(), "hamiltonian");
  const auto& grid = data.grid();
  Evaluated e{std::vector<double>(grid.size()),
              std::vector<GradPair>(grid.size() * grid.dim())};
  kernel::evaluate(data, u.values(), e.g, e.grad);
  return e;
}

}  // namespace

GridFunction g_apply(const GridFunction& u, const ProblemData& data) {
  auto e = evaluate(u, data);
  return GridFunction(data.grid(), std::move(e.g));
}

GridFunction linearize_apply(const GridFunction& u, const GridFunction& v,
                             const ProblemData& data) {
  require_same_grid(u, v, "linearize_apply");
  const auto e = evaluate(u, data);
  GridFunction out(data.grid());
  kernel::linearized(data.grid(), e.grad, v.values(), out.values());
  return out;
}

GridFunction adjoint_apply(const GridFunction& u, const GridFunction& w,
                           const ProblemData& data) {
  require_same_grid(u, w, "adjoint_apply");
  const auto e = evaluate(u, data);
  GridFunction out(data.grid());
  kernel::adjoint(data.grid(), e.grad, w.values(), out.values());
  return out;
}

CongestionTerms congestion_terms(const GridFunction& u, const GridFunction& m,
                                 const ProblemData& data) {
  require_same_grid(u, m, "congestion_terms");
  const auto e = evaluate(u, data);
  const auto V = data.potential().values();
  std::vector<double> root(m.size());
  std::vector<double> hj(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k] > 0.0)) {
      throw DomainError("congestion terms need m > 0; m[" + std::to_string(k) +
                        "] = " + std::to_string(m[k]));
    }
    root[k] = std::sqrt(m[k]);
    // b is zero for congestion problems, so g - V is exactly the F^Q sum.
    hj[k] = (e.g[k] - V[k]) / root[k] + V[k];
  }
  GridFunction fp(data.grid());
  kernel::adjoint(data.grid(), e.grad, root, fp.values());
  return {GridFunction(data.grid(), std::move(hj)), std::move(fp)};
}

}  // namespace smfg
