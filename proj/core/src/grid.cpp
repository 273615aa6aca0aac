#include "smfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "smfg/error.hpp"

namespace smfg {

PeriodicGrid::PeriodicGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) {
    throw UsageError("grid dimension must be 1 or 2");
  }
  if (n < 3) {
    throw UsageError("grid needs at least 3 nodes per axis, got " +
                     std::to_string(n));
  }
}

double PeriodicGrid::coordinate_of(std::size_t k, int axis) const noexcept {
  const auto n = static_cast<std::size_t>(n_);
  const std::size_t i = axis == 0 ? k % n : k / n;
  return static_cast<double>(i + 1) / n_;
}

std::size_t PeriodicGrid::neighbor(std::size_t k, int axis,
                                   int dir) const noexcept {
  const auto n = static_cast<std::size_t>(n_);
  if (axis == 0) {
    const std::size_t i = k % n;
    const std::size_t row = k - i;
    const std::size_t j = dir > 0 ? (i + 1 == n ? 0 : i + 1)
                                  : (i == 0 ? n - 1 : i - 1);
    return row + j;
  }
  const std::size_t i = k % n;
  const std::size_t r = k / n;
  const std::size_t s = dir > 0 ? (r + 1 == n ? 0 : r + 1)
                                : (r == 0 ? n - 1 : r - 1);
  return s * n + i;
}

int PeriodicGrid::wrap(long i) const noexcept {
  const long n = n_;
  long r = (i - 1) % n;
  if (r < 0) r += n;
  return static_cast<int>(r + 1);
}

GridFunction::GridFunction(PeriodicGrid grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

GridFunction::GridFunction(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw UsageError("grid function has " + std::to_string(values_.size()) +
                     " values, grid has " + std::to_string(grid_.size()) +
                     " nodes");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw DomainError("grid function value at index " + std::to_string(k) +
                        " is not finite");
    }
  }
}

GridFunction GridFunction::sample(
    PeriodicGrid grid, const std::function<double(double, double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double x = grid.coordinate_of(k, 0);
    const double y = grid.dim() == 2 ? grid.coordinate_of(k, 1) : 0.0;
    v[k] = f(x, y);
  }
  return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::sample(PeriodicGrid grid,
                                  const std::function<double(double)>& f) {
  return sample(grid, [&f](double x, double) { return f(x); });
}

double GridFunction::at_node(long i) const {
  if (grid_.dim() != 1) throw UsageError("at_node requires a 1-D function");
  return values_[static_cast<std::size_t>(grid_.wrap(i) - 1)];
}

StencilPair stencil(const GridFunction& u, int i) {
  const auto& g = u.grid();
  if (g.dim() != 1) throw UsageError("stencil requires a 1-D function");
  if (i < 1 || i > g.n()) {
    throw UsageError("stencil index " + std::to_string(i) +
                     " outside 1.." + std::to_string(g.n()));
  }
  return stencil_at(g, u.values(), static_cast<std::size_t>(i - 1), 0);
}

StencilPair stencil_at(const PeriodicGrid& grid, std::span<const double> u,
                       std::size_t k, int axis) noexcept {
  const double inv_h = grid.n();
  const double c = u[k];
  return {(c - u[grid.neighbor(k, axis, +1)]) * inv_h,
          (c - u[grid.neighbor(k, axis, -1)]) * inv_h};
}

double sum(const GridFunction& f) {
  return std::accumulate(f.values().begin(), f.values().end(), 0.0);
}

double mass(const GridFunction& f) { return f.grid().cell_volume() * sum(f); }

void mean_zero_project_in_place(std::span<double> u) {
  if (u.empty()) return;
  const double mean =
      std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(u.size());
  for (double& v : u) v -= mean;
}

GridFunction mean_zero_project(const GridFunction& u) {
  GridFunction out = u;
  mean_zero_project_in_place(out.values());
  return out;
}

Norms norms(const PeriodicGrid& grid, std::span<const double> f) {
  double ss = 0.0;
  double mx = 0.0;
  for (double v : f) {
    ss += v * v;
    mx = std::max(mx, std::abs(v));
  }
  return {std::sqrt(grid.cell_volume() * ss), mx};
}

Norms norms(const GridFunction& f) { return norms(f.grid(), f.values()); }

void require_same_grid(const GridFunction& a, const GridFunction& b,
                       const char* what) {
  if (!(a.grid() == b.grid())) {
    throw UsageError(std::string(what) + ": grid functions live on different grids");
  }
}

}  // namespace smfg
