#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace smfg {

/// Uniform periodic grid on the unit torus, in one or two dimensions.
///
/// Nodes sit at x_i = i/n for i = 1..n (per axis). Storage is 0-based:
/// flat index k holds node i = k + 1 in 1-D; in 2-D the flat index is
/// (i-1) + n*(j-1), i.e. x runs fastest. The mesh width is always derived
/// from n and never stored.
class PeriodicGrid {
 public:
  static PeriodicGrid line(int n) { return PeriodicGrid(1, n); }
  static PeriodicGrid square(int n) { return PeriodicGrid(2, n); }

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / n_; }
  /// h^dim, the weight of one node in discrete integrals.
  double cell_volume() const noexcept { return dim_ == 1 ? h() : h() * h(); }
  std::size_t size() const noexcept {
    return dim_ == 1 ? static_cast<std::size_t>(n_)
                     : static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }

  /// Coordinate of 1-based node index i along one axis.
  double coordinate(int i) const noexcept { return static_cast<double>(i) / n_; }
  /// Coordinate along `axis` of the node stored at flat index k.
  double coordinate_of(std::size_t k, int axis) const noexcept;

  /// Flat index of the neighbour of k one step along `axis` in direction
  /// `dir` (+1 or -1), with periodic wraparound.
  std::size_t neighbor(std::size_t k, int axis, int dir) const noexcept;

  /// Maps an arbitrary 1-based index onto 1..n (0 -> n, n+1 -> 1).
  int wrap(long i) const noexcept;

  bool operator==(const PeriodicGrid&) const = default;

 private:
  PeriodicGrid(int dim, int n);
  int dim_;
  int n_;
};

/// Nodal values of a periodic function on a PeriodicGrid.
class GridFunction {
 public:
  explicit GridFunction(PeriodicGrid grid, double fill = 0.0);
  GridFunction(PeriodicGrid grid, std::vector<double> values);

  /// Samples f at every node. In 1-D the second argument is 0.
  static GridFunction sample(PeriodicGrid grid,
                             const std::function<double(double, double)>& f);
  static GridFunction sample(PeriodicGrid grid,
                             const std::function<double(double)>& f);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }

  /// 1-D access by 1-based node index with periodic wraparound.
  double at_node(long i) const;

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

/// Forward and backward difference quotients at one node.
struct StencilPair {
  double p = 0.0;  // (u_i - u_{i+1}) / h
  double q = 0.0;  // (u_i - u_{i-1}) / h
};

/// Stencil at 1-based node i of a 1-D function. Throws UsageError when i is
/// outside 1..n or the function is not 1-D.
StencilPair stencil(const GridFunction& u, int i);

/// Stencil along `axis` at flat index k (any dimension).
StencilPair stencil_at(const PeriodicGrid& grid, std::span<const double> u,
                       std::size_t k, int axis) noexcept;

/// h^dim * sum(f).
double mass(const GridFunction& f);

double sum(const GridFunction& f);

/// Subtracts the arithmetic mean so that the values sum to zero.
GridFunction mean_zero_project(const GridFunction& u);
void mean_zero_project_in_place(std::span<double> u);

struct Norms {
  double l2 = 0.0;    // sqrt(h^dim * sum f^2)
  double linf = 0.0;  // max |f|
};
Norms norms(const GridFunction& f);

/// Norms of a raw vector with the node weight of `grid`.
Norms norms(const PeriodicGrid& grid, std::span<const double> f);

void require_same_grid(const GridFunction& a, const GridFunction& b,
                       const char* what);

}  // namespace smfg
