#pragma once

#include <functional>
#include <span>
#include <vector>

#include "smfg/grid.hpp"

namespace smfg {

enum class Variant { Standard, Congestion };

/// Sampled coefficients of one stationary MFG instance.
///
/// In 2-D the potential plays the role of W(x, y). Congestion and 2-D
/// problems carry no drift; the constructor rejects a nonzero one.
class ProblemData {
 public:
  ProblemData(GridFunction potential, GridFunction drift,
              Variant variant = Variant::Standard);
  /// Drift-free problem.
  explicit ProblemData(GridFunction potential,
                       Variant variant = Variant::Standard);

  static ProblemData from_functions(PeriodicGrid grid,
                                    const std::function<double(double)>& V,
                                    const std::function<double(double)>& b,
                                    Variant variant = Variant::Standard);

  const PeriodicGrid& grid() const noexcept { return potential_.grid(); }
  const GridFunction& potential() const noexcept { return potential_; }
  const GridFunction& drift() const noexcept { return drift_; }
  Variant variant() const noexcept { return variant_; }

 private:
  GridFunction potential_;
  GridFunction drift_;
  Variant variant_;
};

/// Partial derivatives (dF/dp, dF/dq) of the numerical Hamiltonian.
struct GradPair {
  double dp = 0.0;
  double dq = 0.0;
};

/// Quadratic part: 1/2 max{p, q, 0}^2.
double fq(StencilPair s) noexcept;

/// Gradient of fq. The larger slot carries max{p,q,0}; a tie p == q > 0
/// goes to the p slot and the kink at max == 0 gets the zero subgradient.
GradPair fq_grad(StencilPair s) noexcept;

struct DriftTerm {
  double value = 0.0;
  GradPair grad;
};

/// Upwinded drift part: -b p when b <= 0, b q otherwise.
DriftTerm fd_and_grad(StencilPair s, double b) noexcept;

/// Discrete Hamilton-Jacobi operator G(u)_k = sum over axes of
/// F^Q + F^D at the node stencil, plus the potential.
GridFunction g_apply(const GridFunction& u, const ProblemData& data);

/// Linearization of G at u applied to v.
GridFunction linearize_apply(const GridFunction& u, const GridFunction& v,
                             const ProblemData& data);

/// Transpose of the linearization at u applied to w; the discrete
/// Fokker-Planck operator. Its entries always sum to zero.
GridFunction adjoint_apply(const GridFunction& u, const GridFunction& w,
                           const ProblemData& data);

struct CongestionTerms {
  GridFunction hj;  // F^Q(psi(u)) / sqrt(m) + V
  GridFunction fp;  // adjoint at u applied to sqrt(m)
};

/// Hamilton-Jacobi and Fokker-Planck blocks of the congestion model.
/// Throws DomainError unless m > 0 everywhere.
CongestionTerms congestion_terms(const GridFunction& u, const GridFunction& m,
                                 const ProblemData& data);

/// Span-level kernels shared by the operators and the flows. Gradients are
/// laid out node-major: grad[k * dim + axis].
namespace kernel {

/// Fills g with G(u) and grad with the slot derivatives at every node.
void evaluate(const ProblemData& data, std::span<const double> u,
              std::span<double> g, std::span<GradPair> grad);

/// (L_u v) from precomputed gradients.
void linearized(const PeriodicGrid& grid, std::span<const GradPair> grad,
                std::span<const double> v, std::span<double> out);

/// (L*_u w) from precomputed gradients.
void adjoint(const PeriodicGrid& grid, std::span<const GradPair> grad,
             std::span<const double> w, std::span<double> out);

}  // namespace kernel

}  // namespace smfg
