#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "smfg/exact.hpp"
#include "smfg/flows.hpp"
#include "smfg/grid.hpp"
#include "smfg/hamiltonian.hpp"

namespace smfg {

/// One failing case of a suite, reproducible from its seed.
struct CaseFailure {
  std::size_t case_index = 0;
  int n = 0;
  std::uint64_t seed = 0;
  double value = 0.0;  // the violating quantity
  double bound = 0.0;  // what it had to stay within
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::size_t cases = 0;
  bool pass = true;
  std::vector<CaseFailure> failures;
  /// Named summary numbers (extreme values, quantiles, ...).
  std::vector<std::pair<std::string, double>> metrics;

  double metric(const std::string& name) const;
};

/// JSON document with keys suite, cases, pass, failures, metrics.
std::string to_json(const SuiteReport& report, int indent = 2);

/// Seed of case `index` at grid size `n`, derived from the suite seed.
std::uint64_t case_seed(std::uint64_t seed, int n, std::size_t index) noexcept;

/// Truncated Fourier series sum_k (a_k cos 2 pi k.x + b_k sin 2 pi k.x) with
/// |a_k|, |b_k| <= amplitude / |k|^2, over wave numbers 1..modes per axis.
GridFunction random_fourier_field(const PeriodicGrid& grid, std::mt19937_64& rng,
                                  int modes = 3, double amplitude = 1.0);

using AdjointFunction = std::function<GridFunction(
    const GridFunction& u, const GridFunction& w, const ProblemData& data)>;

/// Checks |<L_u v, w> - <v, L*_u w>| <= 1e-12 max(1, scale) on 100 random
/// triples (with random potential and drift) per 1-D size. A failing case
/// names the first column of the adjoint that disagrees.
SuiteReport run_adjoint_suite(std::uint64_t seed, const std::vector<int>& sizes,
                              const AdjointFunction& adjoint = adjoint_apply);

/// Draws 1000 random positive pairs per 1-D size and evaluates the
/// monotonicity gap. The standard variant fails on any gap below
/// -1e-12 * scale; the congestion variant only records the distribution of
/// gap / scale (min and quantiles) and always passes.
SuiteReport run_monotonicity_suite(std::uint64_t seed,
                                   const std::vector<int>& sizes,
                                   Variant variant = Variant::Standard);

struct ContractionResult {
  SuiteReport report;
  std::vector<double> times;
  std::vector<double> distances;  // squared Euclidean distance of (m, u)
};

/// Runs the monotone flow from both initial pairs with identical record
/// times and requires d(t_{k+1}) <= d(t_k) + 1e-6 (t_{k+1} - t_k).
/// Early stopping is disabled. Throws DomainError if an initial pair is not
/// admissible (positive unit-mass density, mean-zero u).
ContractionResult run_contraction_test(const ProblemData& data,
                                       const MfgState& init_a,
                                       const MfgState& init_b,
                                       FlowConfig cfg);

/// A family of problems with a known solution, indexed by grid size.
struct RefinementFamily {
  std::function<ProblemData(const PeriodicGrid&)> data;
  std::function<ExactSolution(const PeriodicGrid&)> exact;
  std::function<FlowResult(const ProblemData&, const FlowConfig&)> solve;
  int dim = 1;
};

struct StudyResult {
  std::vector<int> sizes;
  std::vector<ErrorReport> errors;
  /// log2 of consecutive error ratios; NaN where an error is below 1e-13.
  std::vector<double> orders_u;
  std::vector<double> orders_m;
  std::vector<double> orders_hbar;
  std::vector<double> mean_u_squared;  // (1/N) sum u_i^2
  std::vector<double> hbar;
  std::vector<double> final_residual;
  std::vector<double> wall_seconds;
  bool m_decreasing = false;
  bool bounded = false;
  bool pass = false;
};

/// Solves the family at each size and compares with its exact solution.
/// Passes iff m_linf strictly decreases (errors below 1e-13 count as equal
/// and acceptable) and both (1/N) sum u_i^2 and |hbar| stay below
/// 10 (1 + their value at the smallest size).
StudyResult run_refinement_study(const RefinementFamily& family,
                                 std::vector<int> sizes, const FlowConfig& cfg);

/// Flags every recorded phi increase beyond 10 (atol + rtol phi).
SuiteReport run_energy_audit(const Trajectory& trajectory, double rtol,
                             double atol);

}  // namespace smfg
