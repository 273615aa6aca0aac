#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace smfg {

enum class IntegratorKind { AdaptiveExplicitRK, ImplicitEuler };

enum class StopReason { Horizon, Converged, MaxSteps };

std::string_view to_string(IntegratorKind kind) noexcept;
std::string_view to_string(StopReason reason) noexcept;

/// Time-stepping controls shared by both flows.
struct FlowConfig {
  double t_max = 1.0;
  double rtol = 1e-6;
  double atol = 1e-9;
  /// Stop once the stationary residual (max norm) drops to this level.
  /// Zero disables early stopping.
  double residual_stop = 1e-9;
  long max_steps = 50'000'000;
  /// Sampling interval of the trajectory; zero means t_max / 100.
  double record_every = 0.0;
  IntegratorKind integrator = IntegratorKind::AdaptiveExplicitRK;
  /// First trial step; zero picks one from the initial slope.
  double initial_step = 0.0;
  /// Keep full field snapshots at every record time.
  bool keep_snapshots = true;

  /// Throws UsageError on nonsensical values.
  void validate() const;
  double record_interval() const noexcept {
    return record_every > 0.0 ? record_every : t_max / 100.0;
  }
};

/// Autonomous system y' = f(y) plus the hooks the flows need.
struct OdeSystem {
  std::function<void(std::span<const double> y, std::span<double> dydt)> rhs;
  /// The first `positive_prefix` components must stay strictly positive;
  /// any trial step (or stage) violating this is rejected and halved.
  std::size_t positive_prefix = 0;
  /// Applied to every accepted state.
  std::function<void(std::span<double> y)> project;
  /// Checked after every accepted step; returning true ends the run.
  std::function<bool(double t, std::span<const double> y)> steady;
  /// Called at t = 0, at each multiple of the record interval, and at the
  /// final time.
  std::function<void(double t, std::span<const double> y)> record;
};

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  long positivity_rejections = 0;
  long rhs_evals = 0;
  long newton_iterations = 0;
  long jacobian_evals = 0;
};

struct IntegrationResult {
  std::vector<double> y;
  double t = 0.0;
  StopReason stop = StopReason::Horizon;
  IntegratorStats stats;
};

/// Integrates from t = 0 to cfg.t_max (or until `steady` fires or
/// cfg.max_steps steps were taken).
///
/// The explicit method is the Dormand-Prince 5(4) pair with FSAL; a step is
/// accepted iff every component satisfies |err_i| <= atol + rtol*|y_i|. The
/// implicit method is backward Euler solved by damped Newton on a
/// finite-difference Jacobian, with the local error estimated from the
/// change in slope across the step.
///
/// Throws StiffnessError when the step falls below 1e-14 and
/// DivergenceError when an accepted state yields a non-finite slope.
IntegrationResult integrate(const OdeSystem& system, std::vector<double> y0,
                            const FlowConfig& cfg);

}  // namespace smfg
