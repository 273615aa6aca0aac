#include "smfg/ode.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "smfg/error.hpp"

namespace smfg {

std::string_view to_string(IntegratorKind kind) noexcept {
  switch (kind) {
    case IntegratorKind::AdaptiveExplicitRK: return "rk45";
    case IntegratorKind::ImplicitEuler: return "implicit_euler";
  }
  return "?";
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::Horizon: return "horizon";
    case StopReason::Converged: return "converged";
    case StopReason::MaxSteps: return "max_steps";
  }
  return "?";
}

void FlowConfig::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw UsageError("t_max must be positive");
  }
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw UsageError("rtol and atol must be positive");
  }
  if (!(residual_stop >= 0.0)) throw UsageError("residual_stop must be >= 0");
  if (max_steps <= 0) throw UsageError("max_steps must be positive");
  if (record_every < 0.0) throw UsageError("record_every must be >= 0");
  if (initial_step < 0.0) throw UsageError("initial_step must be >= 0");
}

namespace {

constexpr double kMinStep = 1e-14;
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

using Vec = std::vector<double>;

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

bool prefix_positive(std::span<const double> v, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    if (!(v[k] > 0.0)) return false;
  }
  return true;
}

/// max_i |e_i| / (atol + rtol * max(|a_i|, |b_i|)); NaN propagates as +inf.
double scaled_max(std::span<const double> e, std::span<const double> a,
                  std::span<const double> b, double atol, double rtol) {
  double worst = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double sc = atol + rtol * std::max(std::abs(a[k]), std::abs(b[k]));
    const double r = std::abs(e[k]) / sc;
    if (!(r <= worst)) worst = std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
  }
  return worst;
}

struct StepOutcome {
  bool accepted = false;
  bool positivity = false;  // rejection caused by the positivity guard
  double factor = 0.5;      // next step = factor * attempted step
};

/// Stepper interface: attempts one step of size h from (y, f).
class Stepper {
 public:
  Stepper(const OdeSystem& sys, const FlowConfig& cfg, IntegratorStats& stats)
      : sys_(sys), cfg_(cfg), stats_(stats) {}
  virtual ~Stepper() = default;
  virtual StepOutcome attempt(const Vec& y, const Vec& f, double h,
                              Vec& y_new) = 0;

 protected:
  bool eval(std::span<const double> y, std::span<double> out) {
    ++stats_.rhs_evals;
    sys_.rhs(y, out);
    return finite(out);
  }
  bool admissible(std::span<const double> y) const {
    return finite(y) && prefix_positive(y, sys_.positive_prefix);
  }

  const OdeSystem& sys_;
  const FlowConfig& cfg_;
  IntegratorStats& stats_;
};

class DormandPrince final : public Stepper {
 public:
  DormandPrince(const OdeSystem& sys, const FlowConfig& cfg,
                IntegratorStats& stats, std::size_t n)
      : Stepper(sys, cfg, stats), tmp_(n), err_(n) {
    for (auto& k : k_) k.assign(n, 0.0);
  }

  StepOutcome attempt(const Vec& y, const Vec& f, double h,
                      Vec& y_new) override {
    static constexpr double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
         -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
         11.0 / 84}};
    static constexpr double e[7] = {71.0 / 57600,   0.0,         -71.0 / 16695,
                                    71.0 / 1920,    -17253.0 / 339200,
                                    22.0 / 525,     -1.0 / 40};
    const std::size_t n = y.size();
    k_[0] = f;
    for (int s = 1; s < 7; ++s) {
      Vec& stage = s == 6 ? y_new : tmp_;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += a[s][j] * k_[j][i];
        stage[i] = y[i] + h * acc;
      }
      if (!admissible(stage)) return {false, true, 0.5};
      if (!eval(stage, k_[s])) return {false, false, 0.5};
    }
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 7; ++j) acc += e[j] * k_[j][i];
      err_[i] = h * acc;
    }
    const double err = scaled_max(err_, y, y_new, cfg_.atol, cfg_.rtol);
    if (!std::isfinite(err)) return {false, false, 0.5};
    // PI controller (Gustafsson), exponents as in DOPRI5.
    constexpr double beta = 0.04;
    const double en = std::max(err, 1e-10);
    if (err > 1.0) {
      const double shrink = kSafety * std::pow(en, -0.2);
      return {false, false, std::clamp(shrink, kMinFactor, 0.9)};
    }
    const double grow =
        kSafety * std::pow(en, -(0.2 - 0.75 * beta)) * std::pow(err_prev_, beta);
    err_prev_ = std::max(err, 1e-4);
    return {true, false, std::clamp(grow, kMinFactor, kMaxFactor)};
  }

  /// Slope at the accepted state (first-same-as-last).
  const Vec& last_slope() const { return k_[6]; }

 private:
  Vec k_[7];
  Vec tmp_;
  Vec err_;
  double err_prev_ = 1e-4;
};

class BackwardEuler final : public Stepper {
 public:
  BackwardEuler(const OdeSystem& sys, const FlowConfig& cfg,
                IntegratorStats& stats, std::size_t n)
      : Stepper(sys, cfg, stats), n_(n), f1_(n), ftrial_(n), trial_(n),
        resid_(n), jac_(n, n) {}

  StepOutcome attempt(const Vec& y, const Vec& f, double h,
                      Vec& y_new) override {
    // Explicit Euler predictor, falling back to the current state.
    for (std::size_t i = 0; i < n_; ++i) y_new[i] = y[i] + h * f[i];
    if (!admissible(y_new)) y_new = y;
    if (!eval(y_new, f1_)) return {false, false, 0.5};

    bool refreshed = false;
    if (!have_jacobian_) {
      refresh_jacobian(y_new, f1_);
      refreshed = true;
    }
    factorize(h);

    bool converged = false;
    for (int iter = 0; iter < 12 && !converged; ++iter) {
      ++stats_.newton_iterations;
      residual(y, y_new, f1_, h, resid_);
      if (scaled_max(resid_, y_new, y_new, cfg_.atol, cfg_.rtol) <= 1e-2) {
        converged = true;
        break;
      }
      const double r0 = norm(resid_);
      Eigen::Map<const Eigen::VectorXd> rhs(resid_.data(),
                                            static_cast<Eigen::Index>(n_));
      const Eigen::VectorXd delta = -lu_.solve(rhs);
      double lambda = 1.0;
      bool moved = false;
      for (int damp = 0; damp < 12; ++damp, lambda *= 0.5) {
        for (std::size_t i = 0; i < n_; ++i) {
          trial_[i] = y_new[i] + lambda * delta[static_cast<Eigen::Index>(i)];
        }
        if (!admissible(trial_) || !eval(trial_, ftrial_)) continue;
        residual(y, trial_, ftrial_, h, resid_);
        if (norm(resid_) < r0 || r0 == 0.0) {
          moved = true;
          break;
        }
      }
      if (!moved) {
        if (refreshed) return {false, false, 0.5};
        refresh_jacobian(y_new, f1_);
        refreshed = true;
        factorize(h);
        continue;
      }
      double step_size = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double sc = cfg_.atol + cfg_.rtol * std::abs(trial_[i]);
        step_size = std::max(step_size, std::abs(trial_[i] - y_new[i]) / sc);
      }
      std::swap(y_new, trial_);
      std::swap(f1_, ftrial_);
      converged = step_size <= 1e-2;
      if (!converged && iter == 5 && !refreshed) {
        refresh_jacobian(y_new, f1_);
        refreshed = true;
        factorize(h);
      }
    }
    if (!converged) {
      have_jacobian_ = false;
      return {false, false, 0.5};
    }
    // Local error of backward Euler ~ (h/2) * (f(y1) - f(y0)).
    for (std::size_t i = 0; i < n_; ++i) resid_[i] = 0.5 * h * (f1_[i] - f[i]);
    const double err = scaled_max(resid_, y, y_new, cfg_.atol, cfg_.rtol);
    if (!std::isfinite(err)) return {false, false, 0.5};
    const double factor =
        err == 0.0 ? kMaxFactor
                   : std::clamp(kSafety / std::sqrt(err), kMinFactor, kMaxFactor);
    if (err > 1.0) return {false, false, std::min(factor, 0.9)};
    return {true, false, factor};
  }

 private:
  static double norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }

  void residual(const Vec& y0, const Vec& y1, const Vec& f1, double h,
                Vec& out) const {
    for (std::size_t i = 0; i < n_; ++i) out[i] = y1[i] - y0[i] - h * f1[i];
  }

  void refresh_jacobian(const Vec& y, const Vec& fy) {
    ++stats_.jacobian_evals;
    Vec yp = y;
    Vec fp(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      // Forward differences keep positive components positive.
      const double d = std::sqrt(std::numeric_limits<double>::epsilon()) *
                 std::max(std::abs(y[j]), 1e-2);
      yp[j] = y[j] + d;
      ++stats_.rhs_evals;
      sys_.rhs(yp, fp);
      for (std::size_t i = 0; i < n_; ++i) {
        jac_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (fp[i] - fy[i]) / d;
      }
      yp[j] = y[j];
    }
    have_jacobian_ = true;
  }

  void factorize(double h) {
    Eigen::MatrixXd m = -h * jac_;
    m.diagonal().array() += 1.0;
    lu_.compute(m);
  }

  std::size_t n_;
  Vec f1_, ftrial_, trial_, resid_;
  Eigen::MatrixXd jac_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  bool have_jacobian_ = false;
};

double initial_step(const OdeSystem& sys, const FlowConfig& cfg, const Vec& y,
                    const Vec& f, IntegratorStats& stats) {
  if (cfg.initial_step > 0.0) return cfg.initial_step;
  double d0 = 0.0;
  double d1 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
    d0 = std::max(d0, std::abs(y[i]) / sc);
    d1 = std::max(d1, std::abs(f[i]) / sc);
  }
  if (d1 <= 1e-15) return cfg.t_max;
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, cfg.t_max);
  // One explicit Euler probe to estimate the second derivative.
  Vec y1(y.size());
  Vec f1(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) y1[i] = y[i] + h0 * f[i];
  if (!prefix_positive(y1, sys.positive_prefix) || !finite(y1)) return h0;
  ++stats.rhs_evals;
  sys.rhs(y1, f1);
  if (!finite(f1)) return h0;
  double d2 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
    d2 = std::max(d2, std::abs(f1[i] - f[i]) / sc / h0);
  }
  const double h1 = std::max(d1, d2) <= 1e-15
                        ? std::max(1e-6, h0 * 1e-3)
                        : std::pow(0.01 / std::max(d1, d2), 0.2);
  return std::min({100.0 * h0, h1, cfg.t_max});
}

}  // namespace

IntegrationResult integrate(const OdeSystem& system, std::vector<double> y0,
                            const FlowConfig& cfg) {
  cfg.validate();
  if (!system.rhs) throw UsageError("integrate: missing right-hand side");
  if (system.positive_prefix > y0.size()) {
    throw UsageError("integrate: positive prefix longer than the state");
  }
  if (!finite(y0)) throw DivergenceError("initial state is not finite", 0.0);
  if (!prefix_positive(y0, system.positive_prefix)) {
    throw DomainError("initial state violates positivity");
  }

  IntegrationResult out;
  auto& stats = out.stats;
  const std::size_t n = y0.size();
  Vec y = std::move(y0);
  if (system.project) system.project(y);

  Vec f(n);
  auto slope = [&](double t) {
    ++stats.rhs_evals;
    system.rhs(y, f);
    if (!finite(f)) {
      throw DivergenceError(
          "right-hand side is not finite at t = " + std::to_string(t), t);
    }
  };
  slope(0.0);

  std::optional<DormandPrince> rk;
  std::optional<BackwardEuler> be;
  Stepper* stepper = nullptr;
  if (cfg.integrator == IntegratorKind::AdaptiveExplicitRK) {
    stepper = &rk.emplace(system, cfg, stats, n);
  } else {
    stepper = &be.emplace(system, cfg, stats, n);
  }

  const double interval = cfg.record_interval();
  long next_record = 1;
  auto record_time = [&](long k) {
    const double r = static_cast<double>(k) * interval;
    return r >= cfg.t_max * (1.0 - 1e-12) ? cfg.t_max : r;
  };

  double t = 0.0;
  double last_recorded = 0.0;
  if (system.record) system.record(0.0, y);

  double h = initial_step(system, cfg, y, f, stats);
  Vec y_new(n);
  bool last_rejected = false;
  out.stop = StopReason::Horizon;
  while (t < cfg.t_max) {
    if (stats.steps >= cfg.max_steps) {
      out.stop = StopReason::MaxSteps;
      break;
    }
    const double target = record_time(next_record);
    const double remaining = target - t;
    const bool landing = h >= remaining;
    const double h_try = landing ? remaining : h;

    StepOutcome step = stepper->attempt(y, f, h_try, y_new);
    if (step.accepted && last_rejected) step.factor = std::min(step.factor, 1.0);
    last_rejected = !step.accepted;
    if (!step.accepted) {
      ++stats.rejected;
      if (step.positivity) ++stats.positivity_rejections;
      h = h_try * step.factor;
      if (h < kMinStep) {
        throw StiffnessError(
            "step size underflow at t = " + std::to_string(t), t);
      }
      continue;
    }

    ++stats.steps;
    t = landing ? target : t + h_try;
    std::swap(y, y_new);
    if (system.project) {
      system.project(y);
      slope(t);
    } else if (rk) {
      f = rk->last_slope();
    } else {
      slope(t);
    }
    double h_next = h_try * step.factor;
    // A step shortened to hit a record time says nothing about the scale.
    if (landing && h > h_try) h_next = std::max(h_next, h);
    h = h_next;

    if (landing) {
      if (system.record) system.record(t, y);
      last_recorded = t;
      ++next_record;
    }
    if (system.steady && system.steady(t, y)) {
      out.stop = StopReason::Converged;
      break;
    }
  }
  if (system.record && t > last_recorded) system.record(t, y);
  out.y = std::move(y);
  out.t = t;
  return out;
}

}  // namespace smfg
