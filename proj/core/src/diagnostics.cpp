#include "smfg/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "smfg/error.hpp"
#include "smfg/operators.hpp"

namespace smfg {

namespace {

constexpr double kErrorFloor = 1e-13;

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double abs_dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] * b[k]);
  return acc;
}

GridFunction uniform_field(const PeriodicGrid& grid, std::mt19937_64& rng,
                           double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  GridFunction f(grid);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

GridFunction random_density(const PeriodicGrid& grid, std::mt19937_64& rng) {
  GridFunction m = random_fourier_field(grid, rng, 3, 1.0);
  for (double& v : m.values()) v = std::exp(v);
  const double total = mass(m);
  for (double& v : m.values()) v /= total;
  return m;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto idx = static_cast<std::size_t>(
      std::floor(q * static_cast<double>(sorted.size() - 1)));
  return sorted[idx];
}

double order(double coarse, double fine) {
  if (coarse < kErrorFloor || fine < kErrorFloor) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::log2(coarse / fine);
}

std::string format(const char* fmt, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

double SuiteReport::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  throw UsageError("suite " + suite + " has no metric " + name);
}

std::string to_json(const SuiteReport& report, int indent) {
  nlohmann::json doc;
  doc["suite"] = report.suite;
  doc["cases"] = report.cases;
  doc["pass"] = report.pass;
  doc["failures"] = nlohmann::json::array();
  for (const auto& f : report.failures) {
    doc["failures"].push_back({{"case", f.case_index},
                               {"n", f.n},
                               {"seed", f.seed},
                               {"value", number(f.value)},
                               {"bound", number(f.bound)},
                               {"detail", f.detail}});
  }
  doc["metrics"] = nlohmann::json::object();
  for (const auto& [key, value] : report.metrics) doc["metrics"][key] = number(value);
  return doc.dump(indent);
}

std::uint64_t case_seed(std::uint64_t seed, int n, std::size_t index) noexcept {
  // splitmix64 over the mixed triple
  std::uint64_t z = seed ^ (static_cast<std::uint64_t>(n) << 32) ^
                    (static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

GridFunction random_fourier_field(const PeriodicGrid& grid, std::mt19937_64& rng,
                                  int modes, double amplitude) {
  if (modes < 1) throw UsageError("random_fourier_field needs at least one mode");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double two_pi = 2.0 * std::acos(-1.0);
  GridFunction f(grid);
  const int ky_max = grid.dim() == 2 ? modes : 0;
  for (int kx = 0; kx <= modes; ++kx) {
    for (int ky = -ky_max; ky <= ky_max; ++ky) {
      // one representative of each +-k pair, excluding k = 0
      if (kx == 0 && ky <= 0) continue;
      const double k2 = static_cast<double>(kx * kx + ky * ky);
      const double a = amplitude * unit(rng) / k2;
      const double b = amplitude * unit(rng) / k2;
      for (std::size_t k = 0; k < f.size(); ++k) {
        const double x = grid.coordinate_of(k, 0);
        const double y = grid.dim() == 2 ? grid.coordinate_of(k, 1) : 0.0;
        const double arg = two_pi * (kx * x + ky * y);
        f[k] += a * std::cos(arg) + b * std::sin(arg);
      }
    }
  }
  return f;
}

SuiteReport run_adjoint_suite(std::uint64_t seed, const std::vector<int>& sizes,
                              const AdjointFunction& adjoint) {
  constexpr std::size_t kTriples = 100;
  constexpr double kTol = 1e-12;
  SuiteReport report{"adjoint", 0, true, {}, {}};
  double worst = 0.0;
  for (int n : sizes) {
    const PeriodicGrid grid = PeriodicGrid::line(n);
    for (std::size_t c = 0; c < kTriples; ++c) {
      const std::uint64_t s = case_seed(seed, n, c);
      std::mt19937_64 rng(s);
      const ProblemData data(random_fourier_field(grid, rng),
                             random_fourier_field(grid, rng, 3, 0.5));
      const GridFunction u = random_fourier_field(grid, rng, 4, 0.5);
      const GridFunction v = uniform_field(grid, rng, -1.0, 1.0);
      const GridFunction w = uniform_field(grid, rng, -1.0, 1.0);
      const GridFunction lv = linearize_apply(u, v, data);
      const GridFunction lsw = adjoint(u, w, data);
      const double gap = std::abs(dot(lv.values(), w.values()) -
                                  dot(v.values(), lsw.values()));
      const double scale =
          abs_dot(lv.values(), w.values()) + abs_dot(v.values(), lsw.values());
      const double bound = kTol * std::max(1.0, scale);
      ++report.cases;
      worst = std::max(worst, gap / std::max(1.0, scale));
      if (gap <= bound) continue;

      std::string detail = "pairings differ";
      for (std::size_t j = 0; j < grid.size(); ++j) {
        GridFunction e(grid);
        e[j] = 1.0;
        const double col = dot(linearize_apply(u, e, data).values(), w.values());
        if (std::abs(col - lsw[j]) > kTol * std::max(1.0, std::abs(col))) {
          detail = "adjoint disagrees first at node " + std::to_string(j + 1);
          break;
        }
      }
      report.pass = false;
      report.failures.push_back({c, n, s, gap, bound, detail});
    }
  }
  report.metrics.emplace_back("max_relative_gap", worst);
  return report;
}

SuiteReport run_monotonicity_suite(std::uint64_t seed,
                                   const std::vector<int>& sizes,
                                   Variant variant) {
  constexpr std::size_t kPairs = 1000;
  constexpr double kTol = 1e-12;
  const bool asserted = variant == Variant::Standard;
  SuiteReport report{asserted ? "monotonicity" : "monotonicity_congestion", 0,
                     true, {}, {}};
  std::vector<double> ratios;
  double negatives = 0.0;
  for (int n : sizes) {
    const PeriodicGrid grid = PeriodicGrid::line(n);
    for (std::size_t c = 0; c < kPairs; ++c) {
      const std::uint64_t s = case_seed(seed, n, c);
      std::mt19937_64 rng(s);
      GridFunction V = random_fourier_field(grid, rng);
      GridFunction b = asserted ? random_fourier_field(grid, rng, 3, 0.5)
                                : GridFunction(grid);
      const ProblemData data(std::move(V), std::move(b), variant);
      const GridFunction m = random_density(grid, rng);
      const GridFunction theta = random_density(grid, rng);
      const GridFunction u = random_fourier_field(grid, rng, 4, 0.5);
      const GridFunction v = random_fourier_field(grid, rng, 4, 0.5);
      const Pairing gap = monotonicity_gap(m, u, theta, v, data);
      ++report.cases;
      const double ratio = gap.scale > 0.0 ? gap.value / gap.scale : 0.0;
      ratios.push_back(ratio);
      if (gap.value < 0.0) negatives += 1.0;
      if (asserted && gap.value < -kTol * gap.scale) {
        report.pass = false;
        report.failures.push_back(
            {c, n, s, gap.value, -kTol * gap.scale, "negative monotonicity gap"});
      }
    }
  }
  std::sort(ratios.begin(), ratios.end());
  report.metrics.emplace_back("min_ratio", quantile(ratios, 0.0));
  report.metrics.emplace_back("q01_ratio", quantile(ratios, 0.01));
  report.metrics.emplace_back("q10_ratio", quantile(ratios, 0.10));
  report.metrics.emplace_back("median_ratio", quantile(ratios, 0.5));
  report.metrics.emplace_back("negative_count", negatives);
  return report;
}

ContractionResult run_contraction_test(const ProblemData& data,
                                       const MfgState& init_a,
                                       const MfgState& init_b,
                                       FlowConfig cfg) {
  constexpr double kRate = 1e-6;
  require_admissible(init_a);
  require_admissible(init_b);
  cfg.residual_stop = 0.0;
  cfg.keep_snapshots = true;
  const FlowResult a = solve_monotonic_flow(data, init_a.m, init_a.u, cfg);
  const FlowResult b = solve_monotonic_flow(data, init_b.m, init_b.u, cfg);

  ContractionResult out;
  out.report.suite = "contraction";
  const auto& ta = a.trajectory;
  const auto& tb = b.trajectory;
  const std::size_t count = std::min(ta.samples.size(), tb.samples.size());
  for (std::size_t k = 0; k < count; ++k) {
    if (ta.samples[k].t != tb.samples[k].t) {
      throw Error("contraction test: record times of the two runs differ");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < data.grid().size(); ++i) {
      const double dm = ta.m_snapshots[k][i] - tb.m_snapshots[k][i];
      const double du = ta.u_snapshots[k][i] - tb.u_snapshots[k][i];
      d += dm * dm + du * du;
    }
    out.times.push_back(ta.samples[k].t);
    out.distances.push_back(d);
  }
  double worst_rate = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < out.times.size(); ++k) {
    const double dt = out.times[k] - out.times[k - 1];
    const double rise = out.distances[k] - out.distances[k - 1];
    worst_rate = std::max(worst_rate, rise / dt);
    ++out.report.cases;
    if (rise > kRate * dt) {
      out.report.pass = false;
      out.report.failures.push_back(
          {k, data.grid().n(), 0, rise, kRate * dt,
           format("distance rose between t = %.6g and t = %.6g",
                  out.times[k - 1], out.times[k])});
    }
  }
  if (!out.distances.empty()) {
    out.report.metrics.emplace_back("initial_distance", out.distances.front());
    out.report.metrics.emplace_back("final_distance", out.distances.back());
  }
  out.report.metrics.emplace_back("max_rate", worst_rate);
  return out;
}

StudyResult run_refinement_study(const RefinementFamily& family,
                                 std::vector<int> sizes, const FlowConfig& cfg) {
  if (sizes.empty()) throw UsageError("refinement study needs at least one size");
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    if (sizes[k] <= sizes[k - 1]) {
      throw UsageError("refinement sizes must be strictly increasing");
    }
  }
  StudyResult out;
  out.sizes = sizes;
  for (int n : sizes) {
    const PeriodicGrid grid =
        family.dim == 2 ? PeriodicGrid::square(n) : PeriodicGrid::line(n);
    const ProblemData data = family.data(grid);
    const auto start = std::chrono::steady_clock::now();
    const FlowResult run = family.solve(data, cfg);
    const std::chrono::duration<double> wall =
        std::chrono::steady_clock::now() - start;
    out.errors.push_back(error_report(run.state, family.exact(grid)));
    double sq = 0.0;
    for (double v : run.state.u.values()) sq += v * v;
    out.mean_u_squared.push_back(sq / static_cast<double>(grid.size()));
    out.hbar.push_back(run.state.hbar);
    out.final_residual.push_back(run.residual.max());
    out.wall_seconds.push_back(wall.count());
  }

  out.m_decreasing = true;
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    const ErrorReport& c = out.errors[k - 1];
    const ErrorReport& f = out.errors[k];
    out.orders_u.push_back(order(c.u_linf, f.u_linf));
    out.orders_m.push_back(order(c.m_linf, f.m_linf));
    out.orders_hbar.push_back(order(c.hbar_err, f.hbar_err));
    const bool both_tiny = c.m_linf < kErrorFloor && f.m_linf < kErrorFloor;
    if (!(f.m_linf < c.m_linf) && !both_tiny) out.m_decreasing = false;
  }

  auto bounded = [](const std::vector<double>& q) {
    const double cap = 10.0 * (1.0 + std::abs(q.front()));
    return std::all_of(q.begin(), q.end(),
                       [cap](double v) { return std::abs(v) <= cap; });
  };
  out.bounded = bounded(out.mean_u_squared) && bounded(out.hbar);
  out.pass = out.m_decreasing && out.bounded;
  return out;
}

SuiteReport run_energy_audit(const Trajectory& trajectory, double rtol,
                             double atol) {
  SuiteReport report{"energy", 0, true, {}, {}};
  double worst = -std::numeric_limits<double>::infinity();
  const auto& s = trajectory.samples;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double slack = 10.0 * (atol + rtol * s[k - 1].phi);
    const double rise = s[k].phi - s[k - 1].phi;
    worst = std::max(worst, rise);
    ++report.cases;
    if (rise > slack) {
      report.pass = false;
      report.failures.push_back(
          {k, 0, 0, rise, slack,
           format("phi rose between t = %.6g and t = %.6g", s[k - 1].t, s[k].t)});
    }
  }
  report.metrics.emplace_back("max_rise", worst);
  return report;
}

}  // namespace smfg
