#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "smfg/diagnostics.hpp"
#include "smfg/error.hpp"
#include "smfg/flows.hpp"

using namespace smfg;
using oracle::kTwoPi;

namespace {

double sine(double x) { return std::sin(kTwoPi * x); }

ProblemData sine_problem(const PeriodicGrid& g) {
  return ProblemData(GridFunction::sample(g, [](double x) { return sine(x); }));
}

FlowConfig quick(double t_max) {
  FlowConfig cfg;
  cfg.t_max = t_max;
  cfg.rtol = 1e-6;
  cfg.atol = 1e-9;
  return cfg;
}

}  // namespace

TEST_CASE("gradient right-hand side") {
  const auto grid = PeriodicGrid::line(12);
  const ProblemData flat{GridFunction(grid)};
  const GridFunction r1 = gradient_rhs(GridFunction(grid), flat);
  for (double v : r1.values()) CHECK(v == 0.0);

  std::mt19937_64 rng(4);
  const ProblemData data(random_fourier_field(grid, rng),
                         random_fourier_field(grid, rng, 2, 0.5));
  for (int t = 0; t < 20; ++t) {
    const auto u = random_fourier_field(grid, rng, 3, 0.1);
    const auto r = gradient_rhs(u, data);
    auto w = g_apply(u, data);
    for (double& v : w.values()) v = std::exp(v);
    const auto ref = adjoint_apply(u, w, data);
    for (std::size_t k = 0; k < 12; ++k) CHECK(r[k] == doctest::Approx(-ref[k]));
    CHECK(std::abs(sum(r)) < 1e-10);

    double norm = 0.0;
    for (double v : r.values()) norm = std::max(norm, std::abs(v));
    if (norm < 1e-12) continue;
    auto moved = u;
    const double delta = 1e-5 / norm;
    for (std::size_t k = 0; k < 12; ++k) moved[k] += delta * r[k];
    CHECK(energy_phi(moved, data) < energy_phi(u, data));
  }
}

TEST_CASE("monotone right-hand side") {
  const auto grid = PeriodicGrid::line(16);
  const auto data = sine_problem(grid);
  double z = 0.0;
  for (double v : data.potential().values()) z += std::exp(v);
  z *= grid.h();
  auto m = GridFunction::sample(grid, [z](double x) { return std::exp(sine(x)) / z; });
  const auto at_solution = monotonic_rhs(m, GridFunction(grid), data);
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(std::abs(at_solution.dm[k]) < 1e-13);
    CHECK(at_solution.du[k] == 0.0);
  }
  CHECK(at_solution.hbar == doctest::Approx(std::log(z)).epsilon(1e-13));

  const ProblemData flat{GridFunction(grid)};
  const auto rest = monotonic_rhs(GridFunction(grid, 1.0), GridFunction(grid), flat);
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(rest.dm[k] == 0.0);
    CHECK(rest.du[k] == 0.0);
  }

  std::mt19937_64 rng(6);
  for (auto variant : {Variant::Standard, Variant::Congestion}) {
    const ProblemData d(random_fourier_field(grid, rng), variant);
    for (int t = 0; t < 20; ++t) {
      auto mm = random_fourier_field(grid, rng);
      for (double& v : mm.values()) v = std::exp(v);
      const auto r = monotonic_rhs(mm, random_fourier_field(grid, rng, 3, 0.5), d);
      CHECK(std::abs(sum(r.dm)) < 1e-13);
      CHECK(std::abs(sum(r.du)) < 1e-13 * 256);
    }
  }
  auto bad = GridFunction(grid, 1.0);
  bad[2] = -1.0;
  CHECK_THROWS_AS(monotonic_rhs(bad, GridFunction(grid), data), DomainError);
}

TEST_CASE("gradient flow on trivial data stays put") {
  const auto grid = PeriodicGrid::line(10);
  const auto r = solve_gradient_flow(ProblemData(GridFunction(grid)), GridFunction(grid),
                                     quick(1.0));
  CHECK(r.trajectory.stop == StopReason::Converged);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(r.state.u[k] == 0.0);
    CHECK(r.state.m[k] == doctest::Approx(1.0));
  }
  CHECK(std::abs(r.state.hbar) < 1e-15);
}

TEST_CASE("gradient flow relaxes to the exact solution on a coarse grid") {
  const auto grid = PeriodicGrid::line(25);
  const auto data = sine_problem(grid);
  const auto u0 =
      GridFunction::sample(grid, [](double x) { return 0.2 * std::cos(kTwoPi * x); });
  auto cfg = quick(1.0);
  cfg.record_every = 0.05;
  const auto r = solve_gradient_flow(data, u0, cfg);
  double umax = 0.0;
  for (double v : r.state.u.values()) umax = std::max(umax, std::abs(v));
  CHECK(umax < 1e-3);
  CHECK(r.state.hbar == doctest::Approx(std::log(oracle::bessel_i0_at_one())).epsilon(1e-3));
  require_admissible(r.state);

  const auto& s = r.trajectory.samples;
  REQUIRE(s.size() == 21);
  CHECK(r.trajectory.m_snapshots.size() == s.size());
  for (std::size_t k = 1; k < s.size(); ++k) {
    CHECK(s[k].t > s[k - 1].t);
    CHECK(s[k].phi <= s[k - 1].phi + 10 * (cfg.atol + cfg.rtol * s[k - 1].phi));
    CHECK(std::abs(s[k].sum_u) <= 1e-8 * 25 * std::max(s[k].max_abs_u, 1e-300) + 1e-300);
  }
  CHECK(run_energy_audit(r.trajectory, cfg.rtol, cfg.atol).pass);
}

TEST_CASE("gradient flow with a gradient drift approaches minus psi") {
  const double beta = 0.2;
  auto err = [&](int n) {
    const auto grid = PeriodicGrid::line(n);
    const auto data = ProblemData::from_functions(
        grid, sine, [&](double x) { return beta * std::cos(kTwoPi * x); });
    auto cfg = quick(1.0);
    cfg.rtol = 1e-5;
    cfg.atol = 1e-8;
    const auto r = solve_gradient_flow(data, GridFunction(grid), cfg);
    double minus = 0.0, plus = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double psi = beta / kTwoPi * std::sin(kTwoPi * grid.coordinate_of(k, 0));
      minus = std::max(minus, std::abs(r.state.u[k] + psi));
      plus = std::max(plus, std::abs(r.state.u[k] - psi));
    }
    return std::pair{minus, plus};
  };
  const auto [m25, p25] = err(25);
  const auto [m50, p50] = err(50);
  CHECK(m25 < 0.3 * p25);
  CHECK(m50 < m25);
  CHECK(m50 < 0.02);
}

TEST_CASE("monotone flow conserves mass and mean") {
  const auto grid = PeriodicGrid::line(20);
  const auto data = sine_problem(grid);
  // unnormalized initial density is rescaled on ingestion
  const auto m0 =
      GridFunction::sample(grid, [](double x) { return 3.0 + 0.6 * std::cos(kTwoPi * x); });
  const auto u0 =
      GridFunction::sample(grid, [](double x) { return 0.2 * std::cos(kTwoPi * x); });
  auto cfg = quick(2.0);
  cfg.record_every = 0.1;
  const auto r = solve_monotonic_flow(data, m0, u0, cfg);
  for (const auto& s : r.trajectory.samples) {
    CHECK(std::abs(s.mass - 1.0) <= 1e-8);
    CHECK(std::abs(s.sum_u) <= 1e-8 * 20 * s.max_abs_u + 1e-14);
    CHECK(s.min_m > 0.0);
  }
  CHECK(r.trajectory.samples.front().residual > r.trajectory.samples.back().residual);
  CHECK_THROWS_AS(solve_monotonic_flow(data, GridFunction(grid, 0.0), u0, cfg), DomainError);
}

TEST_CASE("monotone flow on trivial data") {
  for (auto grid : {PeriodicGrid::line(6), PeriodicGrid::square(5)}) {
    const ProblemData flat{GridFunction(grid)};
    const auto r = solve_monotonic_flow(flat, GridFunction(grid, 1.0), GridFunction(grid),
                                        quick(1.0));
    CHECK(r.trajectory.stop == StopReason::Converged);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(r.state.m[k] == doctest::Approx(1.0));
      CHECK(r.state.u[k] == 0.0);
    }
  }
}

TEST_CASE("2-D monotone flow with x-only potential matches the 1-D run") {
  const int n = 8;
  const auto sq = PeriodicGrid::square(n);
  const auto ln = PeriodicGrid::line(n);
  const ProblemData d2(GridFunction::sample(sq, [](double x, double) { return sine(x); }));
  const auto d1 = sine_problem(ln);
  auto m0 = [](double x) { return 1.0 + 0.2 * std::cos(kTwoPi * x); };
  auto u0 = [](double x) { return 0.2 * std::cos(kTwoPi * x); };
  auto cfg = quick(1.0);
  cfg.residual_stop = 0.0;
  const auto r2 = solve_monotonic_flow(
      d2, GridFunction::sample(sq, [&](double x, double) { return m0(x); }),
      GridFunction::sample(sq, [&](double x, double) { return u0(x); }), cfg);
  const auto r1 = solve_monotonic_flow(d1, GridFunction::sample(ln, m0),
                                       GridFunction::sample(ln, u0), cfg);
  for (std::size_t k = 0; k < sq.size(); ++k) {
    CHECK(r2.state.m[k] == doctest::Approx(r1.state.m[k % n]).epsilon(1e-5));
    CHECK(std::abs(r2.state.u[k] - r1.state.u[k % n]) < 1e-6);
  }
  CHECK(r2.state.hbar == doctest::Approx(r1.state.hbar).epsilon(1e-5));
}

TEST_CASE("flow preconditions") {
  const auto grid = PeriodicGrid::line(6);
  const ProblemData cong(GridFunction(grid), Variant::Congestion);
  CHECK_THROWS_AS(solve_gradient_flow(cong, GridFunction(grid), quick(1.0)), UsageError);
  const ProblemData other(GridFunction(PeriodicGrid::line(7)));
  CHECK_THROWS_AS(solve_gradient_flow(other, GridFunction(grid), quick(1.0)), UsageError);
}
