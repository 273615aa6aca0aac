#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "smfg/diagnostics.hpp"
#include "smfg/error.hpp"
#include "smfg/operators.hpp"

using namespace smfg;
using oracle::kTwoPi;

namespace {

GridFunction line(std::vector<double> v) {
  const int n = static_cast<int>(v.size());
  return GridFunction(PeriodicGrid::line(n), std::move(v));
}

ProblemData sine_problem(int n) {
  return ProblemData(GridFunction::sample(
      PeriodicGrid::line(n), [](double x) { return std::sin(kTwoPi * x); }));
}

/// Exact discrete solution of the drift-free problem: u = 0, m = e^V / (h sum e^V).
MfgState discrete_solution(const ProblemData& data) {
  const auto& V = data.potential();
  double z = 0.0;
  for (double v : V.values()) z += std::exp(v);
  z *= data.grid().cell_volume();
  GridFunction m(data.grid());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = std::exp(V[k]) / z;
  return {m, GridFunction(data.grid()), std::log(z)};
}

GridFunction positive_density(const PeriodicGrid& g, std::mt19937_64& rng) {
  auto m = random_fourier_field(g, rng);
  for (double& v : m.values()) v = std::exp(v);
  const double total = mass(m);
  for (double& v : m.values()) v /= total;
  return m;
}

}  // namespace

TEST_CASE("a_apply at the discrete solution") {
  const auto data = sine_problem(20);
  const auto s = discrete_solution(data);
  const auto a = a_apply(s.m, s.u, data);
  for (std::size_t k = 0; k < 20; ++k) {
    CHECK(a.hj[k] == doctest::Approx(-s.hbar).epsilon(1e-13));
    CHECK(a.fp[k] == 0.0);
  }
  const ProblemData flat(GridFunction(PeriodicGrid::line(5)));
  const auto z = a_apply(GridFunction(PeriodicGrid::line(5), 1.0),
                         GridFunction(PeriodicGrid::line(5)), flat);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(z.hj[k] == 0.0);
    CHECK(z.fp[k] == 0.0);
  }
}

TEST_CASE("a_apply matches the written-out formulas") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  std::uniform_real_distribution<double> pos(0.1, 2);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> u(4), V(4), b(4), m(4);
    for (int k = 0; k < 4; ++k) {
      u[k] = d(rng);
      V[k] = d(rng);
      b[k] = d(rng);
      m[k] = pos(rng);
    }
    const ProblemData data(line(V), line(b));
    const auto a = a_apply(line(m), line(u), data);
    const auto g = oracle::g_1d(u, V, b);
    const auto L = oracle::linearization_matrix(u, b);
    const auto fp = oracle::transpose_vec(L, m);
    for (int k = 0; k < 4; ++k) {
      CHECK(a.hj[k] == doctest::Approx(-g[k] + std::log(m[k])));
      CHECK(a.fp[k] == doctest::Approx(fp[k]).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(a_apply(line({1, 0, 1, 1}), line({0, 0, 0, 0}),
                          ProblemData(line({0, 0, 0, 0}))),
                  DomainError);
}

TEST_CASE("residual") {
  const auto data = sine_problem(30);
  auto s = discrete_solution(data);
  const auto r = residual(s, data);
  CHECK(r.max() <= 1e-12);
  CHECK(r.hj_l2 >= 0.0);

  auto perturbed = s;
  perturbed.u[4] += 1e-3;
  CHECK(residual(perturbed, data).max() > 1e-6);

  // stencils kill constants
  std::mt19937_64 rng(9);
  auto q = s;
  q.u = random_fourier_field(data.grid(), rng, 3, 0.5);
  const auto r1 = residual(q, data);
  for (double& v : q.u.values()) v += 3.7;
  const auto r2 = residual(q, data);
  CHECK(r1.hj_linf == doctest::Approx(r2.hj_linf).epsilon(1e-9));
  CHECK(r1.fp_linf == doctest::Approx(r2.fp_linf).epsilon(1e-9));
}

TEST_CASE("admissibility") {
  const auto data = sine_problem(12);
  const auto s = discrete_solution(data);
  CHECK_NOTHROW(require_admissible(s));
  auto heavy = s;
  for (double& v : heavy.m.values()) v *= 1.001;
  CHECK_THROWS_AS(require_admissible(heavy), DomainError);
  auto shifted = s;
  shifted.u = GridFunction(data.grid(), 0.0);
  shifted.u[0] = 1.0;
  CHECK_THROWS_AS(require_admissible(shifted), DomainError);
}

TEST_CASE("energy and normalization") {
  const auto g5 = PeriodicGrid::line(5);
  CHECK(energy_phi(GridFunction(g5), ProblemData(GridFunction(g5))) ==
        doctest::Approx(1.0));

  const auto data = sine_problem(100);
  const double phi = energy_phi(GridFunction(data.grid()), data);
  CHECK(phi == doctest::Approx(oracle::bessel_i0_at_one()).epsilon(1e-12));
  CHECK(hbar_from_u(GridFunction(data.grid()), data) ==
        doctest::Approx(std::log(oracle::bessel_i0_at_one())).epsilon(1e-12));
  CHECK(hbar_from_u(GridFunction(g5), ProblemData(GridFunction(g5))) ==
        doctest::Approx(0.0));

  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto u = random_fourier_field(data.grid(), rng, 4, 0.05);
    auto shifted = u;
    for (double& v : shifted.values()) v -= 1.25;
    CHECK(energy_phi(shifted, data) == doctest::Approx(energy_phi(u, data)).epsilon(1e-12));
    CHECK(hbar_from_u(shifted, data) ==
          doctest::Approx(hbar_from_u(u, data)).epsilon(1e-12));
    const auto s = state_from_u(u, data);
    CHECK(mass(s.m) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("phi is convex along random segments") {
  std::mt19937_64 rng(13);
  const auto grid = PeriodicGrid::line(16);
  const ProblemData data(random_fourier_field(grid, rng),
                         random_fourier_field(grid, rng, 2, 0.5));
  for (int t = 0; t < 200; ++t) {
    const auto u = random_fourier_field(grid, rng, 4, 0.2);
    const auto v = random_fourier_field(grid, rng, 4, 0.2);
    GridFunction mid(grid);
    for (std::size_t k = 0; k < 16; ++k) mid[k] = 0.5 * (u[k] + v[k]);
    const double lhs = energy_phi(mid, data);
    const double rhs = 0.5 * (energy_phi(u, data) + energy_phi(v, data));
    CHECK(lhs <= rhs * (1 + 1e-14));
  }
}

TEST_CASE("phi gradient") {
  const auto grid = PeriodicGrid::line(16);
  const ProblemData flat{GridFunction(grid)};
  const GridFunction r1 = phi_gradient(GridFunction(grid), flat);
  for (double v : r1.values()) CHECK(v == 0.0);

  std::mt19937_64 rng(21);
  const ProblemData data(random_fourier_field(grid, rng),
                         random_fourier_field(grid, rng, 2, 0.5));
  for (int t = 0; t < 10; ++t) {
    const auto u = random_fourier_field(grid, rng, 3, 0.02);
    const auto grad = phi_gradient(u, data);
    CHECK(std::abs(sum(grad)) < 1e-12);
    const auto fd = oracle::fd_gradient(
        [&](const std::vector<double>& x) {
          return energy_phi(GridFunction(grid, x), data);
        },
        u.vector(), 1e-6);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
      num = std::max(num, std::abs(grad[k] - fd[k]));
      den = std::max(den, std::abs(fd[k]));
    }
    CHECK(num <= 1e-6 * den);
  }
}

TEST_CASE("hbar_rate") {
  const auto data = sine_problem(10);
  CHECK(std::abs(hbar_rate(GridFunction(data.grid(), 1.0), GridFunction(data.grid()),
                           data)) < 1e-15);
  const auto g = PeriodicGrid::line(7);
  CHECK(hbar_rate(GridFunction(g, 1.0), GridFunction(g), ProblemData(GridFunction(g))) ==
        0.0);

  const auto s = discrete_solution(data);
  CHECK(hbar_rate(s.m, s.u, data) == doctest::Approx(s.hbar).epsilon(1e-13));

  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto m = positive_density(data.grid(), rng);
    const auto u = random_fourier_field(data.grid(), rng, 3, 0.5);
    const auto a = a_apply(m, u, data);
    const double h = hbar_rate(m, u, data);
    double total = 0.0;
    for (std::size_t k = 0; k < 10; ++k) total += -a.hj[k] - h;
    CHECK(std::abs(total) < 1e-13 * 10 * 50);
  }
}

TEST_CASE("variational inequality") {
  const auto data = sine_problem(24);
  const auto s = discrete_solution(data);
  std::mt19937_64 rng(99);
  CHECK(variational_inequality(s, s.m, s.u, data).value == 0.0);
  for (int t = 0; t < 100; ++t) {
    const auto theta = positive_density(data.grid(), rng);
    const auto v = mean_zero_project(random_fourier_field(data.grid(), rng, 3, 0.5));
    const auto p = variational_inequality(s, theta, v, data);
    CHECK(p.value >= -1e-10 * p.scale);
  }

  // a non-solution admits a violating test pair
  MfgState wrong{GridFunction(data.grid(), 1.0), GridFunction(data.grid()), 0.0};
  bool found = false;
  for (int t = 0; t < 100 && !found; ++t) {
    const auto theta = positive_density(data.grid(), rng);
    const auto v = mean_zero_project(random_fourier_field(data.grid(), rng, 3, 0.5));
    found = variational_inequality(wrong, theta, v, data).value < 0.0;
  }
  // the segment toward the true solution always works
  if (!found) {
    GridFunction theta(data.grid());
    for (std::size_t k = 0; k < 24; ++k) theta[k] = 0.5 * (s.m[k] + 1.0);
    found = variational_inequality(wrong, theta, s.u, data).value < 0.0;
  }
  CHECK(found);
}

TEST_CASE("monotonicity gap") {
  std::mt19937_64 rng(123);
  for (int n : {4, 8, 16}) {
    const auto grid = PeriodicGrid::line(n);
    const ProblemData data(random_fourier_field(grid, rng),
                           random_fourier_field(grid, rng, 2, 0.5));
    const auto m = positive_density(grid, rng);
    const auto u = random_fourier_field(grid, rng, 3, 0.5);
    CHECK(monotonicity_gap(m, u, m, u, data).value == 0.0);
    for (int t = 0; t < 200; ++t) {
      const auto th = positive_density(grid, rng);
      const auto v = random_fourier_field(grid, rng, 3, 0.5);
      const auto gap = monotonicity_gap(m, u, th, v, data);
      CHECK(gap.value >= -1e-12 * gap.scale);
    }
  }
}
