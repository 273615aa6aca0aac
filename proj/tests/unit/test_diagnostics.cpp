#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "oracles.hpp"
#include "smfg/diagnostics.hpp"
#include "smfg/error.hpp"

using namespace smfg;
using oracle::kTwoPi;

namespace {

/// Adjoint with the w index shifted by one node: a deliberately broken
/// transpose.
GridFunction shifted_adjoint(const GridFunction& u, const GridFunction& w,
                             const ProblemData& data) {
  GridFunction ws(w.grid());
  const std::size_t n = w.size();
  for (std::size_t k = 0; k < n; ++k) ws[k] = w[(k + 1) % n];
  return adjoint_apply(u, ws, data);
}

}  // namespace

TEST_CASE("random fields are deterministic, mean-zero and smooth") {
  std::mt19937_64 a(5), b(5);
  const auto g = PeriodicGrid::line(32);
  const auto fa = random_fourier_field(g, a);
  const auto fb = random_fourier_field(g, b);
  CHECK(fa.vector() == fb.vector());
  CHECK(std::abs(sum(fa)) < 1e-12);
  const auto sq = PeriodicGrid::square(8);
  const auto f2 = random_fourier_field(sq, a, 2, 1.0);
  CHECK(std::abs(sum(f2)) < 1e-12);
  CHECK(case_seed(1, 4, 0) != case_seed(1, 4, 1));
  CHECK(case_seed(1, 4, 0) != case_seed(1, 16, 0));
  CHECK(case_seed(9, 4, 3) == case_seed(9, 4, 3));
}

TEST_CASE("adjoint suite and its negative control") {
  const auto ok = run_adjoint_suite(42, {4, 16, 64});
  CHECK(ok.pass);
  CHECK(ok.cases == 300);
  CHECK(ok.failures.empty());
  const auto again = run_adjoint_suite(42, {4, 16, 64});
  CHECK(to_json(ok) == to_json(again));

  const auto bad = run_adjoint_suite(42, {4, 16}, shifted_adjoint);
  CHECK_FALSE(bad.pass);
  REQUIRE_FALSE(bad.failures.empty());
  CHECK(bad.failures.front().detail.find("node") != std::string::npos);
  // the recorded seed reproduces the failure
  const auto doc = nlohmann::json::parse(to_json(bad));
  CHECK(doc["suite"] == "adjoint");
  CHECK(doc["pass"] == false);
  CHECK(doc["failures"][0]["seed"].get<std::uint64_t>() == bad.failures.front().seed);
}

TEST_CASE("constant v pairs to zero") {
  const auto g = PeriodicGrid::line(10);
  std::mt19937_64 rng(1);
  const ProblemData data(random_fourier_field(g, rng), random_fourier_field(g, rng));
  const auto u = random_fourier_field(g, rng);
  const auto w = random_fourier_field(g, rng);
  const GridFunction v(g, 1.0);
  const auto lv = linearize_apply(u, v, data);
  const auto ls = adjoint_apply(u, w, data);
  CHECK(std::abs(oracle::dot(lv.vector(), w.vector())) < 1e-12);
  CHECK(std::abs(oracle::dot(v.vector(), ls.vector())) < 1e-11);
}

TEST_CASE("monotonicity suites") {
  const auto std_report = run_monotonicity_suite(7, {4, 8, 16});
  CHECK(std_report.pass);
  CHECK(std_report.cases == 3000);
  CHECK(std_report.metric("min_ratio") >= -1e-12);

  const auto cong = run_monotonicity_suite(7, {4, 8}, Variant::Congestion);
  CHECK(cong.pass);
  CHECK(cong.suite == "monotonicity_congestion");
  CHECK(cong.metric("min_ratio") <= cong.metric("median_ratio"));
  CHECK_THROWS_AS(cong.metric("nope"), UsageError);
}

TEST_CASE("contraction") {
  const auto g = PeriodicGrid::line(16);
  const ProblemData data(GridFunction::sample(g, [](double x) { return std::sin(kTwoPi * x); }));
  auto m = GridFunction::sample(g, [](double x) { return 1.0 + 0.2 * std::cos(kTwoPi * x); });
  const auto u = GridFunction::sample(g, [](double x) { return 0.2 * std::cos(kTwoPi * x); });
  const MfgState a{m, u, 0.0};
  const MfgState b{GridFunction(g, 1.0), GridFunction(g), 0.0};
  FlowConfig cfg;
  cfg.t_max = 2.0;
  cfg.record_every = 0.1;

  const auto same = run_contraction_test(data, a, a, cfg);
  CHECK(same.report.pass);
  for (double d : same.distances) CHECK(d == 0.0);

  const auto r = run_contraction_test(data, a, b, cfg);
  CHECK(r.report.pass);
  CHECK(r.times.size() == 21);
  CHECK(r.distances.back() < r.distances.front());

  MfgState heavy = b;
  heavy.m = GridFunction(g, 2.0);
  CHECK_THROWS_AS(run_contraction_test(data, a, heavy, cfg), DomainError);
}

TEST_CASE("energy audit") {
  Trajectory flat;
  for (int k = 0; k < 5; ++k) {
    TrajectorySample s;
    s.t = k;
    s.phi = 1.0;
    flat.samples.push_back(s);
  }
  CHECK(run_energy_audit(flat, 1e-6, 1e-9).pass);

  Trajectory down;
  for (int k = 0; k < 5; ++k) {
    TrajectorySample s;
    s.t = k;
    s.phi = 2.0 - 0.1 * k;
    down.samples.push_back(s);
  }
  CHECK(run_energy_audit(down, 1e-6, 1e-9).pass);
  Trajectory up = down;
  for (std::size_t k = 0; k < 5; ++k) up.samples[k].phi = down.samples[4 - k].phi;
  const auto rep = run_energy_audit(up, 1e-6, 1e-9);
  CHECK_FALSE(rep.pass);
  CHECK(rep.failures.size() == 4);
}

TEST_CASE("refinement study on trivial data has zero error") {
  RefinementFamily fam;
  fam.data = [](const PeriodicGrid& g) { return ProblemData(GridFunction(g)); };
  fam.exact = [](const PeriodicGrid& g) {
    return exact_zero_drift([](double) { return 0.0; }, g);
  };
  fam.solve = [](const ProblemData& d, const FlowConfig& c) {
    return solve_gradient_flow(d, GridFunction(d.grid()), c);
  };
  FlowConfig cfg;
  const auto r = run_refinement_study(fam, {5, 10, 20}, cfg);
  CHECK(r.pass);
  for (const auto& e : r.errors) CHECK(e.m_linf < 1e-13);
  CHECK(std::isnan(r.orders_m.front()));
  CHECK_THROWS_AS(run_refinement_study(fam, {10, 5}, cfg), UsageError);
}

TEST_CASE("congestion family sits at the solver floor") {
  auto V = [](double x) { return std::sin(kTwoPi * x); };
  RefinementFamily fam;
  fam.data = [&](const PeriodicGrid& g) {
    return ProblemData(GridFunction::sample(g, V), Variant::Congestion);
  };
  fam.exact = [&](const PeriodicGrid& g) { return exact_congestion(V, g); };
  fam.solve = [](const ProblemData& d, const FlowConfig& c) {
    return solve_monotonic_flow(d, GridFunction(d.grid(), 1.0), GridFunction(d.grid()), c);
  };
  FlowConfig cfg;
  cfg.t_max = 25.0;
  cfg.residual_stop = 1e-9;
  const auto r = run_refinement_study(fam, {8, 16, 32}, cfg);
  // Without drift the scheme is exact at the nodes: only solver error remains.
  CHECK(r.bounded);
  CHECK(r.orders_m.size() == 2);
  for (const auto& e : r.errors) {
    CHECK(e.u_linf < 1e-12);
    CHECK(e.m_linf < 1e-5);
    CHECK(e.hbar_err < 1e-6);
  }
}
