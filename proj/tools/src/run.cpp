#include "smfg/app/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace smfg::app {

using nlohmann::json;

namespace {

GridFunction sample(const Expr& e, const PeriodicGrid& grid) {
  return GridFunction::sample(
      grid, [&](double x, double y) { return evaluate(e, x, y); });
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json errors_json(const ErrorReport& e) {
  return {{"u_linf", e.u_linf}, {"u_l2", e.u_l2}, {"m_linf", e.m_linf},
          {"m_l2", e.m_l2},     {"hbar_err", e.hbar_err}};
}

std::string trajectory_csv(const Trajectory& traj, std::size_t nodes) {
  std::string out = "t,phi,residual_linf,mass,mean_u,hbar\n";
  for (const auto& s : traj.samples) {
    out += fmt17(s.t) + ',' + fmt17(s.phi) + ',' + fmt17(s.residual) + ',' +
           fmt17(s.mass) + ',' + fmt17(s.sum_u / static_cast<double>(nodes)) +
           ',' + fmt17(s.hbar) + '\n';
  }
  return out;
}

std::string final_state_csv(const MfgState& state,
                            const std::optional<ExactSolution>& exact) {
  const PeriodicGrid& grid = state.u.grid();
  const bool two_d = grid.dim() == 2;
  std::string out = two_d ? "x,y,u,m" : "x,u,m";
  if (exact) out += ",u_exact,m_exact,u_error,m_error";
  out += '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out += fmt17(grid.coordinate_of(k, 0));
    if (two_d) out += ',' + fmt17(grid.coordinate_of(k, 1));
    out += ',' + fmt17(state.u[k]) + ',' + fmt17(state.m[k]);
    if (exact) {
      out += ',' + fmt17(exact->u[k]) + ',' + fmt17(exact->m[k]) + ',' +
             fmt17(state.u[k] - exact->u[k]) + ',' +
             fmt17(state.m[k] - exact->m[k]);
    }
    out += '\n';
  }
  return out;
}

/// One gnuplot index block of (x, m) or (x, y, m) per recorded time.
std::string snapshots_dat(const Trajectory& traj) {
  std::string out;
  for (std::size_t s = 0; s < traj.m_snapshots.size(); ++s) {
    const GridFunction& m = traj.m_snapshots[s];
    const PeriodicGrid& grid = m.grid();
    if (s > 0) out += "\n\n";
    out += "# t = " + fmt17(traj.samples[s].t) + '\n';
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out += fmt17(grid.coordinate_of(k, 0));
      if (grid.dim() == 2) out += ' ' + fmt17(grid.coordinate_of(k, 1));
      out += ' ' + fmt17(m[k]) + '\n';
      if (grid.dim() == 2 && (k + 1) % static_cast<std::size_t>(grid.n()) == 0 &&
          k + 1 < grid.size()) {
        out += '\n';
      }
    }
  }
  return out;
}

/// Distance of a 2-D density to the two candidate separable forms built
/// from the 1-D solution: the product m(x) m(y) and the normalized sum
/// (m(x) + m(y)) / 2.
std::pair<double, double> separable_forms(const MfgState& state,
                                          const RunSpec& spec) {
  const PeriodicGrid& grid = state.m.grid();
  const auto& V = *spec.potential_1d_expr;
  const ExactSolution line = exact_zero_drift(
      [&](double x) { return evaluate(V, x); }, PeriodicGrid::line(grid.n()));
  const auto n = static_cast<std::size_t>(grid.n());
  double product = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double mx = line.m[k % n];
    const double my = line.m[k / n];
    product = std::max(product, std::abs(state.m[k] - mx * my));
    sum = std::max(sum, std::abs(state.m[k] - 0.5 * (mx + my)));
  }
  return {product, sum};
}

void say(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("error while writing " + path.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

PeriodicGrid grid_for(const RunSpec& spec, int n) {
  return spec.dimension == 2 ? PeriodicGrid::square(n) : PeriodicGrid::line(n);
}

ProblemData build_problem(const RunSpec& spec, const PeriodicGrid& grid) {
  GridFunction V = sample(*spec.potential_expr, grid);
  if (spec.variant == Variant::Congestion || grid.dim() == 2) {
    return ProblemData(std::move(V), spec.variant);
  }
  return ProblemData(std::move(V), sample(*spec.drift_expr, grid), spec.variant);
}

std::optional<ExactSolution> build_exact(const RunSpec& spec,
                                         const PeriodicGrid& grid) {
  if (!spec.compare_exact) return std::nullopt;
  if (grid.dim() == 2) {
    const auto& V = *spec.potential_1d_expr;
    return exact_2d_separable([&](double x) { return evaluate(V, x); }, grid);
  }
  auto V = [&](double x) { return evaluate(*spec.potential_expr, x); };
  if (spec.variant == Variant::Congestion) return exact_congestion(V, grid);
  if (spec.psi_expr) {
    return exact_gradient_drift(
        [&](double x) { return evaluate(*spec.psi_expr, x); },
        [&](double x) { return evaluate(*spec.drift_expr, x); }, V, grid);
  }
  return exact_zero_drift(V, grid);
}

FlowResult solve(const RunSpec& spec, const ProblemData& data,
                 const FlowConfig& cfg) {
  const GridFunction u0 = sample(*spec.u0_expr, data.grid());
  if (spec.flow == FlowKind::Gradient) return solve_gradient_flow(data, u0, cfg);
  const GridFunction m0 = sample(*spec.m0_expr, data.grid());
  return solve_monotonic_flow(data, m0, u0, cfg);
}

RunOutcome run(const RunSpec& spec, const std::filesystem::path& output,
               std::ostream* log) {
  ensure_directory(output);
  const PeriodicGrid grid = grid_for(spec, spec.n);
  const ProblemData data = build_problem(spec, grid);
  const std::optional<ExactSolution> exact = build_exact(spec, grid);

  say(log, "solving " + std::string(to_string(spec.flow)) + " flow, n = " +
               std::to_string(spec.n) + ", t_max = " +
               fmt17(spec.flow_config.t_max));
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out{solve(spec, data, spec.flow_config), std::nullopt, 0.0, {}};
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const FlowResult& r = out.result;
  if (exact) out.errors = error_report(r.state, *exact);

  json report;
  report["config"] = json::parse(to_json(spec));
  report["stop"] = std::string(to_string(r.trajectory.stop));
  report["final_time"] = r.trajectory.samples.empty()
                             ? json(nullptr)
                             : json(r.trajectory.samples.back().t);
  report["residual"] = {{"hj_linf", r.residual.hj_linf},
                        {"hj_l2", r.residual.hj_l2},
                        {"fp_linf", r.residual.fp_linf},
                        {"fp_l2", r.residual.fp_l2},
                        {"max", r.residual.max()}};
  report["hbar"] = r.state.hbar;
  report["errors"] = out.errors ? errors_json(*out.errors) : json(nullptr);
  if (exact) report["hbar_exact"] = exact->hbar;
  if (exact && grid.dim() == 2) {
    const auto [product, sum] = separable_forms(r.state, spec);
    report["separable_check"] = {{"product_form_linf", number(product)},
                                 {"sum_form_linf", number(sum)},
                                 {"matches", product <= sum ? "product" : "sum"}};
  }
  report["wall_seconds"] = out.wall_seconds;
  const IntegratorStats& st = r.trajectory.stats;
  report["integrator"] = {{"steps", st.steps},
                          {"rejected", st.rejected},
                          {"positivity_rejections", st.positivity_rejections},
                          {"rhs_evals", st.rhs_evals},
                          {"newton_iterations", st.newton_iterations},
                          {"jacobian_evals", st.jacobian_evals}};

  const std::vector<std::pair<std::string, std::string>> files = {
      {"trajectory.csv", trajectory_csv(r.trajectory, grid.size())},
      {"final_state.csv", final_state_csv(r.state, exact)},
      {"snapshots.dat", snapshots_dat(r.trajectory)},
      {"report.json", report.dump(2) + '\n'},
  };
  for (const auto& [name, text] : files) {
    write_file(output / name, text);
    out.files.push_back(output / name);
  }
  say(log, "stop: " + std::string(to_string(r.trajectory.stop)) +
               ", residual " + fmt17(r.residual.max()) + ", hbar " +
               fmt17(r.state.hbar) + ", " + std::to_string(st.steps) +
               " steps, " + fmt17(out.wall_seconds) + " s");
  if (out.errors) {
    say(log, "errors vs exact: u_linf " + fmt17(out.errors->u_linf) +
                 ", m_linf " + fmt17(out.errors->m_linf) + ", hbar " +
                 fmt17(out.errors->hbar_err));
  }
  return out;
}

StudyResult run_study(const RunSpec& spec, const std::vector<int>& sizes,
                      const std::filesystem::path& output, std::ostream* log) {
  if (!spec.compare_exact) {
    throw ConfigError("/compare_exact",
                      "a refinement study needs compare_exact = true");
  }
  ensure_directory(output);
  RefinementFamily family;
  family.dim = spec.dimension;
  family.data = [&](const PeriodicGrid& g) { return build_problem(spec, g); };
  family.exact = [&](const PeriodicGrid& g) { return *build_exact(spec, g); };
  family.solve = [&](const ProblemData& d, const FlowConfig& c) {
    say(log, "solving n = " + std::to_string(d.grid().n()));
    return solve(spec, d, c);
  };
  StudyResult study = run_refinement_study(family, sizes, spec.flow_config);

  std::string csv =
      "n,u_linf,u_l2,m_linf,m_l2,hbar_err,order_u,order_m,order_hbar,"
      "mean_u_squared,hbar,residual\n";
  json rows = json::array();
  for (std::size_t k = 0; k < study.sizes.size(); ++k) {
    const ErrorReport& e = study.errors[k];
    const double nan = std::nan("");
    const double ou = k ? study.orders_u[k - 1] : nan;
    const double om = k ? study.orders_m[k - 1] : nan;
    const double oh = k ? study.orders_hbar[k - 1] : nan;
    csv += std::to_string(study.sizes[k]) + ',' + fmt17(e.u_linf) + ',' +
           fmt17(e.u_l2) + ',' + fmt17(e.m_linf) + ',' + fmt17(e.m_l2) + ',' +
           fmt17(e.hbar_err) + ',' + fmt17(ou) + ',' + fmt17(om) + ',' +
           fmt17(oh) + ',' + fmt17(study.mean_u_squared[k]) + ',' +
           fmt17(study.hbar[k]) + ',' + fmt17(study.final_residual[k]) + '\n';
    json row = errors_json(e);
    row["n"] = study.sizes[k];
    row["order_u"] = number(ou);
    row["order_m"] = number(om);
    row["order_hbar"] = number(oh);
    row["mean_u_squared"] = study.mean_u_squared[k];
    row["hbar"] = study.hbar[k];
    row["residual"] = study.final_residual[k];
    row["wall_seconds"] = study.wall_seconds[k];
    rows.push_back(row);
  }
  json doc = {{"config", json::parse(to_json(spec))},
              {"sizes", rows},
              {"m_decreasing", study.m_decreasing},
              {"bounded", study.bounded},
              {"pass", study.pass}};
  write_file(output / "study.csv", csv);
  write_file(output / "study.json", doc.dump(2) + '\n');
  return study;
}

}  // namespace smfg::app
