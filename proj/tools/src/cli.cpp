#include "smfg/app/cli.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smfg/app/config.hpp"
#include "smfg/app/run.hpp"
#include "smfg/diagnostics.hpp"

namespace smfg::app {

namespace {

struct Options {
  std::string output;
  bool quiet = false;
  std::string config;
  std::string check;
  std::uint64_t seed = 1;
  std::vector<int> sizes;
  std::string variant = "standard";
  double t_max = 10.0;
};

/// The contraction check runs V = sin(2 pi x) from the oscillating pair
/// (1 + 0.2 cos, 0.2 cos) and from the uniform pair (1, 0).
ContractionResult contraction_check(int n, double t_max) {
  const PeriodicGrid grid = PeriodicGrid::line(n);
  const double two_pi = 2.0 * std::numbers::pi;
  const ProblemData data(
      GridFunction::sample(grid, [&](double x) { return std::sin(two_pi * x); }));
  GridFunction m_a =
      GridFunction::sample(grid, [&](double x) { return 1.0 + 0.2 * std::cos(two_pi * x); });
  const double total = mass(m_a);
  for (double& v : m_a.values()) v /= total;
  const GridFunction u_a = mean_zero_project(
      GridFunction::sample(grid, [&](double x) { return 0.2 * std::cos(two_pi * x); }));
  FlowConfig cfg;
  cfg.t_max = t_max;
  return run_contraction_test(data, {m_a, u_a, 0.0},
                              {GridFunction(grid, 1.0), GridFunction(grid), 0.0},
                              cfg);
}

int finish_check(const SuiteReport& report, const Options& opt,
                 std::ostream& out) {
  const std::string text = to_json(report);
  if (!opt.output.empty()) {
    ensure_directory(opt.output);
    write_file(std::filesystem::path(opt.output) / ("check_" + report.suite + ".json"),
               text + '\n');
  }
  if (!opt.quiet) out << text << '\n';
  return report.pass ? kSuccess : kNumericalFailure;
}

int run_check(const Options& opt, std::ostream& out) {
  if (opt.check == "adjoint") {
    const auto sizes = opt.sizes.empty() ? std::vector<int>{4, 16, 64} : opt.sizes;
    return finish_check(run_adjoint_suite(opt.seed, sizes), opt, out);
  }
  if (opt.check == "monotonicity") {
    const auto sizes = opt.sizes.empty() ? std::vector<int>{4, 8, 16} : opt.sizes;
    const Variant v =
        opt.variant == "congestion" ? Variant::Congestion : Variant::Standard;
    return finish_check(run_monotonicity_suite(opt.seed, sizes, v), opt, out);
  }
  const int n = opt.sizes.empty() ? 100 : opt.sizes.front();
  const ContractionResult result = contraction_check(n, opt.t_max);
  return finish_check(result.report, opt, out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  Options opt;
  CLI::App app{"Stationary mean-field game solver on the periodic torus", "smfg"};
  app.require_subcommand(1);
  app.add_option("--output,-o", opt.output, "Output directory (overrides the config)");
  app.add_flag("--quiet,-q", opt.quiet, "Suppress progress output");

  auto* solve_cmd = app.add_subcommand("solve", "Run the flow described by a JSON config");
  solve_cmd->add_option("config", opt.config, "Config file")->required();

  auto* study_cmd = app.add_subcommand("study", "Convergence studies");
  study_cmd->require_subcommand(1);
  auto* refine_cmd =
      study_cmd->add_subcommand("refinement", "Errors against the exact solution over grid sizes");
  refine_cmd->add_option("config", opt.config, "Config file")->required();
  refine_cmd->add_option("--sizes", opt.sizes, "Grid sizes, strictly increasing")
      ->delimiter(',');

  auto* check_cmd = app.add_subcommand("check", "Property suites");
  check_cmd->add_option("suite", opt.check, "adjoint, monotonicity or contraction")
      ->required()
      ->check(CLI::IsMember({"adjoint", "monotonicity", "contraction"}));
  check_cmd->add_option("--seed", opt.seed, "Suite seed");
  check_cmd->add_option("--sizes", opt.sizes, "Grid sizes")->delimiter(',');
  check_cmd->add_option("--variant", opt.variant, "Monotonicity variant")
      ->check(CLI::IsMember({"standard", "congestion"}));
  check_cmd->add_option("--t-max", opt.t_max, "Contraction horizon")
      ->check(CLI::PositiveNumber);

  for (auto* cmd : {solve_cmd, refine_cmd, check_cmd}) {
    cmd->add_option("--output,-o", opt.output, "Output directory");
    cmd->add_flag("--quiet,-q", opt.quiet, "Suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigFailure;
  }

  std::ostream* log = opt.quiet ? nullptr : &out;
  try {
    if (*check_cmd) return run_check(opt, out);
    RunSpec spec = load_config(opt.config);
    const std::filesystem::path output = opt.output.empty() ? spec.output : opt.output;
    if (*solve_cmd) {
      run(spec, output, log);
      return kSuccess;
    }
    const auto sizes =
        opt.sizes.empty() ? std::vector<int>{25, 50, 100, 200} : opt.sizes;
    const StudyResult study = run_study(spec, sizes, output, log);
    if (log) {
      *log << "refinement " << (study.pass ? "passed" : "failed")
           << ": m errors decreasing " << (study.m_decreasing ? "yes" : "no")
           << ", bounded " << (study.bounded ? "yes" : "no") << '\n';
    }
    return study.pass ? kSuccess : kNumericalFailure;
  } catch (const IoError& e) {
    err << "smfg: " << e.what() << '\n';
    return kIoFailure;
  } catch (const UsageError& e) {
    err << "smfg: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const Error& e) {
    err << "smfg: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace smfg::app
