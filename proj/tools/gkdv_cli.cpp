// gkdv run <config> -o <dir> | check <config> | list-experiments
// Exit status: 0 all verdicts pass, 1 some verdict failed, 2 error or hypothesis gate.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gkdv/coefficients.hpp"
#include "gkdv/config.hpp"
#include "gkdv/error.hpp"
#include "gkdv/experiments.hpp"
#include "gkdv/gauge.hpp"
#include "gkdv/report.hpp"

namespace fs = std::filesystem;
using namespace gkdv;

namespace {

CoefficientSet set_of(const ExperimentSpec& spec) {
  return spec.coefficients ? *spec.coefficients : default_coefficients(spec.kind);
}

HypothesisReport screen(const ExperimentSpec& spec) {
  const auto set = set_of(spec);
  const Grid grid(spec.half_width, spec.num_points);
  screen_domain(set, grid, spec.t_final, 5);
  return check_hypotheses(set, grid, spec.t_final, 5);
}

int cmd_check(const std::string& path) {
  const auto cfg = parse_config(path);
  const auto rep = screen(cfg.spec);
  std::cout << rep.to_text();
  std::cout << (rep.gate_passed() ? "hypotheses: pass\n" : "hypotheses: FAIL\n");
  return rep.gate_passed() ? 0 : 2;
}

int cmd_run(const std::string& path, const fs::path& out, std::optional<std::uint64_t> seed,
            bool allow) {
  auto cfg = parse_config(path);
  if (seed) set_seed(cfg, *seed);
  auto& spec = cfg.spec;
  const auto hyp = screen(spec);
  if (!hyp.gate_passed()) {
    if (!allow && !spec.hypothesis_violation) {
      std::cerr << hyp.to_text();
      std::cerr << "hypothesis check failed; pass --allow-hypothesis-violation to run anyway\n";
      return 2;
    }
    spec.hypothesis_violation = true;
  }
  const RunMeta meta{cfg.run_id, cfg.config_hash, spec.seed};
  fs::create_directories(out);
  const auto marker = out / "INCOMPLETE";
  std::ofstream(marker) << "run " << meta.run_id << " did not finish\n";

  if (spec.kind == ExperimentKind::transform_consistency) {
    const auto set = set_of(spec);
    const Grid source(spec.half_width, spec.num_points);
    const Grid image = make_image_grid(set, source, spec.t_final, 9);
    const GaugeMap map(set, 0.0, source, image);
    std::ofstream os(out / "gauge_t0.csv", std::ios::binary);
    write_header(os, meta, "gauge map at t = 0");
    write_gauge_csv(os, map, transform_coefficients(map));
  }

  const auto report = run_experiment(spec);
  write_report(out, report, meta);
  fs::remove(marker);

  for (const auto& v : report.verdicts) {
    std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << format_number(v.value) << ' '
              << v.comparison << ' ' << format_number(v.threshold) << '\n';
  }
  if (report.hypothesis_violation) std::cout << "(hypothesis-violating run)\n";
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauge-transformed KdV toolkit"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  bool allow = false;
  std::string config;
  std::string out = "out";

  auto* run = app.add_subcommand("run", "run the experiment described by a config");
  run->add_option("config", config, "YAML config")->required();
  run->add_option("-o,--output", out, "output directory")->required();
  run->add_option("--seed", seed, "override experiment.seed");
  run->add_flag("--allow-hypothesis-violation", allow, "run even if the hypothesis gate fails");

  auto* check = app.add_subcommand("check", "screen the hypotheses only");
  check->add_option("config", config, "YAML config")->required();

  auto* list = app.add_subcommand("list-experiments", "list experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (auto k : all_experiment_kinds()) std::cout << to_string(k) << "\t" << describe(k) << '\n';
      return 0;
    }
    if (check->parsed()) return cmd_check(config);
    return cmd_run(config, out, seed, allow);
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
