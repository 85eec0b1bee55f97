// swaptest: batch runner for the figure experiments.
//
//   swaptest run --config configs/fig6.ini --out results/
//   swaptest run --experiment fig2a --engine gatesim
//   swaptest diff a.csv b.csv --threshold 1e-8
//   swaptest fit-fringe fig6.csv --harmonic 2
//   swaptest list-experiments
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 diff above threshold.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "swaptest/errors.hpp"
#include "swaptest/experiment.hpp"

namespace ex = swaptest::experiment;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;
constexpr int kDiffExceeded = 4;

int run_verb(const std::string& config_path, const std::string& name, const std::string& out_dir,
             const std::string& engine, std::optional<double> rtol, std::optional<double> atol, bool svg) {
  ex::ExperimentConfig cfg;
  if (!config_path.empty())
    cfg = ex::load_config(config_path);
  else
    cfg = ex::default_config(ex::parse_kind(name.empty() ? "custom" : name));
  if (!engine.empty()) cfg.engine = ex::parse_engine(engine);
  if (rtol) cfg.tolerances.rtol = *rtol;
  if (atol) cfg.tolerances.atol = *atol;
  if (svg) cfg.svg = true;
  cfg.validate();

  const ex::RunResult result = ex::run(cfg);
  const std::string dir = out_dir.empty() ? cfg.output : out_dir;
  for (const auto& f : ex::write_outputs(result, cfg, dir)) std::cout << "wrote " << f << "\n";
  if (result.metadata.contains("visibility"))
    std::cout << "visibility " << result.metadata["visibility"].get<double>() << "\n";
  std::cout << "wall time " << result.metadata["wall_time_s"].get<double>() << " s\n";
  return 0;
}

int diff_verb(const std::string& a, const std::string& b, double threshold, const std::vector<std::string>& columns) {
  const auto ta = ex::read_csv_file(a), tb = ex::read_csv_file(b);
  const auto r = ex::diff(ta, tb, columns);
  std::printf("%-24s %-24s %-24s\n", "column", "max_abs", "mean_abs");
  for (const auto& c : r.columns) std::printf("%-24s %-24.6e %-24.6e\n", c.column.c_str(), c.max_abs, c.mean_abs);
  std::printf("max abs diff %.6e (threshold %.3e)\n", r.max_abs, threshold);
  if (r.visibility_ratio) std::printf("visibility ratio (b/a) %.9f\n", *r.visibility_ratio);
  return r.max_abs > threshold ? kDiffExceeded : 0;
}

int fit_verb(const std::string& path, const std::string& column, std::optional<int> harmonic) {
  const auto t = ex::read_csv_file(path);
  const auto f = ex::fit_fringe(t.column(t.columns.front()), t.column(column), harmonic);
  std::printf("harmonic %d\nvisibility %.9f\noffset %.9f\nphase %.9f\nperiod %.9f\nresidual %.3e\n", f.harmonic,
              f.visibility, f.offset, f.phase, f.period, f.residual);
  return 0;
}

int list_verb() {
  for (const auto& e : ex::list_experiments()) {
    std::string engines;
    for (auto en : e.engines) engines += std::string(engines.empty() ? "" : ",") + ex::to_string(en);
    std::printf("%-8s %-22s %s\n", e.name, engines.c_str(), e.summary);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swap-test interferometry experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment and write CSV/JSON outputs");
  std::string config_path, name, out_dir, engine;
  std::optional<double> rtol, atol;
  bool svg = false;
  run->add_option("-c,--config", config_path, "INI config file")->check(CLI::ExistingFile);
  run->add_option("-e,--experiment", name, "experiment name when no config is given");
  run->add_option("-o,--out", out_dir, "output directory (overrides the config)");
  run->add_option("--engine", engine, "engine override: analytic, gatesim, toymodel, cqed");
  run->add_option("--rtol", rtol, "integrator relative tolerance override");
  run->add_option("--atol", atol, "integrator absolute tolerance override");
  run->add_flag("--svg", svg, "also write SVG plots");

  auto* diff = app.add_subcommand("diff", "compare two result CSV files column by column");
  std::string file_a, file_b;
  double threshold = 1e-8;
  diff->add_option("a", file_a)->required()->check(CLI::ExistingFile);
  diff->add_option("b", file_b)->required()->check(CLI::ExistingFile);
  std::vector<std::string> diff_columns;
  diff->add_option("-t,--threshold", threshold, "max abs difference tolerated");
  diff->add_option("--columns", diff_columns, "compare only these columns")->delimiter(',');

  auto* fit = app.add_subcommand("fit-fringe", "least-squares cosine fit of a witness column");
  std::string fit_file, column = "delta";
  std::optional<int> harmonic;
  fit->add_option("file", fit_file)->required()->check(CLI::ExistingFile);
  fit->add_option("--column", column, "column to fit");
  fit->add_option("-n,--harmonic", harmonic, "fixed harmonic; searched over 1..12 when omitted");

  auto* list = app.add_subcommand("list-experiments", "list named experiments and their engines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return run_verb(config_path, name, out_dir, engine, rtol, atol, svg);
    if (*diff) return diff_verb(file_a, file_b, threshold, diff_columns);
    if (*fit) return fit_verb(fit_file, column, harmonic);
    if (*list) return list_verb();
  } catch (const swaptest::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const swaptest::NotDerivedError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const swaptest::Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  }
  return 0;
}
