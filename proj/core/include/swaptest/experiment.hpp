#pragma once

// Named figure experiments and custom sweeps: configuration, dispatch to the
// engines, result tables, fringe fits and table comparison.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swaptest/cqed.hpp"
#include "swaptest/lindblad.hpp"
#include "swaptest/plan.hpp"

namespace swaptest::experiment {

enum class Kind { Fig2a, Fig2b, Fig3a, Fig3b, Fig4, Fig5, Fig6, Fig7, Fig8, Custom };
enum class Engine { Analytic, Gatesim, Toymodel, Cqed };

const char* to_string(Kind k);
const char* to_string(Engine e);
Kind parse_kind(const std::string& s);
Engine parse_engine(const std::string& s);

struct Grid {
  double start = 0.0;
  double stop = 1.0;
  std::size_t count = 2;

  void validate(const char* what) const;
  std::vector<double> values() const;
};

// Rates in Hz, times in s, as for the cQED parameters.
struct ToyConfig {
  std::optional<double> gamma_z;  // kappa beta^2 of the cQED parameters when unset
  double gamma_x = 0.0;
  std::optional<double> tau;      // cQED tau when unset
  std::optional<double> zeta2;    // cQED zeta2 when unset
};

struct ExperimentConfig {
  Kind kind = Kind::Custom;
  Engine engine = Engine::Analytic;
  ProbePlan plan;
  FlipProbs flips;
  cqed::CqedParams cqed;
  ToyConfig toy;
  Grid phi_grid;
  Grid photon_grid;          // photon-number axis of scaling panels
  double total_photons = 5.0;  // fixed-energy partition panel
  std::string output = "out";
  bool svg = false;
  lindblad::Tolerances tolerances;
  double leakage_tolerance = 1e-8;
  double fd_step = 1e-5;     // phase step of finite-difference Fisher information

  // Throws ConfigError.
  void validate() const;
  nlohmann::json to_json() const;
};

// Figure defaults; the config file overrides individual keys.
ExperimentConfig default_config(Kind kind);
// INI text: [experiment] [plan] [flips] [grid] [photons] [cqed] [toy] [tolerance].
// Numbers may use pi, e.g. "-pi", "pi/2", "0.25*pi".
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
double parse_number(const std::string& text);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& column) const;  // throws ConfigError
  std::vector<double> column(const std::string& column) const;
};

struct RunResult {
  std::vector<Table> tables;
  nlohmann::json metadata;
};

RunResult run(const ExperimentConfig& config);

// Writes <dir>/<table>.csv (and .svg if asked) and <dir>/<kind>.meta.json.
std::vector<std::string> write_outputs(const RunResult& result, const ExperimentConfig& config,
                                       const std::string& dir);

struct ExperimentInfo {
  Kind kind;
  const char* name;
  const char* summary;
  std::vector<Engine> engines;  // first is the default
};
const std::vector<ExperimentInfo>& list_experiments();

// o + A cos(n phi) + B sin(n phi) by least squares.
struct FringeFit {
  int harmonic = 1;
  double visibility = 0.0;  // sqrt(A^2 + B^2)
  double offset = 0.0;
  double phase = 0.0;       // atan2(B, A)
  double period = 0.0;
  double residual = 0.0;    // rms
};
// Searches harmonics 1..12 when none is given.
FringeFit fit_fringe(const std::vector<double>& phi, const std::vector<double>& delta,
                     std::optional<int> harmonic = std::nullopt);

struct ColumnDiff {
  std::string column;
  double max_abs = 0.0;
  double mean_abs = 0.0;
};
struct DiffReport {
  std::vector<ColumnDiff> columns;
  double max_abs = 0.0;
  // Ratio of fringe visibilities (max - min)/2, B over A, for a delta column.
  std::optional<double> visibility_ratio;
};
// Compares the listed columns, or all when the list is empty.
DiffReport diff(const Table& a, const Table& b, const std::vector<std::string>& only = {});

struct PhaseMaximum {
  double phi = 0.0;
  double value = 0.0;
};
// Maximum of f on [lo, hi]: coarse scan, then Brent refinement.
PhaseMaximum maximize_over_phase(const std::function<double(double)>& f, double lo, double hi,
                                 std::size_t samples = 2000);

// Power-law exponent from a least-squares fit of log y against log x.
double fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

// table_io
void write_csv(const Table& table, std::ostream& out);
Table read_csv(std::istream& in, const std::string& name = {});
Table read_csv_file(const std::string& path);
void write_svg(const Table& table, std::ostream& out);
std::string format_number(double v);  // %.16e

}  // namespace swaptest::experiment
