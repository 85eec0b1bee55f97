#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "support.hpp"
#include "swaptest/errors.hpp"
#include "swaptest/experiment.hpp"

using namespace swaptest;
using namespace swaptest::experiment;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("swaptest_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(const std::string& args) {
  const std::string cmd = std::string(SWAPTEST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_path(const std::string& name) { return std::string(SWAPTEST_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST(Numbers, PiExpressions) {
  EXPECT_DOUBLE_EQ(parse_number("1.5"), 1.5);
  EXPECT_DOUBLE_EQ(parse_number("pi"), oracle::pi);
  EXPECT_DOUBLE_EQ(parse_number("-pi"), -oracle::pi);
  EXPECT_DOUBLE_EQ(parse_number("-pi/2"), -oracle::pi / 2);
  EXPECT_DOUBLE_EQ(parse_number("0.25*pi"), oracle::pi / 4);
  EXPECT_DOUBLE_EQ(parse_number("2pi"), 2 * oracle::pi);
  EXPECT_DOUBLE_EQ(parse_number("6.7e6"), 6.7e6);
  EXPECT_THROW(parse_number("abc"), ConfigError);
  EXPECT_THROW(parse_number(""), ConfigError);
}

TEST(Config, KeysOverrideFigureDefaults) {
  const auto c = parse(
      "[experiment]\nname = fig2b\nengine = gatesim\n[plan]\nalpha1 = 2\n[grid]\nstart = -pi/2\nstop = pi/2\ncount = 11\n");
  EXPECT_EQ(c.kind, Kind::Fig2b);
  EXPECT_EQ(c.engine, Engine::Gatesim);
  ASSERT_TRUE(c.plan.is_coherent());
  EXPECT_EQ(c.plan.coherent_input().alpha1, Complex(2.0));
  EXPECT_EQ(c.plan.coherent_input().alpha2, Complex(0.0));
  EXPECT_EQ(c.phi_grid.count, 11u);
  EXPECT_DOUBLE_EQ(c.phi_grid.start, -oracle::pi / 2);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse("[experiment]\nname = fig9\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = fig2a\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse("[nonsense]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse("stray = 1\n[experiment]\nname = fig2a\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = custom\n[grid]\ncount = 1\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = fig3a\nengine = gatesim\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = custom\nengine = toymodel\n[plan]\ninput = noon\nn = 2\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = custom\nengine = cqed\n[plan]\ngate = cbs\n[flips]\np1 = 0.1\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = fig6\n[plan]\ninput = coherent\n"), ConfigError);
  EXPECT_THROW(parse("[experiment]\nname = custom\n[flips]\np1 = 0.7\n"), Error);
  EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST(Config, ShippedConfigsLoad) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(SWAPTEST_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 10);
  for (const auto& e : list_experiments()) EXPECT_NO_THROW(default_config(e.kind).validate()) << e.name;
}

TEST(Csv, RoundTripIsExact) {
  auto gen = oracle::rng(31);
  std::normal_distribution<double> g;
  Table t{"t", {"x", "y", "z"}, {}};
  for (int i = 0; i < 50; ++i) t.rows.push_back({g(gen), g(gen) * 1e-300, g(gen) * 1e300});
  t.rows.push_back({0.0, -0.0, 1.0 / 3.0});
  std::stringstream s;
  write_csv(t, s);
  const Table back = read_csv(s, "t");
  EXPECT_EQ(back.columns, t.columns);
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(back.rows[i], t.rows[i]);
}

TEST(Csv, ErrorsNameTheLine) {
  std::istringstream bad("a,b\n1,2\n3,x\n");
  try {
    read_csv(bad, "f.csv");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("f.csv:3"), std::string::npos) << e.what();
  }
  std::istringstream ragged("a,b\n1\n");
  EXPECT_THROW(read_csv(ragged), ConfigError);
  Table t{"t", {"a"}, {{1.0}}};
  EXPECT_THROW(t.column("b"), ConfigError);
}

TEST(Fit, RecoversSyntheticFringe) {
  const auto phi = oracle::grid(0.0, oracle::pi, 101);
  std::vector<double> d;
  for (double p : phi) d.push_back(0.05 + 0.6 * std::cos(3 * p) - 0.2 * std::sin(3 * p));
  const auto f = fit_fringe(phi, d);
  EXPECT_EQ(f.harmonic, 3);
  EXPECT_NEAR(f.visibility, std::hypot(0.6, 0.2), 1e-12);
  EXPECT_NEAR(f.offset, 0.05, 1e-12);
  EXPECT_NEAR(f.phase, std::atan2(-0.2, 0.6), 1e-12);
  EXPECT_NEAR(f.period, 2 * oracle::pi / 3, 1e-12);
  EXPECT_LT(f.residual, 1e-12);
  EXPECT_THROW(fit_fringe({0.0, 1.0}, {0.0, 1.0}), ConfigError);
}

TEST(Diff, ReportsColumnsAndVisibilityRatio) {
  Table a{"a", {"phi", "delta"}, {}}, b = a;
  for (double p : oracle::grid(-oracle::pi, oracle::pi, 51)) {
    a.rows.push_back({p, -std::cos(p)});
    b.rows.push_back({p, -0.9 * std::cos(p)});
  }
  const auto r = diff(a, b);
  EXPECT_NEAR(r.max_abs, 0.1, 1e-12);
  ASSERT_TRUE(r.visibility_ratio.has_value());
  EXPECT_NEAR(*r.visibility_ratio, 0.9, 1e-12);
  EXPECT_EQ(diff(a, a).max_abs, 0.0);
  EXPECT_EQ(diff(a, b, {"phi"}).max_abs, 0.0);
  Table c{"c", {"phi", "other"}, a.rows};
  EXPECT_THROW(diff(a, c), ConfigError);
}

TEST(Numerics, PhaseMaximumAndExponent) {
  const auto m = maximize_over_phase([](double x) { return 3.0 - (x - 1.0) * (x - 1.0); }, -3, 3);
  EXPECT_NEAR(m.phi, 1.0, 1e-7);
  EXPECT_NEAR(m.value, 3.0, 1e-12);
  std::vector<double> x, y;
  for (double v = 1; v <= 20; ++v) {
    x.push_back(v);
    y.push_back(3 * v * v);
  }
  EXPECT_NEAR(fit_exponent(x, y), 2.0, 1e-12);
}

TEST(Run, TablesHaveDocumentedColumns) {
  auto c = default_config(Kind::Fig7);
  c.phi_grid.count = 21;
  const auto r = run(c);
  ASSERT_EQ(r.tables.size(), 1u);
  EXPECT_EQ(r.tables[0].columns, (std::vector<std::string>{"phi", "delta_cbs", "delta_cswap", "cfi_cbs", "cfi_cswap"}));
  EXPECT_EQ(r.tables[0].rows.size(), 21u);
  auto f4 = default_config(Kind::Fig4);
  f4.phi_grid.count = 11;
  f4.photon_grid.count = 5;
  const auto r4 = run(f4);
  ASSERT_EQ(r4.tables.size(), 2u);
  EXPECT_EQ(r4.tables[0].name, "fig4ab");
  EXPECT_EQ(r4.tables[1].name, "fig4cd");
}

TEST(Run, EnginesAgreeOnNoon) {
  auto c = parse("[experiment]\nname = custom\n[plan]\ninput = noon\nn = 3\n[grid]\ncount = 31\n");
  const auto analytic = run(c).tables[0];
  c.engine = Engine::Gatesim;
  const auto gate = run(c).tables[0];
  EXPECT_LT(diff(analytic, gate, {"delta", "p_plus", "p_minus"}).max_abs, 1e-12);
  EXPECT_LT(diff(analytic, gate, {"fisher_c"}).max_abs, 1e-3);
}

TEST(Run, OutputsAreDeterministic) {
  auto c = default_config(Kind::Fig5);
  c.phi_grid.count = 31;
  c.photon_grid.count = 6;
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  const auto f1 = write_outputs(run(c), c, d1.string());
  const auto f2 = write_outputs(run(c), c, d2.string());
  ASSERT_EQ(f1.size(), f2.size());
  int csv = 0;
  for (const auto& entry : fs::directory_iterator(d1)) {
    if (entry.path().extension() != ".csv") continue;
    EXPECT_EQ(slurp(entry.path()), slurp(d2 / entry.path().filename())) << entry.path();
    ++csv;
  }
  EXPECT_EQ(csv, 3);
  EXPECT_TRUE(fs::exists(d1 / "fig5.meta.json"));
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  EXPECT_EQ(cli("list-experiments"), 0);
  EXPECT_EQ(cli("--bogus-flag"), 2);
  EXPECT_EQ(cli("run -c /nonexistent.ini"), 2);
  EXPECT_EQ(cli("run -e fig3a --engine gatesim -o " + dir.string()), 2);
  EXPECT_EQ(cli("run -e fig2b --svg -o " + (dir / "a").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "a" / "fig2b.csv"));
  EXPECT_TRUE(fs::exists(dir / "a" / "fig2b.svg"));
  EXPECT_EQ(cli("run -e fig2b -o " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "fig2b.csv"), slurp(dir / "b" / "fig2b.csv"));
  EXPECT_EQ(cli("diff " + (dir / "a" / "fig2b.csv").string() + " " + (dir / "b" / "fig2b.csv").string()), 0);
  EXPECT_EQ(cli("fit-fringe " + (dir / "a" / "fig2b.csv").string()), 0);

  EXPECT_EQ(cli("run -c " + config_path("custom_vacuum_ideal.ini") + " -o " + (dir / "ideal").string()), 0);
  EXPECT_EQ(cli("run -c " + config_path("custom_vacuum_flips.ini") + " -o " + (dir / "flips").string()), 0);
  EXPECT_EQ(cli("diff " + (dir / "ideal" / "custom.csv").string() + " " + (dir / "flips" / "custom.csv").string() +
                " --threshold 1e-8"),
            4);

  // Antisymmetric branch of identical coherent inputs: a numeric failure.
  std::ofstream(dir / "equal.ini") << "[experiment]\nname = custom\nengine = gatesim\n[plan]\ninput = coherent\n"
                                      "alpha1 = 1\nalpha2 = 1\n";
  EXPECT_EQ(cli("run -c " + (dir / "equal.ini").string() + " -o " + (dir / "equal").string()), 3);
  // No closed form for the beam splitter with flips: reported as a config error.
  std::ofstream(dir / "nd.ini") << "[experiment]\nname = custom\n[plan]\ninput = coherent\nalpha1 = 1\ngate = cbs\n"
                                   "[flips]\np1 = 0.1\n";
  EXPECT_EQ(cli("run -c " + (dir / "nd.ini").string() + " -o " + (dir / "nd").string()), 2);
}
