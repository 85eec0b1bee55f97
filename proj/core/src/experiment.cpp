#include "swaptest/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "swaptest/analytics.hpp"
#include "swaptest/errors.hpp"
#include "swaptest/gatesim.hpp"
#include "swaptest/toymodel.hpp"

#ifndef SWAPTEST_VERSION_STRING
#define SWAPTEST_VERSION_STRING "0.1.0"
#endif

namespace swaptest::experiment {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

// Rows are independent; any exception is rethrown after the loop.
template <class F>
std::vector<std::vector<double>> parallel_rows(std::size_t n, F&& row) {
  std::vector<std::vector<double>> out(n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      out[static_cast<std::size_t>(i)] = row(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct KindName {
  Kind kind;
  const char* name;
};
constexpr KindName kKinds[] = {{Kind::Fig2a, "fig2a"}, {Kind::Fig2b, "fig2b"}, {Kind::Fig3a, "fig3a"},
                               {Kind::Fig3b, "fig3b"}, {Kind::Fig4, "fig4"},   {Kind::Fig5, "fig5"},
                               {Kind::Fig6, "fig6"},   {Kind::Fig7, "fig7"},   {Kind::Fig8, "fig8"},
                               {Kind::Custom, "custom"}};

const ExperimentInfo& info(Kind k) {
  for (const auto& i : list_experiments())
    if (i.kind == k) return i;
  throw ConfigError("unknown experiment");
}

double coherent_alpha(const ProbePlan& plan) {
  if (!plan.is_coherent()) throw ConfigError("experiment needs a coherent plan");
  return std::abs(plan.coherent_input().alpha1);
}

// Second-test probabilities and Fisher information for one engine.
struct Curve {
  std::vector<WitnessPoint> rows;
  json meta = json::object();
};

constexpr double kFisherZero = 1e-8;

double fd_fisher(double pp_lo, double pp, double pp_hi, double h) {
  double f = 0.0;
  for (int s : {1, -1}) {
    const double lo = s > 0 ? pp_lo : 1.0 - pp_lo, mid = s > 0 ? pp : 1.0 - pp, hi = s > 0 ? pp_hi : 1.0 - pp_hi;
    const double d1 = (hi - lo) / (2.0 * h);
    // Near a zero of p, p'^2/p tends to 2p''; the quotient is roundoff there.
    if (mid > kFisherZero)
      f += d1 * d1 / mid;
    else
      f += 2.0 * (hi - 2.0 * mid + lo) / (h * h);
  }
  return f;
}

toy::ToyParams toy_params(const ExperimentConfig& c, double gamma_x_hz) {
  const double to_angular = 2.0 * kPi * 1e-6;
  const double beta = c.cqed.beta();
  toy::ToyParams p;
  p.tau = c.toy.tau.value_or(c.cqed.tau) * 1e6;
  p.zeta1_beta = kPi / (4.0 * p.tau);
  p.zeta2 = to_angular * c.toy.zeta2.value_or(c.cqed.zeta2_hz());
  p.gamma_z = to_angular * c.toy.gamma_z.value_or(c.cqed.kappa * beta * beta);
  p.gamma_x = to_angular * gamma_x_hz;
  p.validate();
  return p;
}

json diagnostics_json(const open::Diagnostics& d) {
  return {{"max_trace_error", d.max_trace_error},
          {"min_eigenvalue", d.min_eigenvalue},
          {"max_hermiticity_error", d.max_hermiticity_error},
          {"max_leakage", d.max_leakage},
          {"max_top_level_population", d.max_top_level_population},
          {"accepted_steps", d.stats.accepted},
          {"rejected_steps", d.stats.rejected},
          {"rhs_evaluations", d.stats.rhs_evals},
          {"warnings", d.warnings}};
}

// Open-system engines evaluate phi - h, phi, phi + h in one sweep.
std::vector<double> with_neighbours(const std::vector<double>& phis, double h) {
  std::vector<double> out;
  out.reserve(3 * phis.size());
  for (double p : phis) out.insert(out.end(), {p - h, p, p + h});
  return out;
}

Curve from_triples(const std::vector<WitnessPoint>& all, double h) {
  Curve c;
  for (std::size_t i = 0; i + 2 < all.size(); i += 3) {
    WitnessPoint w = all[i + 1];
    w.fisher_c = fd_fisher(all[i].p_plus, w.p_plus, all[i + 2].p_plus, h);
    c.rows.push_back(w);
  }
  return c;
}

Curve sweep(const ExperimentConfig& cfg, const ProbePlan& plan, const FlipProbs& flips, Engine engine,
            const std::vector<double>& phis, bool fisher = true) {
  const double h = cfg.fd_step;
  Curve c;
  switch (engine) {
    case Engine::Analytic: {
      const auto rows = parallel_rows(phis.size(), [&](std::size_t i) {
        const auto p = analytics::second_test_probabilities(plan, flips, phis[i]);
        const double f = fisher ? analytics::cfi(plan, flips, phis[i]) : 0.0;
        return std::vector<double>{p.plus, p.minus, f};
      });
      for (std::size_t i = 0; i < phis.size(); ++i)
        c.rows.push_back({phis[i], rows[i][0], rows[i][1], rows[i][0] - rows[i][1], rows[i][2], 0.0});
      return c;
    }
    case Engine::Gatesim: {
      gatesim::Options opt;
      opt.leakage_tolerance = cfg.leakage_tolerance;
      const gatesim::Protocol proto(plan, gatesim::GateSpec::for_plan(plan), plan.branch, opt);
      auto at = [&](double phi) { return flips.none() ? proto.at(phi) : proto.at_with_flips(phi, flips); };
      const auto rows = parallel_rows(phis.size(), [&](std::size_t i) {
        const auto t = at(phis[i]);
        double f = 0.0;
        if (fisher) f = fd_fisher(at(phis[i] - h).p_plus, t.p_plus, at(phis[i] + h).p_plus, h);
        return std::vector<double>{t.p_plus, t.p_minus, f, t.leakage};
      });
      for (std::size_t i = 0; i < phis.size(); ++i)
        c.rows.push_back({phis[i], rows[i][0], rows[i][1], rows[i][0] - rows[i][1], rows[i][2], rows[i][3]});
      c.meta = {{"field_dim", proto.field_dim()}, {"first_plus", proto.first_plus()},
                {"first_minus", proto.first_minus()}, {"leakage", proto.leakage()}};
      return c;
    }
    case Engine::Toymodel: {
      const auto params = toy_params(cfg, cfg.toy.gamma_x);
      const auto s = toy::toy_protocol_sweep(plan, params, with_neighbours(phis, h), cfg.tolerances);
      c = from_triples(s.rows, h);
      c.meta = {{"first_plus", s.first_plus}, {"first_minus", s.first_minus},
                {"gamma_z", params.gamma_z}, {"gamma_x", params.gamma_x},
                {"phase_flip_probability", params.phase_flip_probability()},
                {"diagnostics", diagnostics_json(s.diagnostics)}};
      break;
    }
    case Engine::Cqed: {
      const auto s = cqed::run_cqed_sweep(plan, cfg.cqed, with_neighbours(phis, h), cfg.tolerances);
      c = from_triples(s.rows, h);
      c.meta = {{"first_plus", s.first_plus}, {"first_minus", s.first_minus},
                {"phase_flip_probability", cfg.cqed.phase_flip_probability()},
                {"units", cqed::conversion_note(cfg.cqed)},
                {"diagnostics", diagnostics_json(s.diagnostics)}};
      break;
    }
  }
  if (!fisher)
    for (auto& r : c.rows) r.fisher_c = 0.0;
  return c;
}

Table witness_table(const std::string& name, const Curve& c) {
  Table t{name, {"phi", "p_plus", "p_minus", "delta", "fisher_c", "leakage"}, {}};
  for (const auto& r : c.rows) t.rows.push_back({r.phi, r.p_plus, r.p_minus, r.delta, r.fisher_c, r.leakage});
  return t;
}

json fit_json(const FringeFit& f) {
  return {{"harmonic", f.harmonic}, {"visibility", f.visibility}, {"offset", f.offset},
          {"phase", f.phase},       {"period", f.period},         {"residual", f.residual}};
}

// Figures ------------------------------------------------------------------

RunResult fig2(const ExperimentConfig& c) {
  const Curve curve = sweep(c, c.plan, c.flips, c.engine, c.phi_grid.values(), false);
  Table t{to_string(c.kind), {"phi", "delta"}, {}};
  for (const auto& r : curve.rows) t.rows.push_back({r.phi, r.delta});
  return {{t}, {{"engine_info", curve.meta}}};
}

RunResult fig3a(const ExperimentConfig& c) {
  Table t{"fig3a", {"n", "qfi_noon", "qfi_opposite", "qfi_vacuum"}, {}};
  for (double n : c.photon_grid.values()) {
    const double k = std::round(n);
    const double noon = (k >= 1 && std::abs(n - k) < 1e-12) ? analytics::qfi(ProbePlan::noon(static_cast<int>(k))) : n * n;
    t.rows.push_back({n, noon, analytics::qfi_opposite(std::sqrt(n / 2.0)), analytics::qfi_vacuum(std::sqrt(n))});
  }
  return {{t}, json::object()};
}

RunResult fig3b(const ExperimentConfig& c) {
  Table t{"fig3b", {"n1", "qfi"}, {}};
  const double n = c.total_photons;
  for (double n1 : c.photon_grid.values()) {
    const double m1 = std::clamp(n1, 0.0, n);
    t.rows.push_back({n1, analytics::qfi_general(std::sqrt(m1), -std::sqrt(n - m1))});
  }
  return {{t}, {{"total_photons", n}}};
}

RunResult fig4(const ExperimentConfig& c) {
  const double a = coherent_alpha(c.plan);
  Table phase{"fig4ab", {"phi", "cfi_opposite", "qfi_opposite", "cfi_vacuum", "qfi_vacuum"}, {}};
  const auto phis = c.phi_grid.values();
  phase.rows = parallel_rows(phis.size(), [&](std::size_t i) {
    return std::vector<double>{phis[i], analytics::cfi_opposite(a, phis[i]), analytics::qfi_opposite(a),
                               analytics::cfi_vacuum(a, phis[i]), analytics::qfi_vacuum(a)};
  });
  Table limit{"fig4cd", {"n", "cfi_opposite", "qfi_opposite", "cfi_vacuum", "qfi_vacuum"}, {}};
  for (double n : c.photon_grid.values()) {
    const double ao = std::sqrt(n / 2.0), av = std::sqrt(n);
    limit.rows.push_back({n, analytics::cfi_opposite_limit(ao), analytics::qfi_opposite(ao),
                          analytics::cfi_vacuum_limit(av), analytics::qfi_vacuum(av)});
  }
  return {{phase, limit}, {{"alpha", a}}};
}

RunResult fig5(const ExperimentConfig& c) {
  const double a = coherent_alpha(c.plan);
  const auto phis = c.phi_grid.values();
  Table noon{"fig5a", {"phi", "cfi_n4", "cfi_n5", "cfi_n6"}, {}};
  noon.rows = parallel_rows(phis.size(), [&](std::size_t i) {
    return std::vector<double>{phis[i], analytics::cfi_noon(4, c.flips, phis[i]),
                               analytics::cfi_noon(5, c.flips, phis[i]), analytics::cfi_noon(6, c.flips, phis[i])};
  });
  const ProbePlan plan = ProbePlan::coherent(a, 0.0);
  const Curve ideal = sweep(c, plan, {}, Engine::Analytic, phis);
  const Curve flipped = sweep(c, plan, c.flips, Engine::Analytic, phis);
  Table coh{"fig5bc", {"phi", "delta_ideal", "delta_flips", "cfi_ideal", "cfi_flips"}, {}};
  for (std::size_t i = 0; i < phis.size(); ++i)
    coh.rows.push_back({phis[i], ideal.rows[i].delta, flipped.rows[i].delta, ideal.rows[i].fisher_c,
                        flipped.rows[i].fisher_c});
  Table scan{"fig5d", {"n", "cfi_max_ideal", "cfi_max_flips", "qfi"}, {}};
  const auto ns = c.photon_grid.values();
  scan.rows = parallel_rows(ns.size(), [&](std::size_t i) {
    const ProbePlan p = ProbePlan::coherent(std::sqrt(ns[i]), 0.0);
    const auto best = [&](const FlipProbs& f) {
      return maximize_over_phase([&](double phi) { return analytics::cfi(p, f, phi); }, 0.0, kPi).value;
    };
    return std::vector<double>{ns[i], best({}), best(c.flips), analytics::qfi(p)};
  });
  return {{noon, coh, scan},
          {{"alpha", a}, {"p1", c.flips.p1}, {"p2", c.flips.p2}, {"visibility_factor", c.flips.visibility()}}};
}

RunResult fig6(const ExperimentConfig& c) {
  const auto phis = c.phi_grid.values();
  const int n = c.plan.noon_input().n - c.plan.noon_input().m;
  const auto t0 = std::chrono::steady_clock::now();
  const Curve sim = sweep(c, c.plan, {}, c.engine, phis, false);
  const double sim_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double p = c.engine == Engine::Cqed ? c.cqed.phase_flip_probability()
                                            : toy_params(c, c.toy.gamma_x).phase_flip_probability();
  const FlipProbs flips{p, p};
  const toy::ToyParams toy1 = toy_params(c, 0.0);
  auto toy_with = [&](double ratio) {
    toy::ToyParams q = toy1;
    q.gamma_x = ratio * q.gamma_z;
    return toy::toy_protocol_sweep(c.plan, q, phis, c.tolerances).rows;
  };
  const auto bits1 = toy_with(1.0), bits10 = toy_with(10.0);

  Table t{"fig6",
          {"phi", "p_plus", "p_minus", "delta", "delta_ideal", "delta_phase_flip", "delta_toy_bitflip_1x",
           "delta_toy_bitflip_10x"},
          {}};
  std::vector<double> delta;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const auto& r = sim.rows[i];
    delta.push_back(r.delta);
    t.rows.push_back({r.phi, r.p_plus, r.p_minus, r.delta, analytics::witness_general(c.plan, r.phi),
                      analytics::witness_with_flips(c.plan, flips, r.phi), bits1[i].delta, bits10[i].delta});
  }
  const FringeFit fit = fit_fringe(phis, delta, std::max(n, 1));
  json meta = {{"n", n},
               {"visibility", fit.visibility},
               {"offset", fit.offset},
               {"fit", fit_json(fit)},
               {"phase_flip_probability", p},
               {"phase_flip_visibility", (1 - 2 * p) * (1 - 2 * p)},
               {"simulation_seconds", sim_seconds},
               {"engine_info", sim.meta}};
  return {{t}, meta};
}

RunResult fig7(const ExperimentConfig& c) {
  const double a = coherent_alpha(c.plan);
  const auto phis = c.phi_grid.values();
  const Curve cbs = sweep(c, ProbePlan::coherent(a, 0.0, GateKind::ControlledBeamSplitter), {}, c.engine, phis);
  const Curve swap = sweep(c, ProbePlan::coherent(a, 0.0), {}, c.engine, phis);
  Table t{"fig7", {"phi", "delta_cbs", "delta_cswap", "cfi_cbs", "cfi_cswap"}, {}};
  for (std::size_t i = 0; i < phis.size(); ++i)
    t.rows.push_back({phis[i], cbs.rows[i].delta, swap.rows[i].delta, cbs.rows[i].fisher_c, swap.rows[i].fisher_c});
  return {{t}, {{"alpha", a}}};
}

RunResult fig8(const ExperimentConfig& c) {
  const auto ns = c.photon_grid.values();
  Table t{"fig8", {"n", "cfi_max_cbs", "phi_max_cbs", "qfi"}, {}};
  t.rows = parallel_rows(ns.size(), [&](std::size_t i) {
    const double a = std::sqrt(ns[i]);
    const auto best = maximize_over_phase([&](double phi) { return analytics::cfi_cbs_alpha0(a, phi); }, 0.0, kPi);
    return std::vector<double>{ns[i], best.value, best.phi, analytics::qfi_vacuum(a)};
  });
  std::vector<double> fmax;
  for (const auto& r : t.rows) fmax.push_back(r[1]);
  return {{t}, {{"fitted_exponent", fit_exponent(ns, fmax)}}};
}

RunResult custom(const ExperimentConfig& c) {
  const Curve curve = sweep(c, c.plan, c.flips, c.engine, c.phi_grid.values());
  json meta = {{"engine_info", curve.meta}};
  if (c.plan.is_noon()) {
    std::vector<double> phi, delta;
    for (const auto& r : curve.rows) {
      phi.push_back(r.phi);
      delta.push_back(r.delta);
    }
    const int n = c.plan.noon_input().n - c.plan.noon_input().m;
    if (n != 0) meta["fit"] = fit_json(fit_fringe(phi, delta, std::abs(n)));
  }
  return {{witness_table("custom", curve)}, meta};
}

// Config parsing ---------------------------------------------------------

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment", {"name", "engine", "output", "svg"}},
      {"plan", {"input", "n", "m", "alpha1", "alpha2", "alpha1_im", "alpha2_im", "gate", "branch"}},
      {"flips", {"p1", "p2"}},
      {"grid", {"start", "stop", "count"}},
      {"photons", {"start", "stop", "count", "total"}},
      {"cqed", {"K", "epsilon", "chi", "zeta1", "zeta2", "kappa", "n_thermal", "kappa2", "tau", "stabilization",
                "n_offset", "alpha_offset", "cat_dim"}},
      {"toy", {"gamma_z", "gamma_x", "tau", "zeta2"}},
      {"tolerance", {"rtol", "atol", "min_step", "leakage", "fd_step"}}};
  return keys;
}

GateKind parse_gate(const std::string& s) {
  if (s == "cswap") return GateKind::ControlledSwap;
  if (s == "cbs") return GateKind::ControlledBeamSplitter;
  throw ConfigError("gate must be cswap or cbs, got '" + s + "'");
}

Branch parse_branch(const std::string& s) {
  if (s == "antisymmetric") return Branch::Antisymmetric;
  if (s == "symmetric") return Branch::Symmetric;
  throw ConfigError("branch must be antisymmetric or symmetric, got '" + s + "'");
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

std::size_t parse_count(const std::string& s) {
  const double v = parse_number(s);
  if (v < 0 || v != std::floor(v)) throw ConfigError("expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

// Names --------------------------------------------------------------------

const char* to_string(Kind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "custom";
}

const char* to_string(Engine e) {
  switch (e) {
    case Engine::Analytic: return "analytic";
    case Engine::Gatesim: return "gatesim";
    case Engine::Toymodel: return "toymodel";
    case Engine::Cqed: return "cqed";
  }
  return "analytic";
}

Kind parse_kind(const std::string& s) {
  for (const auto& e : kKinds)
    if (s == e.name) return e.kind;
  throw ConfigError("unknown experiment '" + s + "'; see list-experiments");
}

Engine parse_engine(const std::string& s) {
  for (Engine e : {Engine::Analytic, Engine::Gatesim, Engine::Toymodel, Engine::Cqed})
    if (s == to_string(e)) return e;
  throw ConfigError("unknown engine '" + s + "'");
}

const std::vector<ExperimentInfo>& list_experiments() {
  using E = Engine;
  static const std::vector<ExperimentInfo> list = {
      {Kind::Fig2a, "fig2a", "witness vs phase, coherent inputs (alpha, -alpha)", {E::Analytic, E::Gatesim}},
      {Kind::Fig2b, "fig2b", "witness vs phase, coherent input (alpha, 0)", {E::Analytic, E::Gatesim}},
      {Kind::Fig3a, "fig3a", "QFI vs total photon number for NOON and entangled coherent probes", {E::Analytic}},
      {Kind::Fig3b, "fig3b", "QFI at fixed energy vs partition n1 between the modes", {E::Analytic}},
      {Kind::Fig4, "fig4", "CFI vs phase at alpha, and phi -> 0 CFI vs photon number", {E::Analytic}},
      {Kind::Fig5, "fig5", "Fisher information and witness with ancilla phase flips", {E::Analytic}},
      {Kind::Fig6, "fig6", "NOON fringe of the Kerr-cat device with phase-flip and bit-flip models",
       {E::Cqed, E::Toymodel}},
      {Kind::Fig7, "fig7", "controlled beam splitter vs controlled swap: witness and CFI, (alpha, 0)",
       {E::Analytic, E::Gatesim}},
      {Kind::Fig8, "fig8", "maximum CFI over phase with the controlled beam splitter vs photon number", {E::Analytic}},
      {Kind::Custom, "custom", "any plan, flips and engine on a phase grid",
       {E::Analytic, E::Gatesim, E::Toymodel, E::Cqed}},
  };
  return list;
}

// Config -------------------------------------------------------------------

void Grid::validate(const char* what) const {
  if (count < 2) throw ConfigError(std::string(what) + ": count must be at least 2");
  if (!(stop > start)) throw ConfigError(std::string(what) + ": stop must exceed start");
}

std::vector<double> Grid::values() const {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = i + 1 == count ? stop : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  return v;
}

ExperimentConfig default_config(Kind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.engine = info(kind).engines.front();
  c.output = std::string("out/") + to_string(kind);
  c.phi_grid = {-kPi, kPi, 401};
  c.photon_grid = {1.0, 30.0, 30};
  switch (kind) {
    case Kind::Fig2a: c.plan = ProbePlan::coherent(5.0, -5.0); break;
    case Kind::Fig2b: c.plan = ProbePlan::coherent(5.0, 0.0); break;
    case Kind::Fig3a: break;
    case Kind::Fig3b: c.photon_grid = {0.0, 5.0, 51}; break;
    case Kind::Fig4: c.plan = ProbePlan::coherent(5.0, -5.0); break;
    case Kind::Fig5:
      c.plan = ProbePlan::coherent(5.0, 0.0);
      c.flips = {0.05, 0.0};
      break;
    case Kind::Fig6:
      c.plan = ProbePlan::noon(2, 0, GateKind::ControlledBeamSplitter);
      c.phi_grid = {0.0, kPi, 101};
      break;
    case Kind::Fig7: c.plan = ProbePlan::coherent(5.0, 0.0); break;
    case Kind::Fig8: c.photon_grid = {4.0, 30.0, 27}; break;
    case Kind::Custom:
      c.plan = ProbePlan::noon(2);
      c.phi_grid = {-kPi, kPi, 101};
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  phi_grid.validate("grid");
  photon_grid.validate("photons");
  const auto& engines = info(kind).engines;
  if (std::find(engines.begin(), engines.end(), engine) == engines.end())
    throw ConfigError(std::string("engine ") + to_string(engine) + " cannot run " + to_string(kind));
  try {
    plan.validate();
    flips.validate();
    cqed.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const bool open = engine == Engine::Toymodel || engine == Engine::Cqed;
  if (open) {
    if (plan.gate != GateKind::ControlledBeamSplitter)
      throw ConfigError("toymodel and cqed engines implement the controlled beam splitter; set gate = cbs");
    if (!flips.none()) throw ConfigError("flips apply to analytic and gatesim engines only");
  }
  if (kind == Kind::Fig6 && !plan.is_noon()) throw ConfigError("fig6 needs a NOON plan");
  if ((kind == Kind::Fig3b) && (photon_grid.start < 0 || photon_grid.stop > total_photons))
    throw ConfigError("fig3b: n1 must lie in [0, total]");
  if (kind == Kind::Fig3a || kind == Kind::Fig4 || kind == Kind::Fig5 || kind == Kind::Fig8)
    if (photon_grid.start < 0) throw ConfigError("photon numbers must be non-negative");
  if (!(tolerances.rtol > 0) || !(tolerances.atol > 0) || !(leakage_tolerance > 0) || !(fd_step > 0))
    throw ConfigError("tolerances must be positive");
  if (toy.gamma_x < 0 || toy.gamma_z.value_or(0.0) < 0) throw ConfigError("toy rates must be non-negative");
}

json ExperimentConfig::to_json() const {
  json plan_j = {{"describe", plan.describe()}, {"gate", swaptest::to_string(plan.gate)},
                 {"branch", swaptest::to_string(plan.branch)}};
  if (plan.is_noon()) {
    plan_j["input"] = "noon";
    plan_j["n"] = plan.noon_input().n;
    plan_j["m"] = plan.noon_input().m;
  } else {
    const auto& in = plan.coherent_input();
    plan_j["input"] = "coherent";
    plan_j["alpha1"] = {in.alpha1.real(), in.alpha1.imag()};
    plan_j["alpha2"] = {in.alpha2.real(), in.alpha2.imag()};
  }
  json cq = {{"K", cqed.K},         {"epsilon", cqed.epsilon}, {"chi", cqed.chi},
             {"zeta1", cqed.zeta1}, {"zeta2", cqed.zeta2_hz()}, {"kappa", cqed.kappa},
             {"n_thermal", cqed.n_thermal}, {"kappa2", cqed.kappa2}, {"tau", cqed.tau},
             {"stabilization", cqed.stabilization}, {"cat_dim", cqed.ancilla_dim()}, {"beta", cqed.beta()}};
  cq["n_offset"] = cqed.n_offset ? json(*cqed.n_offset) : json("plan photon number");
  cq["alpha_offset"] = cqed.alpha_offset ? json(*cqed.alpha_offset) : json("beta^2");
  json toy_j = {{"gamma_x", toy.gamma_x}};
  toy_j["gamma_z"] = toy.gamma_z ? json(*toy.gamma_z) : json("kappa beta^2");
  if (toy.tau) toy_j["tau"] = *toy.tau;
  if (toy.zeta2) toy_j["zeta2"] = *toy.zeta2;
  return {{"experiment", to_string(kind)},
          {"engine", to_string(engine)},
          {"plan", plan_j},
          {"flips", {{"p1", flips.p1}, {"p2", flips.p2}}},
          {"grid", {{"start", phi_grid.start}, {"stop", phi_grid.stop}, {"count", phi_grid.count}}},
          {"photons",
           {{"start", photon_grid.start}, {"stop", photon_grid.stop}, {"count", photon_grid.count},
            {"total", total_photons}}},
          {"cqed", cq},
          {"toy", toy_j},
          {"tolerance",
           {{"rtol", tolerances.rtol}, {"atol", tolerances.atol}, {"min_step", tolerances.min_step},
            {"leakage", leakage_tolerance}, {"fd_step", fd_step}}},
          {"rates_note", "rates entered in Hz, converted to angular rates as 2*pi*f"}};
}

double parse_number(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ConfigError("empty number");
  double sign = 1.0;
  if (s[0] == '-' || s[0] == '+') {
    if (s[0] == '-') sign = -1.0;
    s.erase(0, 1);
  }
  double value = 1.0;
  char op = '*';
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find_first_of("*/", pos);
    const std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    double v;
    if (tok == "pi") {
      v = kPi;
    } else {
      std::size_t used = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + text + "'");
      }
      if (used != tok.size()) {
        if (tok.substr(used) == "pi")
          v *= kPi;
        else
          throw ConfigError("cannot parse number '" + text + "'");
      }
    }
    if (op == '*')
      value *= v;
    else
      value /= v;
    if (next == std::string::npos) break;
    op = s[next];
    pos = next + 1;
  }
  return sign * value;
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
  auto get = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '.')); };
  auto number = [&](const std::string& path) -> std::optional<double> {
    if (auto v = get(path)) return parse_number(*v);
    return std::nullopt;
  };

  const auto name = get("experiment.name");
  ExperimentConfig c = default_config(name ? parse_kind(*name) : Kind::Custom);
  if (auto v = get("experiment.engine")) c.engine = parse_engine(*v);
  if (auto v = get("experiment.output")) c.output = *v;
  if (auto v = get("experiment.svg")) c.svg = parse_bool(*v);

  // Plan: keys override the figure default.
  const bool plan_given = tree.get_child_optional("plan").has_value();
  if (plan_given) {
    std::string input = c.plan.is_noon() ? "noon" : "coherent";
    if (auto v = get("plan.input")) input = *v;
    const GateKind gate = get("plan.gate") ? parse_gate(*get("plan.gate")) : c.plan.gate;
    const Branch branch = get("plan.branch") ? parse_branch(*get("plan.branch")) : c.plan.branch;
    if (input == "noon") {
      const NoonInput base = c.plan.is_noon() ? c.plan.noon_input() : NoonInput{};
      const int n = static_cast<int>(get("plan.n") ? parse_count(*get("plan.n")) : base.n);
      const int m = static_cast<int>(get("plan.m") ? parse_count(*get("plan.m")) : base.m);
      c.plan = ProbePlan::noon(n, m, gate);
    } else if (input == "coherent") {
      const CoherentInput base = c.plan.is_coherent() ? c.plan.coherent_input() : CoherentInput{1.0, 0.0};
      const Complex a1{number("plan.alpha1").value_or(base.alpha1.real()),
                       number("plan.alpha1_im").value_or(base.alpha1.imag())};
      const Complex a2{number("plan.alpha2").value_or(base.alpha2.real()),
                       number("plan.alpha2_im").value_or(base.alpha2.imag())};
      c.plan = ProbePlan::coherent(a1, a2, gate);
    } else {
      throw ConfigError("plan input must be noon or coherent, got '" + input + "'");
    }
    c.plan.branch = branch;
  }
  if (c.kind == Kind::Fig6) c.plan.gate = GateKind::ControlledBeamSplitter;

  if (auto v = number("flips.p1")) c.flips.p1 = *v;
  if (auto v = number("flips.p2")) c.flips.p2 = *v;
  if (auto v = number("grid.start")) c.phi_grid.start = *v;
  if (auto v = number("grid.stop")) c.phi_grid.stop = *v;
  if (auto v = get("grid.count")) c.phi_grid.count = parse_count(*v);
  if (auto v = number("photons.start")) c.photon_grid.start = *v;
  if (auto v = number("photons.stop")) c.photon_grid.stop = *v;
  if (auto v = get("photons.count")) c.photon_grid.count = parse_count(*v);
  if (auto v = number("photons.total")) c.total_photons = *v;

  auto& q = c.cqed;
  for (auto [key, field] : std::initializer_list<std::pair<const char*, double*>>{
           {"cqed.K", &q.K}, {"cqed.epsilon", &q.epsilon}, {"cqed.chi", &q.chi}, {"cqed.zeta1", &q.zeta1},
           {"cqed.kappa", &q.kappa}, {"cqed.n_thermal", &q.n_thermal}, {"cqed.kappa2", &q.kappa2},
           {"cqed.tau", &q.tau}, {"cqed.stabilization", &q.stabilization}})
    if (auto v = number(key)) *field = *v;
  if (auto v = number("cqed.zeta2")) q.zeta2 = *v;
  if (auto v = number("cqed.n_offset")) q.n_offset = *v;
  if (auto v = number("cqed.alpha_offset")) q.alpha_offset = *v;
  if (auto v = get("cqed.cat_dim")) q.cat_dim = parse_count(*v);

  if (auto v = number("toy.gamma_z")) c.toy.gamma_z = *v;
  if (auto v = number("toy.gamma_x")) c.toy.gamma_x = *v;
  if (auto v = number("toy.tau")) c.toy.tau = *v;
  if (auto v = number("toy.zeta2")) c.toy.zeta2 = *v;

  if (auto v = number("tolerance.rtol")) c.tolerances.rtol = *v;
  if (auto v = number("tolerance.atol")) c.tolerances.atol = *v;
  if (auto v = number("tolerance.min_step")) c.tolerances.min_step = *v;
  if (auto v = number("tolerance.leakage")) c.leakage_tolerance = *v;
  if (auto v = number("tolerance.fd_step")) c.fd_step = *v;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

// Tables -------------------------------------------------------------------

std::size_t Table::column_index(const std::string& name_) const {
  const auto it = std::find(columns.begin(), columns.end(), name_);
  if (it == columns.end()) throw ConfigError("table " + name + " has no column '" + name_ + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name_) const {
  const std::size_t k = column_index(name_);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(k));
  return out;
}

RunResult run(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r;
  switch (config.kind) {
    case Kind::Fig2a:
    case Kind::Fig2b: r = fig2(config); break;
    case Kind::Fig3a: r = fig3a(config); break;
    case Kind::Fig3b: r = fig3b(config); break;
    case Kind::Fig4: r = fig4(config); break;
    case Kind::Fig5: r = fig5(config); break;
    case Kind::Fig6: r = fig6(config); break;
    case Kind::Fig7: r = fig7(config); break;
    case Kind::Fig8: r = fig8(config); break;
    case Kind::Custom: r = custom(config); break;
  }
  r.metadata["config"] = config.to_json();
  r.metadata["code_version"] = SWAPTEST_VERSION_STRING;
  r.metadata["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<std::string> write_outputs(const RunResult& result, const ExperimentConfig& config,
                                       const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> files;
  for (const auto& t : result.tables) {
    const fs::path csv = fs::path(dir) / (t.name + ".csv");
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + csv.string());
    write_csv(t, out);
    files.push_back(csv.string());
    if (config.svg) {
      const fs::path svg = fs::path(dir) / (t.name + ".svg");
      std::ofstream s(svg, std::ios::binary);
      write_svg(t, s);
      files.push_back(svg.string());
    }
  }
  json meta = result.metadata;
  meta["files"] = files;
  const fs::path mp = fs::path(dir) / (std::string(to_string(config.kind)) + ".meta.json");
  std::ofstream m(mp);
  m << meta.dump(2) << "\n";
  files.push_back(mp.string());
  return files;
}

// Analysis -----------------------------------------------------------------

FringeFit fit_fringe(const std::vector<double>& phi, const std::vector<double>& delta, std::optional<int> harmonic) {
  if (phi.size() != delta.size() || phi.size() < 3) throw ConfigError("fringe fit needs at least 3 points");
  auto fit_one = [&](int n) {
    const auto m = static_cast<Eigen::Index>(phi.size());
    Eigen::MatrixXd a(m, 3);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      a(i, 0) = 1.0;
      a(i, 1) = std::cos(n * phi[static_cast<std::size_t>(i)]);
      a(i, 2) = std::sin(n * phi[static_cast<std::size_t>(i)]);
      y(i) = delta[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector3d x = a.colPivHouseholderQr().solve(y);
    FringeFit f;
    f.harmonic = n;
    f.offset = x(0);
    f.visibility = std::hypot(x(1), x(2));
    f.phase = std::atan2(x(2), x(1));
    f.period = 2.0 * kPi / n;
    f.residual = std::sqrt((a * x - y).squaredNorm() / static_cast<double>(m));
    return f;
  };
  if (harmonic) {
    if (*harmonic < 1) throw ConfigError("harmonic must be positive");
    return fit_one(*harmonic);
  }
  FringeFit best = fit_one(1);
  for (int n = 2; n <= 12; ++n) {
    const FringeFit f = fit_one(n);
    if (f.residual < best.residual - 1e-12) best = f;
  }
  return best;
}

DiffReport diff(const Table& a, const Table& b, const std::vector<std::string>& only) {
  if (a.columns != b.columns) throw ConfigError("tables have different columns");
  if (a.rows.size() != b.rows.size()) throw ConfigError("tables have different row counts");
  for (const auto& c : only) a.column_index(c);
  DiffReport r;
  for (std::size_t k = 0; k < a.columns.size(); ++k) {
    if (!only.empty() && std::find(only.begin(), only.end(), a.columns[k]) == only.end()) continue;
    ColumnDiff d{a.columns[k], 0.0, 0.0};
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      const double e = std::abs(a.rows[i].at(k) - b.rows[i].at(k));
      d.max_abs = std::max(d.max_abs, e);
      d.mean_abs += e;
    }
    if (!a.rows.empty()) d.mean_abs /= static_cast<double>(a.rows.size());
    r.max_abs = std::max(r.max_abs, d.max_abs);
    r.columns.push_back(d);
  }
  const auto it = std::find(a.columns.begin(), a.columns.end(), "delta");
  if (it != a.columns.end() && !a.rows.empty()) {
    auto span = [&](const Table& t) {
      const auto v = t.column("delta");
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return *hi - *lo;
    };
    const double sa = span(a);
    if (sa > 0) r.visibility_ratio = span(b) / sa;
  }
  return r;
}

PhaseMaximum maximize_over_phase(const std::function<double(double)>& f, double lo, double hi, std::size_t samples) {
  if (samples < 3 || !(hi > lo)) throw OutOfRangeError("bad phase interval");
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = std::max(lo, lo + step * (static_cast<double>(best) - 1.0));
  const double b = std::min(hi, lo + step * (static_cast<double>(best) + 1.0));
  const auto [x, neg] = boost::math::tools::brent_find_minima([&](double p) { return -f(p); }, a, b, 52);
  if (-neg >= best_v) return {x, -neg};
  return {lo + step * static_cast<double>(best), best_v};
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw OutOfRangeError("exponent fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw OutOfRangeError("exponent fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace swaptest::experiment
