#include "swaptest/analytics.hpp"

#include <cmath>

#include "swaptest/errors.hpp"
#include "swaptest/fockcore.hpp"

namespace swaptest::analytics {

namespace {

using std::cos;
using std::exp;
using std::expm1;
using std::sin;

double sq(double v) { return v * v; }

bool is_real(Complex z) { return z.imag() == 0.0; }

// Plans whose beam-splitter variant has a closed form: NOON(n, 0) and (alpha, 0).
void require_cbs_supported(const ProbePlan& plan) {
  if (plan.is_noon()) {
    if (plan.noon_input().m != 0)
      throw NotDerivedError("beam-splitter gate: only NOON(n, 0) inputs have a closed form");
    return;
  }
  const auto& c = plan.coherent_input();
  if (c.alpha2 != Complex{} || !is_real(c.alpha1))
    throw NotDerivedError("beam-splitter gate: only real (alpha, 0) inputs have a closed form");
}

// |s|^2 for the first swap test.
double static_overlap_sq(const ProbePlan& plan) {
  if (plan.is_noon()) return 0.0;
  const auto& c = plan.coherent_input();
  return exp(-std::norm(c.alpha1 - c.alpha2));
}

void require_branch(const ProbePlan& plan, Branch branch) {
  if (branch != Branch::Antisymmetric || plan.is_noon()) return;
  const auto& c = plan.coherent_input();
  if (-0.5 * expm1(-std::norm(c.alpha1 - c.alpha2)) < fock::kProbabilityFloor)
    throw UndefinedBranchError("antisymmetric branch does not exist for |s| = 1");
}

// Witness of a pure postselected branch from the overlap functions.
double witness_from_overlaps(const OverlapSet& o, double sigma, double phi) {
  const double a = std::norm(o.s_phi(phi)) + std::norm(o.s_phi(-phi));
  const double b = std::real(o.s_psi_self(phi) * o.s_phi_self(-phi) +
                             o.s_psi_self(-phi) * o.s_phi_self(phi));
  return (a + sigma * b) / (2.0 * (1.0 + sigma * std::norm(o.s)));
}

struct Curves {
  double s2 = 0.0;  // |s|^2
  Jet a;            // (|s(phi)|^2 + |s(-phi)|^2) / 2
  Jet b;            // Re[s_psi(phi) s_phi(-phi)]
};

Curves coherent_curves(Complex alpha1, Complex alpha2, double phi) {
  const double n1 = std::norm(alpha1), n2 = std::norm(alpha2);
  const Complex u = std::conj(alpha2) * alpha1;
  auto f = [&](double p) {
    const Complex w = u * std::polar(1.0, -p);
    const double g = 2.0 * w.real(), g1 = 2.0 * w.imag(), g2 = -g;
    const double v = exp(-n1 - n2 + g);
    return Jet{v, g1 * v, (g2 + g1 * g1) * v};
  };
  const Jet fp = f(phi), fm = f(-phi);
  Curves c;
  c.s2 = exp(-std::norm(alpha1 - alpha2));
  c.a = {0.5 * (fp.v + fm.v), 0.5 * (fp.d1 - fm.d1), 0.5 * (fp.d2 + fm.d2)};
  const Complex em = std::polar(1.0, -phi), ep = std::polar(1.0, phi);
  const Complex I{0.0, 1.0};
  const Complex w = n1 * (em - 1.0) + n2 * (ep - 1.0);
  const Complex w1 = -I * n1 * em + I * n2 * ep;
  const Complex w2 = -n1 * em - n2 * ep;
  const Complex h = exp(w);
  c.b = {h.real(), (w1 * h).real(), ((w2 + w1 * w1) * h).real()};
  return c;
}

Curves noon_curves(int k, double phi) {
  Curves c;
  const double kk = k;
  c.b = {cos(kk * phi), -kk * sin(kk * phi), -kk * kk * cos(kk * phi)};
  return c;
}

Curves plan_curves(const ProbePlan& plan, double phi) {
  if (plan.is_noon()) {
    const auto& in = plan.noon_input();
    if (plan.gate == GateKind::ControlledBeamSplitter && in.n % 2 != 0) return Curves{};
    return noon_curves(in.n - in.m, phi);
  }
  if (plan.gate == GateKind::ControlledBeamSplitter)
    throw NotDerivedError("beam-splitter gate with coherent inputs: use witness_cbs_alpha0 or gatesim");
  const auto& in = plan.coherent_input();
  return coherent_curves(in.alpha1, in.alpha2, phi);
}

// p_plus, p_minus of a pure branch as jets.
ProbabilityJets branch_jets(const Curves& c, double sigma) {
  const double norm = 2.0 * (1.0 + sigma * c.s2);
  const double base = (1.0 + sigma * c.s2) / norm;
  const Jet x{(c.a.v + sigma * c.b.v) / norm, (c.a.d1 + sigma * c.b.d1) / norm,
              (c.a.d2 + sigma * c.b.d2) / norm};
  return {{base + x.v, x.d1, x.d2}, {base - x.v, -x.d1, -x.d2}};
}

Jet mix(const Jet& a, double wa, const Jet& b, double wb) {
  return {wa * a.v + wb * b.v, wa * a.d1 + wb * b.d1, wa * a.d2 + wb * b.d2};
}

}  // namespace

// Overlaps -------------------------------------------------------------------

OverlapSet overlap_set(const ProbePlan& plan) {
  plan.validate();
  OverlapSet o;
  if (plan.is_noon()) {
    const int n = plan.noon_input().n, m = plan.noon_input().m;
    o.s = 0.0;
    o.s_phi = [](double) { return Complex{}; };
    o.s_psi_self = [n](double p) { return std::polar(1.0, -n * p); };
    o.s_phi_self = [m](double p) { return std::polar(1.0, -m * p); };
    return o;
  }
  const Complex a1 = plan.coherent_input().alpha1, a2 = plan.coherent_input().alpha2;
  const double half = -0.5 * (std::norm(a1) + std::norm(a2));
  o.s = exp(half + std::conj(a2) * a1);
  o.s_phi = [=](double p) { return exp(half + std::conj(a2) * a1 * std::polar(1.0, -p)); };
  o.s_psi_self = [n = std::norm(a1)](double p) { return exp(n * (std::polar(1.0, -p) - 1.0)); };
  o.s_phi_self = [n = std::norm(a2)](double p) { return exp(n * (std::polar(1.0, -p) - 1.0)); };
  return o;
}

Probabilities first_test_probabilities(const ProbePlan& plan) {
  plan.validate();
  if (plan.gate == GateKind::ControlledBeamSplitter) require_cbs_supported(plan);
  const double s2 = static_overlap_sq(plan);
  return {0.5 * (1.0 + s2), 0.5 * (1.0 - s2)};
}

Probabilities second_test_probabilities(const ProbePlan& plan, const FlipProbs& flips, double phi) {
  if (plan.gate == GateKind::ControlledBeamSplitter && plan.is_coherent()) {
    if (!flips.none() || plan.branch != Branch::Antisymmetric)
      throw NotDerivedError("beam-splitter gate with coherent inputs: only the ideal antisymmetric branch is derived");
    require_cbs_supported(plan);
    const double d = witness_cbs_alpha0(plan.coherent_input().alpha1.real(), phi);
    return {0.5 * (1.0 + d), 0.5 * (1.0 - d)};
  }
  const auto j = probability_jets(plan, flips, phi);
  return {j.plus.v, j.minus.v};
}

// Witnesses ------------------------------------------------------------------

double witness_noon(int n, int m, double phi) {
  if (n == m) throw DegenerateInputError("NOON witness requires n != m");
  return -cos(static_cast<double>(n - m) * phi);
}

double witness_general(const ProbePlan& plan, double phi) {
  plan.validate();
  require_branch(plan, plan.branch);
  const double sigma = branch_sign(plan.branch);
  if (plan.gate == GateKind::ControlledBeamSplitter) {
    require_cbs_supported(plan);
    if (plan.is_coherent()) {
      if (plan.branch != Branch::Antisymmetric)
        throw NotDerivedError("beam-splitter gate: symmetric branch with coherent inputs not derived");
      return witness_cbs_alpha0(plan.coherent_input().alpha1.real(), phi);
    }
    const int n = plan.noon_input().n;
    return n % 2 == 0 ? sigma * cos(n * phi) : 0.0;
  }
  return witness_from_overlaps(overlap_set(plan), sigma, phi);
}

double witness_with_flips(const ProbePlan& plan, const FlipProbs& flips, double phi) {
  flips.validate();
  if (flips.none()) return witness_general(plan, phi);
  plan.validate();
  require_branch(plan, plan.branch);
  if (plan.is_noon()) {
    const auto& in = plan.noon_input();
    if (plan.gate == GateKind::ControlledBeamSplitter) {
      require_cbs_supported(plan);
      if (in.n % 2 != 0) return 0.0;
    }
    return branch_sign(plan.branch) * flips.visibility() * cos((in.n - in.m) * phi);
  }
  if (plan.gate == GateKind::ControlledBeamSplitter)
    throw NotDerivedError("beam-splitter gate with coherent inputs and flips: use gatesim");
  const auto& in = plan.coherent_input();
  if (plan.branch == Branch::Antisymmetric && is_real(in.alpha1) && in.alpha2 == Complex{})
    return witness_vacuum_flips(in.alpha1.real(), flips, phi);
  const auto j = probability_jets(plan, flips, phi);
  return j.plus.v - j.minus.v;
}

double witness_opposite(double alpha, double phi) {
  const double x = alpha * alpha, c = cos(phi);
  if (x == 0.0) return -c;
  const double ac = std::abs(c);
  const double r = exp(2.0 * x * (ac - 1.0)) * (-expm1(-4.0 * x * ac)) / (-expm1(-4.0 * x));
  return c < 0.0 ? r : -r;
}

double witness_vacuum(double alpha, double phi) {
  const double x = alpha * alpha, c = cos(phi), xs = x * sin(phi);
  if (x == 0.0) return -c;
  if (x < 1.0) {
    const double one_minus = -expm1(x * c) * cos(xs) + 2.0 * sq(sin(0.5 * xs));
    return one_minus / expm1(x);
  }
  return (exp(-x) - exp(x * (c - 1.0)) * cos(xs)) / (-expm1(-x));
}

double witness_vacuum_flips(double alpha, const FlipProbs& flips, double phi) {
  flips.validate();
  const double x = alpha * alpha, c = cos(phi), xs = x * sin(phi);
  double t2;
  if (x == 0.0) {
    t2 = -0.5 * (1.0 + c);
  } else if (x < 1.0) {
    t2 = (-expm1(x * (1.0 + c)) * cos(xs) + 2.0 * sq(sin(0.5 * xs))) / expm1(2.0 * x);
  } else {
    t2 = (exp(-2.0 * x) - exp(x * (c - 1.0)) * cos(xs)) / (-expm1(-2.0 * x));
  }
  return (1.0 - 2.0 * flips.p2) * (witness_vacuum(alpha, phi) - 2.0 * flips.p1 * t2);
}

double witness_cbs_alpha0(double alpha, double phi) {
  const double x = alpha * alpha, c = cos(phi), xs = x * sin(phi);
  if (x == 0.0) return 0.0;
  if (x < 1.0) {
    const double one_minus_c = -2.0 * sq(std::sinh(0.5 * x * c)) * cos(xs) + 2.0 * sq(sin(0.5 * xs));
    return one_minus_c / expm1(x);
  }
  const double ch = 0.5 * (exp(x * (c - 1.0)) + exp(-x * (1.0 + c)));
  return (exp(-x) - ch * cos(xs)) / (-expm1(-x));
}

// Quantum Fisher information -------------------------------------------------

double qfi_general(double alpha1, double alpha2) {
  const double d2 = sq(alpha1 - alpha2);
  const double q = -expm1(-d2);
  if (q < 2.0 * fock::kProbabilityFloor)
    throw UndefinedBranchError("QFI undefined for alpha1 = alpha2");
  const double e = exp(-d2);
  const double a2 = sq(alpha1), b2 = sq(alpha2), ab = alpha1 * alpha2;
  const double first = 2.0 * (a2 + a2 * a2 + b2 + b2 * b2 - 2.0 * e * ab * (1.0 + ab)) / q;
  return first - sq(a2 + b2 - 2.0 * e * ab) / (q * q);
}

double qfi_opposite(double alpha) {
  const double x = alpha * alpha;
  if (x < 1e-4) return 1.0 + 4.0 * x * x;
  const double sh = std::sinh(2.0 * x);
  return 4.0 * x / std::tanh(2.0 * x) - (std::isinf(sh) ? 0.0 : 4.0 * x * x / (sh * sh));
}

double qfi_vacuum(double alpha) {
  const double x = alpha * alpha;
  if (x < 1e-4) return 1.0 + 2.0 * x + 0.75 * x * x + x * x * x / 12.0;
  const double em = -expm1(-x);
  const double inner = 2.0 * (em - x * exp(-x)) + x;
  return x * inner / (em * em);
}

double qfi(const ProbePlan& plan) {
  plan.validate();
  if (plan.is_noon()) {
    const auto& in = plan.noon_input();
    if (plan.gate == GateKind::ControlledBeamSplitter) require_cbs_supported(plan);
    const double k = in.n - in.m;
    return k * k;
  }
  const auto& in = plan.coherent_input();
  if (!is_real(in.alpha1) || !is_real(in.alpha2))
    throw NotDerivedError("coherent QFI is derived for real amplitudes only");
  if (plan.branch != Branch::Antisymmetric)
    throw NotDerivedError("coherent QFI is derived for the antisymmetric branch only");
  if (plan.gate == GateKind::ControlledBeamSplitter) require_cbs_supported(plan);
  const double a1 = in.alpha1.real(), a2 = in.alpha2.real();
  if (a1 == a2) throw UndefinedBranchError("QFI undefined for alpha1 = alpha2");
  if (a1 == -a2) return qfi_opposite(a1);
  if (a2 == 0.0) return qfi_vacuum(a1);
  if (a1 == 0.0) return qfi_vacuum(a2);
  return qfi_general(a1, a2);
}

// Classical Fisher information -----------------------------------------------

double cfi_opposite_limit(double alpha) {
  const double x = alpha * alpha;
  return x == 0.0 ? 1.0 : 2.0 * x / std::tanh(2.0 * x);
}

double cfi_vacuum_limit(double alpha) {
  const double x = alpha * alpha;
  return x == 0.0 ? 1.0 : x * (1.0 + x) / (-expm1(-x));
}

double cfi_opposite(double alpha, double phi) {
  const double x = alpha * alpha, s = sin(phi);
  const double cm1 = -2.0 * sq(sin(0.5 * phi));
  const double cp1 = 2.0 * sq(cos(0.5 * phi));
  const double den = (-expm1(4.0 * x * cm1)) * (-expm1(-4.0 * x * cp1));
  if (den < kSingularThreshold) return cfi_opposite_limit(alpha);
  return 4.0 * x * x * s * s * sq(exp(2.0 * x * cm1) + exp(-2.0 * x * cp1)) / den;
}

double cfi_vacuum(double alpha, double phi) {
  const double x = alpha * alpha, s = sin(phi), xs = x * s;
  const double cm1 = -2.0 * sq(sin(0.5 * phi));
  const double f1 = -expm1(x * cm1) * cos(xs) + 2.0 * sq(sin(0.5 * xs));
  const double f2 = -2.0 * expm1(-x) - f1;
  const double den = f1 * f2;
  if (den < kSingularThreshold) return cfi_vacuum_limit(alpha);
  return x * x * exp(2.0 * x * cm1) * sq(sin(phi + xs)) / den;
}

double cfi_cbs_alpha0(double alpha, double phi) {
  const double x = alpha * alpha, c = cos(phi), s = sin(phi), xs = x * s;
  if (x == 0.0) return 0.0;
  double num, den;
  if (x < 1.0) {
    const double omc = -2.0 * sq(std::sinh(0.5 * x * c)) * cos(xs) + 2.0 * sq(sin(0.5 * xs));
    const double em = expm1(x);
    den = (em + omc) * (em - omc);
    num = x * x * sq(s * std::sinh(x * c) * cos(xs) + c * std::cosh(x * c) * sin(xs));
  } else {
    const double ep = exp(x * (c - 1.0)), en = exp(-x * (1.0 + c));
    const double ch = 0.5 * (ep + en), sh = 0.5 * (ep - en);
    const double cs = ch * cos(xs);
    den = (1.0 - cs) * (1.0 - 2.0 * exp(-x) + cs);
    num = x * x * sq(s * sh * cos(xs) + c * ch * sin(xs));
  }
  if (den < kSingularThreshold) return 4.0 * x * x * sq(s * c);
  return num / den;
}

double cfi_noon(int k, const FlipProbs& flips, double phi) {
  flips.validate();
  const double kk = k;
  const double v2 = sq(flips.visibility());
  if (v2 == 1.0) return kk * kk;
  const double s2 = sq(sin(kk * phi));
  return v2 * kk * kk * s2 / ((1.0 - v2) + v2 * s2);
}

double cfi(const ProbePlan& plan, const FlipProbs& flips, double phi) {
  plan.validate();
  flips.validate();
  if (plan.is_noon()) {
    const auto& in = plan.noon_input();
    if (plan.gate == GateKind::ControlledBeamSplitter) {
      require_cbs_supported(plan);
      if (in.n % 2 != 0) return 0.0;
    }
    return cfi_noon(in.n - in.m, flips, phi);
  }
  require_branch(plan, plan.branch);
  const auto& in = plan.coherent_input();
  const bool real = is_real(in.alpha1) && is_real(in.alpha2);
  const bool closed = flips.none() && plan.branch == Branch::Antisymmetric && real;
  if (plan.gate == GateKind::ControlledBeamSplitter) {
    require_cbs_supported(plan);
    if (!closed) throw NotDerivedError("beam-splitter gate: only the ideal antisymmetric CFI is derived");
    return cfi_cbs_alpha0(in.alpha1.real(), phi);
  }
  if (closed) {
    const double a1 = in.alpha1.real(), a2 = in.alpha2.real();
    if (a1 == -a2) return cfi_opposite(a1, phi);
    if (a2 == 0.0) return cfi_vacuum(a1, phi);
    if (a1 == 0.0) return cfi_vacuum(a2, phi);
  }
  return fisher_from_jets(probability_jets(plan, flips, phi));
}

// Generic route --------------------------------------------------------------

ProbabilityJets probability_jets(const ProbePlan& plan, const FlipProbs& flips, double phi) {
  plan.validate();
  flips.validate();
  if (plan.gate == GateKind::ControlledBeamSplitter) require_cbs_supported(plan);
  require_branch(plan, plan.branch);
  const Curves c = plan_curves(plan, phi);
  const double sigma = branch_sign(plan.branch);
  ProbabilityJets p = branch_jets(c, sigma);
  if (flips.p1 > 0.0) {
    if (sigma > 0.0) require_branch(plan, Branch::Antisymmetric);
    const ProbabilityJets q = branch_jets(c, -sigma);
    p = {mix(p.plus, 1.0 - flips.p1, q.plus, flips.p1), mix(p.minus, 1.0 - flips.p1, q.minus, flips.p1)};
  }
  if (flips.p2 > 0.0) {
    const double r = flips.p2;
    p = {mix(p.plus, 1.0 - r, p.minus, r), mix(p.minus, 1.0 - r, p.plus, r)};
  }
  return p;
}

double fisher_from_jets(const ProbabilityJets& jets) {
  auto term = [](const Jet& p) {
    if (p.v < kSingularThreshold) return std::max(0.0, 2.0 * p.d2);
    return p.d1 * p.d1 / p.v;
  };
  return term(jets.plus) + term(jets.minus);
}

}  // namespace swaptest::analytics
