#pragma once

// Closed-form witnesses and Fisher information of the two-swap-test
// interferometer. x denotes the mean photon number alpha^2 throughout.

#include <functional>

#include "swaptest/plan.hpp"

namespace swaptest::analytics {

// Denominators below this switch evaluation to the analytic limit.
inline constexpr double kSingularThreshold = 1e-12;

struct OverlapSet {
  Complex s;                                   // <phi|psi>
  std::function<Complex(double)> s_phi;        // <phi|psi(phi)>
  std::function<Complex(double)> s_psi_self;   // <psi|psi(phi)>
  std::function<Complex(double)> s_phi_self;   // <phi|phi(phi)>
};

OverlapSet overlap_set(const ProbePlan& plan);

struct Probabilities {
  double plus = 0.5;
  double minus = 0.5;
  double delta() const { return plus - minus; }
};

// First swap test on |psi>|phi>: p_pm = (1 +/- |s|^2)/2.
Probabilities first_test_probabilities(const ProbePlan& plan);
// Second swap test after postselecting plan.branch (with flips if given).
Probabilities second_test_probabilities(const ProbePlan& plan, const FlipProbs& flips, double phi);

double witness_noon(int n, int m, double phi);
double witness_general(const ProbePlan& plan, double phi);
double witness_with_flips(const ProbePlan& plan, const FlipProbs& flips, double phi);

double qfi(const ProbePlan& plan);
double cfi(const ProbePlan& plan, const FlipProbs& flips, double phi);

// Controlled beam splitter without conditional phase, inputs (alpha, 0).
double witness_cbs_alpha0(double alpha, double phi);
double cfi_cbs_alpha0(double alpha, double phi);

// Individual closed forms ---------------------------------------------------

double witness_opposite(double alpha, double phi);          // inputs (alpha, -alpha)
double witness_vacuum(double alpha, double phi);            // inputs (alpha, 0)
double witness_vacuum_flips(double alpha, const FlipProbs& flips, double phi);

double qfi_general(double alpha1, double alpha2);           // real amplitudes
double qfi_opposite(double alpha);
double qfi_vacuum(double alpha);

double cfi_opposite(double alpha, double phi);
double cfi_vacuum(double alpha, double phi);
double cfi_opposite_limit(double alpha);                    // phi -> 0
double cfi_vacuum_limit(double alpha);                      // phi -> 0
double cfi_noon(int k, const FlipProbs& flips, double phi); // k = n - m

// Generic route ------------------------------------------------------------

// Value with first and second phase derivative.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

struct ProbabilityJets {
  Jet plus;
  Jet minus;
};

// Second-test probabilities with analytic phase derivatives, for swap-gate
// plans of any kind (and beam-splitter NOON(n, 0) plans).
ProbabilityJets probability_jets(const ProbePlan& plan, const FlipProbs& flips, double phi);

// F_C = sum p'^2 / p, using 2 p'' where p vanishes.
double fisher_from_jets(const ProbabilityJets& jets);

}  // namespace swaptest::analytics
