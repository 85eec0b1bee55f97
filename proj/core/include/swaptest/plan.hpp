#pragma once

#include <complex>
#include <string>
#include <variant>

namespace swaptest {

using Complex = std::complex<double>;

struct NoonInput {
  int n = 1;
  int m = 0;
};

struct CoherentInput {
  Complex alpha1;
  Complex alpha2;
};

enum class GateKind { ControlledSwap, ControlledBeamSplitter };

enum class Branch { Antisymmetric, Symmetric };

// What is probed and how. For ControlledBeamSplitter the conditional phase is
// omitted (the phase-corrected gate is identical to ControlledSwap).
struct ProbePlan {
  std::variant<NoonInput, CoherentInput> input = NoonInput{};
  GateKind gate = GateKind::ControlledSwap;
  Branch branch = Branch::Antisymmetric;

  static ProbePlan noon(int n, int m = 0, GateKind gate = GateKind::ControlledSwap);
  static ProbePlan coherent(Complex alpha1, Complex alpha2,
                            GateKind gate = GateKind::ControlledSwap);

  bool is_noon() const { return std::holds_alternative<NoonInput>(input); }
  bool is_coherent() const { return std::holds_alternative<CoherentInput>(input); }
  const NoonInput& noon_input() const { return std::get<NoonInput>(input); }
  const CoherentInput& coherent_input() const { return std::get<CoherentInput>(input); }

  // Throws DegenerateInputError / OutOfRangeError.
  void validate() const;
  std::string describe() const;
};

// Phase-flip probabilities of the ancilla in the first and second swap test.
struct FlipProbs {
  double p1 = 0.0;
  double p2 = 0.0;

  void validate() const;
  bool none() const { return p1 == 0.0 && p2 == 0.0; }
  // Fringe visibility factor (1-2p1)(1-2p2).
  double visibility() const { return (1.0 - 2.0 * p1) * (1.0 - 2.0 * p2); }
};

const char* to_string(GateKind g);
const char* to_string(Branch b);

// Sign of the first-test outcome that selects the branch: -1 or +1.
inline double branch_sign(Branch b) { return b == Branch::Antisymmetric ? -1.0 : 1.0; }
inline Branch other(Branch b) {
  return b == Branch::Antisymmetric ? Branch::Symmetric : Branch::Antisymmetric;
}

// One phase point of a swap-test interferometer.
struct WitnessPoint {
  double phi = 0.0;
  double p_plus = 0.5;
  double p_minus = 0.5;
  double delta = 0.0;
  double fisher_c = 0.0;
  double leakage = 0.0;
};

}  // namespace swaptest
