#pragma once

// Two-level ancilla with phase- and bit-flip rates driving the conditional
// beam splitter. Rates in rad/us, times in us.

#include <numbers>
#include <vector>

#include "swaptest/fockcore.hpp"
#include "swaptest/lindblad.hpp"
#include "swaptest/open_protocol.hpp"

namespace swaptest::toy {

struct ToyParams {
  double zeta1_beta = std::numbers::pi / 2.4;  // balanced for tau = 0.6
  double zeta2 = 1.3060;
  double gamma_z = 0.0;
  double gamma_x = 0.0;
  double tau = 0.6;

  void validate() const;
  double bs_time() const { return std::numbers::pi / (4.0 * zeta2); }
  // Phase-flip probability per swap test, gamma_z * tau.
  double phase_flip_probability() const { return gamma_z * tau; }

  // zeta1_beta = pi / (4 tau)
  static ToyParams balanced(double tau, double zeta2, double gamma_z, double gamma_x);
};

enum class Segment { Cpbs, Bs };

// Layout [2, d, d]: qubit, field a, field b.
fock::Operator toy_cpbs_hamiltonian(const fock::SpaceLayout& layout, const ToyParams& params);
fock::Operator toy_bs_hamiltonian(const fock::SpaceLayout& layout, const ToyParams& params);

fock::DensityState evolve_toy(const fock::DensityState& state, const ToyParams& params, double duration,
                              Segment segment = Segment::Cpbs, const lindblad::Tolerances& tol = {},
                              lindblad::Stats* stats = nullptr);

open::ProtocolModel toy_protocol_model(const open::FieldPreparation& fields, const ToyParams& params,
                                       const lindblad::Tolerances& tol = {});

struct ToySweep {
  std::vector<WitnessPoint> rows;
  double first_plus = 0.0;
  double first_minus = 0.0;
  open::Diagnostics diagnostics;
};

ToySweep toy_protocol_sweep(const ProbePlan& plan, const ToyParams& params, const std::vector<double>& phis,
                            const lindblad::Tolerances& tol = {});

}  // namespace swaptest::toy
