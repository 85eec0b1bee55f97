#pragma once

// Gate-level state-vector simulation of the two-swap-test protocol with an
// explicit two-level ancilla.

#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "swaptest/fockcore.hpp"
#include "swaptest/plan.hpp"

namespace swaptest::gatesim {

struct GateSpec {
  GateKind kind = GateKind::ControlledSwap;
  bool include_conditional_phase = true;
  double splitting_angle = std::numbers::pi / 4;  // beam-splitter mixing angle

  void validate() const;
  // Gate used for a plan: cswap, or the balanced beam splitter without phase.
  static GateSpec for_plan(const ProbePlan& plan);
};

// Beam splitter exp(theta (a^dagger b - a b^dagger)) on modes a, b.
fock::Operator beam_splitter_unitary(const fock::SpaceLayout& layout, std::size_t mode_a,
                                     std::size_t mode_b, double theta);
fock::Operator phase_shift(const fock::SpaceLayout& layout, std::size_t mode, double phi);
fock::Operator controlled_swap_unitary(const fock::SpaceLayout& layout, std::size_t ancilla,
                                       std::size_t mode_a, std::size_t mode_b);
// Composite of the conditional beam splitter and the deterministic one:
// identity for ancilla |0>, (phase-corrected) swap for ancilla |1>.
fock::Operator controlled_bs_unitary(const fock::SpaceLayout& layout, const GateSpec& spec,
                                     std::size_t ancilla, std::size_t mode_a, std::size_t mode_b);

// Amplitudes after the deterministic beam splitter, ((a1-a2)/sqrt2, (a1+a2)/sqrt2).
std::pair<Complex, Complex> modified_inputs_for_cbs(Complex alpha1, Complex alpha2);

// Unitary on two modes of equal dimension d that conserves ka + kb, stored as
// one dense block per photon-number sector.
class SectorUnitary {
 public:
  static SectorUnitary identity(std::size_t dim);
  static SectorUnitary swap(std::size_t dim);
  static SectorUnitary beam_splitter(std::size_t dim, double theta);
  // diag(exp(-i phi ka))
  static SectorUnitary phase(std::size_t dim, double phi);

  std::size_t mode_dim() const noexcept { return dim_; }
  SectorUnitary operator*(const SectorUnitary& rhs) const;
  Vector apply(const Vector& v) const;
  Matrix dense() const;

 private:
  explicit SectorUnitary(std::size_t dim);
  std::size_t dim_;
  std::vector<std::vector<std::size_t>> sector_indices_;  // |ka,kb> index per sector, ka ascending
  std::vector<Matrix> blocks_;
};

// Field unitaries applied for ancilla |0> and |1>.
struct ControlledFieldGate {
  SectorUnitary when0;
  SectorUnitary when1;
  static ControlledFieldGate from_spec(const GateSpec& spec, std::size_t dim);
};

struct ProtocolTrace {
  Branch branch1 = Branch::Antisymmetric;
  double prob1 = 0.0;
  double first_plus = 0.0;
  double first_minus = 0.0;
  std::optional<fock::PureState> post1;  // fields only, layout [d, d]
  double phi = 0.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  double delta = 0.0;
  double leakage = 0.0;
};

struct Options {
  std::optional<std::size_t> field_dim;  // default from the plan
  double leakage_tolerance = fock::kDefaultLeakageTolerance;
};

std::size_t default_field_dim(const ProbePlan& plan);
fock::PureState initial_fields(const ProbePlan& plan, std::size_t dim, double leakage_tolerance);

// First swap test done once; the second test can then be run for many phases.
class Protocol {
 public:
  Protocol(const ProbePlan& plan, const GateSpec& spec, Branch postselect, const Options& options = {});

  std::size_t field_dim() const noexcept { return dim_; }
  double leakage() const noexcept { return leakage_; }
  double first_plus() const noexcept { return first_plus_; }
  double first_minus() const noexcept { return first_minus_; }
  double prob1() const noexcept { return postselect_ == Branch::Symmetric ? first_plus_ : first_minus_; }
  // Normalized postselected and rejected field states; the rejected one is
  // empty when its probability is below the floor.
  const Vector& post_selected() const noexcept { return selected_; }
  const std::optional<Vector>& post_rejected() const noexcept { return rejected_; }

  // p_plus, p_minus of the second test for a pure field state.
  std::pair<double, double> second_test(const Vector& fields, double phi) const;
  ProtocolTrace at(double phi) const;
  ProtocolTrace at_with_flips(double phi, const FlipProbs& flips) const;

 private:
  std::size_t dim_;
  Branch postselect_;
  ControlledFieldGate gate_;
  double leakage_ = 0.0;
  double first_plus_ = 0.0, first_minus_ = 0.0;
  Vector selected_;
  std::optional<Vector> rejected_;
};

ProtocolTrace run_protocol(const ProbePlan& plan, const GateSpec& spec, double phi, Branch postselect);
ProtocolTrace run_protocol(const ProbePlan& plan, const GateSpec& spec, double phi);
ProtocolTrace run_protocol_with_flips(const ProbePlan& plan, const GateSpec& spec, double phi,
                                      const FlipProbs& flips);

// Reference implementation of the flips pipeline on full density matrices
// with dense operators on [ancilla, a, b]. Slow; for cross-checks.
ProtocolTrace run_protocol_with_flips_dense(const ProbePlan& plan, const GateSpec& spec, double phi,
                                            const FlipProbs& flips, const Options& options = {});

}  // namespace swaptest::gatesim
