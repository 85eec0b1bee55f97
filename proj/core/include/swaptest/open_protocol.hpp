#pragma once

// Two-swap-test protocol for an ancilla coupled to two field modes under
// Lindblad dynamics. The joint basis is ancilla (x) field subspace with the
// ancilla index slowest; the field subspace is a fixed set of |ka,kb>.

#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "swaptest/fockcore.hpp"
#include "swaptest/lindblad.hpp"
#include "swaptest/plan.hpp"

namespace swaptest::open {

struct Stage {
  std::string name;
  std::shared_ptr<const lindblad::Generator> generator;
  double duration = 0.0;
};

struct ProtocolModel {
  std::size_t ancilla_dim = 2;
  fock::ExcitationSubspace fields = fock::ExcitationSubspace::sector(1);
  Matrix ancilla_initial;  // density on the ancilla
  Vector plus_state;       // ancilla measurement states
  Vector minus_state;
  std::vector<Stage> before_measurement;  // every swap test
  std::vector<Stage> after_measurement;   // first swap test only
  lindblad::Tolerances tolerances;

  std::size_t joint_dim() const { return ancilla_dim * fields.size(); }
};

// Physicality record of forward integrations.
struct Diagnostics {
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_hermiticity_error = 0.0;
  double max_leakage = 0.0;            // outside span{plus, minus} at measurements
  double max_top_level_population = 0.0;
  lindblad::Stats stats;
  std::vector<std::string> warnings;
  void merge(const Diagnostics& other);
};

struct MeasurementOutcome {
  double p_plus = 0.0;   // raw, including leakage
  double p_minus = 0.0;
  double leakage = 0.0;  // 1 - p_plus - p_minus
  std::optional<Matrix> post_plus;   // normalized joint states
  std::optional<Matrix> post_minus;
};

struct FirstTest {
  double p_plus = 0.0;   // renormalized over the code space
  double p_minus = 0.0;
  double leakage = 0.0;
  Matrix fields_selected;  // after the post-measurement stages, ancilla traced
  Diagnostics diagnostics;
};

struct SecondTest {
  double p_plus = 0.0;  // renormalized over the code space
  double p_minus = 0.0;
  double leakage = 0.0;
};

// Reduced Heisenberg-picture projectors of the second test: p = Tr[O rho_f(phi)].
struct SecondTestObservables {
  Matrix plus;
  Matrix minus;
};

class Runner {
 public:
  explicit Runner(ProtocolModel model);

  const ProtocolModel& model() const noexcept { return model_; }

  Matrix joint(const Matrix& ancilla, const Matrix& fields) const;
  Matrix trace_ancilla(const Matrix& joint) const;
  Matrix phase_shift(const Matrix& fields, double phi) const;  // exp(-i phi a^dagger a)
  MeasurementOutcome measure(const Matrix& joint) const;

  // Integrates the stages forward, recording diagnostics.
  Matrix evolve(Matrix joint, const std::vector<Stage>& stages, Diagnostics& diag) const;

  FirstTest first_test(const Matrix& fields, Branch postselect) const;
  SecondTest second_test(const Matrix& fields, double phi, Diagnostics* diag = nullptr) const;
  SecondTestObservables second_test_observables(lindblad::Stats* stats = nullptr) const;
  static SecondTest evaluate(const SecondTestObservables& obs, const Matrix& fields_phi);

  // Second test on the postselected state for every phase, via the
  // Heisenberg-picture observables.
  std::vector<WitnessPoint> sweep(const FirstTest& first, const std::vector<double>& phis,
                                  lindblad::Stats* stats = nullptr) const;

 private:
  void check_state(const Matrix& joint, const std::string& where, Diagnostics& diag) const;
  ProtocolModel model_;
  Matrix proj_plus_;   // on the ancilla
  Matrix proj_minus_;
};

}  // namespace swaptest::open

namespace swaptest::open {

// Field subspace and initial field state for a plan. Coherent plans are fed
// through the deterministic beam splitter analytically (modified inputs), so
// no beam-splitter stage is needed; Fock plans use their photon-number sector.
struct FieldPreparation {
  fock::ExcitationSubspace space = fock::ExcitationSubspace::sector(1);
  Vector psi;
  double leakage = 0.0;
  bool folded = false;  // beam splitter absorbed into the inputs
  double total_photons = 0.0;
};

FieldPreparation prepare_fields(const ProbePlan& plan, double leakage_tolerance = 1e-8,
                                std::optional<std::size_t> cap = std::nullopt);

// a^dagger b restricted to the subspace.
Matrix hopping_ab(const fock::ExcitationSubspace& space);
// a^dagger a + b^dagger b restricted to the subspace.
Matrix total_number(const fock::ExcitationSubspace& space);

}  // namespace swaptest::open
