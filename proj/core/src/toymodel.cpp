#include "swaptest/toymodel.hpp"

#include <cmath>
#include <memory>

#include "swaptest/errors.hpp"

namespace swaptest::toy {

namespace {

const Complex I{0.0, 1.0};

Matrix pauli_z() { return Vector{{1.0, -1.0}}.asDiagonal(); }
Matrix pauli_x() {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

void require_toy_layout(const fock::SpaceLayout& layout) {
  if (layout.modes() != 3 || layout.dim(0) != 2 || layout.dim(1) != layout.dim(2))
    throw LayoutError("toy model layout must be [2, d, d]");
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

void ToyParams::validate() const {
  if (gamma_z < 0.0 || gamma_x < 0.0) throw OutOfRangeError("rates must be non-negative");
  if (!(tau > 0.0) || !(zeta2 > 0.0) || !(zeta1_beta > 0.0))
    throw OutOfRangeError("couplings and gate time must be positive");
}

ToyParams ToyParams::balanced(double tau, double zeta2, double gamma_z, double gamma_x) {
  ToyParams p;
  p.tau = tau;
  p.zeta1_beta = std::numbers::pi / (4.0 * tau);
  p.zeta2 = zeta2;
  p.gamma_z = gamma_z;
  p.gamma_x = gamma_x;
  p.validate();
  return p;
}

fock::Operator toy_cpbs_hamiltonian(const fock::SpaceLayout& layout, const ToyParams& params) {
  require_toy_layout(layout);
  const fock::Operator a = fock::annihilation(layout, 1), b = fock::annihilation(layout, 2);
  const fock::Operator gen = a.adjoint() * b - a * b.adjoint();
  const fock::Operator z = fock::embed(layout, 0, pauli_z());
  return (z * gen).scaled(I * params.zeta1_beta);
}

fock::Operator toy_bs_hamiltonian(const fock::SpaceLayout& layout, const ToyParams& params) {
  require_toy_layout(layout);
  const fock::Operator a = fock::annihilation(layout, 1), b = fock::annihilation(layout, 2);
  const Complex zeta2 = -I * params.zeta2;
  return (a.adjoint() * b).scaled(zeta2) + (a * b.adjoint()).scaled(std::conj(zeta2));
}

fock::DensityState evolve_toy(const fock::DensityState& state, const ToyParams& params, double duration,
                              Segment segment, const lindblad::Tolerances& tol, lindblad::Stats* stats) {
  params.validate();
  const auto& layout = state.layout();
  const fock::Operator h =
      segment == Segment::Cpbs ? toy_cpbs_hamiltonian(layout, params) : toy_bs_hamiltonian(layout, params);
  const std::vector<lindblad::Jump> jumps{
      {params.gamma_z, fock::embed(layout, 0, pauli_z()).matrix()},
      {params.gamma_x, fock::embed(layout, 0, pauli_x()).matrix()}};
  const lindblad::Generator g(h.matrix(), jumps);
  return fock::DensityState(layout, lindblad::integrate(g, state.matrix(), duration,
                                                        lindblad::Picture::Schrodinger, tol, stats));
}

open::ProtocolModel toy_protocol_model(const open::FieldPreparation& fields, const ToyParams& params,
                                       const lindblad::Tolerances& tol) {
  params.validate();
  const Matrix t = open::hopping_ab(fields.space);
  const auto m = t.rows();
  const Matrix id_f = Matrix::Identity(m, m);
  const Matrix id_q = Matrix::Identity(2, 2);
  const Matrix h_cpbs = kron(pauli_z(), (I * params.zeta1_beta) * (t - t.adjoint()));
  const Complex zeta2 = -I * params.zeta2;
  const Matrix h_bs = kron(id_q, zeta2 * t + std::conj(zeta2) * t.adjoint());
  const std::vector<lindblad::Jump> jumps{{params.gamma_z, kron(pauli_z(), id_f)},
                                          {params.gamma_x, kron(pauli_x(), id_f)}};

  open::ProtocolModel model;
  model.ancilla_dim = 2;
  model.fields = fields.space;
  const double r = std::numbers::sqrt2 / 2.0;
  model.plus_state = Vector{{r, r}};
  model.minus_state = Vector{{r, -r}};
  model.ancilla_initial = model.plus_state * model.plus_state.adjoint();
  model.tolerances = tol;
  model.before_measurement.push_back(
      {"cpbs", std::make_shared<lindblad::Generator>(h_cpbs, jumps), params.tau});
  if (!fields.folded)
    model.after_measurement.push_back(
        {"bs", std::make_shared<lindblad::Generator>(h_bs, jumps), params.bs_time()});
  return model;
}

ToySweep toy_protocol_sweep(const ProbePlan& plan, const ToyParams& params, const std::vector<double>& phis,
                            const lindblad::Tolerances& tol) {
  const open::FieldPreparation prep = open::prepare_fields(plan);
  const open::Runner runner(toy_protocol_model(prep, params, tol));
  ToySweep out;
  const open::FirstTest first = runner.first_test(prep.psi * prep.psi.adjoint(), plan.branch);
  out.first_plus = first.p_plus;
  out.first_minus = first.p_minus;
  out.diagnostics = first.diagnostics;
  out.rows = runner.sweep(first, phis, &out.diagnostics.stats);
  for (auto& row : out.rows) row.leakage = std::max(row.leakage, prep.leakage);
  return out;
}

}  // namespace swaptest::toy
