#include <gtest/gtest.h>

#include "support.hpp"
#include "swaptest/errors.hpp"
#include "swaptest/experiment.hpp"
#include "swaptest/cqed.hpp"

using namespace swaptest;
using namespace swaptest::cqed;

namespace {

// Small cat space for operator-level checks.
CqedParams small(std::size_t cat_dim = 8) {
  CqedParams p;
  p.cat_dim = cat_dim;
  return p;
}

fock::DensityState product(const Vector& cat, const fock::SpaceLayout& layout, std::size_t na, std::size_t nb) {
  const fock::SpaceLayout f{layout.dim(1), layout.dim(2)};
  const fock::PureState psi =
      fock::tensor(fock::PureState(fock::SpaceLayout{layout.dim(0)}, cat), fock::fock_state(f, {na, nb}));
  return fock::DensityState::from_pure(psi);
}

double field_population(const fock::DensityState& rho, std::size_t mode) {
  return fock::expectation(rho, fock::number_operator(rho.layout(), mode)).real();
}

experiment::FringeFit fit_sweep(const CqedParams& params, int n, const lindblad::Tolerances& tol = {}) {
  const auto phis = oracle::grid(0.0, oracle::pi, 41);
  const auto sweep = run_cqed_sweep(ProbePlan::noon(n, 0, GateKind::ControlledBeamSplitter), params, phis, tol);
  std::vector<double> delta;
  for (const auto& r : sweep.rows) delta.push_back(r.delta);
  return experiment::fit_fringe(phis, delta, n);
}

}  // namespace

TEST(Params, TableOneDerivedQuantities) {
  const auto p = CqedParams::table_one();
  EXPECT_NEAR(p.beta() * p.beta(), 3.0, 1e-12);
  EXPECT_NEAR(p.phase_flip_probability(), 0.015, 0.001);
  EXPECT_NEAR(p.phase_flip_probability(), 2 * oracle::pi * 1.35e3 * 3.0 * 600e-9, 1e-15);
  EXPECT_EQ(p.ancilla_dim(), 24u);
  EXPECT_NEAR(p.zeta2_hz(), 120e3 * std::sqrt(3.0), 1e-6);
  EXPECT_NEAR(p.bs_time(), 1.0 / (8 * 120e3 * std::sqrt(3.0)), 1e-18);
  const auto r = angular_rates(p);
  EXPECT_NEAR(r.K, 2 * oracle::pi * 6.7, 1e-12);
  EXPECT_NEAR(r.tau, 0.6, 1e-12);
  // Balanced CPBS: zeta1 beta tau = 1/8 turn.
  EXPECT_NEAR(r.zeta1 * p.beta() * r.tau, oracle::pi / 4, 0.02);
  EXPECT_FALSE(conversion_note(p).empty());
}

TEST(Params, Validation) {
  auto p = CqedParams::table_one();
  p.kappa = -1;
  EXPECT_THROW(p.validate(), OutOfRangeError);
  p = CqedParams::table_one();
  p.cat_dim = 2;
  EXPECT_THROW(p.validate(), OutOfRangeError);
  p = CqedParams::table_one();
  EXPECT_THROW(build_hamiltonians(p, fock::SpaceLayout{8, 2, 2}, 1.0), LayoutError);
}

TEST(Cats, BasisOverlaps) {
  const auto p = CqedParams::table_one();
  const auto c = cat_basis(p.ancilla_dim(), p.beta());
  EXPECT_NEAR(std::abs(c.plus_cat.dot(c.minus_cat)), 0.0, 1e-14);
  EXPECT_NEAR(c.plus_cat.norm(), 1.0, 1e-14);
  const double e = std::exp(-6.0);
  EXPECT_NEAR(std::norm(c.plus_cat.dot(c.logical_zero)), 0.5 * (1 + e), 1e-8);
  EXPECT_NEAR(std::norm(c.minus_cat.dot(c.logical_zero)), 0.5 * (1 - e), 1e-8);
  EXPECT_NEAR(std::norm(c.logical_zero.dot(c.logical_one)), std::exp(-12.0), 1e-10);
}

TEST(Hamiltonian, HermitianAndNumberConserving) {
  const auto p = small();
  const fock::SpaceLayout layout{8, 3, 3};
  const auto h = build_hamiltonians(p, layout, 2.0);
  const auto n = fock::number_operator(layout, 1) + fock::number_operator(layout, 2);
  for (const auto& op : {h.h0, h.h_cpbs, h.h_bs}) {
    EXPECT_TRUE(op.is_hermitian(1e-10));
    EXPECT_LT((op * n - n * op).matrix().cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Hamiltonian, CoherentStatesAreKerrCatEigenstates) {
  auto p = CqedParams::table_one();
  const fock::SpaceLayout layout{p.ancilla_dim(), 1, 1};
  const auto h = build_hamiltonians(p, layout, 0.0).h0.matrix();
  const auto c = cat_basis(p.ancilla_dim(), p.beta());
  for (const Vector& v : {c.logical_zero, c.logical_one, c.plus_cat}) {
    const Complex e = v.dot(h * v);
    EXPECT_LT((h * v - e * v).norm() / h.norm(), 1e-7);
  }
}

TEST(Dissipator, RhsIsTracelessHermitian) {
  auto gen = oracle::rng(12);
  std::normal_distribution<double> g;
  const auto p = small(6);
  const fock::SpaceLayout layout{6, 2, 2};
  Matrix m(24, 24);
  for (auto& x : m.reshaped()) x = Complex{g(gen), g(gen)};
  Matrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  for (auto seg : {Segment::Stabilize, Segment::Cpbs, Segment::Bs}) {
    const auto out = lindblad_rhs(fock::DensityState(layout, rho), p, seg, 1.0);
    EXPECT_LT(std::abs(out.matrix().trace()), 1e-9);
    EXPECT_LT(out.hermiticity_error(), 1e-9);
  }
}

TEST(Dissipator, ThermalRelaxationOfAncilla) {
  CqedParams p;
  p.K = 1.0;
  p.epsilon = 1.0;
  p.chi = 0.0;
  p.kappa2 = 0.0;
  p.kappa = 1e5;
  p.n_thermal = 0.2;
  p.cat_dim = 14;
  const fock::SpaceLayout layout{14, 1, 1};
  Vector vac = Vector::Zero(14);
  vac(0) = 1.0;
  const double t = 2e-6;
  lindblad::Tolerances tol;
  tol.rtol = 1e-10;
  tol.atol = 1e-13;
  const auto out = integrate(product(vac, layout, 0, 0), p, Segment::Stabilize, t, 0.0, tol);
  const double kappa = 2 * oracle::pi * 1e5 * 1e-6 * 1e6 * t;
  EXPECT_NEAR(field_population(out, 0), 0.2 * (1 - std::exp(-kappa)), 1e-5);
}

TEST(Dissipator, TwoPhotonLossKeepsParity) {
  CqedParams p;
  p.K = 1.0;
  p.epsilon = 1.0;
  p.chi = 0.0;
  p.kappa = 0.0;
  p.kappa2 = 5e5;
  p.cat_dim = 24;
  const fock::SpaceLayout layout{24, 1, 1};
  const auto c = cat_basis(24, std::sqrt(3.0));
  const auto out = integrate(product(c.plus_cat, layout, 0, 0), p, Segment::Stabilize, 1e-6, 0.0);
  Matrix parity = Matrix::Zero(24, 24);
  for (int k = 0; k < 24; ++k) parity(k, k) = k % 2 ? -1.0 : 1.0;
  EXPECT_NEAR(fock::expectation(out, fock::embed(layout, 0, parity)).real(), 1.0, 1e-8);
  EXPECT_LT(field_population(out, 0), 3.0 - 0.5);  // photons were lost in pairs
  EXPECT_NEAR(out.trace(), 1.0, 1e-8);
}

TEST(Measurement, CatProjections) {
  const auto p = CqedParams::table_one();
  const std::size_t d = p.ancilla_dim();
  const fock::SpaceLayout layout{d, 2, 2};
  const auto c = cat_basis(d, p.beta());
  const auto m1 = measure_cat_x(product(c.plus_cat, layout, 1, 0), p);
  EXPECT_NEAR(m1.p_plus, 1.0, 1e-12);
  EXPECT_NEAR(m1.p_minus, 0.0, 1e-12);
  EXPECT_TRUE(m1.warnings.empty());
  const auto m2 = measure_cat_x(product(c.logical_zero, layout, 0, 1), p);
  EXPECT_NEAR(m2.p_plus, 0.5 * (1 + std::exp(-6.0)), 1e-8);
  EXPECT_NEAR(m2.leakage, 0.0, 1e-8);
  ASSERT_TRUE(m2.post_minus.has_value());
  Vector fock5 = Vector::Zero(static_cast<Eigen::Index>(d));
  fock5(5) = 1.0;
  const auto m3 = measure_cat_x(product(fock5, layout, 0, 0), p);
  EXPECT_GT(m3.leakage, 0.01);
  EXPECT_FALSE(m3.warnings.empty());
}

TEST(Gate, CpbsSplitsOnePhoton) {
  auto p = CqedParams::table_one();
  p.chi = 0.0;
  p.kappa = p.kappa2 = p.n_thermal = 0.0;
  // One-photon sector only: basis |0,1>, |1,0>.
  const auto prep = open::prepare_fields(ProbePlan::noon(1, 0, GateKind::ControlledBeamSplitter));
  const open::Runner runner(cqed_protocol_model(prep, p));
  ASSERT_EQ(prep.space.size(), 2u);
  const auto c = cat_basis(p.ancilla_dim(), p.beta());
  for (const Vector& logical : {c.logical_zero, c.logical_one}) {
    open::Diagnostics diag;
    const Matrix out = runner.evolve(runner.joint(logical * logical.adjoint(), prep.psi * prep.psi.adjoint()),
                                     runner.model().before_measurement, diag);
    const Matrix fields = runner.trace_ancilla(out);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(fields(k, k).real(), 0.5, 0.02) << k;
    EXPECT_LT(diag.max_trace_error, 1e-6);
    EXPECT_GT(diag.min_eigenvalue, -1e-6);
  }
}

TEST(Truncation, SmallCatSpaceIsRejected) {
  auto p = CqedParams::table_one();
  p.cat_dim = 6;
  EXPECT_THROW(run_cqed_sweep(ProbePlan::noon(2, 0, GateKind::ControlledBeamSplitter), p, {0.0, 1.0}),
               TruncationError);
}

TEST(Protocol, ForwardAndAdjointRoutesAgree) {
  // Weakly driven small cat keeps this quick while exercising every stage.
  CqedParams p;
  p.K = 2e6;
  p.epsilon = 2e6;
  p.chi = 100e3;
  p.zeta1 = 200e3;
  p.tau = 1.0 / (8 * 200e3);
  p.cat_dim = 14;
  const auto plan = ProbePlan::noon(2, 0, GateKind::ControlledBeamSplitter);
  const auto sweep = run_cqed_sweep(plan, p, {0.3, 1.2});
  for (const auto& row : sweep.rows) {
    const auto fwd = run_cqed_protocol(plan, p, row.phi);
    EXPECT_NEAR(fwd.p_plus, row.p_plus, 1e-6) << row.phi;
    EXPECT_NEAR(fwd.first_minus, sweep.first_minus, 1e-12);
    EXPECT_LT(fwd.diagnostics.max_trace_error, 1e-6);
    EXPECT_GT(fwd.diagnostics.min_eigenvalue, -1e-6);
  }
}

// Table I runs. Each takes about a minute.

TEST(SlowTableOne, LosslessLimitIsNearlyIdeal) {
  auto p = CqedParams::table_one();
  p.kappa = p.kappa2 = p.n_thermal = 0.0;
  EXPECT_GE(fit_sweep(p, 2).visibility, 0.98);
}

TEST(SlowTableOne, VisibilityConvergedAndInBand) {
  const auto p = CqedParams::table_one();
  const auto base = fit_sweep(p, 2);
  const double flip = 1 - 2 * p.phase_flip_probability();
  EXPECT_NEAR(base.visibility, flip * flip, 0.015);

  auto wider = p;
  wider.cat_dim = p.ancilla_dim() + 4;
  EXPECT_NEAR(fit_sweep(wider, 2).visibility, base.visibility, 1e-3);

  lindblad::Tolerances tight;
  tight.rtol /= 2;
  EXPECT_NEAR(fit_sweep(p, 2, tight).visibility, base.visibility, 1e-3);
}
