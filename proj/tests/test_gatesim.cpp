#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "support.hpp"
#include "swaptest/analytics.hpp"
#include "swaptest/errors.hpp"
#include "swaptest/gatesim.hpp"

using namespace swaptest;
using namespace swaptest::gatesim;

namespace {

GateSpec cbs(bool phase) {
  GateSpec s;
  s.kind = GateKind::ControlledBeamSplitter;
  s.include_conditional_phase = phase;
  return s;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Gates, AllUnitariesAreUnitary) {
  const fock::SpaceLayout layout{2, 5, 5};
  EXPECT_LT(controlled_swap_unitary(layout, 0, 1, 2).unitarity_error(), 1e-10);
  EXPECT_LT(controlled_bs_unitary(layout, cbs(true), 0, 1, 2).unitarity_error(), 1e-10);
  EXPECT_LT(controlled_bs_unitary(layout, cbs(false), 0, 1, 2).unitarity_error(), 1e-10);
  EXPECT_LT(beam_splitter_unitary(layout, 1, 2, 0.37).unitarity_error(), 1e-10);
  EXPECT_LT(phase_shift(layout, 1, 1.1).unitarity_error(), 1e-10);
}

TEST(Gates, BalancedBeamSplitterSplitsOnePhoton) {
  const fock::SpaceLayout layout{2, 2};
  const auto out = fock::fock_state(layout, {1, 0}).apply(beam_splitter_unitary(layout, 0, 1, oracle::pi / 4));
  EXPECT_NEAR(std::abs(out.amplitudes()(2)), std::sqrt(0.5), 1e-15);  // |1,0>
  EXPECT_NEAR(std::abs(out.amplitudes()(1)), std::sqrt(0.5), 1e-15);  // |0,1>
}

TEST(Gates, SectorBlocksMatchMatrixExponential) {
  for (std::size_t d : {2u, 4u, 6u}) {
    const fock::SpaceLayout layout{d, d};
    const Matrix a = fock::annihilation(layout, 0).matrix(), b = fock::annihilation(layout, 1).matrix();
    const Matrix gen = a.adjoint() * b - a * b.adjoint();
    for (double theta : {0.3, oracle::pi / 4, -1.2}) {
      const Matrix ref = (theta * gen).exp();
      EXPECT_LT(max_abs(SectorUnitary::beam_splitter(d, theta).dense() - ref), 1e-12) << d << " " << theta;
      EXPECT_LT(max_abs(beam_splitter_unitary(layout, 0, 1, theta).matrix() - ref), 1e-12);
    }
    EXPECT_LT(max_abs(SectorUnitary::phase(d, 0.8).dense() - phase_shift(layout, 0, 0.8).matrix()), 1e-15);
    EXPECT_LT(max_abs(SectorUnitary::swap(d).dense() - fock::swap_operator(layout, 0, 1).matrix()), 1e-15);
  }
}

// Only complete photon-number sectors (k + l < d) are exact exchanges; the
// truncated ones mix under the beam splitter.
TEST(Gates, ConditionalPhaseRestoresSwap) {
  const int d = 5, m = d * d;
  const fock::SpaceLayout layout{2, 5, 5};
  const Matrix diff = controlled_bs_unitary(layout, cbs(true), 0, 1, 2).matrix() -
                      controlled_swap_unitary(layout, 0, 1, 2).matrix();
  for (int i = 0; i < m; ++i)
    if (i / d + i % d < d) {
      EXPECT_LT(diff.col(i).cwiseAbs().maxCoeff(), 1e-12) << i;
      EXPECT_LT(diff.col(m + i).cwiseAbs().maxCoeff(), 1e-12) << i;
    }
}

TEST(Gates, WithoutPhaseExchangeCarriesParity) {
  const int d = 5, m = d * d;
  const fock::SpaceLayout layout{2, 5, 5};
  const auto u = controlled_bs_unitary(layout, cbs(false), 0, 1, 2).matrix();
  for (int i = 0; i < m; ++i) {
    if (i / d + i % d >= d) continue;
    const oracle::Vec ref = oracle::exchange(oracle::Vec::Unit(m, i), d, oracle::Gate::SwapWithParity);
    EXPECT_LT((u.block(m, m, m, m).col(i) - ref).cwiseAbs().maxCoeff(), 1e-12) << i;
    EXPECT_LT((u.block(0, 0, m, m).col(i) - oracle::Vec::Unit(m, i)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Gates, ModifiedInputs) {
  const auto [m1, m2] = modified_inputs_for_cbs(1.0, 0.0);
  EXPECT_NEAR(std::abs(m1 - Complex(std::sqrt(0.5))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m2 - Complex(std::sqrt(0.5))), 0.0, 1e-15);
  const auto [o1, o2] = modified_inputs_for_cbs(1.0, -1.0);
  EXPECT_NEAR(std::abs(o1 - Complex(std::sqrt(2.0))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(o2), 0.0, 1e-15);
}

TEST(Gates, SpecValidation) {
  GateSpec s = cbs(true);
  s.splitting_angle = 0.0;
  EXPECT_THROW(s.validate(), OutOfRangeError);
  EXPECT_EQ(GateSpec::for_plan(ProbePlan::noon(2)).kind, GateKind::ControlledSwap);
  const auto c = GateSpec::for_plan(ProbePlan::noon(2, 0, GateKind::ControlledBeamSplitter));
  EXPECT_EQ(c.kind, GateKind::ControlledBeamSplitter);
  EXPECT_FALSE(c.include_conditional_phase);
}

TEST(Protocol, NoonWitnessIsCosine) {
  for (int n = 1; n <= 6; ++n) {
    const Protocol p(ProbePlan::noon(n), {}, Branch::Antisymmetric);
    EXPECT_NEAR(p.first_minus(), 0.5, 1e-15);
    for (double phi : oracle::grid(-oracle::pi, oracle::pi, 41)) ASSERT_NEAR(p.at(phi).delta, -std::cos(n * phi), 1e-12);
  }
}

TEST(Protocol, CoherentMatchesCircuitAndClosedForms) {
  for (double a : {0.5, 1.0, 2.0, 2.5}) {
    const Protocol opp(ProbePlan::coherent(a, -a), {}, Branch::Antisymmetric);
    const Protocol vac(ProbePlan::coherent(a, 0.0), {}, Branch::Antisymmetric);
    const double tol = std::max(1e-6, 10 * std::max(opp.leakage(), vac.leakage()));
    const int d = static_cast<int>(vac.field_dim());
    const oracle::Vec fields = oracle::product(oracle::coherent(d, a), oracle::coherent(d, 0.0)).normalized();
    for (double phi : oracle::grid(-oracle::pi, oracle::pi, 41)) {
      ASSERT_NEAR(opp.at(phi).delta, analytics::witness_opposite(a, phi), tol) << a << " " << phi;
      ASSERT_NEAR(vac.at(phi).delta, analytics::witness_vacuum(a, phi), tol) << a << " " << phi;
    }
    for (double phi : {-1.0, 0.5}) {
      const auto o = oracle::protocol(fields, d, oracle::Gate::Swap, phi);
      EXPECT_NEAR(vac.at(phi).p_plus, o.p_plus, 1e-12);
    }
  }
}

TEST(Protocol, EqualCoherentInputsAreInfeasible) {
  EXPECT_THROW(Protocol(ProbePlan::coherent(1.0, 1.0), {}, Branch::Antisymmetric), InfeasibleBranchError);
  EXPECT_NO_THROW(Protocol(ProbePlan::coherent(1.0, 1.0), {}, Branch::Symmetric));
}

TEST(Protocol, FieldDimensionTooSmall) {
  Options o;
  o.field_dim = 3;
  EXPECT_THROW(Protocol(ProbePlan::noon(4), {}, Branch::Antisymmetric, o), TruncationError);
  EXPECT_THROW(Protocol(ProbePlan::coherent(2.0, 0.0), {}, Branch::Antisymmetric, o), TruncationError);
}

TEST(Protocol, BeamSplitterMatchesClosedForm) {
  const auto spec = cbs(false);
  for (double a : {0.7, 1.5, 3.0}) {
    const Protocol p(ProbePlan::coherent(a, 0.0, GateKind::ControlledBeamSplitter), spec, Branch::Antisymmetric);
    for (double phi : oracle::grid(-oracle::pi, oracle::pi, 41))
      ASSERT_NEAR(p.at(phi).delta, analytics::witness_cbs_alpha0(a, phi), 1e-7) << a << " " << phi;
  }
  // Even NOON inputs keep their fringe, odd ones lose it.
  const Protocol even(ProbePlan::noon(2, 0, GateKind::ControlledBeamSplitter), spec, Branch::Antisymmetric);
  const Protocol odd(ProbePlan::noon(3, 0, GateKind::ControlledBeamSplitter), spec, Branch::Antisymmetric);
  for (double phi : {0.2, 1.1}) {
    EXPECT_NEAR(even.at(phi).delta, analytics::witness_general(ProbePlan::noon(2, 0, GateKind::ControlledBeamSplitter), phi), 1e-12);
    EXPECT_NEAR(odd.at(phi).delta, 0.0, 1e-12);
  }
}

TEST(Flips, NoonVisibility) {
  for (double p : {0.01, 0.05, 0.1}) {
    const FlipProbs f{p, p};
    const double v = (1 - 2 * p) * (1 - 2 * p);
    for (int n : {1, 2, 4})
      for (double phi : {0.0, 0.3, 2.0})
        EXPECT_NEAR(run_protocol_with_flips(ProbePlan::noon(n), {}, phi, f).delta, -v * std::cos(n * phi), 1e-12);
  }
}

TEST(Flips, EnsembleMatchesDensityMatrixRoute) {
  const FlipProbs f{0.05, 0.02};
  for (const auto& plan : {ProbePlan::noon(2, 1), ProbePlan::coherent(0.7, 0.0), ProbePlan::coherent(0.6, -0.6)}) {
    for (double phi : {-0.9, 0.4}) {
      const auto fast = run_protocol_with_flips(plan, {}, phi, f);
      const auto dense = run_protocol_with_flips_dense(plan, {}, phi, f);
      EXPECT_NEAR(fast.p_plus, dense.p_plus, 1e-12) << plan.describe();
      EXPECT_NEAR(fast.first_minus, dense.first_minus, 1e-12);
    }
  }
  const auto plan = ProbePlan::noon(2, 0, GateKind::ControlledBeamSplitter);
  const auto spec = GateSpec::for_plan(plan);
  EXPECT_NEAR(run_protocol_with_flips(plan, spec, 0.6, f).delta, run_protocol_with_flips_dense(plan, spec, 0.6, f).delta,
              1e-12);
}

TEST(Flips, CoherentMatchesAnalytic) {
  const FlipProbs f{0.05, 0.0};
  for (double a : {0.8, 2.0})
    for (double phi : {-1.5, 0.2, 2.5})
      EXPECT_NEAR(run_protocol_with_flips(ProbePlan::coherent(a, 0.0), {}, phi, f).delta,
                  analytics::witness_with_flips(ProbePlan::coherent(a, 0.0), f, phi), 1e-7);
}

TEST(Fisher, FiniteDifferenceOfSimulation) {
  const Protocol p(ProbePlan::coherent(1.0, 0.0), {}, Branch::Antisymmetric);
  for (double phi : {0.5, 1.9}) {
    const double fd = oracle::fisher_fd([&](double x) { return p.at(x).p_plus; }, phi);
    EXPECT_NEAR(fd, analytics::cfi_vacuum(1.0, phi), 1e-4 * fd);
  }
}

TEST(Property, RandomPlansConserveProbability) {
  auto gen = oracle::rng(99);
  std::uniform_real_distribution<double> amp(-2, 2), ph(-4, 4);
  for (int i = 0; i < 40; ++i) {
    const Complex a1{amp(gen), amp(gen) / 2}, a2{amp(gen), amp(gen) / 2};
    if (std::abs(a1 - a2) < 0.1) continue;
    const Protocol p(ProbePlan::coherent(a1, a2), {}, Branch::Antisymmetric);
    EXPECT_NEAR(p.first_plus() + p.first_minus(), 1.0, 1e-7);
    const auto t = p.at(ph(gen));
    ASSERT_NEAR(t.p_plus + t.p_minus, 1.0, 1e-12);
    ASSERT_LE(std::abs(t.delta), 1.0 + 1e-12);
  }
}
