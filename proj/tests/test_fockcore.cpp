#include <gtest/gtest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include "support.hpp"
#include "swaptest/errors.hpp"
#include "swaptest/fockcore.hpp"

using namespace swaptest;
using namespace swaptest::fock;

TEST(SpaceLayout, FlattenRoundTrip) {
  auto gen = oracle::rng(11);
  std::uniform_int_distribution<std::size_t> dim(1, 5), modes(1, 4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> dims(modes(gen));
    for (auto& d : dims) d = dim(gen);
    const SpaceLayout layout(dims);
    for (std::size_t i = 0; i < layout.total(); ++i) {
      const auto occ = layout.unflatten(i);
      ASSERT_EQ(layout.flatten(occ), i);
    }
  }
}

TEST(SpaceLayout, ModeZeroIsSlowest) {
  const SpaceLayout layout{2, 3, 4};
  EXPECT_EQ(layout.stride(0), 12u);
  EXPECT_EQ(layout.stride(2), 1u);
  const std::size_t occ[] = {1, 2, 3};
  EXPECT_EQ(layout.flatten(occ), 23u);
  EXPECT_THROW(SpaceLayout({2, 0}), LayoutError);
}

TEST(Operators, LadderAction) {
  const SpaceLayout layout{6};
  const auto a = annihilation(layout, 0);
  for (std::size_t n = 1; n < 6; ++n) {
    const auto out = fock_state(layout, {n}).apply(a);
    EXPECT_NEAR(std::abs(out.amplitudes()(static_cast<Eigen::Index>(n - 1))), std::sqrt(double(n)), 1e-14);
  }
  const auto comm = a * creation(layout, 0) - creation(layout, 0) * a;
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(comm.matrix()(k, k).real(), 1.0, 1e-14);
  EXPECT_NEAR(comm.matrix()(5, 5).real(), -5.0, 1e-14);  // truncation edge
}

TEST(Operators, KronMatchesEigen) {
  const SpaceLayout l1{3}, l2{4};
  const Operator a = annihilation(l1, 0), b = number_operator(l2, 0) + creation(l2, 0);
  const Matrix ref = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  const Operator k = kron(a, b);
  EXPECT_EQ(k.layout(), (SpaceLayout{3, 4}));
  EXPECT_LT((k.matrix() - ref).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Operators, EmbedTwoModeIsExchangeSymmetric) {
  const SpaceLayout layout{2, 3, 3};
  const auto s = swap_operator(layout, 1, 2);
  EXPECT_LT((s * s - Operator::identity(layout)).matrix().cwiseAbs().maxCoeff(), 1e-15);
  const auto out = fock_state(layout, {1, 2, 0}).apply(s);
  EXPECT_NEAR(std::abs(out.inner(fock_state(layout, {1, 0, 2}))), 1.0, 1e-15);
  const auto pp = swap_projector(layout, 1, 2, Symmetry::Symmetric);
  const auto pm = swap_projector(layout, 1, 2, Symmetry::Antisymmetric);
  EXPECT_LT((pp * pp - pp).matrix().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((pp + pm - Operator::identity(layout)).matrix().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((pp * pm).matrix().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(States, CoherentAmplitudesMatchDirectFormula) {
  for (double r : {0.3, 1.0, 2.2}) {
    const Complex alpha = std::polar(r, 0.7);
    const int dim = 40;
    const auto got = coherent_amplitudes(dim, alpha);
    const oracle::Vec ref = oracle::coherent(dim, alpha);
    EXPECT_LT((got.amplitudes - ref.normalized()).cwiseAbs().maxCoeff(), 1e-13) << r;
    EXPECT_NEAR(got.leakage, 1.0 - ref.squaredNorm(), 1e-13);
  }
}

TEST(States, PoissonTailAgainstSummation) {
  for (double mean : {0.1, 3.0, 25.0})
    for (std::size_t cut : {1u, 5u, 30u, 60u}) {
      double head = 0, term = std::exp(-mean);
      for (std::size_t k = 0; k < cut; ++k) {
        head += term;
        term *= mean / double(k + 1);
      }
      EXPECT_NEAR(poisson_tail(mean, cut), std::max(0.0, 1.0 - head), 1e-12) << mean << " " << cut;
    }
}

TEST(States, CoherentTruncationIsChecked) {
  const SpaceLayout small{5};
  EXPECT_THROW(coherent_state(small, 0, 2.0), TruncationError);
  const SpaceLayout ok{default_coherent_dim(2.0)};
  const auto psi = coherent_state(ok, 0, 2.0);
  EXPECT_LT(psi.leakage(), kDefaultLeakageTolerance);
  EXPECT_NEAR(expectation(psi, number_operator(ok, 0)).real(), 4.0, 1e-7);
}

TEST(DensityState, PartialTraceOfProduct) {
  const SpaceLayout la{3}, lb{4};
  const auto a = DensityState::from_pure(coherent_state(la, 0, 0.2, 1e-3));
  const auto b = DensityState::from_pure(fock_state(lb, {2}));
  const auto ab = tensor(a, b);
  const std::size_t keep0[] = {0};
  const std::size_t keep1[] = {1};
  EXPECT_LT((ab.partial_trace(keep0).matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((ab.partial_trace(keep1).matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(ab.is_physical());
  EXPECT_NEAR(ab.purity(), 1.0, 1e-14);
}

TEST(DensityState, MixtureAndPhysicality) {
  const SpaceLayout l{2};
  const PureState s[] = {fock_state(l, {0}), fock_state(l, {1})};
  const double w[] = {0.25, 0.75};
  const auto rho = DensityState::mixture(w, s);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-15);
  EXPECT_NEAR(rho.purity(), 0.625, 1e-15);
  EXPECT_NEAR(rho.min_eigenvalue(), 0.25, 1e-14);
  Matrix bad = rho.matrix();
  bad(0, 0) = -0.1;
  EXPECT_FALSE(DensityState(l, bad).is_physical());
}

TEST(Measurement, ProjectionBelowFloorHasNoPostState) {
  const SpaceLayout layout{1, 2, 2};
  const auto psi = fock_state(layout, {0, 1, 1});  // symmetric
  const auto anti = project_and_prob(psi, swap_projector(layout, 1, 2, Symmetry::Antisymmetric));
  EXPECT_LT(anti.probability, kProbabilityFloor);
  EXPECT_FALSE(anti.post.has_value());
  const auto sym = project_and_prob(psi, swap_projector(layout, 1, 2, Symmetry::Symmetric));
  EXPECT_NEAR(sym.probability, 1.0, 1e-15);
  ASSERT_TRUE(sym.post.has_value());
}

TEST(Controlled, BlocksAreRespected) {
  const SpaceLayout layout{2, 2, 2};
  const auto id = Operator::identity(layout);
  const auto s = swap_operator(layout, 1, 2);
  const auto cu = controlled(layout, 0, id, s);
  EXPECT_LT(cu.unitarity_error(), 1e-15);
  const auto in1 = fock_state(layout, {1, 1, 0});
  EXPECT_NEAR(std::abs(in1.apply(cu).inner(fock_state(layout, {1, 0, 1}))), 1.0, 1e-15);
  const auto in0 = fock_state(layout, {0, 1, 0});
  EXPECT_NEAR(std::abs(in0.apply(cu).inner(in0)), 1.0, 1e-15);
  EXPECT_THROW(controlled(SpaceLayout{3, 2, 2}, 0, Operator::identity(SpaceLayout{3, 2, 2}),
                          Operator::identity(SpaceLayout{3, 2, 2})),
               LayoutError);
}

TEST(ExcitationSubspace, SectorsAndRestriction) {
  const auto s = ExcitationSubspace::sector(4);
  EXPECT_EQ(s.size(), 5u);
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(s.occupation_a(k) + s.occupation_b(k), 4u);
  const auto c = ExcitationSubspace::capped(3);
  EXPECT_EQ(c.size(), 10u);
  auto gen = oracle::rng(5);
  std::normal_distribution<double> g;
  Vector v(static_cast<Eigen::Index>(c.size()));
  for (auto& x : v) x = Complex{g(gen), g(gen)};
  EXPECT_LT((c.restrict(c.extend(v)) - v).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Property, HermitianBuildersStayHermitian) {
  auto gen = oracle::rng(77);
  std::uniform_int_distribution<std::size_t> dim(2, 6);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 30; ++trial) {
    const SpaceLayout layout{dim(gen), dim(gen)};
    const auto a = annihilation(layout, 0), b = annihilation(layout, 1);
    const Complex z{u(gen), u(gen)};
    const auto h = (a.adjoint() * b).scaled(z) + (a * b.adjoint()).scaled(std::conj(z)) + number_operator(layout, 0);
    ASSERT_TRUE(h.is_hermitian(1e-12));
  }
}
