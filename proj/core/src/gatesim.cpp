#include "swaptest/gatesim.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "swaptest/errors.hpp"

namespace swaptest::gatesim {

namespace {

constexpr double kPi = std::numbers::pi;

// Hermitian i(a^dagger b - a b^dagger) on a two-mode basis |ka,kb> of the
// given (sub)set, ka slowest within dims (da, db).
Matrix bs_hamiltonian(const std::vector<std::pair<std::size_t, std::size_t>>& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Matrix h = Matrix::Zero(n, n);
  const Complex I{0.0, 1.0};
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto [ka, kb] = basis[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto [ra, rb] = basis[static_cast<std::size_t>(r)];
      // a^dagger b
      if (kb > 0 && ra == ka + 1 && rb == kb - 1)
        h(r, c) += I * std::sqrt(static_cast<double>((ka + 1) * kb));
      // -a b^dagger
      if (ka > 0 && ra == ka - 1 && rb == kb + 1)
        h(r, c) -= I * std::sqrt(static_cast<double>(ka * (kb + 1)));
    }
  }
  return h;
}

// exp(-i theta H) for Hermitian H.
Matrix hermitian_exp(const Matrix& h, double theta) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Vector phases = (es.eigenvalues().cast<Complex>() * Complex{0.0, -theta}).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double norm_sq(const Vector& v) { return v.squaredNorm(); }

}  // namespace

void GateSpec::validate() const {
  if (!(splitting_angle > 0.0 && splitting_angle <= kPi / 2))
    throw OutOfRangeError("splitting angle must lie in (0, pi/2]");
}

GateSpec GateSpec::for_plan(const ProbePlan& plan) {
  GateSpec spec;
  spec.kind = plan.gate;
  spec.include_conditional_phase = plan.gate == GateKind::ControlledSwap;
  return spec;
}

// Dense operators -----------------------------------------------------------

fock::Operator beam_splitter_unitary(const fock::SpaceLayout& layout, std::size_t mode_a,
                                     std::size_t mode_b, double theta) {
  const std::size_t da = layout.dim(mode_a), db = layout.dim(mode_b);
  std::vector<std::pair<std::size_t, std::size_t>> basis;
  for (std::size_t ka = 0; ka < da; ++ka)
    for (std::size_t kb = 0; kb < db; ++kb) basis.emplace_back(ka, kb);
  // exp(theta G) = exp(-i theta (iG))
  return fock::embed_two_mode(layout, mode_a, mode_b, hermitian_exp(bs_hamiltonian(basis), theta));
}

fock::Operator phase_shift(const fock::SpaceLayout& layout, std::size_t mode, double phi) {
  const auto d = static_cast<Eigen::Index>(layout.dim(mode));
  Vector diag(d);
  for (Eigen::Index k = 0; k < d; ++k) diag(k) = std::polar(1.0, -phi * static_cast<double>(k));
  return fock::embed(layout, mode, diag.asDiagonal().toDenseMatrix());
}

fock::Operator controlled_swap_unitary(const fock::SpaceLayout& layout, std::size_t ancilla,
                                       std::size_t mode_a, std::size_t mode_b) {
  return fock::controlled(layout, ancilla, fock::Operator::identity(layout),
                          fock::swap_operator(layout, mode_a, mode_b));
}

fock::Operator controlled_bs_unitary(const fock::SpaceLayout& layout, const GateSpec& spec,
                                     std::size_t ancilla, std::size_t mode_a, std::size_t mode_b) {
  spec.validate();
  if (layout.dim(mode_a) != layout.dim(mode_b)) throw LayoutError("field modes must have equal dims");
  const fock::Operator bs = beam_splitter_unitary(layout, mode_a, mode_b, -kPi / 4);
  const fock::Operator plus = beam_splitter_unitary(layout, mode_a, mode_b, spec.splitting_angle);
  const fock::Operator minus = beam_splitter_unitary(layout, mode_a, mode_b, -spec.splitting_angle);
  fock::Operator when1 = bs * minus;
  if (spec.include_conditional_phase) when1 = phase_shift(layout, mode_a, kPi) * when1;
  return fock::controlled(layout, ancilla, bs * plus, when1);
}

std::pair<Complex, Complex> modified_inputs_for_cbs(Complex alpha1, Complex alpha2) {
  const double r = std::numbers::sqrt2 / 2.0;
  return {r * (alpha1 - alpha2), r * (alpha1 + alpha2)};
}

// SectorUnitary -------------------------------------------------------------

SectorUnitary::SectorUnitary(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw LayoutError("mode dimension must be >= 1");
  const std::size_t sectors = 2 * dim - 1;
  sector_indices_.resize(sectors);
  blocks_.resize(sectors);
  for (std::size_t n = 0; n < sectors; ++n) {
    const std::size_t lo = n >= dim ? n - dim + 1 : 0, hi = std::min(n, dim - 1);
    for (std::size_t ka = lo; ka <= hi; ++ka) sector_indices_[n].push_back(ka * dim + (n - ka));
    const auto k = static_cast<Eigen::Index>(sector_indices_[n].size());
    blocks_[n] = Matrix::Identity(k, k);
  }
}

SectorUnitary SectorUnitary::identity(std::size_t dim) { return SectorUnitary(dim); }

SectorUnitary SectorUnitary::swap(std::size_t dim) {
  SectorUnitary u(dim);
  for (auto& b : u.blocks_) b = b.rowwise().reverse().eval();
  return u;
}

SectorUnitary SectorUnitary::beam_splitter(std::size_t dim, double theta) {
  SectorUnitary u(dim);
  for (std::size_t n = 0; n < u.blocks_.size(); ++n) {
    std::vector<std::pair<std::size_t, std::size_t>> basis;
    for (std::size_t idx : u.sector_indices_[n]) basis.emplace_back(idx / dim, idx % dim);
    u.blocks_[n] = hermitian_exp(bs_hamiltonian(basis), theta);
  }
  return u;
}

SectorUnitary SectorUnitary::phase(std::size_t dim, double phi) {
  SectorUnitary u(dim);
  for (std::size_t n = 0; n < u.blocks_.size(); ++n)
    for (std::size_t j = 0; j < u.sector_indices_[n].size(); ++j) {
      const auto ka = static_cast<double>(u.sector_indices_[n][j] / dim);
      u.blocks_[n](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = std::polar(1.0, -phi * ka);
    }
  return u;
}

SectorUnitary SectorUnitary::operator*(const SectorUnitary& rhs) const {
  if (dim_ != rhs.dim_) throw LayoutError("sector unitary dimension mismatch");
  SectorUnitary out(dim_);
  for (std::size_t n = 0; n < blocks_.size(); ++n) out.blocks_[n] = blocks_[n] * rhs.blocks_[n];
  return out;
}

Vector SectorUnitary::apply(const Vector& v) const {
  if (v.size() != static_cast<Eigen::Index>(dim_ * dim_)) throw LayoutError("vector size mismatch");
  Vector out(v.size());
  for (std::size_t n = 0; n < blocks_.size(); ++n) {
    const auto& idx = sector_indices_[n];
    const auto k = static_cast<Eigen::Index>(idx.size());
    Vector in(k);
    for (Eigen::Index j = 0; j < k; ++j) in(j) = v(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    const Vector res = blocks_[n] * in;
    for (Eigen::Index j = 0; j < k; ++j) out(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)])) = res(j);
  }
  return out;
}

Matrix SectorUnitary::dense() const {
  const auto n = static_cast<Eigen::Index>(dim_ * dim_);
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < blocks_.size(); ++s) {
    const auto& idx = sector_indices_[s];
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c)
        m(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c])) =
            blocks_[s](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return m;
}

ControlledFieldGate ControlledFieldGate::from_spec(const GateSpec& spec, std::size_t dim) {
  spec.validate();
  if (spec.kind == GateKind::ControlledSwap)
    return {SectorUnitary::identity(dim), SectorUnitary::swap(dim)};
  const SectorUnitary bs = SectorUnitary::beam_splitter(dim, -kPi / 4);
  const SectorUnitary plus = SectorUnitary::beam_splitter(dim, spec.splitting_angle);
  const SectorUnitary minus = SectorUnitary::beam_splitter(dim, -spec.splitting_angle);
  SectorUnitary when1 = bs * minus;
  if (spec.include_conditional_phase) when1 = SectorUnitary::phase(dim, kPi) * when1;
  return {bs * plus, when1};
}

// Protocol ------------------------------------------------------------------

std::size_t default_field_dim(const ProbePlan& plan) {
  if (plan.is_noon()) {
    const auto& in = plan.noon_input();
    return fock::default_fock_dim(std::max(in.n, in.m));
  }
  const auto& in = plan.coherent_input();
  return std::max(fock::default_coherent_dim(in.alpha1), fock::default_coherent_dim(in.alpha2));
}

fock::PureState initial_fields(const ProbePlan& plan, std::size_t dim, double leakage_tolerance) {
  const fock::SpaceLayout layout{dim, dim};
  if (plan.is_noon()) {
    const auto& in = plan.noon_input();
    return fock::fock_state(layout, {static_cast<std::size_t>(in.n), static_cast<std::size_t>(in.m)});
  }
  const auto& in = plan.coherent_input();
  const Complex alphas[] = {in.alpha1, in.alpha2};
  return fock::coherent_product(layout, alphas, leakage_tolerance);
}

namespace {

// (W0 v +/- W1 v) / 2 for an ancilla prepared in |+>.
std::pair<Vector, Vector> swap_test_branches(const ControlledFieldGate& g, const Vector& v) {
  const Vector w0 = g.when0.apply(v), w1 = g.when1.apply(v);
  return {0.5 * (w0 + w1), 0.5 * (w0 - w1)};
}

}  // namespace

Protocol::Protocol(const ProbePlan& plan, const GateSpec& spec, Branch postselect, const Options& options)
    : dim_(options.field_dim.value_or(default_field_dim(plan))),
      postselect_(postselect),
      gate_(ControlledFieldGate::from_spec(spec, dim_)) {
  plan.validate();
  if (plan.is_noon()) {
    const auto& in = plan.noon_input();
    if (static_cast<std::size_t>(std::max(in.n, in.m)) >= dim_)
      throw TruncationError("field dimension too small for the Fock input");
  }
  const fock::PureState psi = initial_fields(plan, dim_, options.leakage_tolerance);
  leakage_ = psi.leakage();
  if (plan.is_coherent() && spec.kind == GateKind::ControlledBeamSplitter) {
    const auto& in = plan.coherent_input();
    leakage_ += fock::poisson_tail(std::norm(in.alpha1) + std::norm(in.alpha2), dim_);
  }
  auto [plus, minus] = swap_test_branches(gate_, psi.amplitudes());
  first_plus_ = norm_sq(plus);
  first_minus_ = norm_sq(minus);
  Vector& sel = postselect == Branch::Symmetric ? plus : minus;
  Vector& rej = postselect == Branch::Symmetric ? minus : plus;
  const double p_sel = norm_sq(sel), p_rej = norm_sq(rej);
  if (p_sel < fock::kProbabilityFloor)
    throw InfeasibleBranchError(std::string("postselected ") + to_string(postselect) +
                                " branch has negligible probability");
  selected_ = sel / std::sqrt(p_sel);
  if (p_rej >= fock::kProbabilityFloor) rejected_ = rej / std::sqrt(p_rej);
}

std::pair<double, double> Protocol::second_test(const Vector& fields, double phi) const {
  const Vector shifted = SectorUnitary::phase(dim_, phi).apply(fields);
  auto [plus, minus] = swap_test_branches(gate_, shifted);
  return {norm_sq(plus), norm_sq(minus)};
}

ProtocolTrace Protocol::at(double phi) const {
  ProtocolTrace t;
  t.branch1 = postselect_;
  t.first_plus = first_plus_;
  t.first_minus = first_minus_;
  t.prob1 = prob1();
  t.post1 = fock::PureState(fock::SpaceLayout{dim_, dim_}, selected_, leakage_);
  t.phi = phi;
  std::tie(t.p_plus, t.p_minus) = second_test(selected_, phi);
  t.delta = t.p_plus - t.p_minus;
  t.leakage = leakage_;
  return t;
}

ProtocolTrace Protocol::at_with_flips(double phi, const FlipProbs& flips) const {
  flips.validate();
  ProtocolTrace t = at(phi);
  if (flips.p1 > 0.0) {
    if (!rejected_)
      throw InfeasibleBranchError("flipped branch has negligible probability; mixture undefined");
    const auto [qp, qm] = second_test(*rejected_, phi);
    t.p_plus = (1.0 - flips.p1) * t.p_plus + flips.p1 * qp;
    t.p_minus = (1.0 - flips.p1) * t.p_minus + flips.p1 * qm;
  }
  const double pp = t.p_plus, pm = t.p_minus;
  t.p_plus = (1.0 - flips.p2) * pp + flips.p2 * pm;
  t.p_minus = (1.0 - flips.p2) * pm + flips.p2 * pp;
  t.delta = t.p_plus - t.p_minus;
  return t;
}

ProtocolTrace run_protocol(const ProbePlan& plan, const GateSpec& spec, double phi, Branch postselect) {
  return Protocol(plan, spec, postselect).at(phi);
}

ProtocolTrace run_protocol(const ProbePlan& plan, const GateSpec& spec, double phi) {
  return run_protocol(plan, spec, phi, plan.branch);
}

ProtocolTrace run_protocol_with_flips(const ProbePlan& plan, const GateSpec& spec, double phi,
                                      const FlipProbs& flips) {
  return Protocol(plan, spec, plan.branch).at_with_flips(phi, flips);
}

ProtocolTrace run_protocol_with_flips_dense(const ProbePlan& plan, const GateSpec& spec, double phi,
                                            const FlipProbs& flips, const Options& options) {
  plan.validate();
  flips.validate();
  const std::size_t d = options.field_dim.value_or(default_field_dim(plan));
  const fock::SpaceLayout fields{d, d};
  const fock::SpaceLayout layout{2, d, d};
  const fock::Operator u = spec.kind == GateKind::ControlledSwap
                               ? controlled_swap_unitary(layout, 0, 1, 2)
                               : controlled_bs_unitary(layout, spec, 0, 1, 2);
  const fock::SpaceLayout anc{2};
  const fock::PureState plus_state(anc, Vector{{std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}});
  const fock::PureState minus_state(anc, Vector{{std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2}});
  const fock::Operator id_fields = fock::Operator::identity(fields);
  auto projector = [&](const fock::PureState& s) {
    return fock::kron(fock::Operator(anc, s.amplitudes() * s.amplitudes().adjoint()), id_fields);
  };
  const fock::Operator proj_plus = projector(plus_state), proj_minus = projector(minus_state);
  const std::size_t keep[] = {1, 2};

  const fock::PureState psi = initial_fields(plan, d, options.leakage_tolerance);
  const fock::DensityState rho0 =
      fock::DensityState::from_pure(fock::tensor(plus_state, psi)).apply(u);
  const auto first_plus = fock::project_and_prob(rho0, proj_plus);
  const auto first_minus = fock::project_and_prob(rho0, proj_minus);
  const auto& sel = plan.branch == Branch::Symmetric ? first_plus : first_minus;
  const auto& rej = plan.branch == Branch::Symmetric ? first_minus : first_plus;
  if (!sel.post) throw InfeasibleBranchError("postselected branch has negligible probability");
  Matrix rho_f = (1.0 - flips.p1) * sel.post->partial_trace(keep).matrix();
  if (flips.p1 > 0.0) {
    if (!rej.post) throw InfeasibleBranchError("flipped branch has negligible probability");
    rho_f += flips.p1 * rej.post->partial_trace(keep).matrix();
  }
  const fock::DensityState shifted =
      fock::DensityState(fields, rho_f).apply(phase_shift(fields, 0, phi));
  const fock::DensityState rho1 =
      fock::tensor(fock::DensityState::from_pure(plus_state), shifted).apply(u);
  const double pp = fock::expectation(rho1, proj_plus).real();
  const double pm = fock::expectation(rho1, proj_minus).real();

  ProtocolTrace t;
  t.branch1 = plan.branch;
  t.first_plus = first_plus.probability;
  t.first_minus = first_minus.probability;
  t.prob1 = sel.probability;
  t.phi = phi;
  t.p_plus = (1.0 - flips.p2) * pp + flips.p2 * pm;
  t.p_minus = (1.0 - flips.p2) * pm + flips.p2 * pp;
  t.delta = t.p_plus - t.p_minus;
  t.leakage = psi.leakage();
  return t;
}

}  // namespace swaptest::gatesim
