#include "swaptest/fockcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "swaptest/errors.hpp"

namespace swaptest {

ProbePlan ProbePlan::noon(int n, int m, GateKind gate) {
  ProbePlan p;
  p.input = NoonInput{n, m};
  p.gate = gate;
  return p;
}

ProbePlan ProbePlan::coherent(Complex alpha1, Complex alpha2, GateKind gate) {
  ProbePlan p;
  p.input = CoherentInput{alpha1, alpha2};
  p.gate = gate;
  return p;
}

void ProbePlan::validate() const {
  if (is_noon()) {
    const auto& in = noon_input();
    if (in.n < 0 || in.m < 0) throw OutOfRangeError("photon numbers must be non-negative");
    if (in.n == in.m) throw DegenerateInputError("NOON input requires n != m");
  } else {
    const auto& in = coherent_input();
    auto finite = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    if (!finite(in.alpha1) || !finite(in.alpha2)) throw OutOfRangeError("amplitudes must be finite");
  }
}

std::string ProbePlan::describe() const {
  std::ostringstream os;
  if (is_noon()) {
    os << "noon(" << noon_input().n << "," << noon_input().m << ")";
  } else {
    const auto& c = coherent_input();
    os << "coherent(" << c.alpha1.real() << (c.alpha1.imag() < 0 ? "" : "+") << c.alpha1.imag()
       << "i," << c.alpha2.real() << (c.alpha2.imag() < 0 ? "" : "+") << c.alpha2.imag() << "i)";
  }
  os << " gate=" << to_string(gate) << " branch=" << to_string(branch);
  return os.str();
}

void FlipProbs::validate() const {
  auto ok = [](double p) { return p >= 0.0 && p < 0.5; };
  if (!ok(p1) || !ok(p2)) throw OutOfRangeError("flip probabilities must lie in [0, 0.5)");
}

const char* to_string(GateKind g) {
  return g == GateKind::ControlledSwap ? "cswap" : "cbs";
}

const char* to_string(Branch b) {
  return b == Branch::Antisymmetric ? "antisymmetric" : "symmetric";
}

}  // namespace swaptest

namespace swaptest::fock {

namespace {

double scaled_tol(const Matrix& m, double tol) {
  return tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

void require_same(const SpaceLayout& a, const SpaceLayout& b) {
  if (!(a == b)) throw LayoutError("layout mismatch");
}

}  // namespace

// SpaceLayout -------------------------------------------------------------

SpaceLayout::SpaceLayout(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  strides_.assign(dims_.size(), 1);
  for (std::size_t i = dims_.size(); i-- > 0;) {
    if (dims_[i] == 0) throw LayoutError("mode dimension must be >= 1");
    strides_[i] = total_;
    total_ *= dims_[i];
  }
}

std::size_t SpaceLayout::dim(std::size_t mode) const {
  if (mode >= dims_.size()) throw OutOfRangeError("mode index out of range");
  return dims_[mode];
}

std::size_t SpaceLayout::stride(std::size_t mode) const {
  if (mode >= dims_.size()) throw OutOfRangeError("mode index out of range");
  return strides_[mode];
}

std::size_t SpaceLayout::flatten(std::span<const std::size_t> occupations) const {
  if (occupations.size() != dims_.size()) throw LayoutError("occupation count != mode count");
  std::size_t index = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (occupations[i] >= dims_[i]) throw OutOfRangeError("occupation exceeds truncation");
    index += occupations[i] * strides_[i];
  }
  return index;
}

std::vector<std::size_t> SpaceLayout::unflatten(std::size_t index) const {
  if (index >= total_) throw OutOfRangeError("basis index out of range");
  std::vector<std::size_t> occ(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) occ[i] = (index / strides_[i]) % dims_[i];
  return occ;
}

std::size_t SpaceLayout::occupation(std::size_t index, std::size_t mode) const {
  return (index / stride(mode)) % dims_[mode];
}

SpaceLayout SpaceLayout::concat(const SpaceLayout& other) const {
  std::vector<std::size_t> d = dims_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  return SpaceLayout(std::move(d));
}

// Operator ----------------------------------------------------------------

Operator::Operator(SpaceLayout layout, Matrix data) : layout_(std::move(layout)), data_(std::move(data)) {
  const auto n = static_cast<Eigen::Index>(layout_.total());
  if (data_.rows() != n || data_.cols() != n) throw LayoutError("operator size does not match layout");
}

Operator Operator::identity(const SpaceLayout& layout) {
  const auto n = static_cast<Eigen::Index>(layout.total());
  return Operator(layout, Matrix::Identity(n, n));
}

Operator Operator::zero(const SpaceLayout& layout) {
  const auto n = static_cast<Eigen::Index>(layout.total());
  return Operator(layout, Matrix::Zero(n, n));
}

Operator Operator::adjoint() const { return Operator(layout_, data_.adjoint()); }

Operator Operator::operator*(const Operator& rhs) const {
  require_same(layout_, rhs.layout_);
  return Operator(layout_, data_ * rhs.data_);
}

Operator Operator::operator+(const Operator& rhs) const {
  require_same(layout_, rhs.layout_);
  return Operator(layout_, data_ + rhs.data_);
}

Operator Operator::operator-(const Operator& rhs) const {
  require_same(layout_, rhs.layout_);
  return Operator(layout_, data_ - rhs.data_);
}

Operator Operator::scaled(Complex factor) const { return Operator(layout_, factor * data_); }

Operator operator*(Complex factor, const Operator& op) { return op.scaled(factor); }

bool Operator::is_hermitian(double tol) const {
  return (data_ - data_.adjoint()).cwiseAbs().maxCoeff() <= scaled_tol(data_, tol);
}

double Operator::unitarity_error() const {
  const auto n = data_.rows();
  return (data_.adjoint() * data_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

Operator kron(const Operator& a, const Operator& b) {
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return Operator(a.layout().concat(b.layout()), std::move(out));
}

// PureState ---------------------------------------------------------------

PureState::PureState(SpaceLayout layout, Vector amplitudes, double leakage)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)), leakage_(leakage) {
  if (amplitudes_.size() != static_cast<Eigen::Index>(layout_.total()))
    throw LayoutError("amplitude count does not match layout");
}

PureState PureState::normalized() const {
  const double n = norm();
  if (n <= 0.0) throw DegenerateInputError("cannot normalize a zero vector");
  return PureState(layout_, amplitudes_ / n, leakage_);
}

Complex PureState::inner(const PureState& other) const {
  require_same(layout_, other.layout_);
  return amplitudes_.dot(other.amplitudes_);
}

PureState PureState::apply(const Operator& op) const {
  require_same(layout_, op.layout());
  return PureState(layout_, op.matrix() * amplitudes_, leakage_);
}

PureState tensor(const PureState& a, const PureState& b) {
  const Vector& x = a.amplitudes();
  const Vector& y = b.amplitudes();
  Vector out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
  return PureState(a.layout().concat(b.layout()), std::move(out), a.leakage() + b.leakage());
}

// DensityState ------------------------------------------------------------

DensityState::DensityState(SpaceLayout layout, Matrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(layout_.total());
  if (matrix_.rows() != n || matrix_.cols() != n) throw LayoutError("density matrix size mismatch");
}

DensityState DensityState::from_pure(const PureState& psi) {
  return DensityState(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityState DensityState::mixture(std::span<const double> weights, std::span<const PureState> states) {
  if (weights.size() != states.size() || states.empty())
    throw LayoutError("mixture needs one weight per state");
  const auto n = static_cast<Eigen::Index>(states[0].layout().total());
  Matrix rho = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < states.size(); ++k) {
    require_same(states[0].layout(), states[k].layout());
    rho += weights[k] * states[k].amplitudes() * states[k].amplitudes().adjoint();
  }
  return DensityState(states[0].layout(), std::move(rho));
}

double DensityState::trace() const { return matrix_.trace().real(); }

double DensityState::purity() const { return (matrix_ * matrix_).trace().real(); }

double DensityState::min_eigenvalue() const {
  Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityState::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

bool DensityState::is_physical(double tol) const {
  const double t = scaled_tol(matrix_, tol);
  const double tr = trace();
  return hermiticity_error() <= t && std::abs(matrix_.trace().imag()) <= t && tr > 0.0 &&
         tr <= 1.0 + t && min_eigenvalue() >= -t;
}

DensityState DensityState::normalized() const {
  const double tr = trace();
  if (tr <= 0.0) throw DegenerateInputError("cannot normalize a zero-trace density matrix");
  return DensityState(layout_, matrix_ / tr);
}

DensityState DensityState::apply(const Operator& u) const {
  require_same(layout_, u.layout());
  return DensityState(layout_, u.matrix() * matrix_ * u.matrix().adjoint());
}

DensityState DensityState::partial_trace(std::span<const std::size_t> keep_modes) const {
  std::vector<std::size_t> keep(keep_modes.begin(), keep_modes.end());
  for (std::size_t m : keep)
    if (m >= layout_.modes()) throw OutOfRangeError("mode index out of range");
  if (!std::is_sorted(keep.begin(), keep.end()) ||
      std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw LayoutError("kept modes must be strictly increasing");
  std::vector<std::size_t> kept_dims;
  for (std::size_t m : keep) kept_dims.push_back(layout_.dims()[m]);
  SpaceLayout out_layout(kept_dims);
  std::vector<bool> is_kept(layout_.modes(), false);
  for (std::size_t m : keep) is_kept[m] = true;

  const std::size_t n = layout_.total();
  std::vector<std::size_t> kept_index(n), traced_key(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ki = 0, tk = 0, kstride = 1, tstride = 1;
    for (std::size_t m = layout_.modes(); m-- > 0;) {
      const std::size_t occ = layout_.occupation(i, m);
      if (is_kept[m]) {
        ki += occ * kstride;
        kstride *= layout_.dims()[m];
      } else {
        tk += occ * tstride;
        tstride *= layout_.dims()[m];
      }
    }
    kept_index[i] = ki;
    traced_key[i] = tk;
  }
  const auto out_n = static_cast<Eigen::Index>(out_layout.total());
  Matrix out = Matrix::Zero(out_n, out_n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (traced_key[i] == traced_key[j])
        out(static_cast<Eigen::Index>(kept_index[i]), static_cast<Eigen::Index>(kept_index[j])) +=
            matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return DensityState(std::move(out_layout), std::move(out));
}

DensityState tensor(const DensityState& a, const DensityState& b) {
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return DensityState(a.layout().concat(b.layout()), std::move(out));
}

// Constructors ------------------------------------------------------------

PureState fock_state(const SpaceLayout& layout, std::span<const std::size_t> occupations) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total()));
  v(static_cast<Eigen::Index>(layout.flatten(occupations))) = 1.0;
  return PureState(layout, std::move(v));
}

PureState fock_state(const SpaceLayout& layout, std::initializer_list<std::size_t> occupations) {
  return fock_state(layout, std::span<const std::size_t>(occupations.begin(), occupations.size()));
}

double poisson_tail(double mean, std::size_t cutoff) {
  if (mean < 0.0) throw OutOfRangeError("Poisson mean must be non-negative");
  if (cutoff == 0) return 1.0;
  if (mean == 0.0) return 0.0;
  // Below the mode the complement is short and accurate; above it sum the tail.
  const double mode = std::floor(mean);
  auto log_pmf = [mean](double k) { return -mean + k * std::log(mean) - std::lgamma(k + 1.0); };
  if (static_cast<double>(cutoff) <= mode) {
    double head = 0.0;
    for (std::size_t k = 0; k < cutoff; ++k) head += std::exp(log_pmf(static_cast<double>(k)));
    return std::max(0.0, 1.0 - head);
  }
  double sum = 0.0;
  for (std::size_t k = cutoff;; ++k) {
    const double term = std::exp(log_pmf(static_cast<double>(k)));
    sum += term;
    if (term < 1e-20 * sum || term == 0.0) break;
  }
  return sum;
}

CoherentAmplitudes coherent_amplitudes(std::size_t dim, Complex alpha) {
  if (dim == 0) throw LayoutError("dimension must be >= 1");
  const double r2 = std::norm(alpha);
  Vector v(static_cast<Eigen::Index>(dim));
  // Recurrence c_k = c_{k-1} alpha / sqrt(k) from c_0 = e^{-|alpha|^2/2}, in
  // magnitude-log form to stay finite for large |alpha|.
  const double log_r = r2 > 0.0 ? 0.5 * std::log(r2) : 0.0;
  const double arg = std::arg(alpha);
  for (std::size_t k = 0; k < dim; ++k) {
    if (r2 == 0.0) {
      v(static_cast<Eigen::Index>(k)) = k == 0 ? 1.0 : 0.0;
      continue;
    }
    const double kk = static_cast<double>(k);
    const double log_mag = -0.5 * r2 + kk * log_r - 0.5 * std::lgamma(kk + 1.0);
    v(static_cast<Eigen::Index>(k)) = std::polar(std::exp(log_mag), kk * arg);
  }
  const double leakage = poisson_tail(r2, dim);
  const double n = v.norm();
  return {v / n, leakage};
}

std::size_t default_coherent_dim(Complex alpha) {
  const double a = std::abs(alpha);
  return static_cast<std::size_t>(std::ceil(a * a + 7.0 * a + 10.0));
}

PureState coherent_product(const SpaceLayout& layout, std::span<const Complex> alphas,
                           double leakage_tolerance) {
  if (alphas.size() != layout.modes()) throw LayoutError("need one amplitude per mode");
  Vector v = Vector::Ones(1);
  double leakage = 0.0;
  for (std::size_t m = 0; m < layout.modes(); ++m) {
    auto c = coherent_amplitudes(layout.dims()[m], alphas[m]);
    if (c.leakage > leakage_tolerance)
      throw TruncationError("coherent amplitude too large for mode dimension (leakage " +
                            std::to_string(c.leakage) + ")");
    leakage += c.leakage;
    Vector next(v.size() * c.amplitudes.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      next.segment(i * c.amplitudes.size(), c.amplitudes.size()) = v(i) * c.amplitudes;
    v = std::move(next);
  }
  return PureState(layout, std::move(v), leakage);
}

PureState coherent_state(const SpaceLayout& layout, std::size_t mode, Complex alpha,
                         double leakage_tolerance) {
  if (mode >= layout.modes()) throw OutOfRangeError("mode index out of range");
  std::vector<Complex> alphas(layout.modes(), Complex{0.0, 0.0});
  alphas[mode] = alpha;
  return coherent_product(layout, alphas, leakage_tolerance);
}

// Operators ---------------------------------------------------------------

Matrix lowering_matrix(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

Matrix number_matrix(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix n = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Operator embed(const SpaceLayout& layout, std::size_t mode, const Matrix& single) {
  const std::size_t d = layout.dim(mode);
  if (single.rows() != static_cast<Eigen::Index>(d) || single.cols() != static_cast<Eigen::Index>(d))
    throw LayoutError("single-mode matrix does not match mode dimension");
  const std::size_t n = layout.total();
  const std::size_t s = layout.stride(mode);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t k = (col / s) % d;
    const std::size_t base = col - k * s;
    for (std::size_t r = 0; r < d; ++r) {
      const Complex v = single(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
      if (v != Complex{0.0, 0.0})
        out(static_cast<Eigen::Index>(base + r * s), static_cast<Eigen::Index>(col)) = v;
    }
  }
  return Operator(layout, std::move(out));
}

Operator embed_two_mode(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b,
                        const Matrix& pair) {
  if (mode_a == mode_b) throw LayoutError("modes must differ");
  const std::size_t da = layout.dim(mode_a), db = layout.dim(mode_b);
  if (pair.rows() != static_cast<Eigen::Index>(da * db) || pair.cols() != pair.rows())
    throw LayoutError("two-mode matrix does not match mode dimensions");
  const std::size_t n = layout.total();
  const std::size_t sa = layout.stride(mode_a), sb = layout.stride(mode_b);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t ka = (col / sa) % da, kb = (col / sb) % db;
    const std::size_t base = col - ka * sa - kb * sb;
    const auto pc = static_cast<Eigen::Index>(ka * db + kb);
    for (std::size_t ra = 0; ra < da; ++ra)
      for (std::size_t rb = 0; rb < db; ++rb) {
        const Complex v = pair(static_cast<Eigen::Index>(ra * db + rb), pc);
        if (v != Complex{0.0, 0.0})
          out(static_cast<Eigen::Index>(base + ra * sa + rb * sb), static_cast<Eigen::Index>(col)) = v;
      }
  }
  return Operator(layout, std::move(out));
}

Operator controlled(const SpaceLayout& layout, std::size_t ancilla, const Operator& when0,
                    const Operator& when1) {
  if (layout.dim(ancilla) != 2) throw LayoutError("ancilla mode must have dimension 2");
  require_same(layout, when0.layout());
  require_same(layout, when1.layout());
  const std::size_t n = layout.total();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t jr = layout.occupation(r, ancilla), jc = layout.occupation(c, ancilla);
      if (jr != jc) continue;
      const Operator& op = jc == 0 ? when0 : when1;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          op.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  return Operator(layout, std::move(out));
}

Operator annihilation(const SpaceLayout& layout, std::size_t mode) {
  return embed(layout, mode, lowering_matrix(layout.dim(mode)));
}

Operator creation(const SpaceLayout& layout, std::size_t mode) {
  return embed(layout, mode, lowering_matrix(layout.dim(mode)).adjoint());
}

Operator number_operator(const SpaceLayout& layout, std::size_t mode) {
  return embed(layout, mode, number_matrix(layout.dim(mode)));
}

Operator swap_operator(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b) {
  if (layout.dim(mode_a) != layout.dim(mode_b)) throw LayoutError("swapped modes must have equal dims");
  const std::size_t n = layout.total();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t col = 0; col < n; ++col) {
    auto occ = layout.unflatten(col);
    std::swap(occ[mode_a], occ[mode_b]);
    out(static_cast<Eigen::Index>(layout.flatten(occ)), static_cast<Eigen::Index>(col)) = 1.0;
  }
  return Operator(layout, std::move(out));
}

Operator swap_projector(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b,
                        Symmetry which) {
  const Operator s = swap_operator(layout, mode_a, mode_b);
  const double sign = which == Symmetry::Symmetric ? 1.0 : -1.0;
  const auto n = static_cast<Eigen::Index>(layout.total());
  return Operator(layout, 0.5 * (Matrix::Identity(n, n) + sign * s.matrix()));
}

// Measurement -------------------------------------------------------------

PureProjection project_and_prob(const PureState& state, const Operator& projector) {
  require_same(state.layout(), projector.layout());
  Vector v = projector.matrix() * state.amplitudes();
  const double norm_in = state.amplitudes().squaredNorm();
  if (norm_in <= 0.0) throw DegenerateInputError("zero input state");
  const double p = std::clamp(v.squaredNorm() / norm_in, 0.0, 1.0);
  PureProjection out{p, std::nullopt};
  if (p >= kProbabilityFloor) out.post = PureState(state.layout(), v / v.norm(), state.leakage());
  return out;
}

MixedProjection project_and_prob(const DensityState& state, const Operator& projector) {
  require_same(state.layout(), projector.layout());
  const double tr = state.trace();
  if (tr <= 0.0) throw DegenerateInputError("zero-trace input state");
  Matrix post = projector.matrix() * state.matrix() * projector.matrix().adjoint();
  const double p = std::clamp(post.trace().real() / tr, 0.0, 1.0);
  MixedProjection out{p, std::nullopt};
  if (p >= kProbabilityFloor) out.post = DensityState(state.layout(), post / post.trace().real());
  return out;
}

Complex expectation(const PureState& state, const Operator& op) {
  require_same(state.layout(), op.layout());
  return state.amplitudes().dot(op.matrix() * state.amplitudes());
}

Complex expectation(const DensityState& state, const Operator& op) {
  require_same(state.layout(), op.layout());
  return (op.matrix() * state.matrix()).trace();
}

// ExcitationSubspace ------------------------------------------------------

ExcitationSubspace::ExcitationSubspace(std::size_t dim, std::size_t n_min, std::size_t n_max)
    : dim_(dim) {
  if (dim == 0 || n_min > n_max) throw LayoutError("invalid excitation window");
  for (std::size_t ka = 0; ka < dim; ++ka)
    for (std::size_t kb = 0; kb < dim; ++kb)
      if (ka + kb >= n_min && ka + kb <= n_max) indices_.push_back(ka * dim + kb);
  if (indices_.empty()) throw LayoutError("empty excitation subspace");
}

Matrix ExcitationSubspace::restrict(const Matrix& full) const {
  const auto n = static_cast<Eigen::Index>(dim_ * dim_);
  if (full.rows() != n || full.cols() != n) throw LayoutError("two-mode matrix size mismatch");
  const auto k = static_cast<Eigen::Index>(indices_.size());
  Matrix out(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      out(i, j) = full(static_cast<Eigen::Index>(indices_[i]), static_cast<Eigen::Index>(indices_[j]));
  return out;
}

Vector ExcitationSubspace::restrict(const Vector& full) const {
  if (full.size() != static_cast<Eigen::Index>(dim_ * dim_)) throw LayoutError("two-mode vector size mismatch");
  Vector out(static_cast<Eigen::Index>(indices_.size()));
  for (std::size_t i = 0; i < indices_.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = full(static_cast<Eigen::Index>(indices_[i]));
  return out;
}

Vector ExcitationSubspace::extend(const Vector& sub) const {
  if (sub.size() != static_cast<Eigen::Index>(indices_.size())) throw LayoutError("subspace vector size mismatch");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(dim_ * dim_));
  for (std::size_t i = 0; i < indices_.size(); ++i)
    out(static_cast<Eigen::Index>(indices_[i])) = sub(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace swaptest::fock
