#pragma once

// Truncated Fock-space linear algebra.
//
// Basis ordering is row-major with mode 0 slowest: for dims [d0, d1, ...] the
// occupation tuple (k0, k1, ...) sits at index k0*d1*d2*... + k1*d2*... + ...

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "swaptest/plan.hpp"

namespace swaptest {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

}  // namespace swaptest

namespace swaptest::fock {

inline constexpr double kDefaultLeakageTolerance = 1e-8;
inline constexpr double kProbabilityFloor = 1e-12;
// Absolute tolerance for Hermiticity/positivity, scaled by the matrix norm.
inline constexpr double kCheckTolerance = 1e-9;

class SpaceLayout {
 public:
  explicit SpaceLayout(std::vector<std::size_t> dims);
  SpaceLayout(std::initializer_list<std::size_t> dims)
      : SpaceLayout(std::vector<std::size_t>(dims)) {}

  std::size_t modes() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t mode) const;
  std::size_t stride(std::size_t mode) const;
  std::size_t total() const noexcept { return total_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  std::size_t flatten(std::span<const std::size_t> occupations) const;
  std::vector<std::size_t> unflatten(std::size_t index) const;
  std::size_t occupation(std::size_t index, std::size_t mode) const;

  SpaceLayout concat(const SpaceLayout& other) const;

  bool operator==(const SpaceLayout&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

class Operator {
 public:
  Operator(SpaceLayout layout, Matrix data);

  static Operator identity(const SpaceLayout& layout);
  static Operator zero(const SpaceLayout& layout);

  const SpaceLayout& layout() const noexcept { return layout_; }
  const Matrix& matrix() const noexcept { return data_; }

  Operator adjoint() const;
  Operator operator*(const Operator& rhs) const;
  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  Operator scaled(Complex factor) const;

  bool is_hermitian(double tol = kCheckTolerance) const;
  // max |(U^dagger U - I)_ij|
  double unitarity_error() const;

 private:
  SpaceLayout layout_;
  Matrix data_;
};

Operator operator*(Complex factor, const Operator& op);
Operator kron(const Operator& a, const Operator& b);

class PureState {
 public:
  PureState(SpaceLayout layout, Vector amplitudes, double leakage = 0.0);

  const SpaceLayout& layout() const noexcept { return layout_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  // Probability weight lost to truncation when the state was built.
  double leakage() const noexcept { return leakage_; }

  double norm() const { return amplitudes_.norm(); }
  PureState normalized() const;
  // <this|other>
  Complex inner(const PureState& other) const;
  PureState apply(const Operator& op) const;

 private:
  SpaceLayout layout_;
  Vector amplitudes_;
  double leakage_ = 0.0;
};

PureState tensor(const PureState& a, const PureState& b);

class DensityState {
 public:
  DensityState(SpaceLayout layout, Matrix matrix);
  static DensityState from_pure(const PureState& psi);
  // sum_k w_k |psi_k><psi_k|
  static DensityState mixture(std::span<const double> weights, std::span<const PureState> states);

  const SpaceLayout& layout() const noexcept { return layout_; }
  const Matrix& matrix() const noexcept { return matrix_; }

  double trace() const;
  double purity() const;
  double min_eigenvalue() const;
  double hermiticity_error() const;
  bool is_physical(double tol = kCheckTolerance) const;
  DensityState normalized() const;
  DensityState apply(const Operator& u) const;  // U rho U^dagger
  DensityState partial_trace(std::span<const std::size_t> keep_modes) const;

 private:
  SpaceLayout layout_;
  Matrix matrix_;
};

DensityState tensor(const DensityState& a, const DensityState& b);

// Constructors ------------------------------------------------------------

PureState fock_state(const SpaceLayout& layout, std::span<const std::size_t> occupations);
PureState fock_state(const SpaceLayout& layout, std::initializer_list<std::size_t> occupations);

struct CoherentAmplitudes {
  Vector amplitudes;  // normalized within the truncation
  double leakage = 0.0;
};
CoherentAmplitudes coherent_amplitudes(std::size_t dim, Complex alpha);

// Coherent state on one mode, vacuum on all others.
PureState coherent_state(const SpaceLayout& layout, std::size_t mode, Complex alpha,
                         double leakage_tolerance = kDefaultLeakageTolerance);
// Product of coherent states, one amplitude per mode.
PureState coherent_product(const SpaceLayout& layout, std::span<const Complex> alphas,
                           double leakage_tolerance = kDefaultLeakageTolerance);

// ceil(|alpha|^2 + 7|alpha| + 10)
std::size_t default_coherent_dim(Complex alpha);
inline std::size_t default_fock_dim(int n) { return static_cast<std::size_t>(n) + 1; }

// P(N >= cutoff) for N ~ Poisson(mean).
double poisson_tail(double mean, std::size_t cutoff);

// Operators ---------------------------------------------------------------

Operator annihilation(const SpaceLayout& layout, std::size_t mode);
Operator creation(const SpaceLayout& layout, std::size_t mode);
Operator number_operator(const SpaceLayout& layout, std::size_t mode);
Operator swap_operator(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b);

enum class Symmetry { Symmetric, Antisymmetric };
// Idempotent swap-test projector (I +/- S)/2.
Operator swap_projector(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b,
                        Symmetry which);

// Single-mode matrix acting on `mode`, identity elsewhere.
Operator embed(const SpaceLayout& layout, std::size_t mode, const Matrix& single);
// Two-mode matrix (basis |ka,kb>, ka slowest) acting on modes a and b.
Operator embed_two_mode(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b,
                        const Matrix& pair);
// |0><0|_anc (x) when0 + |1><1|_anc (x) when1; when0/when1 must act trivially on
// the ancilla mode, which must have dimension 2.
Operator controlled(const SpaceLayout& layout, std::size_t ancilla, const Operator& when0,
                    const Operator& when1);

// Measurement -------------------------------------------------------------

struct PureProjection {
  double probability = 0.0;
  std::optional<PureState> post;  // empty below kProbabilityFloor
};
struct MixedProjection {
  double probability = 0.0;
  std::optional<DensityState> post;
};

PureProjection project_and_prob(const PureState& state, const Operator& projector);
MixedProjection project_and_prob(const DensityState& state, const Operator& projector);

Complex expectation(const PureState& state, const Operator& op);
Complex expectation(const DensityState& state, const Operator& op);

// Two-mode sectors --------------------------------------------------------

// Subset of a two-mode basis |ka, kb> (dims d x d) selected by total photon
// number. Operators that conserve ka + kb restrict exactly.
class ExcitationSubspace {
 public:
  // All |ka,kb> with ka,kb < dim and n_min <= ka+kb <= n_max.
  ExcitationSubspace(std::size_t dim, std::size_t n_min, std::size_t n_max);

  static ExcitationSubspace sector(std::size_t n) { return ExcitationSubspace(n + 1, n, n); }
  static ExcitationSubspace capped(std::size_t n_max) {
    return ExcitationSubspace(n_max + 1, 0, n_max);
  }

  std::size_t mode_dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return indices_.size(); }
  // Index into the full d*d two-mode basis.
  std::size_t full_index(std::size_t k) const { return indices_[k]; }
  std::size_t occupation_a(std::size_t k) const { return indices_[k] / dim_; }
  std::size_t occupation_b(std::size_t k) const { return indices_[k] % dim_; }

  Matrix restrict(const Matrix& full_two_mode) const;
  Vector restrict(const Vector& full_two_mode) const;
  Vector extend(const Vector& sub) const;

 private:
  std::size_t dim_;
  std::vector<std::size_t> indices_;
};

// Matrices on a single truncated mode.
Matrix lowering_matrix(std::size_t dim);
Matrix number_matrix(std::size_t dim);

}  // namespace swaptest::fock
