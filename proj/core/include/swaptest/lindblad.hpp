#pragma once

// Lindblad generators applied as sparse-dense products and an adaptive
// Dormand-Prince 5(4) integrator for density matrices and observables.

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "swaptest/fockcore.hpp"

namespace swaptest::lindblad {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// rate * D[op]
struct Jump {
  double rate = 0.0;
  Matrix op;
};

class Generator {
 public:
  Generator(const Matrix& hamiltonian, const std::vector<Jump>& jumps);

  std::size_t dim() const noexcept { return dim_; }
  // Stored entries of the effective Hamiltonian and jump operators.
  std::size_t nonzeros() const;
  // d rho / dt for Hermitian rho.
  void apply(const Matrix& rho, Matrix& out) const;
  // d O / dt in the Heisenberg picture for Hermitian O.
  void apply_adjoint(const Matrix& obs, Matrix& out) const;

 private:
  std::size_t dim_;
  SparseMatrix heff_;      // H - (i/2) sum L^dagger L
  SparseMatrix heff_adj_;
  std::vector<SparseMatrix> jumps_;      // sqrt(rate) L
  std::vector<SparseMatrix> jumps_adj_;
};

enum class Picture { Schrodinger, Heisenberg };

struct Tolerances {
  double rtol = 1e-7;
  double atol = 1e-10;
  double min_step = 1e-12;
  std::size_t max_steps = 20'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double max_trace_drift = 0.0;  // Schrodinger picture only
  double max_hermiticity_error = 0.0;
  void merge(const Stats& other);
};

// Evolves `state` for `duration` (time units of the generator). Throws
// IntegratorError on step-size underflow.
Matrix integrate(const Generator& generator, Matrix state, double duration, Picture picture,
                 const Tolerances& tol = {}, Stats* stats = nullptr);

// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const Matrix& rho);

}  // namespace swaptest::lindblad
