#include "swaptest/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "swaptest/errors.hpp"

namespace swaptest::lindblad {

namespace {

SparseMatrix to_sparse(const Matrix& m) {
  return m.sparseView(Complex{1.0, 0.0}, 1e-14);
}

void symmetrize(Matrix& m) { m = (0.5 * (m + m.adjoint())).eval(); }

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

void Stats::merge(const Stats& o) {
  accepted += o.accepted;
  rejected += o.rejected;
  rhs_evals += o.rhs_evals;
  max_trace_drift = std::max(max_trace_drift, o.max_trace_drift);
  max_hermiticity_error = std::max(max_hermiticity_error, o.max_hermiticity_error);
}

Generator::Generator(const Matrix& hamiltonian, const std::vector<Jump>& jumps)
    : dim_(static_cast<std::size_t>(hamiltonian.rows())) {
  if (hamiltonian.rows() != hamiltonian.cols()) throw LayoutError("Hamiltonian must be square");
  Matrix heff = hamiltonian;
  for (const auto& j : jumps) {
    if (j.rate < 0.0) throw OutOfRangeError("jump rates must be non-negative");
    if (j.rate == 0.0) continue;
    if (j.op.rows() != hamiltonian.rows() || j.op.cols() != hamiltonian.cols())
      throw LayoutError("jump operator size mismatch");
    const Matrix l = std::sqrt(j.rate) * j.op;
    heff -= Complex{0.0, 0.5} * (l.adjoint() * l);
    jumps_.push_back(to_sparse(l));
    jumps_adj_.push_back(to_sparse(l.adjoint()));
  }
  heff_ = to_sparse(heff);
  heff_adj_ = to_sparse(heff.adjoint());
}

std::size_t Generator::nonzeros() const {
  std::size_t n = static_cast<std::size_t>(heff_.nonZeros());
  for (const auto& l : jumps_) n += static_cast<std::size_t>(l.nonZeros());
  return n;
}

void Generator::apply(const Matrix& rho, Matrix& out) const {
  const Complex I{0.0, 1.0};
  Matrix a = heff_ * rho;
  out = I * (a.adjoint() - a);
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    a.noalias() = jumps_[k] * rho;                    // L rho
    out.noalias() += a * jumps_adj_[k];               // L rho L^dagger
  }
}

void Generator::apply_adjoint(const Matrix& obs, Matrix& out) const {
  const Complex I{0.0, 1.0};
  Matrix c = heff_adj_ * obs;
  out = I * (c - c.adjoint());
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    c.noalias() = jumps_adj_[k] * obs;                // L^dagger O
    out.noalias() += c * jumps_[k];                   // L^dagger O L
  }
}

Matrix integrate(const Generator& g, Matrix y, double duration, Picture picture, const Tolerances& tol,
                 Stats* stats) {
  if (!(tol.rtol > 0.0) || !(tol.atol > 0.0)) throw OutOfRangeError("tolerances must be positive");
  if (duration < 0.0) throw OutOfRangeError("duration must be non-negative");
  const auto n = static_cast<Eigen::Index>(g.dim());
  if (y.rows() != n || y.cols() != n) throw LayoutError("state size does not match generator");
  Stats local;
  if (duration == 0.0) {
    if (stats) stats->merge(local);
    return y;
  }
  auto f = [&](const Matrix& x, Matrix& out) {
    ++local.rhs_evals;
    if (picture == Picture::Schrodinger)
      g.apply(x, out);
    else
      g.apply_adjoint(x, out);
  };
  const Complex tr0 = y.trace();
  auto scale = [&](const Matrix& a, const Matrix& b) {
    return tol.atol + tol.rtol * std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  };

  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), k5(n, n), k6(n, n), k7(n, n), ynew(n, n), tmp(n, n);
  f(y, k1);
  // Initial step from the derivative magnitude.
  const double d0 = y.cwiseAbs().maxCoeff(), d1 = k1.cwiseAbs().maxCoeff();
  double h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6;
  h = std::min({h, duration, 0.1 * duration});
  h = std::max(h, tol.min_step);

  double t = 0.0;
  double err_prev = 1e-4;
  constexpr double safety = 0.9, beta = 0.04, alpha = 0.2 - 0.75 * beta;
  std::size_t steps = 0;
  while (t < duration) {
    if (++steps > tol.max_steps) throw IntegratorError("step limit exceeded");
    bool last = false;
    if (t + h >= duration) {
      h = duration - t;
      last = true;
    }
    tmp = y + h * a21 * k1;
    f(tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(tmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(ynew, k7);
    tmp = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = tmp.cwiseAbs().maxCoeff() / scale(y, ynew);

    if (err <= 1.0) {
      t = last ? duration : t + h;
      y.swap(ynew);
      const double herm = (y - y.adjoint()).cwiseAbs().maxCoeff();
      local.max_hermiticity_error = std::max(local.max_hermiticity_error, herm);
      symmetrize(y);
      k1.swap(k7);
      if (picture == Picture::Schrodinger)
        local.max_trace_drift = std::max(local.max_trace_drift, std::abs(y.trace() - tr0));
      ++local.accepted;
      double fac = err == 0.0 ? 5.0 : safety * std::pow(err, -alpha) * std::pow(err_prev, beta);
      fac = std::clamp(fac, 0.2, 5.0);
      err_prev = std::max(err, 1e-4);
      h *= fac;
    } else {
      ++local.rejected;
      const double fac = std::isfinite(err) ? std::max(0.2, safety * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      if (h < tol.min_step) {
        std::ostringstream os;
        os << "step size underflow at t=" << t << " of " << duration
           << "; system too stiff for rtol=" << tol.rtol << ", try rtol=" << tol.rtol * 10;
        throw IntegratorError(os.str());
      }
    }
  }
  if (stats) stats->merge(local);
  return y;
}

double min_eigenvalue(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace swaptest::lindblad
