#pragma once

// Reference routes used by the tests. Nothing here calls the library's gate
// builders: states and gates are written out element by element.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
constexpr double pi = std::numbers::pi;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  return g;
}

// exp(-|a|^2/2) a^k / sqrt(k!), not renormalized.
inline Vec coherent(int dim, C a) {
  Vec v(dim);
  for (int k = 0; k < dim; ++k)
    v(k) = std::exp(-0.5 * std::norm(a)) * (k == 0 ? C{1.0} : std::pow(a, k)) / std::sqrt(std::tgamma(k + 1.0));
  return v;
}

inline Vec fock(int dim, int n) {
  Vec v = Vec::Zero(dim);
  v(n) = 1.0;
  return v;
}

// |x>|y> with the first mode slowest.
inline Vec product(const Vec& x, const Vec& y) {
  Vec v(x.size() * y.size());
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < y.size(); ++j) v(i * y.size() + j) = x(i) * y(j);
  return v;
}

enum class Gate { Swap, SwapWithParity };  // parity: |k,l> -> (-1)^l |l,k>

// Two-mode exchange applied index by index on the d*d basis.
inline Vec exchange(const Vec& v, int d, Gate g) {
  Vec out = Vec::Zero(v.size());
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      out(l * d + k) += ((g == Gate::SwapWithParity && l % 2) ? -1.0 : 1.0) * v(k * d + l);
  return out;
}

// Swap test on [ancilla, fields], stepping through the circuit: H on the
// ancilla, exchange controlled on |1>, H, then ancilla |0> (outcome +) or
// |1> (outcome -). Returns the unnormalized field states of both outcomes.
inline std::pair<Vec, Vec> swap_test(const Vec& fields, int d, Gate g) {
  const double r = std::sqrt(0.5);
  Vec zero = r * fields, one = r * fields;  // after the first H
  one = exchange(one, d, g);
  return {r * (zero + one), r * (zero - one)};
}

inline Vec phase_on_a(const Vec& fields, int d, double phi) {
  Vec out = fields;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) out(k * d + l) *= std::polar(1.0, -phi * k);
  return out;
}

struct Outcome {
  double first_plus, first_minus, p_plus, p_minus;
  Vec selected;  // normalized postselected fields
};

// Both swap tests, postselecting the antisymmetric (-) or symmetric (+) branch.
inline Outcome protocol(const Vec& fields, int d, Gate g, double phi, bool antisymmetric = true) {
  Outcome o{};
  const auto [plus, minus] = swap_test(fields, d, g);
  const double n = fields.squaredNorm();
  o.first_plus = plus.squaredNorm() / n;
  o.first_minus = minus.squaredNorm() / n;
  o.selected = (antisymmetric ? minus : plus).normalized();
  const auto [p2, m2] = swap_test(phase_on_a(o.selected, d, phi), d, g);
  o.p_plus = p2.squaredNorm();
  o.p_minus = m2.squaredNorm();
  return o;
}

// 4 Var(n_a) of a pure two-mode state.
inline double qfi_variance(const Vec& psi, int d) {
  double m1 = 0, m2 = 0;
  const double n = psi.squaredNorm();
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const double w = std::norm(psi(k * d + l)) / n;
      m1 += w * k;
      m2 += w * k * k;
    }
  return 4.0 * (m2 - m1 * m1);
}

// sum_pm p'^2 / p with a five-point stencil.
inline double fisher_fd(const std::function<double(double)>& p_plus, double phi, double h = 1e-4) {
  const double f2 = p_plus(phi + 2 * h), f1 = p_plus(phi + h), f0 = p_plus(phi), m1 = p_plus(phi - h),
               m2 = p_plus(phi - 2 * h);
  const double d = (-f2 + 8 * f1 - 8 * m1 + m2) / (12 * h);
  return d * d / f0 + d * d / (1.0 - f0);
}

}  // namespace oracle
