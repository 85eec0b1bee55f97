#pragma once

// Kerr-cat ancilla c coupled to two field modes a, b. Parameters are entered
// in Hz and seconds as tabulated; the engine works in rad/us and us.

#include <optional>
#include <string>
#include <vector>

#include "swaptest/fockcore.hpp"
#include "swaptest/lindblad.hpp"
#include "swaptest/open_protocol.hpp"

namespace swaptest::cqed {

struct CqedParams {
  double K = 6.7e6;         // Kerr, Hz
  double epsilon = 20.1e6;  // two-photon drive, Hz
  double chi = 603e3;       // cross-Kerr, Hz
  double zeta1 = 120e3;     // CPBS coupling, Hz
  std::optional<double> zeta2;  // BS coupling, Hz; zeta1 * beta when unset
  double kappa = 1.35e3;    // single-photon loss, Hz
  double n_thermal = 0.06;
  double kappa2 = 135e3;    // two-photon loss, Hz
  double tau = 600e-9;      // CPBS gate time, s
  double stabilization = 0.0;   // H0-only window before each CPBS, s
  std::optional<double> n_offset;       // photon-number offset of the cross-Kerr term
  std::optional<double> alpha_offset;   // |alpha|^2 of the cross-Kerr term; beta^2 when unset
  std::optional<std::size_t> cat_dim;

  static CqedParams table_one() { return {}; }

  void validate() const;
  double beta() const;
  double zeta2_hz() const { return zeta2.value_or(zeta1 * beta()); }
  // kappa beta^2 tau with kappa as an angular rate.
  double phase_flip_probability() const;
  // ceil(beta^2 + 7 beta + 8) unless overridden.
  std::size_t ancilla_dim() const;
  // Duration of the deterministic beam splitter, s.
  double bs_time() const;
};

// Angular rates in rad/us, times in us.
struct Rates {
  double K, epsilon, chi, zeta1, zeta2, kappa, kappa2, n_thermal, tau, stabilization, bs_time;
  double alpha_offset;
};
Rates angular_rates(const CqedParams& params);
// Human-readable record of the Hz -> rad/us conversion.
std::string conversion_note(const CqedParams& params);

struct CatBasis {
  Vector plus_cat;   // (|beta> + |-beta>)/N
  Vector minus_cat;
  Vector logical_zero;  // |beta>
  Vector logical_one;   // |-beta>
};
CatBasis cat_basis(std::size_t dim, double beta);

enum class Segment { Stabilize, Cpbs, Bs };

struct Hamiltonians {
  fock::Operator h0;
  fock::Operator h_cpbs;
  fock::Operator h_bs;
};

// Layout [cat_dim, d, d]. n_offset defaults to the plan photon number; here it
// must be given.
Hamiltonians build_hamiltonians(const CqedParams& params, const fock::SpaceLayout& layout, double n_offset);

// Generator of one segment on the full layout.
lindblad::Generator segment_generator(const CqedParams& params, const fock::SpaceLayout& layout,
                                      Segment segment, double n_offset);

fock::DensityState lindblad_rhs(const fock::DensityState& rho, const CqedParams& params, Segment segment,
                                double n_offset);
// duration in seconds.
fock::DensityState integrate(const fock::DensityState& rho, const CqedParams& params, Segment segment,
                             double duration, double n_offset, const lindblad::Tolerances& tol = {},
                             lindblad::Stats* stats = nullptr);

struct CatMeasurement {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double leakage = 0.0;
  std::optional<fock::DensityState> post_plus;
  std::optional<fock::DensityState> post_minus;
  std::vector<std::string> warnings;
};
// Projects mode 0 of the layout onto the cat states.
CatMeasurement measure_cat_x(const fock::DensityState& rho, const CqedParams& params);

// Protocol on the field excitation subspace of the plan.
open::ProtocolModel cqed_protocol_model(const open::FieldPreparation& fields, const CqedParams& params,
                                        const lindblad::Tolerances& tol = {});

struct CqedTrace {
  double first_plus = 0.0;
  double first_minus = 0.0;
  double first_leakage = 0.0;
  double phi = 0.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  double delta = 0.0;
  double leakage = 0.0;
  open::Diagnostics diagnostics;
};

// Forward simulation of both swap tests at one phase.
CqedTrace run_cqed_protocol(const ProbePlan& plan, const CqedParams& params, double phi,
                            const lindblad::Tolerances& tol = {});

struct CqedSweep {
  std::vector<WitnessPoint> rows;
  double first_plus = 0.0;
  double first_minus = 0.0;
  open::Diagnostics diagnostics;
};

// First test forward, second test through Heisenberg-picture observables.
CqedSweep run_cqed_sweep(const ProbePlan& plan, const CqedParams& params, const std::vector<double>& phis,
                         const lindblad::Tolerances& tol = {});

// Populations above this in the top cat level abort with TruncationError.
inline constexpr double kTopLevelTolerance = 1e-6;

}  // namespace swaptest::cqed
