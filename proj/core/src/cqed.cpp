#include "swaptest/cqed.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "swaptest/errors.hpp"

namespace swaptest::cqed {

namespace {

const Complex I{0.0, 1.0};
constexpr double kMeasurementLeakageWarning = 0.01;

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double angular(double hz) { return 2.0 * std::numbers::pi * hz * 1e-6; }

// Hamiltonian and jump matrices on cat (x) field, where the field factor is
// described by a^dagger b and a^dagger a + b^dagger b on some basis.
struct Assembled {
  Matrix h0, h_cpbs, h_bs;
  std::vector<lindblad::Jump> jumps;
};

Assembled assemble(const CqedParams& params, const Matrix& hop, const Matrix& ntot, double n_offset) {
  params.validate();
  const Rates r = angular_rates(params);
  const std::size_t d = params.ancilla_dim();
  const Matrix c = fock::lowering_matrix(d);
  const Matrix cd = c.adjoint();
  const Matrix c2 = c * c, cd2 = cd * cd;
  const Matrix id_c = Matrix::Identity(c.rows(), c.cols());
  const Matrix id_f = Matrix::Identity(hop.rows(), hop.cols());

  // Couplings enter with phase -i so that |beta> drives the + rotation sense.
  const Complex z1 = -I * r.zeta1, z2 = -I * r.zeta2;

  Assembled out;
  const Matrix kerr = -r.K * (cd2 * c2) + r.epsilon * (cd2 + c2);
  out.h0 = kron(kerr, id_f) - r.chi * kron(cd * c - r.alpha_offset * id_c, ntot - n_offset * id_f);
  out.h_cpbs = -z1 * kron(cd, hop) - std::conj(z1) * kron(c, Matrix(hop.adjoint()));
  out.h_bs = kron(id_c, z2 * hop + std::conj(z2) * hop.adjoint());
  out.jumps = {{r.kappa * (1.0 + r.n_thermal), kron(c, id_f)},
               {r.kappa * r.n_thermal, kron(cd, id_f)},
               {r.kappa2, kron(c2, id_f)}};
  return out;
}

void require_layout(const CqedParams& params, const fock::SpaceLayout& layout) {
  if (layout.modes() != 3 || layout.dim(0) != params.ancilla_dim() || layout.dim(1) != layout.dim(2))
    throw LayoutError("cQED layout must be [cat_dim, d, d]");
}

Assembled assemble_full(const CqedParams& params, const fock::SpaceLayout& layout, double n_offset) {
  require_layout(params, layout);
  const std::size_t d = layout.dim(1);
  const Matrix l = fock::lowering_matrix(d);
  const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const Matrix a = kron(l, id), b = kron(id, l);
  return assemble(params, a.adjoint() * b, a.adjoint() * a + b.adjoint() * b, n_offset);
}

Matrix segment_hamiltonian(const Assembled& m, Segment segment) {
  switch (segment) {
    case Segment::Stabilize: return m.h0;
    case Segment::Cpbs: return m.h0 + m.h_cpbs;
    case Segment::Bs: return m.h0 + m.h_bs;
  }
  return m.h0;
}

void check_truncation(const open::Diagnostics& diag, const CqedParams& params) {
  if (diag.max_top_level_population > kTopLevelTolerance) {
    std::ostringstream os;
    os << "top cat level population " << diag.max_top_level_population << " exceeds " << kTopLevelTolerance
       << " at cat_dim=" << params.ancilla_dim() << "; enlarge cat_dim (try " << params.ancilla_dim() + 4 << ")";
    throw TruncationError(os.str());
  }
}

}  // namespace

void CqedParams::validate() const {
  if (!(K > 0.0) || !(epsilon > 0.0)) throw OutOfRangeError("Kerr and drive must be positive");
  if (!(tau > 0.0)) throw OutOfRangeError("CPBS gate time must be positive");
  if (!(zeta1 > 0.0) || !(zeta2_hz() > 0.0)) throw OutOfRangeError("couplings must be positive");
  if (chi < 0.0 || kappa < 0.0 || kappa2 < 0.0 || n_thermal < 0.0 || stabilization < 0.0)
    throw OutOfRangeError("rates, thermal occupation and stabilization window must be non-negative");
  if (cat_dim && *cat_dim < 4) throw OutOfRangeError("cat_dim must be at least 4");
}

double CqedParams::beta() const { return std::sqrt(epsilon / K); }

double CqedParams::phase_flip_probability() const {
  return 2.0 * std::numbers::pi * kappa * beta() * beta() * tau;
}

std::size_t CqedParams::ancilla_dim() const {
  if (cat_dim) return *cat_dim;
  const double b = beta();
  return static_cast<std::size_t>(std::ceil(b * b + 7.0 * b + 8.0));
}

double CqedParams::bs_time() const { return 1.0 / (8.0 * zeta2_hz()); }

Rates angular_rates(const CqedParams& p) {
  Rates r{};
  r.K = angular(p.K);
  r.epsilon = angular(p.epsilon);
  r.chi = angular(p.chi);
  r.zeta1 = angular(p.zeta1);
  r.zeta2 = angular(p.zeta2_hz());
  r.kappa = angular(p.kappa);
  r.kappa2 = angular(p.kappa2);
  r.n_thermal = p.n_thermal;
  r.tau = p.tau * 1e6;
  r.stabilization = p.stabilization * 1e6;
  r.bs_time = p.bs_time() * 1e6;
  r.alpha_offset = p.alpha_offset.value_or(p.beta() * p.beta());
  return r;
}

std::string conversion_note(const CqedParams& p) {
  const Rates r = angular_rates(p);
  std::ostringstream os;
  os.precision(6);
  os << "rates converted as 2*pi*f[Hz]*1e-6 -> rad/us; K=" << r.K << " epsilon=" << r.epsilon << " chi=" << r.chi
     << " zeta1=" << r.zeta1 << " zeta2=" << r.zeta2 << " kappa=" << r.kappa << " kappa2=" << r.kappa2
     << "; tau=" << r.tau << " us, bs=" << r.bs_time << " us, beta=" << p.beta()
     << ", cat_dim=" << p.ancilla_dim();
  return os.str();
}

CatBasis cat_basis(std::size_t dim, double beta) {
  CatBasis out;
  out.logical_zero = fock::coherent_amplitudes(dim, beta).amplitudes;
  out.logical_one = fock::coherent_amplitudes(dim, -beta).amplitudes;
  out.plus_cat = (out.logical_zero + out.logical_one).normalized();
  out.minus_cat = (out.logical_zero - out.logical_one).normalized();
  return out;
}

Hamiltonians build_hamiltonians(const CqedParams& params, const fock::SpaceLayout& layout, double n_offset) {
  const Assembled m = assemble_full(params, layout, n_offset);
  return {fock::Operator(layout, m.h0), fock::Operator(layout, m.h_cpbs), fock::Operator(layout, m.h_bs)};
}

lindblad::Generator segment_generator(const CqedParams& params, const fock::SpaceLayout& layout, Segment segment,
                                      double n_offset) {
  const Assembled m = assemble_full(params, layout, n_offset);
  return lindblad::Generator(segment_hamiltonian(m, segment), m.jumps);
}

fock::DensityState lindblad_rhs(const fock::DensityState& rho, const CqedParams& params, Segment segment,
                                double n_offset) {
  const lindblad::Generator g = segment_generator(params, rho.layout(), segment, n_offset);
  Matrix out;
  g.apply(rho.matrix(), out);
  return fock::DensityState(rho.layout(), out);
}

fock::DensityState integrate(const fock::DensityState& rho, const CqedParams& params, Segment segment,
                             double duration, double n_offset, const lindblad::Tolerances& tol,
                             lindblad::Stats* stats) {
  const lindblad::Generator g = segment_generator(params, rho.layout(), segment, n_offset);
  return fock::DensityState(rho.layout(), lindblad::integrate(g, rho.matrix(), duration * 1e6,
                                                              lindblad::Picture::Schrodinger, tol, stats));
}

CatMeasurement measure_cat_x(const fock::DensityState& rho, const CqedParams& params) {
  require_layout(params, rho.layout());
  const auto& layout = rho.layout();
  const CatBasis cats = cat_basis(params.ancilla_dim(), params.beta());
  auto projector = [&](const Vector& v) { return fock::embed(layout, 0, v * v.adjoint()); };
  const auto plus = fock::project_and_prob(rho, projector(cats.plus_cat));
  const auto minus = fock::project_and_prob(rho, projector(cats.minus_cat));
  CatMeasurement out;
  out.p_plus = plus.probability;
  out.p_minus = minus.probability;
  out.leakage = std::max(0.0, 1.0 - out.p_plus - out.p_minus);
  out.post_plus = plus.post;
  out.post_minus = minus.post;
  if (out.leakage > kMeasurementLeakageWarning)
    out.warnings.push_back("cat measurement leakage " + std::to_string(out.leakage));
  return out;
}

open::ProtocolModel cqed_protocol_model(const open::FieldPreparation& fields, const CqedParams& params,
                                        const lindblad::Tolerances& tol) {
  const double n_offset = params.n_offset.value_or(fields.total_photons);
  const Assembled m = assemble(params, open::hopping_ab(fields.space), open::total_number(fields.space), n_offset);
  const Rates r = angular_rates(params);
  const CatBasis cats = cat_basis(params.ancilla_dim(), params.beta());

  open::ProtocolModel model;
  model.ancilla_dim = params.ancilla_dim();
  model.fields = fields.space;
  model.plus_state = cats.plus_cat;
  model.minus_state = cats.minus_cat;
  model.ancilla_initial = cats.plus_cat * cats.plus_cat.adjoint();
  model.tolerances = tol;
  auto stage = [&](const char* name, Segment s, double duration) {
    return open::Stage{name, std::make_shared<lindblad::Generator>(segment_hamiltonian(m, s), m.jumps), duration};
  };
  if (r.stabilization > 0.0) model.before_measurement.push_back(stage("stabilize", Segment::Stabilize, r.stabilization));
  model.before_measurement.push_back(stage("cpbs", Segment::Cpbs, r.tau));
  if (!fields.folded) model.after_measurement.push_back(stage("bs", Segment::Bs, r.bs_time));
  return model;
}

CqedTrace run_cqed_protocol(const ProbePlan& plan, const CqedParams& params, double phi,
                            const lindblad::Tolerances& tol) {
  const open::FieldPreparation prep = open::prepare_fields(plan);
  const open::Runner runner(cqed_protocol_model(prep, params, tol));
  const open::FirstTest first = runner.first_test(prep.psi * prep.psi.adjoint(), plan.branch);
  CqedTrace out;
  out.first_plus = first.p_plus;
  out.first_minus = first.p_minus;
  out.first_leakage = first.leakage;
  out.diagnostics = first.diagnostics;
  const open::SecondTest second = runner.second_test(first.fields_selected, phi, &out.diagnostics);
  check_truncation(out.diagnostics, params);
  out.phi = phi;
  out.p_plus = second.p_plus;
  out.p_minus = second.p_minus;
  out.delta = second.p_plus - second.p_minus;
  out.leakage = std::max(second.leakage, prep.leakage);
  return out;
}

CqedSweep run_cqed_sweep(const ProbePlan& plan, const CqedParams& params, const std::vector<double>& phis,
                         const lindblad::Tolerances& tol) {
  const open::FieldPreparation prep = open::prepare_fields(plan);
  const open::Runner runner(cqed_protocol_model(prep, params, tol));
  const open::FirstTest first = runner.first_test(prep.psi * prep.psi.adjoint(), plan.branch);
  check_truncation(first.diagnostics, params);
  CqedSweep out;
  out.first_plus = first.p_plus;
  out.first_minus = first.p_minus;
  out.diagnostics = first.diagnostics;
  out.rows = runner.sweep(first, phis, &out.diagnostics.stats);
  for (auto& row : out.rows) {
    row.leakage = std::max(row.leakage, prep.leakage);
    out.diagnostics.max_leakage = std::max(out.diagnostics.max_leakage, row.leakage);
  }
  return out;
}

}  // namespace swaptest::cqed
