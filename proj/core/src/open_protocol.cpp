#include "swaptest/open_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "swaptest/errors.hpp"

namespace swaptest::open {

namespace {

constexpr double kLeakageWarning = 0.01;

Matrix outer(const Vector& v) { return v * v.adjoint(); }

}  // namespace

void Diagnostics::merge(const Diagnostics& o) {
  max_trace_error = std::max(max_trace_error, o.max_trace_error);
  min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
  max_hermiticity_error = std::max(max_hermiticity_error, o.max_hermiticity_error);
  max_leakage = std::max(max_leakage, o.max_leakage);
  max_top_level_population = std::max(max_top_level_population, o.max_top_level_population);
  stats.merge(o.stats);
  warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
}

Runner::Runner(ProtocolModel model) : model_(std::move(model)) {
  const auto d = static_cast<Eigen::Index>(model_.ancilla_dim);
  if (model_.ancilla_initial.rows() != d || model_.ancilla_initial.cols() != d ||
      model_.plus_state.size() != d || model_.minus_state.size() != d)
    throw LayoutError("ancilla state sizes do not match ancilla dimension");
  for (const auto* stages : {&model_.before_measurement, &model_.after_measurement})
    for (const auto& s : *stages)
      if (!s.generator || s.generator->dim() != model_.joint_dim())
        throw LayoutError("stage generator does not match the joint dimension");
  proj_plus_ = outer(model_.plus_state.normalized());
  proj_minus_ = outer(model_.minus_state.normalized());
}

Matrix Runner::joint(const Matrix& a, const Matrix& f) const {
  const auto m = static_cast<Eigen::Index>(model_.fields.size());
  if (f.rows() != m || f.cols() != m) throw LayoutError("field state size mismatch");
  const auto d = a.rows();
  Matrix out(d * m, d * m);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out.block(i * m, j * m, m, m) = a(i, j) * f;
  return out;
}

Matrix Runner::trace_ancilla(const Matrix& rho) const {
  const auto m = static_cast<Eigen::Index>(model_.fields.size());
  Matrix out = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(model_.ancilla_dim); ++i)
    out += rho.block(i * m, i * m, m, m);
  return out;
}

Matrix Runner::phase_shift(const Matrix& f, double phi) const {
  const auto m = static_cast<Eigen::Index>(model_.fields.size());
  Vector diag(m);
  for (Eigen::Index k = 0; k < m; ++k)
    diag(k) = std::polar(1.0, -phi * static_cast<double>(model_.fields.occupation_a(static_cast<std::size_t>(k))));
  return diag.asDiagonal() * f * diag.conjugate().asDiagonal();
}

MeasurementOutcome Runner::measure(const Matrix& rho) const {
  const auto m = static_cast<Eigen::Index>(model_.fields.size());
  const auto d = static_cast<Eigen::Index>(model_.ancilla_dim);
  auto reduce = [&](const Vector& chi) {
    Matrix r = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        const Complex w = std::conj(chi(i)) * chi(j);
        if (w != Complex{}) r += w * rho.block(i * m, j * m, m, m);
      }
    return r;
  };
  const double tr = rho.trace().real();
  MeasurementOutcome out;
  const Vector plus = model_.plus_state.normalized(), minus = model_.minus_state.normalized();
  const Matrix rp = reduce(plus), rm = reduce(minus);
  out.p_plus = rp.trace().real() / tr;
  out.p_minus = rm.trace().real() / tr;
  out.leakage = std::max(0.0, 1.0 - out.p_plus - out.p_minus);
  if (out.p_plus >= fock::kProbabilityFloor) out.post_plus = joint(proj_plus_, rp / rp.trace().real());
  if (out.p_minus >= fock::kProbabilityFloor) out.post_minus = joint(proj_minus_, rm / rm.trace().real());
  return out;
}

void Runner::check_state(const Matrix& rho, const std::string& where, Diagnostics& diag) const {
  const double tr_err = std::abs(rho.trace() - Complex{1.0, 0.0});
  const double lam = lindblad::min_eigenvalue(rho);
  const auto m = static_cast<Eigen::Index>(model_.fields.size());
  const auto top = static_cast<Eigen::Index>(model_.ancilla_dim) - 1;
  const double top_pop = rho.block(top * m, top * m, m, m).trace().real();
  diag.max_trace_error = std::max(diag.max_trace_error, tr_err);
  diag.min_eigenvalue = std::min(diag.min_eigenvalue, lam);
  diag.max_top_level_population = std::max(diag.max_top_level_population, top_pop);
  if (tr_err > 1e-6 || lam < -1e-6) {
    std::ostringstream os;
    os << where << ": trace error " << tr_err << ", min eigenvalue " << lam;
    diag.warnings.push_back(os.str());
  }
}

Matrix Runner::evolve(Matrix rho, const std::vector<Stage>& stages, Diagnostics& diag) const {
  for (const auto& s : stages) {
    if (s.duration <= 0.0) continue;
    lindblad::Stats st;
    rho = lindblad::integrate(*s.generator, std::move(rho), s.duration, lindblad::Picture::Schrodinger,
                              model_.tolerances, &st);
    diag.stats.merge(st);
    diag.max_trace_error = std::max(diag.max_trace_error, st.max_trace_drift);
    diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, st.max_hermiticity_error);
    check_state(rho, s.name, diag);
  }
  return rho;
}

FirstTest Runner::first_test(const Matrix& fields, Branch postselect) const {
  FirstTest out;
  Matrix rho = joint(model_.ancilla_initial, fields);
  check_state(rho, "initial", out.diagnostics);
  rho = evolve(std::move(rho), model_.before_measurement, out.diagnostics);
  const MeasurementOutcome meas = measure(rho);
  const double code = meas.p_plus + meas.p_minus;
  out.p_plus = meas.p_plus / code;
  out.p_minus = meas.p_minus / code;
  out.leakage = meas.leakage;
  out.diagnostics.max_leakage = meas.leakage;
  if (meas.leakage > kLeakageWarning)
    out.diagnostics.warnings.push_back("first test: ancilla leakage " + std::to_string(meas.leakage));
  const auto& sel = postselect == Branch::Symmetric ? meas.post_plus : meas.post_minus;
  if (!sel)
    throw InfeasibleBranchError(std::string("postselected ") + to_string(postselect) +
                                " branch has negligible probability");
  Matrix post = evolve(*sel, model_.after_measurement, out.diagnostics);
  Matrix f = trace_ancilla(post);
  out.fields_selected = f / f.trace().real();
  return out;
}

SecondTest Runner::second_test(const Matrix& fields, double phi, Diagnostics* diag) const {
  Diagnostics local;
  Matrix rho = joint(model_.ancilla_initial, phase_shift(fields, phi));
  rho = evolve(std::move(rho), model_.before_measurement, local);
  const MeasurementOutcome meas = measure(rho);
  local.max_leakage = meas.leakage;
  if (diag) diag->merge(local);
  const double code = meas.p_plus + meas.p_minus;
  return {meas.p_plus / code, meas.p_minus / code, meas.leakage};
}

SecondTestObservables Runner::second_test_observables(lindblad::Stats* stats) const {
  const auto m = static_cast<Eigen::Index>(model_.fields.size());
  const auto d = static_cast<Eigen::Index>(model_.ancilla_dim);
  const Matrix id = Matrix::Identity(m, m);
  auto heisenberg = [&](const Matrix& proj) {
    Matrix o = joint(proj, id);
    for (auto it = model_.before_measurement.rbegin(); it != model_.before_measurement.rend(); ++it) {
      if (it->duration <= 0.0) continue;
      o = lindblad::integrate(*it->generator, std::move(o), it->duration, lindblad::Picture::Heisenberg,
                              model_.tolerances, stats);
    }
    Matrix r = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        const Complex w = model_.ancilla_initial(j, i);
        if (w != Complex{}) r += w * o.block(i * m, j * m, m, m);
      }
    return r;
  };
  return {heisenberg(proj_plus_), heisenberg(proj_minus_)};
}

SecondTest Runner::evaluate(const SecondTestObservables& obs, const Matrix& f) {
  const double pp = (obs.plus.cwiseProduct(f.transpose())).sum().real();
  const double pm = (obs.minus.cwiseProduct(f.transpose())).sum().real();
  const double code = pp + pm;
  return {pp / code, pm / code, std::max(0.0, 1.0 - code)};
}

std::vector<WitnessPoint> Runner::sweep(const FirstTest& first, const std::vector<double>& phis,
                                        lindblad::Stats* stats) const {
  const SecondTestObservables obs = second_test_observables(stats);
  std::vector<WitnessPoint> rows;
  rows.reserve(phis.size());
  for (double phi : phis) {
    const SecondTest s = evaluate(obs, phase_shift(first.fields_selected, phi));
    rows.push_back({phi, s.p_plus, s.p_minus, s.p_plus - s.p_minus, 0.0, s.leakage});
  }
  return rows;
}

}  // namespace swaptest::open

namespace swaptest::open {

FieldPreparation prepare_fields(const ProbePlan& plan, double leakage_tolerance,
                                std::optional<std::size_t> cap) {
  plan.validate();
  FieldPreparation out;
  if (plan.is_noon()) {
    const auto& in = plan.noon_input();
    const auto n = static_cast<std::size_t>(in.n + in.m);
    out.space = fock::ExcitationSubspace::sector(n);
    out.psi = Vector::Zero(static_cast<Eigen::Index>(out.space.size()));
    for (std::size_t k = 0; k < out.space.size(); ++k)
      if (out.space.occupation_a(k) == static_cast<std::size_t>(in.n)) out.psi(static_cast<Eigen::Index>(k)) = 1.0;
    out.total_photons = static_cast<double>(n);
    return out;
  }
  const auto& in = plan.coherent_input();
  const double r = std::numbers::sqrt2 / 2.0;
  const Complex a1 = r * (in.alpha1 - in.alpha2), a2 = r * (in.alpha1 + in.alpha2);
  const double mean = std::norm(a1) + std::norm(a2);
  std::size_t n_max = cap.value_or(0);
  if (!cap)
    while (fock::poisson_tail(mean, n_max + 1) > leakage_tolerance) ++n_max;
  out.space = fock::ExcitationSubspace::capped(n_max);
  const auto c1 = fock::coherent_amplitudes(n_max + 1, a1).amplitudes;
  const auto c2 = fock::coherent_amplitudes(n_max + 1, a2).amplitudes;
  out.psi = Vector(static_cast<Eigen::Index>(out.space.size()));
  for (std::size_t k = 0; k < out.space.size(); ++k)
    out.psi(static_cast<Eigen::Index>(k)) = c1(static_cast<Eigen::Index>(out.space.occupation_a(k))) *
                                            c2(static_cast<Eigen::Index>(out.space.occupation_b(k)));
  out.psi.normalize();
  out.leakage = fock::poisson_tail(mean, n_max + 1);
  if (out.leakage > leakage_tolerance)
    throw TruncationError("field excitation cap too small for the coherent input");
  out.folded = true;
  out.total_photons = mean;
  return out;
}

Matrix hopping_ab(const fock::ExcitationSubspace& space) {
  const auto m = static_cast<Eigen::Index>(space.size());
  Matrix h = Matrix::Zero(m, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const std::size_t ka = space.occupation_a(static_cast<std::size_t>(c));
    const std::size_t kb = space.occupation_b(static_cast<std::size_t>(c));
    if (kb == 0) continue;
    for (Eigen::Index r = 0; r < m; ++r)
      if (space.occupation_a(static_cast<std::size_t>(r)) == ka + 1 &&
          space.occupation_b(static_cast<std::size_t>(r)) == kb - 1)
        h(r, c) = std::sqrt(static_cast<double>((ka + 1) * kb));
  }
  return h;
}

Matrix total_number(const fock::ExcitationSubspace& space) {
  const auto m = static_cast<Eigen::Index>(space.size());
  Matrix n = Matrix::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k)
    n(k, k) = static_cast<double>(space.occupation_a(static_cast<std::size_t>(k)) +
                                  space.occupation_b(static_cast<std::size_t>(k)));
  return n;
}

}  // namespace swaptest::open
