#include "parastab/dynamics.hpp"

#include <cmath>
#include <cstdio>

namespace parastab {

namespace {

constexpr double kBlowupThreshold = 1e12;

void check_finite(const Field& u, double t, const char* label) {
  for (double v : u.values) {
    if (!(std::abs(v) <= kBlowupThreshold)) {
      throw DivergenceError(std::string(label) + " diverged (|value| > 1e12) at t = " +
                                std::to_string(t),
                            t);
    }
  }
}

double max_violation(const Field& u, const Field& psi_t) {
  double worst = 0.0;
  for (int i = 0; i < u.size(); ++i) worst = std::max(worst, u[i] - psi_t[i]);
  return worst;
}

std::vector<int> violating_nodes(const Field& u, const Field& psi_t, double eps) {
  std::vector<int> nodes;
  for (int i = 0; i < u.size(); ++i) {
    if (u[i] - psi_t[i] > -eps) nodes.push_back(i);
  }
  return nodes;
}

}  // namespace

void ProblemData::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("ProblemData: nu must be positive");
  if (!(k_penalty >= 0.0)) throw std::invalid_argument("ProblemData: penalty must be >= 0");
  check_same_mesh(y_init, w_init);
  const Mesh& m = mesh();
  for (int i = 0; i < m.n_nodes; ++i) {
    const double psi0 = psi(m.node(i), 0.0);
    if (y_init[i] > psi0 + init_violation_tol) {
      throw std::invalid_argument("ProblemData: y_init violates the obstacle at x = " +
                                  std::to_string(m.node(i)));
    }
    if (w_init[i] > psi0 + init_violation_tol) {
      throw std::invalid_argument("ProblemData: w_init violates the obstacle at x = " +
                                  std::to_string(m.node(i)));
    }
  }
}

Field penalty(const Field& y, const Field& psi_t, double k) {
  check_same_mesh(y, psi_t);
  Field out(y.mesh);
  for (int i = 0; i < y.size(); ++i) out[i] = k * std::max(y[i] - psi_t[i], 0.0);
  return out;
}

Field nonlinearity(const Field& z, const Field& y, const Field& psi_t, double k) {
  check_same_mesh(z, y);
  check_same_mesh(y, psi_t);
  Field out(z.mesh);
  for (int i = 0; i < z.size(); ++i) {
    const double gap = y[i] - psi_t[i];
    out[i] = k * (std::max(z[i] + gap, 0.0) - std::max(gap, 0.0));
  }
  return out;
}

void eval_coefficients(const ProblemData& data, double t, CoefficientSlice& out) {
  const Mesh& m = data.mesh();
  for (int i = 0; i < m.n_nodes; ++i) {
    const double x = m.node(i);
    out.a[i] = data.a(x, t);
    out.b[i] = data.b(x, t);
    out.f[i] = data.f(x, t);
    out.psi[i] = data.psi(x, t);
  }
}

void explicit_terms(const CoefficientSlice& c, const Field& u, double k,
                    const Field* control, Field& out) {
  const int n = u.size();
  const double h = u.mesh.h;
  if (out.size() != n) out = Field(u.mesh);
  for (int i = 0; i < n; ++i) {
    double du;
    if (i == 0) {
      du = (u[1] - u[0]) / h;
    } else if (i == n - 1) {
      du = (u[n - 1] - u[n - 2]) / h;
    } else {
      du = (u[i + 1] - u[i - 1]) / (2.0 * h);
    }
    double v = -c.a[i] * u[i] - c.b[i] * du + c.f[i] - k * std::max(u[i] - c.psi[i], 0.0);
    if (control != nullptr) v += (*control)[i];
    out[i] = v;
  }
}

Field explicit_rhs(const ProblemData& data, double t, const Field& u, const Field* control) {
  CoefficientSlice slice(data.mesh());
  eval_coefficients(data, t, slice);
  Field out(data.mesh());
  explicit_terms(slice, u, data.k_penalty, control, out);
  return out;
}

CnabStepper::CnabStepper(const TriDiagOperator& mass, const TriDiagOperator& a_op,
                         double dt, Field initial)
    : mass_(&mass),
      rhs_op_(mass.axpy(-dt / 2.0, a_op)),
      lhs_(mass.axpy(dt / 2.0, a_op)),
      dt_(dt),
      u_(std::move(initial)),
      e_prev_(u_.mesh),
      comb_(u_.mesh),
      rhs_(u_.mesh),
      tmp_(u_.mesh) {
  if (!(dt > 0.0)) throw std::invalid_argument("CnabStepper: dt must be positive");
}

void CnabStepper::step(const Field& explicit_term) {
  const int n = u_.size();
  if (steps_ == 0) {
    comb_.values = explicit_term.values;  // explicit Euler bootstrap
  } else {
    for (int i = 0; i < n; ++i) comb_[i] = 1.5 * explicit_term[i] - 0.5 * e_prev_[i];
  }
  mass_->apply_into(comb_, tmp_);
  rhs_op_.apply_into(u_, rhs_);
  for (int i = 0; i < n; ++i) rhs_[i] += dt_ * tmp_[i];
  lhs_.solve_into(rhs_, u_);
  e_prev_.values = explicit_term.values;
  ++steps_;
}

bool any_window_contains(const std::vector<Window>& windows, double t) {
  for (const Window& w : windows) {
    if (w.contains(t)) return true;
  }
  return false;
}

TimeSeries run_coupled(const ProblemData& data, const SubspacePair& pair, double lambda,
                       const std::vector<Window>& feed_on, double T, double dt,
                       int record_every, double contact_eps) {
  if (!(T > 0.0)) throw std::invalid_argument("run_coupled: T must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("run_coupled: dt must be positive");
  if (record_every < 1) throw std::invalid_argument("run_coupled: record stride must be >= 1");
  data.validate();
  if (data.k_penalty * dt > 2.0 + 1e-12) {
    std::fprintf(stderr,
                 "warning: dt * k = %.3g exceeds the explicit-penalty stability bound 2\n",
                 data.k_penalty * dt);
  }

  const Mesh& mesh = data.mesh();
  const TriDiagOperator mass = assemble_mass(mesh);
  const TriDiagOperator a_op = assemble_A(mesh, data.nu);
  const FeedbackOperator feedback(pair, lambda);

  CnabStepper target(mass, a_op, dt, data.y_init);
  CnabStepper controlled(mass, a_op, dt, data.w_init);

  const long n_steps = std::lround(T / dt);
  TimeSeries series;
  series.contact_eps = contact_eps;

  CoefficientSlice slice(mesh);
  Field diff(mesh), control(mesh), e_y(mesh), e_w(mesh);

  for (long step = 0; step <= n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    eval_coefficients(data, t, slice);

    const Field& y = target.state();
    const Field& w = controlled.state();
    for (int i = 0; i < mesh.n_nodes; ++i) diff[i] = w[i] - y[i];

    const bool active = any_window_contains(feed_on, t);
    double control_norm = 0.0;
    if (active) {
      feedback.apply_into(diff, control);
      control_norm = l2_norm(control);
    }

    if (step % record_every == 0 || step == n_steps) {
      series.times.push_back(t);
      series.diff_norm.push_back(l2_norm(diff));
      series.control_norm.push_back(control_norm);
      series.max_violation_y.push_back(max_violation(y, slice.psi));
      series.max_violation_w.push_back(max_violation(w, slice.psi));
      series.contact_y.push_back(violating_nodes(y, slice.psi, 0.0));
      series.contact_w.push_back(violating_nodes(w, slice.psi, 0.0));
      series.near_contact_y.push_back(violating_nodes(y, slice.psi, contact_eps));
      series.near_contact_w.push_back(violating_nodes(w, slice.psi, contact_eps));
    }
    if (step == n_steps) break;

    explicit_terms(slice, y, data.k_penalty, nullptr, e_y);
    explicit_terms(slice, w, data.k_penalty, active ? &control : nullptr, e_w);
    target.step(e_y);
    controlled.step(e_w);
    check_finite(target.state(), target.time(), "target state");
    check_finite(controlled.state(), controlled.time(), "controlled state");
  }
  return series;
}

Field run_uncontrolled(const ProblemData& data, double T, double dt) {
  if (!(T > 0.0 && dt > 0.0)) throw std::invalid_argument("run_uncontrolled: bad T or dt");
  data.validate();
  const Mesh& mesh = data.mesh();
  const TriDiagOperator mass = assemble_mass(mesh);
  const TriDiagOperator a_op = assemble_A(mesh, data.nu);
  CnabStepper stepper(mass, a_op, dt, data.y_init);
  CoefficientSlice slice(mesh);
  Field e(mesh);
  const long n_steps = std::lround(T / dt);
  for (long step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    eval_coefficients(data, t, slice);
    explicit_terms(slice, stepper.state(), data.k_penalty, nullptr, e);
    stepper.step(e);
    check_finite(stepper.state(), stepper.time(), "state");
  }
  return stepper.state();
}

}  // namespace parastab
