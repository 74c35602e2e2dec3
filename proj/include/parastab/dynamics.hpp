#pragma once

#include <functional>
#include <vector>

#include "parastab/feedback.hpp"
#include "parastab/fem.hpp"
#include "parastab/spaces.hpp"

namespace parastab {

using SpaceTimeFn = std::function<double(double x, double t)>;

struct DivergenceError : std::runtime_error {
  double time;
  DivergenceError(const std::string& msg, double t) : std::runtime_error(msg), time(t) {}
};

/// Data of a penalized obstacle problem
///   du/dt + (-nu Lap + 1) u + a u + b du/dx + k (u - psi)^+ = f.
struct ProblemData {
  double nu = 0.1;
  SpaceTimeFn a;
  SpaceTimeFn b;
  SpaceTimeFn f;
  SpaceTimeFn psi;
  double k_penalty = 0.0;
  Bc bc = Bc::NeumannHomogeneous;
  Field y_init;
  Field w_init;
  double init_violation_tol = 1e-12;

  const Mesh& mesh() const { return y_init.mesh; }
  /// Throws when an initial state sits above the obstacle at t = 0.
  void validate() const;
};

/// k * (y - psi)^+, evaluated nodally.
Field penalty(const Field& y, const Field& psi_t, double k);

/// N_k(z) = k ((z + y - psi)^+ - (y - psi)^+), evaluated nodally.
Field nonlinearity(const Field& z, const Field& y, const Field& psi_t, double k);

/// Nodal coefficient samples at a fixed time.
struct CoefficientSlice {
  Field a, b, f, psi;
  explicit CoefficientSlice(const Mesh& m) : a(m), b(m), f(m), psi(m) {}
};

void eval_coefficients(const ProblemData& data, double t, CoefficientSlice& out);

/// Explicit part of the right-hand side at a fixed time:
/// -a u - b Du + f - k (u - psi)^+ (+ control), all nodally.
void explicit_terms(const CoefficientSlice& c, const Field& u, double k,
                    const Field* control, Field& out);
Field explicit_rhs(const ProblemData& data, double t, const Field& u,
                   const Field* control = nullptr);

/// Crank-Nicolson on the stiff operator A = nu K + M, two-step
/// Adams-Bashforth on the explicit terms; the first step falls back to
/// explicit Euler. Each step solves
///   (M + dt/2 A) u' = (M - dt/2 A) u + dt M (3/2 E_n - 1/2 E_{n-1}).
class CnabStepper {
 public:
  CnabStepper(const TriDiagOperator& mass, const TriDiagOperator& a_op, double dt,
              Field initial);

  void step(const Field& explicit_term);

  const Field& state() const { return u_; }
  double time() const { return static_cast<double>(steps_) * dt_; }
  int steps_taken() const { return steps_; }
  double dt() const { return dt_; }

 private:
  const TriDiagOperator* mass_;
  TriDiagOperator rhs_op_;
  TriDiagFactorization lhs_;
  double dt_;
  int steps_ = 0;
  Field u_, e_prev_, comb_, rhs_, tmp_;
};

struct Window {
  double begin = 0.0;
  double end = 0.0;
  bool contains(double t) const { return t >= begin && t < end; }
};

bool any_window_contains(const std::vector<Window>& windows, double t);

/// Per-record metrics of a coupled target/controlled run. Contact lists hold
/// the node indices where the state strictly exceeds the obstacle; the
/// near-contact lists widen the comparison by contact_eps.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> diff_norm;
  std::vector<double> control_norm;
  std::vector<double> max_violation_y;
  std::vector<double> max_violation_w;
  std::vector<std::vector<int>> contact_y;
  std::vector<std::vector<int>> contact_w;
  std::vector<std::vector<int>> near_contact_y;
  std::vector<std::vector<int>> near_contact_w;
  double contact_eps = 1e-3;

  size_t size() const { return times.size(); }
};

/// Integrates the target system y (never controlled) and the controlled
/// system w simultaneously; the feedback input K(w - y) is added to the
/// explicit terms of w whenever t lies in one of the feed_on windows.
/// Aborts with DivergenceError when a state norm passes 1e12.
TimeSeries run_coupled(const ProblemData& data, const SubspacePair& pair, double lambda,
                       const std::vector<Window>& feed_on, double T, double dt,
                       int record_every, double contact_eps = 1e-3);

/// Target system alone; returns the state at time T.
Field run_uncontrolled(const ProblemData& data, double T, double dt);

}  // namespace parastab
