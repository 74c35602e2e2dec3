// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier criteria run at the benchmark resolution (n = 2001), so
// the full suite takes a few minutes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "parastab/config.hpp"
#include "parastab/dynamics.hpp"
#include "parastab/experiments.hpp"
#include "parastab/feedback.hpp"

using namespace parastab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

size_t record_at(const TimeSeries& series, double t) {
  for (size_t i = 0; i < series.size(); ++i) {
    if (series.times[i] >= t - 1e-9) return i;
  }
  return series.size() - 1;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome criterion_heat_oracle() {
  Outcome out;
  auto ratio_error = [](int n, double dt) {
    const Mesh mesh = build_mesh(n, Bc::NeumannHomogeneous);
    ProblemData data;
    data.nu = 0.1;
    data.a = data.b = data.f = [](double, double) { return 0.0; };
    data.psi = [](double, double) { return 1e9; };
    data.k_penalty = 0.0;
    data.y_init = sample(mesh, [](double x) { return std::cos(kPi * x); });
    data.w_init = data.y_init;
    const double T = 0.5;
    const Field yT = run_uncontrolled(data, T, dt);
    const double ratio = l2_norm(yT) / l2_norm(data.y_init);
    const double exact = std::exp(-(0.1 * kPi * kPi + 1.0) * T);
    return std::abs(ratio - exact) / exact;
  };
  const double err1 = ratio_error(2001, 1e-4);
  const double err2 = ratio_error(4001, 5e-5);
  const double order = std::log2(err1 / err2);
  out.require(err1 < 1e-3, "relative error " + fmt(err1) + " exceeds 1e-3");
  out.require(order >= 1.8, "observed order " + fmt(order) + " below 1.8");
  out.note("rel err " + fmt(err1) + ", order " + fmt(order));
  return out;
}

Outcome criterion_projection_oracle() {
  Outcome out;
  const Mesh mesh = build_mesh(41, Bc::NeumannHomogeneous);
  std::mt19937 rng(20260810);
  double worst_dense = 0.0;
  for (int m : {1, 2, 3, 5}) {
    const SubspacePair pair(make_actuators(m, 0.1, mesh),
                            make_eigenbasis(m, 0.1, Bc::NeumannHomogeneous, mesh));
    const oracles::ObliqueProjector onto_e =
        oracles::dense_oblique(mesh, pair.basis().fields, pair.actuators().fields);
    const oracles::ObliqueProjector onto_u =
        oracles::dense_oblique(mesh, pair.actuators().fields, pair.basis().fields);
    // entrywise match of the projector matrices via unit vectors
    for (int col = 0; col < mesh.n_nodes; ++col) {
      Field e(mesh);
      e[col] = 1.0;
      const Field pe = pair.project_E_along_Uperp(e);
      const Field pu = pair.project_U_along_Eperp(e);
      for (int i = 0; i < mesh.n_nodes; ++i) {
        worst_dense = std::max(worst_dense, std::abs(pe[i] - onto_e.matrix.at(i, col)));
        worst_dense = std::max(worst_dense, std::abs(pu[i] - onto_u.matrix.at(i, col)));
      }
    }
  }
  out.require(worst_dense <= 1e-10, "dense mismatch " + fmt(worst_dense));

  // idempotence and annihilation on 1e3 random fields (M = 5 pair)
  const SubspacePair pair(make_actuators(5, 0.1, mesh),
                          make_eigenbasis(5, 0.1, Bc::NeumannHomogeneous, mesh));
  double worst_idem = 0.0, worst_annih = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Field h = oracles::random_field(mesh, rng);
    const double scale = l2_norm(h);
    const Field pe = pair.project_E_along_Uperp(h);
    const Field pe2 = pair.project_E_along_Uperp(pe);
    const Field pu = pair.project_U_along_Eperp(h);
    const Field pu2 = pair.project_U_along_Eperp(pu);
    Field diff_e(mesh), diff_u(mesh), res_e(mesh), res_u(mesh);
    for (int i = 0; i < mesh.n_nodes; ++i) {
      diff_e[i] = pe2[i] - pe[i];
      diff_u[i] = pu2[i] - pu[i];
      res_e[i] = h[i] - pe[i];
      res_u[i] = h[i] - pu[i];
    }
    worst_idem = std::max({worst_idem, l2_norm(diff_e) / scale, l2_norm(diff_u) / scale});
    for (int j = 0; j < pair.dim(); ++j) {
      worst_annih = std::max(worst_annih,
                             std::abs(l2_inner(pair.actuators().fields[j], res_e)) / scale);
      worst_annih =
          std::max(worst_annih, std::abs(l2_inner(pair.basis().fields[j], res_u)) / scale);
    }
  }
  out.require(worst_idem <= 1e-8, "idempotence residual " + fmt(worst_idem));
  out.require(worst_annih <= 1e-8, "annihilation residual " + fmt(worst_annih));
  out.note("dense " + fmt(worst_dense) + ", idem " + fmt(worst_idem) + ", annih " +
           fmt(worst_annih));
  return out;
}

Outcome criterion_operator_bounds() {
  Outcome out;
  const Mesh mesh = build_mesh(2001, Bc::NeumannHomogeneous);
  const std::pair<int, double> cases[] = {{5, 4.0}, {10, 6.0}, {1, 50.0}, {20, 1.0}};
  for (auto [m, lambda] : cases) {
    const SubspacePair pair(make_actuators(m, 0.1, mesh),
                            make_eigenbasis(m, 0.1, Bc::NeumannHomogeneous, mesh));
    const FeedbackOperator feedback(pair, lambda);
    const FeedbackOperator::BoundReport r = feedback.certify_bounds();
    // margin >= 0 up to float rounding; M = 1 attains the bound exactly
    const double slack = 1e-10 * std::max(1.0, r.bound);
    out.require(r.margin >= -slack, "M=" + std::to_string(m) + " margin " + fmt(r.margin));
    out.note("M=" + std::to_string(m) + " |K|=" + fmt(r.computed_norm) + " bound=" +
             fmt(r.bound));
  }
  return out;
}

Outcome criterion_nonlinearity() {
  Outcome out;
  const Mesh mesh = build_mesh(201, Bc::NeumannHomogeneous);
  std::mt19937 rng(31415);
  const double k = 1000.0;
  double worst_lip = 0.0, worst_mono = 0.0, worst_ident = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Field y = oracles::random_field(mesh, rng, -2.0, 2.0);
    const Field psi_t = oracles::random_field(mesh, rng, -2.0, 2.0);
    const Field z1 = oracles::random_field(mesh, rng, -3.0, 3.0);
    const Field z2 = oracles::random_field(mesh, rng, -3.0, 3.0);
    const Field n1 = nonlinearity(z1, y, psi_t, k);
    const Field n2 = nonlinearity(z2, y, psi_t, k);
    Field dn(mesh), dz(mesh);
    for (int i = 0; i < mesh.n_nodes; ++i) {
      dn[i] = n1[i] - n2[i];
      dz[i] = z1[i] - z2[i];
    }
    worst_lip = std::max(worst_lip, l2_norm(dn) - k * l2_norm(dz));
    worst_mono = std::min(worst_mono, integral(pointwise_mul(dn, dz)));

    Field hplus(mesh);
    for (int i = 0; i < mesh.n_nodes; ++i) hplus[i] = std::max(z1[i], 0.0);
    const double lhs = integral(pointwise_mul(z1, hplus));
    const double rhs = integral(pointwise_mul(hplus, hplus));
    worst_ident = std::max(worst_ident, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
  }
  out.require(worst_lip <= 1e-10, "Lipschitz excess " + fmt(worst_lip));
  out.require(worst_mono >= -1e-10, "monotonicity defect " + fmt(worst_mono));
  out.require(worst_ident <= 1e-12, "pairing identity defect " + fmt(worst_ident));
  out.note("lip excess " + fmt(worst_lip) + ", mono " + fmt(worst_mono) + ", ident " +
           fmt(worst_ident));
  return out;
}

Outcome stabilization_at(int n_nodes, double budget_seconds) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  Scenario s = scenario_default();
  s.n_nodes = n_nodes;
  const TimeSeries series = run_scenario(s, 1000.0);
  const DecayFit fit = fit_decay(series, 0.05, 4.0);
  const double ratio = series.diff_norm.back() / series.diff_norm.front();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(fit.mu_hat > 0.0, "mu_hat not positive");
  out.require(fit.r_squared >= 0.95, "R^2 " + fmt(fit.r_squared) + " below 0.95");
  out.require(ratio <= 1e-2, "final/initial " + fmt(ratio) + " above 1e-2");
  out.require(seconds < budget_seconds,
              "runtime " + fmt(seconds) + "s over " + fmt(budget_seconds) + "s");
  out.note("n=" + std::to_string(n_nodes) + ": mu " + fmt(fit.mu_hat) + ", R2 " +
           fmt(fit.r_squared) + ", ratio " + fmt(ratio) + ", " + fmt(seconds) + "s");
  return out;
}

Outcome criterion_stabilization() {
  Outcome ci = stabilization_at(401, 30.0);
  Outcome full = stabilization_at(2001, 300.0);
  Outcome out;
  out.pass = ci.pass && full.pass;
  out.detail = ci.detail + "; " + full.detail;
  return out;
}

Outcome criterion_necessity() {
  Outcome out;
  const NecessityReport report = necessity_studies(2001);
  const double r_single = report.find(1, 50.0).ratio;
  const double r_small_gain = report.find(20, 1.0).ratio;
  const double r_default = report.find(5, 4.0).ratio;
  out.require(r_single >= 1.0, "M=1 lambda=50 contracted: " + fmt(r_single));
  out.require(r_small_gain >= 1.0, "M=20 lambda=1 contracted: " + fmt(r_small_gain));
  out.require(r_default < 1.0, "default pair failed to contract: " + fmt(r_default));
  out.note("(1,50) " + fmt(r_single) + ", (20,1) " + fmt(r_small_gain) + ", (5,4) " +
           fmt(r_default));
  return out;
}

Outcome criterion_rate_ordering() {
  Outcome out;
  const DecayStudyReport report = decay_rate_study(2001);
  const DecayStudyRow& fast = report.find(10, 6.0);
  const DecayStudyRow& mid = report.find(4, 3.0);
  const DecayStudyRow& slow = report.find(2, 2.0);
  out.require(fast.fit.mu_hat > mid.fit.mu_hat,
              "mu(10,6)=" + fmt(fast.fit.mu_hat) + " not above mu(4,3)=" + fmt(mid.fit.mu_hat));
  out.require(mid.fit.mu_hat > 0.0, "mu(4,3) not positive");
  out.require(slow.early_increase, "(2,2) lacks an early non-monotone interval");
  out.require(slow.final_norm < slow.initial_norm, "(2,2) did not contract over T=4");
  out.note("mu(10,6) " + fmt(fast.fit.mu_hat) + ", mu(4,3) " + fmt(mid.fit.mu_hat) +
           ", (2,2) early increase " + (slow.early_increase ? std::string("yes") : "no"));
  return out;
}

Outcome criterion_free_instability() {
  Outcome out;
  const TimeSeries off = feed_on_study({}, 2001);
  const double growth = off.diff_norm[record_at(off, 1.0)] / off.diff_norm.front();
  out.require(growth > 1.0, "free dynamics contracted: " + fmt(growth));

  const TimeSeries windowed = feed_on_study({{1.0, 4.0}}, 2001);
  const double at1 = windowed.diff_norm[record_at(windowed, 1.0)];
  const double at0 = windowed.diff_norm.front();
  const double atT = windowed.diff_norm.back();
  out.require(at1 > at0, "no growth before the window opens");
  out.require(atT < at1, "no decay while the feedback is on");
  out.note("free growth " + fmt(growth) + ", windowed " + fmt(at0) + " -> " + fmt(at1) +
           " -> " + fmt(atT));
  return out;
}

Outcome criterion_violation_scaling() {
  Outcome out;
  const Scenario base = scenario_default();
  const std::vector<double> ks = {500.0, 1000.0, 5000.0, 20000.0};
  const std::vector<SweepEntry> sweep = sweep_kMY(base, ks);
  std::vector<double> max_viol;
  for (const SweepEntry& entry : sweep) {
    double v = 0.0;
    for (double m : entry.series.max_violation_y) v = std::max(v, m);
    max_viol.push_back(v);
  }
  std::string viols;
  for (size_t i = 0; i < ks.size(); ++i) {
    viols += (i ? ", " : "") + fmt(ks[i]) + ":" + fmt(max_viol[i]);
    if (i > 0) {
      out.require(max_viol[i] <= max_viol[i - 1] * (1.0 + 1e-12),
                  "violation increased from k=" + fmt(ks[i - 1]) + " to k=" + fmt(ks[i]));
    }
  }
  const double reference = ks[0] * max_viol[0];
  for (size_t i = 1; i < ks.size(); ++i) {
    const double scaled = ks[i] * max_viol[i];
    out.require(scaled <= 4.0 * reference && scaled >= reference / 4.0,
                "k*violation " + fmt(scaled) + " outside factor 4 of " + fmt(reference));
  }
  out.note(viols);
  return out;
}

Outcome criterion_nonsmooth() {
  Outcome out;
  const Scenario s = scenario_nonsmooth();
  const Mesh mesh = build_mesh(s.n_nodes, s.bc);
  bool y_nonempty = false, w_nonempty = false, near_discontinuity = false;
  for (double k : s.k_values) {
    TimeSeries series;
    try {
      series = run_scenario(s, k);
    } catch (const DivergenceError& e) {
      out.require(false, "diverged at k=" + fmt(k) + ": " + e.what());
      continue;
    }
    for (size_t i = 0; i < series.size(); ++i) {
      if (!series.contact_y[i].empty()) y_nonempty = true;
      if (!series.contact_w[i].empty()) w_nonempty = true;
      if (k == 20000.0 && series.times[i] >= 1.0 && series.times[i] <= 2.0) {
        for (int node : series.contact_w[i]) {
          if (std::abs(mesh.node(node) - 0.8) <= 0.005) near_discontinuity = true;
        }
      }
    }
  }
  out.require(y_nonempty, "target violation set stayed empty");
  out.require(w_nonempty, "controlled violation set stayed empty");
  out.require(near_discontinuity,
              "w violation never touched the x=0.8 neighborhood during [1,2]");
  out.note(std::string("violation sets nonempty; x=0.8 neighborhood hit: ") +
           (near_discontinuity ? "yes" : "no"));
  return out;
}

Outcome criterion_determinism() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "parastab_acceptance_determinism";
  fs::remove_all(dir);
  auto read_bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  for (const char* name : {"default", "nonsmooth"}) {
    Scenario s = (std::string(name) == "default") ? scenario_default() : scenario_nonsmooth();
    s.n_nodes = 401;
    s.T = 0.5;
    s.feed_on = {{0.0, 0.5}};
    const double k = s.k_values.front();
    const TimeSeries a = run_scenario(s, k);
    const TimeSeries b = run_scenario(s, k);
    write_series_csv(dir / (std::string(name) + "_a.csv"), a);
    write_series_csv(dir / (std::string(name) + "_b.csv"), b);
    write_contact_csv(dir / (std::string(name) + "_ca.csv"), a);
    write_contact_csv(dir / (std::string(name) + "_cb.csv"), b);
    out.require(read_bytes(dir / (std::string(name) + "_a.csv")) ==
                    read_bytes(dir / (std::string(name) + "_b.csv")),
                std::string(name) + " series bytes differ");
    out.require(read_bytes(dir / (std::string(name) + "_ca.csv")) ==
                    read_bytes(dir / (std::string(name) + "_cb.csv")),
                std::string(name) + " contact bytes differ");
  }
  fs::remove_all(dir);
  out.note("byte-identical series and contact files");
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "analytic heat-mode decay with second-order refinement", criterion_heat_oracle},
      {2, "oblique projections vs dense brute force", criterion_projection_oracle},
      {3, "feedback operator norm certification", criterion_operator_bounds},
      {4, "penalty nonlinearity: Lipschitz, monotone, pairing identity",
       criterion_nonlinearity},
      {5, "default-scenario exponential stabilization", criterion_stabilization},
      {6, "necessity of large M and large lambda", criterion_necessity},
      {7, "decay-rate ordering across gain pairs", criterion_rate_ordering},
      {8, "free-dynamics instability and windowed feedback", criterion_free_instability},
      {9, "obstacle violation scaling in the penalty parameter",
       criterion_violation_scaling},
      {10, "nonsmooth obstacle run and contact at the discontinuity", criterion_nonsmooth},
      {11, "byte-identical reruns", criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d. %s (%.1fs)%s%s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                seconds, outcome.detail.empty() ? "" : " -- ", outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  std::printf("ACCEPTANCE: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
