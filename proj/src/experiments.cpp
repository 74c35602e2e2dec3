#include "parastab/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <thread>

namespace parastab {

namespace {

constexpr double kPi = std::numbers::pi;

double smooth_obstacle(double x, double t) {
  return 2.0 + std::cos(t) + std::cos(10.0 * kPi * x * (x - 1.0) * (x - 0.25 * std::cos(5.0 * t)));
}

}  // namespace

CoefficientSet smooth_coefficients() {
  CoefficientSet c;
  c.name = "smooth";
  c.a = [](double x, double t) { return -6.0 + x + 2.0 * std::abs(std::sin(t + x)); };
  c.b = [](double x, double t) { return std::cos(t) * x * x; };
  c.f = [](double x, double t) { return -std::sin(t) * x; };
  c.psi = smooth_obstacle;
  return c;
}

CoefficientSet nonsmooth_coefficients() {
  CoefficientSet c = smooth_coefficients();
  c.name = "nonsmooth";
  c.psi = [](double x, double t) {
    if (x <= 0.1) return 3.1;
    if (x >= 0.8) return -0.5;
    return smooth_obstacle(x, t);
  };
  return c;
}

CoefficientSet coefficients_by_name(const std::string& name) {
  if (name == "smooth") return smooth_coefficients();
  if (name == "nonsmooth") return nonsmooth_coefficients();
  throw std::invalid_argument("unknown coefficient preset: " + name);
}

ProblemData Scenario::make_problem(double k) const {
  const Mesh mesh = build_mesh(n_nodes, bc);
  CoefficientSet coeff = coefficients_by_name(preset);
  ProblemData data;
  data.nu = nu;
  data.a = std::move(coeff.a);
  data.b = std::move(coeff.b);
  data.f = std::move(coeff.f);
  data.psi = std::move(coeff.psi);
  data.k_penalty = k;
  data.bc = bc;
  data.y_init = sample(mesh, [](double x) { return 3.0 * std::cos(kPi * x); });
  data.w_init = Field(mesh, -1.0);
  return data;
}

SubspacePair Scenario::make_pair() const {
  const Mesh mesh = build_mesh(n_nodes, bc);
  return SubspacePair(make_actuators(actuator_count, support_ratio, mesh),
                      make_eigenbasis(actuator_count, nu, bc, mesh));
}

double Scenario::tightened_dt(double k) const {
  double out = dt;
  while (out * k >= 2.0 * (1.0 - 1e-12)) out /= 10.0;
  return out;
}

Scenario scenario_default() { return Scenario{}; }

Scenario scenario_nonsmooth() {
  Scenario s;
  s.name = "nonsmooth";
  s.preset = "nonsmooth";
  s.actuator_count = 10;
  s.lambda = 5.0;
  s.k_values = {5000.0, 20000.0};
  s.T = 2.0;
  s.feed_on = {{0.0, 2.0}};
  return s;
}

TimeSeries run_scenario(const Scenario& scenario, double k) {
  const double dt_used = scenario.tightened_dt(k);
  const long refinement = std::lround(scenario.dt / dt_used);
  const int stride = scenario.record_every * static_cast<int>(refinement);
  const ProblemData data = scenario.make_problem(k);
  const SubspacePair pair = scenario.make_pair();
  return run_coupled(data, pair, scenario.lambda, scenario.feed_on, scenario.T, dt_used,
                     stride, scenario.contact_eps);
}

namespace {

int thread_budget(int jobs) {
  int budget = 0;
  if (const char* env = std::getenv("PARASTAB_THREADS")) budget = std::atoi(env);
  if (budget < 1) budget = static_cast<int>(std::thread::hardware_concurrency());
  if (budget < 1) budget = 1;
  return std::min(budget, jobs);
}

}  // namespace

std::vector<SweepEntry> sweep_kMY(const Scenario& base, const std::vector<double>& ks) {
  if (ks.empty()) throw std::invalid_argument("sweep_kMY: empty penalty list");
  for (double k : ks) {
    if (!(k > 0.0)) throw std::invalid_argument("sweep_kMY: penalties must be positive");
  }
  std::vector<SweepEntry> out(ks.size());
  std::vector<std::exception_ptr> errors(ks.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (size_t i = cursor.fetch_add(1); i < ks.size(); i = cursor.fetch_add(1)) {
      try {
        out[i].k = ks[i];
        out[i].dt_used = base.tightened_dt(ks[i]);
        out[i].series = run_scenario(base, ks[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = thread_budget(static_cast<int>(ks.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

DecayFit fit_decay(const TimeSeries& series, double window_begin, double window_end) {
  DecayFit fit;
  fit.window_begin = window_begin;
  fit.window_end = window_end;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    const double d = series.diff_norm[i];
    if (t < window_begin || t > window_end || !(d > 0.0)) continue;
    const double y = std::log(d);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++n;
  }
  fit.points = n;
  if (n < 2) return fit;
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  fit.mu_hat = -slope;
  fit.intercept = (sy - slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sy / n;
  for (size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    const double d = series.diff_norm[i];
    if (t < window_begin || t > window_end || !(d > 0.0)) continue;
    const double y = std::log(d);
    const double yhat = fit.intercept + slope * t;
    ss_res += (y - yhat) * (y - yhat);
    ss_tot += (y - mean) * (y - mean);
  }
  fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

const NecessityRow& NecessityReport::find(int actuator_count, double lambda) const {
  for (const NecessityRow& r : rows) {
    if (r.actuator_count == actuator_count && r.lambda == lambda) return r;
  }
  throw std::out_of_range("necessity report: no such run");
}

NecessityReport necessity_studies(int n_nodes) {
  Scenario base = scenario_default();
  base.n_nodes = n_nodes;
  base.T = 1.0;
  base.feed_on = {{0.0, 1.0}};
  const std::pair<int, double> cases[] = {
      {1, 1.0}, {1, 10.0}, {1, 50.0}, {10, 1.0}, {20, 1.0}, {5, 4.0}};
  NecessityReport report;
  for (auto [m, lam] : cases) {
    Scenario s = base;
    s.actuator_count = m;
    s.lambda = lam;
    const TimeSeries series = run_scenario(s, s.k_values.front());
    NecessityRow row;
    row.actuator_count = m;
    row.lambda = lam;
    row.initial_norm = series.diff_norm.front();
    row.final_norm = series.diff_norm.back();
    row.ratio = row.final_norm / row.initial_norm;
    report.rows.push_back(row);
  }
  return report;
}

const DecayStudyRow& DecayStudyReport::find(int actuator_count, double lambda) const {
  for (const DecayStudyRow& r : rows) {
    if (r.actuator_count == actuator_count && r.lambda == lambda) return r;
  }
  throw std::out_of_range("decay study: no such run");
}

DecayStudyReport decay_rate_study(int n_nodes) {
  Scenario base = scenario_default();
  base.n_nodes = n_nodes;
  const std::pair<int, double> cases[] = {{2, 2.0}, {4, 3.0}, {10, 6.0}};
  DecayStudyReport report;
  for (auto [m, lam] : cases) {
    Scenario s = base;
    s.actuator_count = m;
    s.lambda = lam;
    const TimeSeries series = run_scenario(s, s.k_values.front());
    DecayStudyRow row;
    row.actuator_count = m;
    row.lambda = lam;
    row.fit = fit_decay(series, 0.05, s.T);
    row.initial_norm = series.diff_norm.front();
    row.final_norm = series.diff_norm.back();
    for (size_t i = 0; i + 1 < series.size(); ++i) {
      if (series.times[i + 1] > 0.5) break;
      if (series.diff_norm[i + 1] > series.diff_norm[i]) {
        row.early_increase = true;
        break;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

TimeSeries feed_on_study(const std::vector<Window>& windows, int n_nodes) {
  Scenario s = scenario_default();
  s.name = "feedon";
  s.n_nodes = n_nodes;
  s.actuator_count = 6;
  s.lambda = 5.0;
  s.T = 4.0;
  for (const Window& w : windows) {
    if (w.begin < 0.0 || w.end > s.T || w.begin > w.end) {
      throw std::invalid_argument("feed_on_study: window outside [0, T]");
    }
  }
  s.feed_on = windows;
  return run_scenario(s, s.k_values.front());
}

int count_components(const std::vector<int>& sorted_nodes) {
  int components = 0;
  for (size_t i = 0; i < sorted_nodes.size(); ++i) {
    if (i == 0 || sorted_nodes[i] != sorted_nodes[i - 1] + 1) ++components;
  }
  return components;
}

ContactMask contact_set(const TimeSeries& series, StateId state, bool widened) {
  const auto& source = widened
                           ? (state == StateId::Target ? series.near_contact_y
                                                       : series.near_contact_w)
                           : (state == StateId::Target ? series.contact_y : series.contact_w);
  ContactMask mask;
  mask.nodes = source;
  mask.components.reserve(source.size());
  for (const std::vector<int>& nodes : source) mask.components.push_back(count_components(nodes));
  return mask;
}

RunSummary summarize(const Scenario& scenario, double k, double dt_used,
                     const TimeSeries& series) {
  RunSummary s;
  s.name = scenario.name;
  s.n_nodes = scenario.n_nodes;
  s.actuator_count = scenario.actuator_count;
  s.lambda = scenario.lambda;
  s.k = k;
  s.dt = dt_used;
  s.T = scenario.T;
  s.initial_diff = series.diff_norm.front();
  s.final_diff = series.diff_norm.back();
  s.ratio = s.final_diff / s.initial_diff;
  const DecayFit fit = fit_decay(series, 0.05, scenario.T);
  s.mu_hat = fit.mu_hat;
  s.r_squared = fit.r_squared;
  for (double v : series.max_violation_y) s.max_viol_y = std::max(s.max_viol_y, v);
  for (double v : series.max_violation_w) s.max_viol_w = std::max(s.max_viol_w, v);
  return s;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return f;
}

}  // namespace

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
  FilePtr f = open_for_write(path);
  std::fprintf(f.get(), "t,diff_norm,control_norm,max_viol_y,max_viol_w\n");
  for (size_t i = 0; i < series.size(); ++i) {
    std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g,%.17g\n", series.times[i],
                 series.diff_norm[i], series.control_norm[i], series.max_violation_y[i],
                 series.max_violation_w[i]);
  }
}

void write_contact_csv(const std::filesystem::path& path, const TimeSeries& series) {
  FilePtr f = open_for_write(path);
  std::fprintf(f.get(), "t,node,state\n");
  for (size_t i = 0; i < series.size(); ++i) {
    for (int node : series.contact_y[i]) {
      std::fprintf(f.get(), "%.17g,%d,y\n", series.times[i], node);
    }
    for (int node : series.contact_w[i]) {
      std::fprintf(f.get(), "%.17g,%d,w\n", series.times[i], node);
    }
  }
}

void write_runs_csv(const std::filesystem::path& path, const std::vector<RunSummary>& rows) {
  FilePtr f = open_for_write(path);
  std::fprintf(f.get(),
               "name,n_nodes,M,lambda,k,dt,T,initial_diff,final_diff,ratio,mu_hat,"
               "r_squared,max_viol_y,max_viol_w\n");
  for (const RunSummary& r : rows) {
    std::fprintf(f.get(), "%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 r.name.c_str(), r.n_nodes, r.actuator_count, r.lambda, r.k, r.dt, r.T,
                 r.initial_diff, r.final_diff, r.ratio, r.mu_hat, r.r_squared, r.max_viol_y,
                 r.max_viol_w);
  }
}

}  // namespace parastab
