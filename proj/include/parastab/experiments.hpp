#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "parastab/dynamics.hpp"

namespace parastab {

/// Named coefficient tuple (a, b, f, psi) of a scenario.
struct CoefficientSet {
  std::string name;
  SpaceTimeFn a, b, f, psi;
};

CoefficientSet smooth_coefficients();
CoefficientSet nonsmooth_coefficients();
CoefficientSet coefficients_by_name(const std::string& name);

/// A fully specified simulation setup. The named presets reproduce the
/// benchmark configurations exactly; everything else is plain data that can
/// be edited before running.
struct Scenario {
  std::string name = "default";
  std::string preset = "smooth";
  int n_nodes = 2001;
  Bc bc = Bc::NeumannHomogeneous;
  double nu = 0.1;
  int actuator_count = 5;
  double support_ratio = 0.1;
  double lambda = 4.0;
  std::vector<double> k_values = {1000.0};
  double dt = 1e-4;
  double T = 4.0;
  int record_every = 10;
  std::vector<Window> feed_on = {{0.0, 4.0}};
  double contact_eps = 1e-3;

  ProblemData make_problem(double k) const;
  SubspacePair make_pair() const;

  /// Largest dt of the form dt/10^j satisfying the explicit-penalty
  /// stability rule dt*k < 2.
  double tightened_dt(double k) const;
};

Scenario scenario_default();
Scenario scenario_nonsmooth();

/// Single run at penalty k; dt is auto-tightened and the record stride is
/// rescaled so all runs of a scenario share one record grid.
TimeSeries run_scenario(const Scenario& scenario, double k);

struct SweepEntry {
  double k = 0.0;
  double dt_used = 0.0;
  TimeSeries series;
};

/// One run per penalty value; members execute in parallel (thread budget
/// from PARASTAB_THREADS) and are aggregated by parameter order.
std::vector<SweepEntry> sweep_kMY(const Scenario& base, const std::vector<double>& ks);

/// Least-squares fit of log ||w-y|| over the time window; mu_hat > 0 means
/// exponential decay at rate mu_hat.
struct DecayFit {
  double mu_hat = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
  int points = 0;
};

DecayFit fit_decay(const TimeSeries& series, double window_begin, double window_end);

struct NecessityRow {
  int actuator_count = 0;
  double lambda = 0.0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  double ratio = 0.0;
};

struct NecessityReport {
  std::vector<NecessityRow> rows;
  const NecessityRow& find(int actuator_count, double lambda) const;
};

/// Single-actuator and unit-gain studies over T = 1 on the default problem,
/// plus the default pair for reference.
NecessityReport necessity_studies(int n_nodes = 2001);

struct DecayStudyRow {
  int actuator_count = 0;
  double lambda = 0.0;
  DecayFit fit;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  bool early_increase = false;  // some recorded increase of ||w-y|| for t <= 0.5
};

struct DecayStudyReport {
  std::vector<DecayStudyRow> rows;
  const DecayStudyRow& find(int actuator_count, double lambda) const;
};

/// Fitted decay rates for (M, lambda) in {(2,2), (4,3), (10,6)} over T = 4.
DecayStudyReport decay_rate_study(int n_nodes = 2001);

/// Default problem with (M, lambda) = (6, 5) over T = 4 and the feedback
/// active only inside the given windows.
TimeSeries feed_on_study(const std::vector<Window>& windows, int n_nodes = 2001);

enum class StateId { Target, Controlled };

struct ContactMask {
  std::vector<std::vector<int>> nodes;  // per record, sorted
  std::vector<int> components;          // connected runs per record
};

/// Violation set {(x,t) : u - psi > 0} of one state (widened by the
/// scenario's contact_eps when requested) with per-time component counts.
ContactMask contact_set(const TimeSeries& series, StateId state, bool widened = false);

int count_components(const std::vector<int>& sorted_nodes);

struct RunSummary {
  std::string name;
  int n_nodes = 0;
  int actuator_count = 0;
  double lambda = 0.0;
  double k = 0.0;
  double dt = 0.0;
  double T = 0.0;
  double initial_diff = 0.0;
  double final_diff = 0.0;
  double ratio = 0.0;
  double mu_hat = 0.0;
  double r_squared = 0.0;
  double max_viol_y = 0.0;
  double max_viol_w = 0.0;
};

RunSummary summarize(const Scenario& scenario, double k, double dt_used,
                     const TimeSeries& series);

// CSV writers; fixed headers, floats at full round-trip precision.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);
void write_contact_csv(const std::filesystem::path& path, const TimeSeries& series);
void write_runs_csv(const std::filesystem::path& path, const std::vector<RunSummary>& rows);

}  // namespace parastab
