#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parastab/config.hpp"
#include "parastab/dynamics.hpp"
#include "parastab/experiments.hpp"
#include "parastab/feedback.hpp"

namespace fs = std::filesystem;
using namespace parastab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  // per-parameter overrides; empty/negative means "not set"
  int n_nodes = -1;
  double dt = -1.0, T = -1.0, nu = -1.0, lambda = -1.0;
  int actuator_count = -1;
  std::vector<double> k_values;
  std::string bc, preset, scenario;
  std::vector<std::string> feed_on;
  int record_every = -1;
  double contact_eps = -1.0;
};

Window parse_window(const std::string& text) {
  const size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("feed-on window must look like begin:end, got " + text);
  }
  Window w;
  w.begin = std::stod(text.substr(0, colon));
  w.end = std::stod(text.substr(colon + 1));
  return w;
}

RunConfig resolve_config(const CliOptions& opt) {
  RunConfig config;
  if (!opt.config_path.empty()) {
    config = load_config_file(opt.config_path);
  } else if (!opt.scenario.empty()) {
    config = parse_config("{\"scenario\": \"" + opt.scenario + "\"}");
  } else {
    config = parse_config("{}");
  }
  if (!opt.scenario.empty()) config.scenario = opt.scenario;
  if (opt.n_nodes > 0) config.n_nodes = opt.n_nodes;
  if (opt.dt > 0) config.dt = opt.dt;
  if (opt.T > 0) {
    // keep a full-horizon default window in sync with an overridden T
    const bool full_window = config.feed_on.size() == 1 && config.feed_on[0].begin == 0.0 &&
                             config.feed_on[0].end == config.T;
    config.T = opt.T;
    if (full_window) config.feed_on = {{0.0, opt.T}};
  }
  if (opt.nu > 0) config.nu = opt.nu;
  if (opt.lambda > 0) config.lambda = opt.lambda;
  if (opt.actuator_count > 0) config.actuator_count = opt.actuator_count;
  if (!opt.k_values.empty()) config.k_values = opt.k_values;
  if (!opt.bc.empty()) config.bc = opt.bc;
  if (!opt.preset.empty()) config.preset = opt.preset;
  if (!opt.feed_on.empty()) {
    config.feed_on.clear();
    for (const std::string& w : opt.feed_on) config.feed_on.push_back(parse_window(w));
  }
  if (opt.record_every > 0) config.record_every = opt.record_every;
  if (opt.contact_eps > 0) config.contact_eps = opt.contact_eps;
  if (!opt.out_dir.empty()) config.out_dir = opt.out_dir;
  // round-trip through the validator so flag overrides get the same checks
  return parse_config(serialize(config));
}

struct OutputCollector {
  fs::path dir;
  std::vector<std::string> files;

  explicit OutputCollector(const std::string& out_dir) : dir(out_dir) {
    fs::create_directories(dir);
  }

  fs::path path(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

void finish(const RunConfig& config, const std::string& command,
            const std::chrono::steady_clock::time_point& start, OutputCollector& out,
            const std::vector<double>& dt_used) {
  RunManifest manifest;
  manifest.config = config;
  manifest.version = PARASTAB_VERSION;
  manifest.command = command;
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.outputs = out.files;
  manifest.dt_used = dt_used;
  write_manifest(out.dir / "manifest.json", manifest);
}

int cmd_run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario scenario = to_scenario(config);
  OutputCollector out(config.out_dir);
  std::vector<RunSummary> summaries;
  std::vector<double> dt_used;
  for (double k : scenario.k_values) {
    const double dt_k = scenario.tightened_dt(k);
    const TimeSeries series = run_scenario(scenario, k);
    char name[128];
    std::snprintf(name, sizeof(name), "series_%s_k%.17g.csv", scenario.name.c_str(), k);
    write_series_csv(out.path(name), series);
    summaries.push_back(summarize(scenario, k, dt_k, series));
    dt_used.push_back(dt_k);
    std::printf("run %s k=%g: |w-y|(0)=%.6g |w-y|(T)=%.6g ratio=%.3e\n",
                scenario.name.c_str(), k, summaries.back().initial_diff,
                summaries.back().final_diff, summaries.back().ratio);
  }
  write_runs_csv(out.path("runs.csv"), summaries);
  finish(config, "run", start, out, dt_used);
  return kExitOk;
}

int cmd_sweep(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario scenario = to_scenario(config);
  OutputCollector out(config.out_dir);
  const std::vector<SweepEntry> entries = sweep_kMY(scenario, scenario.k_values);
  std::vector<RunSummary> summaries;
  std::vector<double> dt_used;
  for (const SweepEntry& entry : entries) {
    char name[128];
    std::snprintf(name, sizeof(name), "series_%s_k%.17g.csv", scenario.name.c_str(), entry.k);
    write_series_csv(out.path(name), entry.series);
    summaries.push_back(summarize(scenario, entry.k, entry.dt_used, entry.series));
    dt_used.push_back(entry.dt_used);
    double max_viol_y = 0.0;
    for (double v : entry.series.max_violation_y) max_viol_y = std::max(max_viol_y, v);
    std::printf("sweep k=%g dt=%g: max violation (target) = %.6g\n", entry.k, entry.dt_used,
                max_viol_y);
  }
  write_runs_csv(out.path("runs.csv"), summaries);
  finish(config, "sweep", start, out, dt_used);
  return kExitOk;
}

int cmd_necessity(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  OutputCollector out(config.out_dir);
  const NecessityReport report = necessity_studies(config.n_nodes);
  const fs::path path = out.path("necessity.csv");
  {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::fprintf(f, "M,lambda,initial_diff,final_diff,ratio\n");
    for (const NecessityRow& row : report.rows) {
      std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", row.actuator_count, row.lambda,
                   row.initial_norm, row.final_norm, row.ratio);
      std::printf("necessity M=%d lambda=%g: ratio over T=1 is %.4f (%s)\n",
                  row.actuator_count, row.lambda, row.ratio,
                  row.ratio < 1.0 ? "contracting" : "not contracting");
    }
    std::fclose(f);
  }
  finish(config, "necessity", start, out, {});
  return kExitOk;
}

int cmd_decay(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  OutputCollector out(config.out_dir);
  const DecayStudyReport report = decay_rate_study(config.n_nodes);
  const fs::path path = out.path("decay_rates.csv");
  {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::fprintf(f, "M,lambda,mu_hat,r_squared,initial_diff,final_diff,early_increase\n");
    for (const DecayStudyRow& row : report.rows) {
      std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", row.actuator_count, row.lambda,
                   row.fit.mu_hat, row.fit.r_squared, row.initial_norm, row.final_norm,
                   row.early_increase ? 1 : 0);
      std::printf("decay M=%d lambda=%g: mu_hat=%.4f (R^2=%.4f)%s\n", row.actuator_count,
                  row.lambda, row.fit.mu_hat, row.fit.r_squared,
                  row.early_increase ? " with early non-monotone interval" : "");
    }
    std::fclose(f);
  }
  finish(config, "decay", start, out, {});
  return kExitOk;
}

int cmd_feedon(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  OutputCollector out(config.out_dir);
  const TimeSeries series = feed_on_study(config.feed_on, config.n_nodes);
  write_series_csv(out.path("series_feedon.csv"), series);
  std::printf("feedon: |w-y|(0)=%.6g |w-y|(T)=%.6g\n", series.diff_norm.front(),
              series.diff_norm.back());
  finish(config, "feedon", start, out, {});
  return kExitOk;
}

int cmd_contact(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario scenario = to_scenario(config);
  OutputCollector out(config.out_dir);
  std::vector<RunSummary> summaries;
  std::vector<double> dt_used;
  for (double k : scenario.k_values) {
    const TimeSeries series = run_scenario(scenario, k);
    char name[128];
    std::snprintf(name, sizeof(name), "contact_%s_k%.17g.csv", scenario.name.c_str(), k);
    write_contact_csv(out.path(name), series);
    std::snprintf(name, sizeof(name), "series_%s_k%.17g.csv", scenario.name.c_str(), k);
    write_series_csv(out.path(name), series);
    summaries.push_back(summarize(scenario, k, scenario.tightened_dt(k), series));
    dt_used.push_back(scenario.tightened_dt(k));
    const ContactMask mask = contact_set(series, StateId::Controlled);
    int max_components = 0;
    for (int c : mask.components) max_components = std::max(max_components, c);
    std::printf("contact k=%g: up to %d violation component(s) for w\n", k, max_components);
  }
  write_runs_csv(out.path("runs.csv"), summaries);
  finish(config, "contact", start, out, dt_used);
  return kExitOk;
}

int cmd_diagnostics(const RunConfig& config, const std::vector<int>& m_list) {
  const auto start = std::chrono::steady_clock::now();
  OutputCollector out(config.out_dir);
  const Mesh mesh = build_mesh(config.n_nodes, config.bc == "neumann"
                                                   ? Bc::NeumannHomogeneous
                                                   : Bc::DirichletHomogeneous);
  const fs::path path = out.path("diagnostics.csv");
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::fprintf(f, "M,alpha_hat,C_P,beta_Mplus,cond_G\n");
  double cp_running_max = 0.0;
  for (int m : m_list) {
    const ActuatorSet actuators = make_actuators(m, config.support_ratio, mesh);
    const EigenBasis basis = make_eigenbasis(m, config.nu, mesh.bc, mesh);
    const SubspacePair pair(actuators, basis);
    const double cp = pair.estimate_C_P();
    const double beta = estimate_beta_Mplus(actuators, mesh, config.nu);
    cp_running_max = std::max(cp_running_max, cp);
    std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", m, basis.alpha_hat(), cp, beta,
                 pair.gram_condition());
    std::printf("M=%2d  alpha_hat=%9.4f  C_P=%8.5f  beta=%8.5f  cond(G)=%.3g\n", m,
                basis.alpha_hat(), cp, beta, pair.gram_condition());
  }
  std::fclose(f);
  std::printf("running max of C_P over M-list: %.6f\n", cp_running_max);

  // certificate for the configured pair
  const SubspacePair pair(make_actuators(config.actuator_count, config.support_ratio, mesh),
                          make_eigenbasis(config.actuator_count, config.nu, mesh.bc, mesh));
  const FeedbackOperator feedback(pair, config.lambda);
  const FeedbackOperator::BoundReport report = feedback.certify_bounds();
  const fs::path cert = out.path("feedback_certificate.csv");
  f = std::fopen(cert.string().c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + cert.string());
  std::fprintf(f, "M,lambda,alpha_hat,C_P,computed_norm,bound,margin\n");
  std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", report.dim, report.lambda,
               report.alpha_hat, report.c_p, report.computed_norm, report.bound, report.margin);
  std::fclose(f);
  std::printf("certificate M=%d lambda=%g: |K| = %.4f <= %.4f (margin %.3g)\n", report.dim,
              report.lambda, report.computed_norm, report.bound, report.margin);
  finish(config, "diagnostics", start, out, {});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized parabolic obstacle problems with oblique-projection feedback"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON config file");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--scenario", opt.scenario, "scenario preset (default | nonsmooth)");
  app.add_option("--n-nodes", opt.n_nodes, "mesh nodes");
  app.add_option("--dt", opt.dt, "time step");
  app.add_option("--T", opt.T, "final time");
  app.add_option("--nu", opt.nu, "diffusion coefficient");
  app.add_option("--M", opt.actuator_count, "number of actuators");
  app.add_option("--lambda", opt.lambda, "feedback gain");
  app.add_option("--k", opt.k_values, "penalty parameter(s)");
  app.add_option("--bc", opt.bc, "boundary condition (neumann | dirichlet)");
  app.add_option("--preset", opt.preset, "coefficient preset (smooth | nonsmooth)");
  app.add_option("--feed-on", opt.feed_on, "feedback windows, begin:end");
  app.add_option("--record-every", opt.record_every, "record stride in steps");
  app.add_option("--contact-eps", opt.contact_eps, "near-contact tolerance");

  CLI::App* run = app.add_subcommand("run", "integrate target and controlled system");
  CLI::App* sweep = app.add_subcommand("sweep", "penalty-parameter sweep");
  CLI::App* necessity = app.add_subcommand("necessity", "small-M / small-lambda studies");
  CLI::App* decay = app.add_subcommand("decay", "decay-rate comparison study");
  CLI::App* feedon = app.add_subcommand("feedon", "feedback on/off window study");
  CLI::App* contact = app.add_subcommand("contact", "violation-set evolution");
  CLI::App* diagnostics = app.add_subcommand("diagnostics", "subspace constants table");
  std::vector<int> m_list;
  diagnostics->add_option("--m-list", m_list, "actuator counts for the table");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = resolve_config(opt);
    if (run->parsed()) return cmd_run(config);
    if (sweep->parsed()) return cmd_sweep(config);
    if (necessity->parsed()) return cmd_necessity(config);
    if (decay->parsed()) return cmd_decay(config);
    if (feedon->parsed()) return cmd_feedon(config);
    if (contact->parsed()) return cmd_contact(config);
    if (diagnostics->parsed()) {
      if (m_list.empty()) m_list = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      return cmd_diagnostics(config, m_list);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
