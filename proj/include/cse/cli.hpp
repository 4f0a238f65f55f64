#pragma once

#include <chrono>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cse/dataset.hpp"
#include "cse/embedding.hpp"
#include "cse/errors.hpp"
#include "cse/kernels.hpp"
#include "cse/report.hpp"
#include "cse/simulate.hpp"
#include "cse/survival.hpp"
#include "cse/svg.hpp"
#include "cse/version.hpp"

namespace cse::cli {

namespace detail {

/// Flat JSON overlay for --config: {"flag-name": value, ...}. Applied inside
/// the subcommand callback, and only to options the command line left unset,
/// so flags always win.
inline void apply_json_config(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) throw DataError("cannot open config '" + config_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("config '" + config_path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError("config must be a flat JSON object of flag values");
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) throw CLI::ConfigError::Extras("--" + key);
    if (opt->count() > 0) continue;
    if (value.is_array()) {
      for (const auto& v : value)
        opt->add_result(v.is_string() ? v.get<std::string>() : v.dump());
    } else {
      opt->add_result(value.is_string() ? value.get<std::string>() : value.dump());
    }
    opt->run_callback();
  }
}

struct DatasetOptions {
  std::string input;
  std::string time_col = "time";
  std::string event_col = "event";
  std::string arm_col = "arm";
  std::vector<std::string> covariate_cols;
  bool lenient = false;
  bool standardize = false;
};

inline void add_dataset_flags(CLI::App* cmd, DatasetOptions& opt, bool with_standardize) {
  cmd->add_option("--input", opt.input, "Input CSV (header row required)")->required();
  cmd->add_option("--time-col", opt.time_col, "Observed-time column")->capture_default_str();
  cmd->add_option("--event-col", opt.event_col, "Event-indicator column (1=event, 0=censored)")
      ->capture_default_str();
  cmd->add_option("--arm-col", opt.arm_col, "Treatment-arm column (0/1)")->capture_default_str();
  cmd->add_option("--covariate-cols", opt.covariate_cols,
                  "Comma-separated covariate columns (default: x1,x2,...)")
      ->delimiter(',');
  cmd->add_flag("--lenient", opt.lenient,
                "Drop rows with missing cells instead of rejecting the file");
  if (with_standardize)
    cmd->add_flag("--standardize", opt.standardize,
                  "Center and scale covariates (fitted on pooled arms)");
}

inline RightCensoredSample load_dataset(const DatasetOptions& opt) {
  CsvSchema schema;
  schema.time_col = opt.time_col;
  schema.event_col = opt.event_col;
  schema.arm_col = opt.arm_col;
  schema.covariate_cols = opt.covariate_cols;
  RightCensoredSample sample = load_csv(
      opt.input, schema, opt.lenient ? MissingPolicy::lenient : MissingPolicy::strict);
  if (opt.standardize) sample = standardize_covariates(sample);
  return sample;
}

inline nlohmann::json dataset_config_json(const DatasetOptions& opt) {
  return nlohmann::json{{"input", opt.input},
                        {"time_col", opt.time_col},
                        {"event_col", opt.event_col},
                        {"arm_col", opt.arm_col},
                        {"covariate_cols", opt.covariate_cols},
                        {"lenient", opt.lenient},
                        {"standardize", opt.standardize}};
}

struct RidgeOptions {
  std::string rule = "n_power";
  double epsilon = 1e-2;
  double constant = 0.1;
  double exponent = 1.0 / 3.0;
  bool symmetrized = false;
};

inline void add_ridge_flags(CLI::App* cmd, RidgeOptions& opt) {
  cmd->add_option("--epsilon-rule", opt.rule, "Regularizer rule: n_power (eps = c*n^-q) or fixed")
      ->check(CLI::IsMember({"n_power", "fixed"}))
      ->capture_default_str();
  cmd->add_option("--epsilon", opt.epsilon,
                  "Fixed regularizer; passing it selects --epsilon-rule fixed")
      ->capture_default_str();
  cmd->add_option("--epsilon-constant", opt.constant, "c in eps = c*n^-q")
      ->capture_default_str();
  cmd->add_option("--epsilon-exponent", opt.exponent, "q in eps = c*n^-q, 0 < q < 1/2")
      ->capture_default_str();
  cmd->add_flag("--symmetrized-solve", opt.symmetrized,
                "Solve the ridge system through its symmetrized form");
}

inline RidgeSolveConfig resolve_ridge(const CLI::App* cmd, const RidgeOptions& opt) {
  RidgeSolveConfig cfg;
  cfg.rule = opt.rule == "fixed" ? RidgeSolveConfig::Rule::fixed : RidgeSolveConfig::Rule::n_power;
  if (cmd->count("--epsilon") > 0 && cmd->count("--epsilon-rule") == 0)
    cfg.rule = RidgeSolveConfig::Rule::fixed;
  cfg.epsilon = opt.epsilon;
  cfg.constant = opt.constant;
  cfg.exponent = opt.exponent;
  cfg.path = opt.symmetrized ? RidgeSolveConfig::Path::symmetrized
                             : RidgeSolveConfig::Path::general;
  return cfg;
}

inline nlohmann::json ridge_config_json(const RidgeSolveConfig& cfg) {
  return nlohmann::json{
      {"epsilon_rule", cfg.rule == RidgeSolveConfig::Rule::fixed ? "fixed" : "n_power"},
      {"epsilon", cfg.epsilon},
      {"epsilon_constant", cfg.constant},
      {"epsilon_exponent", cfg.exponent},
      {"symmetrized_solve", cfg.path == RidgeSolveConfig::Path::symmetrized}};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline void add_sim_flags(CLI::App* cmd, SimConfig& cfg) {
  cmd->add_option("--n-control", cfg.n_control, "Control-arm size per run")->capture_default_str();
  cmd->add_option("--n-treated", cfg.n_treated, "Treated-arm size per run")->capture_default_str();
  cmd->add_option("--c0", cfg.c0, "Control-arm censoring shift")->capture_default_str();
  cmd->add_option("--c1", cfg.c1, "Treated-arm censoring shift")->capture_default_str();
  cmd->add_option("--treated-mean-shift", cfg.treated_mean_shift, "Mean of treated X1")
      ->capture_default_str();
  cmd->add_option("--intercept-treated", cfg.intercept_treated, "Treated log-time intercept")
      ->capture_default_str();
  cmd->add_option("--event-noise-sd", cfg.event_noise_sd, "Event-time noise sd")
      ->capture_default_str();
  cmd->add_option("--censor-noise-sd", cfg.censor_noise_sd, "Censoring-time noise sd")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Root seed")->capture_default_str();
  cmd->add_option("--grid-size", cfg.grid_size, "Evaluation-grid size")->capture_default_str();
  cmd->add_option("--oracle-draws", cfg.oracle_draws, "Monte-Carlo draws for the oracle")
      ->capture_default_str();
  cmd->add_option("--calibration-draws", cfg.calibration_draws,
                  "Calibration draws per arm for grid and time bandwidth")
      ->capture_default_str();
  cmd->add_option("--grid-lo-quantile", cfg.grid_lo_quantile, "Grid lower quantile")
      ->capture_default_str();
  cmd->add_option("--grid-hi-quantile", cfg.grid_hi_quantile, "Grid upper quantile")
      ->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "Worker threads (0 = CSE_THREADS or hardware)")
      ->capture_default_str();
}

}  // namespace detail

/// Entry point behind the cse executable. Exit codes: 0 success, 1 usage
/// error, 2 data error, 3 numerical error.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"Counterfactual survival analysis with kernel mean embeddings"};
  app.require_subcommand(1);
  app.fallthrough(false);
  app.set_version_flag("--version", CSE_VERSION_STRING);

  auto add_config = [](CLI::App* cmd) {
    auto path = std::make_shared<std::string>();
    cmd->add_option("--config", *path, "Flat JSON config overlay; command-line flags win");
    return path;
  };

  // ---- validate ----
  auto v_data = std::make_shared<detail::DatasetOptions>();
  auto v_out = std::make_shared<std::string>("-");
  CLI::App* validate = app.add_subcommand("validate", "Load and summarize a dataset");
  auto v_config = add_config(validate);
  detail::add_dataset_flags(validate, *v_data, /*with_standardize=*/false);
  validate->add_option("--out", *v_out, "Summary JSON path, - for stdout")->capture_default_str();
  validate->callback([v_data, v_out, v_config, validate] {
    detail::apply_json_config(validate, *v_config);
    const detail::Stopwatch timer;
    const RightCensoredSample sample = detail::load_dataset(*v_data);
    if (sample.empty()) throw EmptyInput("no usable rows in '" + v_data->input + "'");
    auto [control, treated] = split_arms(sample, /*require_both=*/false);
    auto arm_json = [](const RightCensoredSample& arm) {
      return nlohmann::json{{"n", arm.size()},
                            {"events", arm.event_count()},
                            {"censoring_fraction", arm.censoring_fraction()}};
    };
    const std::vector<double> times = sample.times();
    RunManifest manifest;
    manifest.subcommand = "validate";
    manifest.config = detail::dataset_config_json(*v_data);
    manifest.config["out"] = *v_out;
    manifest.input_digest = file_digest(v_data->input);
    manifest.duration_seconds = timer.seconds();
    const nlohmann::json j{{"manifest", to_json(manifest)},
                           {"n", sample.size()},
                           {"covariate_dim", sample.covariate_dim},
                           {"covariate_names", sample.covariate_names},
                           {"dropped_rows", sample.dropped_rows},
                           {"control", arm_json(control)},
                           {"treated", arm_json(treated)},
                           {"time_min", *std::min_element(times.begin(), times.end())},
                           {"time_max", *std::max_element(times.begin(), times.end())}};
    write_text(*v_out, j.dump(2) + "\n");
    (void)validate;
  });

  // ---- km ----
  auto k_data = std::make_shared<detail::DatasetOptions>();
  auto k_out = std::make_shared<std::string>("-");
  CLI::App* km = app.add_subcommand("km", "Per-arm product-limit survival curves as CSV");
  auto k_config = add_config(km);
  detail::add_dataset_flags(km, *k_data, /*with_standardize=*/false);
  km->add_option("--out", *k_out, "Curve CSV path (t,survival,arm), - for stdout")
      ->capture_default_str();
  km->callback([k_data, k_out, k_config, km] {
    detail::apply_json_config(km, *k_config);
    const RightCensoredSample sample = detail::load_dataset(*k_data);
    if (sample.empty()) throw EmptyInput("no usable rows in '" + k_data->input + "'");
    auto [control, treated] = split_arms(sample, /*require_both=*/false);
    std::string csv = "t,survival,arm\n";
    for (int arm = 0; arm <= 1; ++arm) {
      const RightCensoredSample& data = arm == 0 ? control : treated;
      if (data.empty()) continue;
      const StepFunction curve = kaplan_meier(data.times(), data.events());
      for (std::size_t k = 0; k < curve.jump_times().size(); ++k)
        csv += format_double(curve.jump_times()[k]) + "," +
               format_double(curve.values_after()[k]) + "," + std::to_string(arm) + "\n";
    }
    write_text(*k_out, csv);
  });

  // ---- embed ----
  struct EmbedState {
    detail::DatasetOptions data;
    detail::RidgeOptions ridge;
    std::string curve = "cf01";
    bool obs_conditional = false;
    int grid_size = 100;
    std::string out = "-";
    std::string curves_out;
    std::string svg_out;
  };
  auto e = std::make_shared<EmbedState>();
  CLI::App* embed = app.add_subcommand("embed", "Counterfactual or own-arm mean embedding");
  auto e_config = add_config(embed);
  detail::add_dataset_flags(embed, e->data, /*with_standardize=*/true);
  detail::add_ridge_flags(embed, e->ridge);
  embed->add_option("--curve", e->curve,
                    "cf01 (arm-0 fit on arm-1 covariates), cf10, obs0, obs1")
      ->check(CLI::IsMember({"cf01", "cf10", "obs0", "obs1"}))
      ->capture_default_str();
  embed->add_flag("--obs-conditional", e->obs_conditional,
                  "Own-arm curves: average the conditional fit instead of IPCW means");
  embed->add_option("--grid-size", e->grid_size, "Evaluation-grid size")->capture_default_str();
  embed->add_option("--out", e->out, "Report JSON path, - for stdout")->capture_default_str();
  embed->add_option("--curves", e->curves_out, "Curve CSV path (t,value,curve_label)");
  embed->add_option("--svg", e->svg_out, "Line-chart SVG path");
  embed->callback([e, e_config, embed] {
    detail::apply_json_config(embed, *e_config);
    const detail::Stopwatch timer;
    const RightCensoredSample sample = detail::load_dataset(e->data);
    auto [control, treated] = split_arms(sample, /*require_both=*/false);
    const RidgeSolveConfig ridge = detail::resolve_ridge(embed, e->ridge);

    const bool counterfactual = e->curve == "cf01" || e->curve == "cf10";
    const int fit_arm = (e->curve == "cf01" || e->curve == "obs0") ? 0 : 1;
    const RightCensoredSample& fit_data = fit_arm == 0 ? control : treated;
    const RightCensoredSample& other_data = fit_arm == 0 ? treated : control;
    if (fit_data.empty()) throw EmptyArm(fit_arm);
    if (counterfactual && other_data.empty()) throw EmptyArm(1 - fit_arm);

    const GaussianKernel time_kernel(median_heuristic(sample.times()));
    const GaussianKernel cov_kernel(median_heuristic(cse::detail::covariate_matrix(sample)));
    const std::vector<double> grid = time_grid(sample.times(), e->grid_size);

    const WeightedArm fitted = build_weighted_arm(fit_data);
    EmbeddingCurve curve;
    if (counterfactual) {
      const std::string label = fit_arm == 0 ? "mu<0|1>" : "mu<1|0>";
      curve = counterfactual_embedding(fitted, cse::detail::covariate_matrix(other_data),
                                       cov_kernel, time_kernel, ridge, grid, label);
    } else {
      const std::string label =
          fit_arm == 0 ? "mu<0|0>" : "mu<1|1>";
      curve = e->obs_conditional
                  ? observational_embedding_conditional(fitted, cov_kernel, time_kernel, ridge,
                                                        grid, label)
                  : observational_embedding(fitted, time_kernel, grid, label);
    }

    nlohmann::json warnings = nlohmann::json::array();
    if (sample.dropped_rows > 0)
      warnings.push_back(std::to_string(sample.dropped_rows) + " rows dropped (lenient mode)");
    if (fitted.capped_weights > 0)
      warnings.push_back(std::to_string(fitted.capped_weights) + " weights capped at n");

    RunManifest manifest;
    manifest.subcommand = "embed";
    manifest.config = detail::dataset_config_json(e->data);
    manifest.config.update(detail::ridge_config_json(ridge));
    manifest.config["curve"] = e->curve;
    manifest.config["obs_conditional"] = e->obs_conditional;
    manifest.config["grid_size"] = e->grid_size;
    manifest.config["out"] = e->out;
    manifest.input_digest = file_digest(e->data.input);
    manifest.duration_seconds = timer.seconds();

    const nlohmann::json j{
        {"manifest", to_json(manifest)},
        {"n", fit_data.size()},
        {"m", counterfactual ? other_data.size() : fit_data.size()},
        {"epsilon", ridge.resolve(fit_data.size())},
        {"sigma2_time", time_kernel.sigma2},
        {"sigma2_cov", cov_kernel.sigma2},
        {"censoring_fraction_per_arm",
         {{"control", control.censoring_fraction()}, {"treated", treated.censoring_fraction()}}},
        {"warnings", warnings},
        {"curve_label", curve.label},
        {"rkhs_norm", rkhs_norm(curve)}};
    write_text(e->out, j.dump(2) + "\n");
    if (!e->curves_out.empty()) write_text(e->curves_out, curves_csv({&curve}));
    if (!e->svg_out.empty()) {
      const SvgSeries series{curve.label, &curve.grid, &curve.grid_values, "#1f77b4", 1.8, false,
                             true};
      write_text(e->svg_out,
                 render_line_chart({series}, "Mean embedding", "time", "embedding value"));
    }
  });

  // ---- decompose ----
  struct DecomposeState {
    detail::DatasetOptions data;
    detail::RidgeOptions ridge;
    bool obs_conditional = false;
    int grid_size = 100;
    std::string out = "-";
    std::string curves_out;
    std::string svg_out;
  };
  auto d = std::make_shared<DecomposeState>();
  CLI::App* dec = app.add_subcommand(
      "decompose", "Split the arm gap into covariate-composition and treated effects");
  auto d_config = add_config(dec);
  detail::add_dataset_flags(dec, d->data, /*with_standardize=*/true);
  detail::add_ridge_flags(dec, d->ridge);
  dec->add_flag("--obs-conditional", d->obs_conditional,
                "Own-arm curves: average the conditional fit instead of IPCW means");
  dec->add_option("--grid-size", d->grid_size, "Evaluation-grid size")->capture_default_str();
  dec->add_option("--out", d->out, "Report JSON path, - for stdout")->capture_default_str();
  dec->add_option("--curves", d->curves_out, "Curve CSV path (t,value,curve_label)");
  dec->add_option("--svg", d->svg_out, "Line-chart SVG path");
  dec->callback([d, d_config, dec] {
    detail::apply_json_config(dec, *d_config);
    const detail::Stopwatch timer;
    const RightCensoredSample sample = detail::load_dataset(d->data);
    auto [control, treated] = split_arms(sample);  // both arms required
    const RidgeSolveConfig ridge = detail::resolve_ridge(dec, d->ridge);

    const GaussianKernel time_kernel(median_heuristic(sample.times()));
    const GaussianKernel cov_kernel(median_heuristic(cse::detail::covariate_matrix(sample)));
    const std::vector<double> grid = time_grid(sample.times(), d->grid_size);

    DecomposeOptions options;
    options.conditional_observational = d->obs_conditional;
    const DecompositionCurves curves =
        decompose(sample, cov_kernel, time_kernel, ridge, grid, options);

    nlohmann::json warnings = nlohmann::json::array();
    if (sample.dropped_rows > 0)
      warnings.push_back(std::to_string(sample.dropped_rows) + " rows dropped (lenient mode)");

    RunManifest manifest;
    manifest.subcommand = "decompose";
    manifest.config = detail::dataset_config_json(d->data);
    manifest.config.update(detail::ridge_config_json(ridge));
    manifest.config["obs_conditional"] = d->obs_conditional;
    manifest.config["grid_size"] = d->grid_size;
    manifest.config["out"] = d->out;
    manifest.input_digest = file_digest(d->data.input);
    manifest.duration_seconds = timer.seconds();

    const nlohmann::json j{
        {"manifest", to_json(manifest)},
        {"n", control.size()},
        {"m", treated.size()},
        {"epsilon", ridge.resolve(control.size())},
        {"sigma2_time", time_kernel.sigma2},
        {"sigma2_cov", cov_kernel.sigma2},
        {"censoring_fraction_per_arm",
         {{"control", control.censoring_fraction()}, {"treated", treated.censoring_fraction()}}},
        {"warnings", warnings},
        {"rkhs_norms",
         {{"term_a", rkhs_norm(curves.term_a)},
          {"term_b", rkhs_norm(curves.term_b)},
          {"total", rkhs_norm(curves.total)}}}};
    write_text(d->out, j.dump(2) + "\n");
    if (!d->curves_out.empty())
      write_text(d->curves_out,
                 curves_csv({&curves.term_a, &curves.term_b, &curves.total, &curves.mu_control,
                             &curves.mu_counterfactual, &curves.mu_treated}));
    if (!d->svg_out.empty()) {
      const std::vector<SvgSeries> series{
          {"term_a", &curves.term_a.grid, &curves.term_a.grid_values, "#1f77b4", 1.8, false, true},
          {"term_b", &curves.term_b.grid, &curves.term_b.grid_values, "#2ca02c", 1.8, false, true},
          {"total", &curves.total.grid, &curves.total.grid_values, "#333333", 1.8, true, true}};
      write_text(d->svg_out, render_line_chart(series, "Embedding-scale decomposition", "time",
                                               "embedding difference"));
    }
  });

  // ---- simulate ----
  struct SimulateState {
    SimConfig config;
    detail::RidgeOptions ridge;
    std::string out = "-";
    std::string curves_out;
    std::string svg_out;
  };
  auto s = std::make_shared<SimulateState>();
  CLI::App* sim = app.add_subcommand("simulate", "Variability study on the log-normal model");
  auto s_config = add_config(sim);
  detail::add_sim_flags(sim, s->config);
  detail::add_ridge_flags(sim, s->ridge);
  sim->add_option("--B", s->config.B, "Simulation runs")->capture_default_str();
  sim->add_option("--out", s->out, "StudyReport JSON path, - for stdout")->capture_default_str();
  sim->add_option("--curves", s->curves_out, "Curve CSV path (t,curve,value)");
  sim->add_option("--svg", s->svg_out, "Overlay SVG path");
  sim->callback([s, s_config, sim] {
    detail::apply_json_config(sim, *s_config);
    const detail::Stopwatch timer;
    s->config.ridge = detail::resolve_ridge(sim, s->ridge);
    const StudyReport report = variability_study(s->config);

    RunManifest manifest;
    manifest.subcommand = "simulate";
    manifest.config = to_json(report.config);
    manifest.config["out"] = s->out;
    manifest.seed = s->config.seed;
    manifest.has_seed = true;
    manifest.duration_seconds = timer.seconds();
    nlohmann::json j = to_json(report);
    j["manifest"] = to_json(manifest);
    write_text(s->out, j.dump(2) + "\n");
    if (!s->curves_out.empty()) write_text(s->curves_out, study_csv(report));
    if (!s->svg_out.empty()) {
      std::vector<SvgSeries> series;
      for (const auto& run : report.per_run_curves)
        series.push_back({"", &report.grid, &run, "#cccccc", 0.7, false, false});
      series.push_back({"mean", &report.grid, &report.mean_curve, "#000000", 2.0, false, true});
      series.push_back(
          {"oracle", &report.grid, &report.oracle_curve, "#e3a800", 2.0, true, true});
      write_text(s->svg_out, render_line_chart(series, "Counterfactual embedding, B runs", "time",
                                               "embedding value"));
    }
  });

  // ---- rate ----
  struct RateState {
    SimConfig config;
    detail::RidgeOptions ridge;
    std::vector<std::size_t> sizes{100, 200, 300, 400, 500, 600};
    bool linear_truth = true;
    std::string out = "-";
    std::string curves_out;
    std::string svg_out;
  };
  auto r = std::make_shared<RateState>();
  CLI::App* rate = app.add_subcommand("rate", "Convergence-rate experiment over sample sizes");
  auto r_config = add_config(rate);
  detail::add_sim_flags(rate, r->config);
  detail::add_ridge_flags(rate, r->ridge);
  rate->add_option("--B", r->config.B, "Runs per size")->capture_default_str();
  rate->add_option("--sizes", r->sizes, "Comma-separated per-arm sample sizes")
      ->delimiter(',')
      ->capture_default_str();
  rate->add_flag("--linear-truth,!--no-linear-truth", r->linear_truth,
                 "Use the log-linear structural equations (the only implemented family)")
      ->capture_default_str();
  rate->add_option("--out", r->out, "RateReport JSON path, - for stdout")->capture_default_str();
  rate->add_option("--curves", r->curves_out, "Per-size V CSV path (n,V)");
  rate->add_option("--svg", r->svg_out, "Log-log fit SVG path");
  rate->callback([r, r_config, rate] {
    detail::apply_json_config(rate, *r_config);
    const detail::Stopwatch timer;
    r->config.ridge = detail::resolve_ridge(rate, r->ridge);
    const RateReport report =
        rate_experiment(r->sizes, r->config.B, r->config.seed, r->linear_truth, r->config);

    RunManifest manifest;
    manifest.subcommand = "rate";
    manifest.config = to_json(r->config);
    manifest.config["sizes"] = r->sizes;
    manifest.config["linear_truth"] = r->linear_truth;
    manifest.config["out"] = r->out;
    manifest.seed = r->config.seed;
    manifest.has_seed = true;
    manifest.duration_seconds = timer.seconds();
    nlohmann::json j = to_json(report);
    j["manifest"] = to_json(manifest);
    write_text(r->out, j.dump(2) + "\n");
    if (!r->curves_out.empty()) write_text(r->curves_out, rate_csv(report));
    if (!r->svg_out.empty()) {
      std::vector<double> log_n, log_v, fit_v;
      for (std::size_t i = 0; i < report.sample_sizes.size(); ++i) {
        log_n.push_back(std::log(static_cast<double>(report.sample_sizes[i])));
        log_v.push_back(std::log(report.V[i]));
        fit_v.push_back(report.fitted_intercept - report.fitted_slope * log_n.back());
      }
      const std::vector<SvgSeries> series{
          {"log V", &log_n, &log_v, "#1f77b4", 1.8, false, true},
          {"fit", &log_n, &fit_v, "#d62728", 1.5, true, true}};
      write_text(r->svg_out, render_line_chart(series, "Variability vs sample size", "log n",
                                               "log V"));
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("cse");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace cse::cli
