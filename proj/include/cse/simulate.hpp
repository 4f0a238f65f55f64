#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cse/embedding.hpp"
#include "cse/kernels.hpp"
#include "cse/parallel.hpp"
#include "cse/rng.hpp"
#include "cse/survival.hpp"

namespace cse {

/// Log-normal accelerated-failure-time study: per unit,
///   log T = intercept * 1{arm=1} + X1 + X2 + e,   e ~ N(c_arm, event_noise_sd)
///   log C = intercept * 1{arm=1} + X1 + X2 + e',  e' ~ N(0, censor_noise_sd)
/// with X1 ~ N(treated_mean_shift * 1{arm=1}, 1), X2 ~ N(0, 1). Larger c_arm
/// pushes events past their censoring times: P(censored) = Phi(c / sqrt(2))
/// at unit noise.
struct SimConfig {
  std::size_t n_control = 100;
  std::size_t n_treated = 100;
  double c0 = 0.2;
  double c1 = 0.1;
  double treated_mean_shift = 0.5;
  double intercept_treated = 2.0;
  double event_noise_sd = 1.0;
  double censor_noise_sd = 1.0;
  std::uint64_t seed = 1;
  std::size_t B = 100;
  int grid_size = 100;
  std::size_t oracle_draws = 200000;
  std::size_t calibration_draws = 2000;  // per arm
  double grid_lo_quantile = 0.005;
  double grid_hi_quantile = 0.80;
  RidgeSolveConfig ridge;
  unsigned threads = 0;  // 0 = resolve_threads(); never affects results

  double censor_shift(int arm) const { return arm == 1 ? c1 : c0; }
};

struct StudyReport {
  SimConfig config;
  std::vector<double> grid;
  std::vector<std::vector<double>> per_run_curves;
  std::vector<double> mean_curve;
  std::vector<double> pointwise_sd;
  std::vector<double> oracle_curve;  // empty when the oracle was skipped
  double censoring_fraction_control = 0.0;  // mean over runs
  double censoring_fraction_treated = 0.0;
  double sigma2_time = 0.0;
  double sigma2_cov_mean = 0.0;
  double epsilon = 0.0;
  std::size_t resampled_runs = 0;
};

struct RateReport {
  std::vector<std::size_t> sample_sizes;
  std::vector<double> V;          // mean-over-grid pointwise sd per size
  double fitted_slope = 0.0;      // gamma in V = C * n^(-gamma)
  double fitted_intercept = 0.0;  // log C
  double r_squared = 0.0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
  double sigma2_time = 0.0;
  std::size_t resampled_runs = 0;
};

namespace detail {

// Sub-stream tags; arbitrary distinct constants.
inline constexpr std::uint64_t kCalibrationTag = 0xCA11;
inline constexpr std::uint64_t kOracleTag = 0x04AC;
inline constexpr std::uint64_t kRunTag = 0x0B00;
inline constexpr std::uint64_t kSizeTag = 0x517E;

}  // namespace detail

/// One simulated arm; covariates are (X1, X2).
inline RightCensoredSample generate_arm(const SimConfig& config, int arm, Rng& rng) {
  const std::size_t n = arm == 1 ? config.n_treated : config.n_control;
  const double shift = arm == 1 ? config.treated_mean_shift : 0.0;
  const double intercept = arm == 1 ? config.intercept_treated : 0.0;
  const double c = config.censor_shift(arm);

  RightCensoredSample sample;
  sample.covariate_dim = 2;
  sample.covariate_names = {"x1", "x2"};
  sample.observations.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.normal(shift, 1.0);
    const double x2 = rng.normal();
    const double base = intercept + x1 + x2;
    const double log_t = base + rng.normal(c, config.event_noise_sd);
    const double log_c = base + rng.normal(0.0, config.censor_noise_sd);
    Observation obs;
    obs.time = std::exp(std::min(log_t, log_c));
    obs.event = log_t <= log_c ? 1 : 0;
    obs.arm = arm;
    obs.covariates = {x1, x2};
    sample.observations.push_back(std::move(obs));
  }
  return sample;
}

/// Monte-Carlo approximation of the population counterfactual mean embedding:
/// covariates drawn from covariate_arm's law, the (uncensored) event time from
/// conditional_arm's structural equation, l(T, grid) averaged over n_mc draws.
inline std::vector<double> population_embedding_oracle(const SimConfig& config,
                                                       int conditional_arm, int covariate_arm,
                                                       const std::vector<double>& grid,
                                                       const GaussianKernel& time_kernel,
                                                       std::size_t n_mc, Rng& rng) {
  if (n_mc == 0) throw std::invalid_argument("oracle needs at least one draw");
  const double shift = covariate_arm == 1 ? config.treated_mean_shift : 0.0;
  const double intercept = conditional_arm == 1 ? config.intercept_treated : 0.0;
  const double c = config.censor_shift(conditional_arm);

  std::vector<double> acc(grid.size(), 0.0);
  for (std::size_t d = 0; d < n_mc; ++d) {
    const double x1 = rng.normal(shift, 1.0);
    const double x2 = rng.normal();
    const double t = std::exp(intercept + x1 + x2 + rng.normal(c, config.event_noise_sd));
    for (std::size_t k = 0; k < grid.size(); ++k) acc[k] += time_kernel(t, grid[k]);
  }
  for (double& v : acc) v /= static_cast<double>(n_mc);
  return acc;
}

/// Shared evaluation scale of a study: the grid spans the configured quantile
/// range of a seeded calibration draw of observed times (pooled arms), and the
/// time-kernel bandwidth is the median heuristic on that same draw. Every run
/// and the oracle then live in one RKHS.
struct Calibration {
  std::vector<double> grid;
  GaussianKernel time_kernel{1.0};
};

inline Calibration calibrate_study(const SimConfig& config) {
  SimConfig cal_config = config;
  cal_config.n_control = cal_config.n_treated = config.calibration_draws;
  Rng rng(mix_seed(config.seed, detail::kCalibrationTag));
  std::vector<double> pooled;
  pooled.reserve(2 * config.calibration_draws);
  for (int arm : {0, 1})
    for (const auto& obs : generate_arm(cal_config, arm, rng).observations)
      pooled.push_back(obs.time);

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  const double lo = quantile(config.grid_lo_quantile);
  const double hi = quantile(config.grid_hi_quantile);
  if (!(hi > lo)) throw DegenerateRange();

  Calibration cal;
  cal.grid.resize(static_cast<std::size_t>(config.grid_size));
  if (config.grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  const double step = (hi - lo) / static_cast<double>(config.grid_size - 1);
  for (int k = 0; k < config.grid_size; ++k)
    cal.grid[static_cast<std::size_t>(k)] = lo + step * k;
  cal.grid.back() = hi;
  cal.time_kernel = GaussianKernel(median_heuristic(pooled));
  return cal;
}

namespace detail {

struct RunResult {
  std::vector<double> curve;
  double censoring_control = 0.0;
  double censoring_treated = 0.0;
  double sigma2_cov = 0.0;
  std::size_t resamples = 0;
};

/// One simulation draw and fit of mu<0|1>. Control arms with zero events are
/// resampled under an incremented attempt stream so B stays fixed.
inline RunResult run_once(const SimConfig& config, const Calibration& cal,
                          std::uint64_t run_seed) {
  RunResult result;
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt > 1000) throw DegenerateCensoring();
    Rng rng(mix_seed(run_seed, attempt));
    RightCensoredSample control_data = generate_arm(config, 0, rng);
    RightCensoredSample treated_data = generate_arm(config, 1, rng);
    if (control_data.event_count() == 0) {
      ++result.resamples;
      continue;
    }
    result.censoring_control = control_data.censoring_fraction();
    result.censoring_treated = treated_data.censoring_fraction();

    Eigen::MatrixXd pooled(
        static_cast<Eigen::Index>(control_data.size() + treated_data.size()), 2);
    pooled.topRows(static_cast<Eigen::Index>(control_data.size())) =
        covariate_matrix(control_data);
    pooled.bottomRows(static_cast<Eigen::Index>(treated_data.size())) =
        covariate_matrix(treated_data);
    result.sigma2_cov = median_heuristic(pooled);

    const WeightedArm control = build_weighted_arm(std::move(control_data));
    const EmbeddingCurve curve = counterfactual_embedding(
        control, covariate_matrix(treated_data), GaussianKernel(result.sigma2_cov),
        cal.time_kernel, config.ridge, cal.grid);
    result.curve = curve.grid_values;
    return result;
  }
}

}  // namespace detail

/// B independent fits of mu<0|1> on fresh draws, aggregated on the shared
/// calibration scale. Runs execute in parallel; per-run seeds depend only on
/// (config.seed, run index), so results are independent of the thread count.
inline StudyReport variability_study(const SimConfig& config, const Calibration& cal,
                                     bool with_oracle = true) {
  if (config.B == 0) throw std::invalid_argument("B must be >= 1");
  if (config.n_control < 2 || config.n_treated < 2)
    throw std::invalid_argument("need at least 2 observations per arm");

  StudyReport report;
  report.config = config;
  report.grid = cal.grid;
  report.sigma2_time = cal.time_kernel.sigma2;
  report.epsilon = config.ridge.resolve(config.n_control);

  std::vector<detail::RunResult> runs(config.B);
  parallel_for(config.B, resolve_threads(config.threads ? std::optional<unsigned>(config.threads)
                                                        : std::nullopt),
               [&](std::size_t b) {
                 runs[b] = detail::run_once(config, cal,
                                            mix_seed(config.seed, detail::kRunTag, b));
               });

  const std::size_t N = cal.grid.size();
  report.per_run_curves.reserve(config.B);
  report.mean_curve.assign(N, 0.0);
  for (const auto& run : runs) {
    report.per_run_curves.push_back(run.curve);
    for (std::size_t k = 0; k < N; ++k) report.mean_curve[k] += run.curve[k];
    report.censoring_fraction_control += run.censoring_control;
    report.censoring_fraction_treated += run.censoring_treated;
    report.sigma2_cov_mean += run.sigma2_cov;
    report.resampled_runs += run.resamples;
  }
  const double b_count = static_cast<double>(config.B);
  for (double& v : report.mean_curve) v /= b_count;
  report.censoring_fraction_control /= b_count;
  report.censoring_fraction_treated /= b_count;
  report.sigma2_cov_mean /= b_count;

  report.pointwise_sd.assign(N, 0.0);
  if (config.B > 1) {
    for (const auto& run : runs)
      for (std::size_t k = 0; k < N; ++k) {
        const double d = run.curve[k] - report.mean_curve[k];
        report.pointwise_sd[k] += d * d;
      }
    for (double& v : report.pointwise_sd) v = std::sqrt(v / (b_count - 1.0));
  }

  if (with_oracle) {
    Rng rng(mix_seed(config.seed, detail::kOracleTag));
    report.oracle_curve = population_embedding_oracle(config, 0, 1, cal.grid, cal.time_kernel,
                                                      config.oracle_draws, rng);
  }
  return report;
}

inline StudyReport variability_study(const SimConfig& config) {
  return variability_study(config, calibrate_study(config));
}

struct LogLogFit {
  double slope = 0.0;      // gamma in y = C * x^(-gamma)
  double intercept = 0.0;  // log C
  double r_squared = 0.0;
};

/// OLS of log V on log n, reported as V = C * n^(-gamma).
inline LogLogFit fit_log_log(const std::vector<std::size_t>& sizes,
                             const std::vector<double>& values) {
  if (sizes.size() != values.size()) throw LengthMismatch(sizes.size(), values.size());
  if (sizes.size() < 2) throw std::invalid_argument("need at least 2 points to fit");
  const std::size_t k = sizes.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(values[i] > 0.0)) throw DataError("log-log fit needs positive values");
    const double x = std::log(static_cast<double>(sizes[i]));
    const double y = std::log(values[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double n = static_cast<double>(k);
  const double cov = sxy - sx * sy / n;
  const double var_x = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  if (var_x <= 0.0) throw DataError("log-log fit needs at least two distinct sizes");
  const double beta = cov / var_x;
  LogLogFit fit;
  fit.slope = -beta;
  fit.intercept = (sy - beta * sx) / n;
  fit.r_squared = var_y > 0.0 ? (cov * cov) / (var_x * var_y) : 1.0;
  return fit;
}

/// Convergence-rate experiment: per size, a variability study
/// on one shared calibration scale; then V = C * n^(-gamma) fitted on logs.
/// Only the log-linear structural family is implemented; linear_truth must be
/// true.
inline RateReport rate_experiment(const std::vector<std::size_t>& sizes, std::size_t B,
                                  std::uint64_t seed, bool linear_truth = true,
                                  const SimConfig& base = {}) {
  if (!linear_truth)
    throw std::invalid_argument("only the log-linear structural family is implemented");
  if (sizes.size() < 3) throw std::invalid_argument("need at least 3 sizes");
  if (B < 2) throw std::invalid_argument("need B >= 2 for a standard deviation");

  SimConfig root = base;
  root.seed = seed;
  root.B = B;
  const Calibration cal = calibrate_study(root);

  RateReport report;
  report.sample_sizes = sizes;
  report.B = B;
  report.seed = seed;
  report.sigma2_time = cal.time_kernel.sigma2;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    SimConfig cfg = root;
    cfg.n_control = cfg.n_treated = sizes[i];
    cfg.seed = mix_seed(seed, detail::kSizeTag, i);
    const StudyReport study = variability_study(cfg, cal, /*with_oracle=*/false);
    double v = 0.0;
    for (double s : study.pointwise_sd) v += s;
    report.V.push_back(v / static_cast<double>(study.pointwise_sd.size()));
    report.resampled_runs += study.resampled_runs;
  }
  const LogLogFit fit = fit_log_log(sizes, report.V);
  report.fitted_slope = fit.slope;
  report.fitted_intercept = fit.intercept;
  report.r_squared = fit.r_squared;
  return report;
}

}  // namespace cse
