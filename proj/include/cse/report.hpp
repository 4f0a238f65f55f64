#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cse/embedding.hpp"
#include "cse/errors.hpp"
#include "cse/kernels.hpp"
#include "cse/simulate.hpp"
#include "cse/version.hpp"

namespace cse {

/// "%.17g": enough digits to round-trip any double through text.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// FNV-1a over the file bytes, hex-encoded; recorded in manifests so reruns
/// can assert they saw the same input.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    h = detail::fnv1a64(reinterpret_cast<const unsigned char*>(buf),
                        static_cast<std::size_t>(got), h);
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char out[20];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

/// Every output JSON embeds one of these: rerunning the subcommand with the
/// recorded config reproduces the outputs byte-for-byte, duration aside.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config;  // all flags, defaults materialized
  std::string input_digest;
  std::uint64_t seed = 0;
  bool has_seed = false;
  double duration_seconds = 0.0;
};

inline nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j{{"subcommand", m.subcommand},
                   {"config", m.config},
                   {"version", CSE_VERSION_STRING},
                   {"duration_seconds", m.duration_seconds}};
  if (!m.input_digest.empty()) j["input_digest"] = m.input_digest;
  if (m.has_seed) j["seed"] = m.seed;
  return j;
}

inline nlohmann::json to_json(const SimConfig& c) {
  return nlohmann::json{{"n_control", c.n_control},
                        {"n_treated", c.n_treated},
                        {"c0", c.c0},
                        {"c1", c.c1},
                        {"treated_mean_shift", c.treated_mean_shift},
                        {"intercept_treated", c.intercept_treated},
                        {"event_noise_sd", c.event_noise_sd},
                        {"censor_noise_sd", c.censor_noise_sd},
                        {"seed", c.seed},
                        {"B", c.B},
                        {"grid_size", c.grid_size},
                        {"oracle_draws", c.oracle_draws},
                        {"calibration_draws", c.calibration_draws},
                        {"grid_lo_quantile", c.grid_lo_quantile},
                        {"grid_hi_quantile", c.grid_hi_quantile},
                        {"threads", c.threads},
                        {"epsilon_rule",
                         c.ridge.rule == RidgeSolveConfig::Rule::fixed ? "fixed" : "n_power"},
                        {"epsilon", c.ridge.epsilon},
                        {"epsilon_constant", c.ridge.constant},
                        {"epsilon_exponent", c.ridge.exponent}};
}

inline nlohmann::json to_json(const StudyReport& r) {
  return nlohmann::json{{"config", to_json(r.config)},
                        {"grid", r.grid},
                        {"per_run_curves", r.per_run_curves},
                        {"mean_curve", r.mean_curve},
                        {"pointwise_sd", r.pointwise_sd},
                        {"oracle_curve", r.oracle_curve},
                        {"censoring_fraction_control", r.censoring_fraction_control},
                        {"censoring_fraction_treated", r.censoring_fraction_treated},
                        {"sigma2_time", r.sigma2_time},
                        {"sigma2_cov_mean", r.sigma2_cov_mean},
                        {"epsilon", r.epsilon},
                        {"resampled_runs", r.resampled_runs}};
}

inline nlohmann::json to_json(const RateReport& r) {
  return nlohmann::json{{"sample_sizes", r.sample_sizes},
                        {"V", r.V},
                        {"gamma", r.fitted_slope},
                        {"intercept", r.fitted_intercept},
                        {"r_squared", r.r_squared},
                        {"B", r.B},
                        {"seed", r.seed},
                        {"sigma2_time", r.sigma2_time},
                        {"resampled_runs", r.resampled_runs}};
}

/// Write text to a path, or to stdout when path is "-".
inline void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

/// (t, value, curve_label) rows for a set of curves sharing a grid.
inline std::string curves_csv(const std::vector<const EmbeddingCurve*>& curves) {
  std::string csv = "t,value,curve_label\n";
  for (const EmbeddingCurve* c : curves)
    for (std::size_t k = 0; k < c->grid.size(); ++k)
      csv += format_double(c->grid[k]) + "," + format_double(c->grid_values[k]) + "," +
             c->label + "\n";
  return csv;
}

/// Study dump: per-run rows labelled by run index, then mean/oracle/sd rows.
inline std::string study_csv(const StudyReport& r) {
  std::string csv = "t,curve,value\n";
  for (std::size_t b = 0; b < r.per_run_curves.size(); ++b)
    for (std::size_t k = 0; k < r.grid.size(); ++k)
      csv += format_double(r.grid[k]) + "," + std::to_string(b) + "," +
             format_double(r.per_run_curves[b][k]) + "\n";
  auto emit = [&](const char* name, const std::vector<double>& v) {
    for (std::size_t k = 0; k < v.size(); ++k)
      csv += format_double(r.grid[k]) + "," + name + "," + format_double(v[k]) + "\n";
  };
  emit("mean", r.mean_curve);
  emit("oracle", r.oracle_curve);
  emit("sd", r.pointwise_sd);
  return csv;
}

inline std::string rate_csv(const RateReport& r) {
  std::string csv = "n,V\n";
  for (std::size_t i = 0; i < r.sample_sizes.size(); ++i)
    csv += std::to_string(r.sample_sizes[i]) + "," + format_double(r.V[i]) + "\n";
  return csv;
}

}  // namespace cse
