#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cse/errors.hpp"

namespace cse {

/// One right-censored observation: observed time, event indicator
/// (1 = event, 0 = censored), treatment arm, covariate vector.
struct Observation {
  double time = 0.0;
  int event = 0;
  int arm = 0;
  std::vector<double> covariates;
};

struct RightCensoredSample {
  std::vector<Observation> observations;
  std::size_t covariate_dim = 0;
  std::vector<std::string> covariate_names;  // empty or covariate_dim labels
  std::size_t dropped_rows = 0;              // rows skipped in lenient mode

  std::size_t size() const { return observations.size(); }
  bool empty() const { return observations.empty(); }

  std::vector<double> times() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.time);
    return out;
  }

  std::vector<int> events() const {
    std::vector<int> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.event);
    return out;
  }

  std::size_t event_count() const {
    std::size_t n = 0;
    for (const auto& o : observations) n += static_cast<std::size_t>(o.event);
    return n;
  }

  double censoring_fraction() const {
    if (observations.empty()) return 0.0;
    return 1.0 - static_cast<double>(event_count()) / static_cast<double>(size());
  }
};

/// Column-name mapping for load_csv. An empty covariate_cols selects the
/// default columns x1, x2, ... in consecutive order.
struct CsvSchema {
  std::string time_col = "time";
  std::string event_col = "event";
  std::string arm_col = "arm";
  std::vector<std::string> covariate_cols;
};

enum class MissingPolicy { strict, lenient };

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

inline bool is_missing_cell(const std::string& cell) {
  if (cell.empty()) return true;
  std::string low;
  low.reserve(cell.size());
  for (char c : cell) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return low == "na" || low == "nan" || low == "null";
}

inline bool parse_double(const std::string& cell, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(cell, &pos);
    return pos == cell.size();
  } catch (...) {
    return false;
  }
}

}  // namespace detail

/// Load a header-row CSV into a validated sample. Row order is preserved.
/// Lenient mode drops rows with missing cells (empty / NA / NaN / null) in any
/// mapped column and counts them in dropped_rows; strict mode (default) rejects
/// them. Values that are present but invalid are rejected in both modes.
inline RightCensoredSample load_csv(const std::string& path, const CsvSchema& schema = {},
                                    MissingPolicy policy = MissingPolicy::strict) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw EmptyInput("'" + path + "' is empty");
  const std::vector<std::string> header = detail::split_csv_line(line);

  auto column_index = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingColumn(name);
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t time_idx = column_index(schema.time_col);
  const std::size_t event_idx = column_index(schema.event_col);
  const std::size_t arm_idx = column_index(schema.arm_col);

  std::vector<std::string> cov_names = schema.covariate_cols;
  if (cov_names.empty()) {
    for (std::size_t k = 1;; ++k) {
      const std::string name = "x" + std::to_string(k);
      if (std::find(header.begin(), header.end(), name) == header.end()) break;
      cov_names.push_back(name);
    }
    if (cov_names.empty()) throw MissingColumn("x1");
  }
  std::vector<std::size_t> cov_idx;
  cov_idx.reserve(cov_names.size());
  for (const auto& name : cov_names) cov_idx.push_back(column_index(name));

  RightCensoredSample sample;
  sample.covariate_dim = cov_names.size();
  sample.covariate_names = cov_names;

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = detail::split_csv_line(line);

    auto cell_at = [&](std::size_t idx, const std::string& col) -> const std::string& {
      if (idx >= cells.size())
        throw DataError("row " + std::to_string(row) + ": too few cells for column '" + col + "'");
      return cells[idx];
    };

    bool missing = false;
    auto handle_missing = [&]() {
      if (policy == MissingPolicy::lenient) {
        missing = true;
        return true;
      }
      return false;
    };

    Observation obs;

    const std::string& tcell = cell_at(time_idx, schema.time_col);
    if (detail::is_missing_cell(tcell)) {
      if (!handle_missing()) throw NonPositiveTime(row);
    } else if (!detail::parse_double(tcell, obs.time) || !std::isfinite(obs.time) ||
               obs.time <= 0.0) {
      throw NonPositiveTime(row);
    }

    for (const auto& [idx, col] :
         {std::pair<std::size_t, const std::string*>{event_idx, &schema.event_col},
          std::pair<std::size_t, const std::string*>{arm_idx, &schema.arm_col}}) {
      const std::string& cell = cell_at(idx, *col);
      if (detail::is_missing_cell(cell)) {
        if (!handle_missing()) throw NonBinaryIndicator(row, *col);
        continue;
      }
      double v = 0.0;
      if (!detail::parse_double(cell, v) || (v != 0.0 && v != 1.0))
        throw NonBinaryIndicator(row, *col);
      (idx == event_idx ? obs.event : obs.arm) = static_cast<int>(v);
    }

    obs.covariates.resize(sample.covariate_dim, 0.0);
    for (std::size_t k = 0; k < cov_idx.size(); ++k) {
      const std::string& cell = cell_at(cov_idx[k], cov_names[k]);
      if (detail::is_missing_cell(cell)) {
        if (!handle_missing()) throw NonFiniteCovariate(row, cov_names[k]);
        continue;
      }
      double v = 0.0;
      if (!detail::parse_double(cell, v) || !std::isfinite(v))
        throw NonFiniteCovariate(row, cov_names[k]);
      obs.covariates[k] = v;
    }

    if (missing) {
      ++sample.dropped_rows;
      continue;
    }
    sample.observations.push_back(std::move(obs));
  }
  return sample;
}

/// Partition into (control = arm 0, treated = arm 1), preserving order.
/// With require_both (the default), an empty arm is an error.
inline std::pair<RightCensoredSample, RightCensoredSample> split_arms(
    const RightCensoredSample& sample, bool require_both = true) {
  if (sample.empty()) throw EmptyInput("cannot split an empty sample");
  RightCensoredSample control, treated;
  control.covariate_dim = treated.covariate_dim = sample.covariate_dim;
  control.covariate_names = treated.covariate_names = sample.covariate_names;
  for (const auto& o : sample.observations)
    (o.arm == 0 ? control : treated).observations.push_back(o);
  if (require_both) {
    if (control.empty()) throw EmptyArm(0);
    if (treated.empty()) throw EmptyArm(1);
  }
  return {std::move(control), std::move(treated)};
}

/// Center each covariate and scale it to unit variance, fitted on the pooled
/// sample. Constant columns are centered only. Opt-in; off by default.
inline RightCensoredSample standardize_covariates(RightCensoredSample sample) {
  const std::size_t n = sample.size();
  const std::size_t p = sample.covariate_dim;
  if (n == 0 || p == 0) return sample;
  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  for (const auto& o : sample.observations)
    for (std::size_t k = 0; k < p; ++k) mean[k] += o.covariates[k];
  for (std::size_t k = 0; k < p; ++k) mean[k] /= static_cast<double>(n);
  for (const auto& o : sample.observations)
    for (std::size_t k = 0; k < p; ++k) {
      const double d = o.covariates[k] - mean[k];
      sd[k] += d * d;
    }
  for (std::size_t k = 0; k < p; ++k) {
    sd[k] = std::sqrt(sd[k] / static_cast<double>(n));
    if (sd[k] == 0.0) sd[k] = 1.0;
  }
  for (auto& o : sample.observations)
    for (std::size_t k = 0; k < p; ++k) o.covariates[k] = (o.covariates[k] - mean[k]) / sd[k];
  return sample;
}

}  // namespace cse
