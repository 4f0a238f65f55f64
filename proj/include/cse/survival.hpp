#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "cse/dataset.hpp"
#include "cse/errors.hpp"

namespace cse {

/// Right-continuous piecewise-constant function on (0, inf): value is
/// initial_value on [0, jump_times[0]) and values_after[k] on
/// [jump_times[k], jump_times[k+1]).
class StepFunction {
 public:
  StepFunction(double initial_value, std::vector<double> jump_times,
               std::vector<double> values_after)
      : initial_value_(initial_value),
        jump_times_(std::move(jump_times)),
        values_after_(std::move(values_after)) {
    if (jump_times_.size() != values_after_.size())
      throw LengthMismatch(jump_times_.size(), values_after_.size());
    for (std::size_t k = 0; k < jump_times_.size(); ++k) {
      if (!(jump_times_[k] > 0.0))
        throw DataError("step function jump times must be positive");
      if (k > 0 && !(jump_times_[k] > jump_times_[k - 1]))
        throw DataError("step function jump times must be strictly increasing");
    }
  }

  static StepFunction constant(double value) { return StepFunction(value, {}, {}); }

  /// f(t), right-continuous: the value at a jump time is the post-jump value.
  double evaluate(double t) const {
    const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
    if (it == jump_times_.begin()) return initial_value_;
    return values_after_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
  }

  /// lim_{s -> t-} f(s): the value on the interval strictly left of t.
  double evaluate_left(double t) const {
    const auto it = std::lower_bound(jump_times_.begin(), jump_times_.end(), t);
    if (it == jump_times_.begin()) return initial_value_;
    return values_after_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
  }

  double initial_value() const { return initial_value_; }
  const std::vector<double>& jump_times() const { return jump_times_; }
  const std::vector<double>& values_after() const { return values_after_; }

 private:
  double initial_value_;
  std::vector<double> jump_times_;
  std::vector<double> values_after_;
};

inline double evaluate_left(const StepFunction& f, double t) { return f.evaluate_left(t); }

namespace detail {

struct TimeCounts {
  double time;
  std::size_t events;     // d_t
  std::size_t censored;   // c_t
  std::size_t at_risk;    // r_t = #{T_i >= t}
};

inline std::vector<TimeCounts> tally(const std::vector<double>& times,
                                     const std::vector<int>& events) {
  const std::size_t n = times.size();
  if (n == 0) throw EmptyInput("no observations");
  if (events.size() != n) throw LengthMismatch(n, events.size());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(times[i] > 0.0) || !std::isfinite(times[i])) throw NonPositiveTime(i + 1);
    if (events[i] != 0 && events[i] != 1) throw NonBinaryIndicator(i + 1, "event");
    order[i] = i;
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<TimeCounts> counts;
  std::size_t at_risk = n;
  for (std::size_t k = 0; k < n;) {
    const double t = times[order[k]];
    std::size_t d = 0, c = 0;
    while (k < n && times[order[k]] == t) {
      if (events[order[k]]) ++d; else ++c;
      ++k;
    }
    counts.push_back({t, d, c, at_risk});
    at_risk -= d + c;
  }
  return counts;
}

}  // namespace detail

/// Product-limit survival estimate: S(t) = prod_{s <= t, d_s > 0} (1 - d_s/r_s).
/// At tied times events are taken to occur just before censorings, so censored
/// units at t stay in the risk set for the event jump at t.
inline StepFunction kaplan_meier(const std::vector<double>& times,
                                 const std::vector<int>& events) {
  std::vector<double> jumps, values;
  double s = 1.0;
  for (const auto& tc : detail::tally(times, events)) {
    if (tc.events == 0) continue;
    s *= 1.0 - static_cast<double>(tc.events) / static_cast<double>(tc.at_risk);
    jumps.push_back(tc.time);
    values.push_back(s);
  }
  return StepFunction(1.0, std::move(jumps), std::move(values));
}

/// Censoring survival estimate G: the product-limit estimator with the roles
/// flipped. The same tie rule applies on the original roles, so the risk set
/// for the censoring jump at t excludes the events at t:
/// G(t) = prod_{s <= t, c_s > 0} (1 - c_s/(r_s - d_s)).
/// Coincides with kaplan_meier(times, 1 - events) whenever no event/censoring
/// tie shares a time.
inline StepFunction reverse_kaplan_meier(const std::vector<double>& times,
                                         const std::vector<int>& events) {
  std::vector<double> jumps, values;
  double g = 1.0;
  for (const auto& tc : detail::tally(times, events)) {
    if (tc.censored == 0) continue;
    g *= 1.0 - static_cast<double>(tc.censored) /
                   static_cast<double>(tc.at_risk - tc.events);
    jumps.push_back(tc.time);
    values.push_back(g);
  }
  return StepFunction(1.0, std::move(jumps), std::move(values));
}

/// W_i = event_i / G(T_i-), the inverse-probability-of-censoring weight.
/// If G(T_i-) = 0 for an event (unreachable under the tie rule above, but
/// possible for an injected curve) the weight is capped at n and counted.
inline std::vector<double> ipcw_weights(const std::vector<double>& times,
                                        const std::vector<int>& events,
                                        const StepFunction& censor_survival,
                                        std::size_t* capped = nullptr) {
  const std::size_t n = times.size();
  if (events.size() != n) throw LengthMismatch(n, events.size());
  std::vector<double> w(n, 0.0);
  std::size_t capped_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!events[i]) continue;
    const double g = censor_survival.evaluate_left(times[i]);
    if (g <= 0.0) {
      w[i] = static_cast<double>(n);
      ++capped_count;
    } else {
      w[i] = 1.0 / g;
    }
  }
  if (capped) *capped = capped_count;
  return w;
}

/// One arm's data with its censoring-survival curve and IPCW weights.
struct WeightedArm {
  RightCensoredSample arm_data;
  StepFunction censor_survival;
  std::vector<double> weights;
  std::size_t capped_weights = 0;

  std::size_t size() const { return arm_data.size(); }
};

inline WeightedArm build_weighted_arm(RightCensoredSample arm_data) {
  if (arm_data.empty()) throw EmptyInput("empty arm");
  const std::vector<double> times = arm_data.times();
  const std::vector<int> events = arm_data.events();
  StepFunction g = reverse_kaplan_meier(times, events);
  std::size_t capped = 0;
  std::vector<double> w = ipcw_weights(times, events, g, &capped);
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; }))
    throw DegenerateCensoring();
  return WeightedArm{std::move(arm_data), std::move(g), std::move(w), capped};
}

}  // namespace cse
