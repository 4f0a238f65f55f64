#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "cse/rng.hpp"
#include "cse/survival.hpp"

namespace {

cse::RightCensoredSample make_arm(const std::vector<double>& times,
                                  const std::vector<int>& events) {
  cse::RightCensoredSample sample;
  sample.covariate_dim = 1;
  for (std::size_t i = 0; i < times.size(); ++i)
    sample.observations.push_back({times[i], events[i], 0, {0.0}});
  return sample;
}

}  // namespace

TEST_CASE("kaplan_meier matches the worked three-observation example") {
  const auto s = cse::kaplan_meier({2, 3, 5}, {1, 0, 1});
  REQUIRE(s.jump_times() == std::vector<double>{2, 5});
  CHECK(s.evaluate(1.0) == 1.0);
  CHECK(s.evaluate(2.0) == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s.evaluate(4.9) == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s.evaluate(5.0) == 0.0);
  CHECK(s.evaluate(100.0) == 0.0);
}

TEST_CASE("kaplan_meier with no events is identically one") {
  const auto s = cse::kaplan_meier({1, 2, 3}, {0, 0, 0});
  CHECK(s.jump_times().empty());
  CHECK(s.evaluate(10.0) == 1.0);
}

TEST_CASE("kaplan_meier pools tied events") {
  const auto s = cse::kaplan_meier({1, 1, 2}, {1, 1, 1});
  REQUIRE(s.jump_times() == std::vector<double>{1, 2});
  CHECK(s.evaluate(0.5) == 1.0);
  CHECK(s.evaluate(1.0) == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s.evaluate(2.0) == 0.0);
}

TEST_CASE("kaplan_meier validates input") {
  CHECK_THROWS_AS(cse::kaplan_meier({}, {}), cse::EmptyInput);
  CHECK_THROWS_AS(cse::kaplan_meier({1, 2}, {1}), cse::LengthMismatch);
  CHECK_THROWS_AS(cse::kaplan_meier({-1}, {1}), cse::NonPositiveTime);
  CHECK_THROWS_AS(cse::kaplan_meier({1}, {2}), cse::NonBinaryIndicator);
}

TEST_CASE("reverse_kaplan_meier matches the worked example") {
  const auto g = cse::reverse_kaplan_meier({2, 3, 5}, {1, 0, 1});
  REQUIRE(g.jump_times() == std::vector<double>{3});
  CHECK(g.evaluate(2.9) == 1.0);
  CHECK(g.evaluate(3.0) == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(g.evaluate(100.0) == Catch::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("reverse_kaplan_meier with no censoring is identically one") {
  const auto g = cse::reverse_kaplan_meier({4, 1, 7}, {1, 1, 1});
  CHECK(g.jump_times().empty());
  CHECK(g.evaluate(8.0) == 1.0);
}

TEST_CASE("reverse_kaplan_meier on a single censored row drops to zero") {
  const auto g = cse::reverse_kaplan_meier({4}, {0});
  CHECK(g.evaluate(3.9) == 1.0);
  CHECK(g.evaluate(4.0) == 0.0);
}

TEST_CASE("evaluate_left takes the value strictly left of a jump") {
  const auto g = cse::reverse_kaplan_meier({2, 3, 5}, {1, 0, 1});
  CHECK(cse::evaluate_left(g, 3.0) == 1.0);
  CHECK(cse::evaluate_left(g, 3.5) == Catch::Approx(0.5).epsilon(1e-15));
  const auto ones = cse::StepFunction::constant(1.0);
  CHECK(cse::evaluate_left(ones, 42.0) == 1.0);
}

TEST_CASE("build_weighted_arm reproduces the hand-computed weights") {
  const auto arm = cse::build_weighted_arm(make_arm({2, 3, 5}, {1, 0, 1}));
  REQUIRE(arm.weights.size() == 3);
  CHECK(arm.weights[0] == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(arm.weights[1] == 0.0);
  CHECK(arm.weights[2] == Catch::Approx(2.0).epsilon(1e-15));
  CHECK(arm.capped_weights == 0);
}

TEST_CASE("build_weighted_arm with no censoring gives unit weights") {
  const auto arm = cse::build_weighted_arm(make_arm({3, 1, 4, 1, 5}, {1, 1, 1, 1, 1}));
  for (double w : arm.weights) CHECK(w == 1.0);
}

TEST_CASE("build_weighted_arm rejects an all-censored arm") {
  CHECK_THROWS_AS(cse::build_weighted_arm(make_arm({1, 2}, {0, 0})), cse::DegenerateCensoring);
}

TEST_CASE("ipcw_weights caps when an injected censor curve hits zero") {
  const cse::StepFunction dead(1.0, {1.0}, {0.0});
  std::size_t capped = 0;
  const auto w = cse::ipcw_weights({2, 3}, {1, 1}, dead, &capped);
  CHECK(capped == 2);
  CHECK(w == std::vector<double>{2.0, 2.0});
}

TEST_CASE("kaplan_meier output is a survival curve") {
  cse::Rng rng(8675309);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 30;
    std::vector<double> times;
    std::vector<int> events;
    for (std::size_t i = 0; i < n; ++i) {
      times.push_back(1.0 + static_cast<double>(rng.next_u64() % 6));  // force ties
      events.push_back(rng.uniform() < 0.6 ? 1 : 0);
    }
    const auto s = cse::kaplan_meier(times, events);
    CHECK(s.initial_value() == 1.0);
    double prev = 1.0;
    for (double v : s.values_after()) {
      CHECK(v <= prev + 1e-15);
      CHECK(v >= 0.0);
      prev = v;
    }
    // jump times of both estimators come from the observed times
    const auto g = cse::reverse_kaplan_meier(times, events);
    for (const auto* curve : {&s, &g})
      for (double t : curve->jump_times())
        CHECK(std::count(times.begin(), times.end(), t) > 0);
  }
}

TEST_CASE("weight mass matches the product-limit identity") {
  cse::Rng rng(424242);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 12;
    std::vector<double> times;
    std::vector<int> events;
    bool any_event = false;
    for (std::size_t i = 0; i < n; ++i) {
      times.push_back(1.0 + static_cast<double>(rng.next_u64() % 5));
      events.push_back(rng.uniform() < 0.5 ? 1 : 0);
      any_event |= events.back() == 1;
    }
    if (!any_event) events[0] = 1;
    const auto arm = cse::build_weighted_arm(make_arm(times, events));
    double mass = 0.0;
    for (double w : arm.weights) mass += w;
    mass /= static_cast<double>(n);
    const auto s = cse::kaplan_meier(times, events);
    const double beyond = s.values_after().empty() ? 1.0 : s.values_after().back();
    CHECK(mass == Catch::Approx(1.0 - beyond).margin(1e-12));
    // exact unity when the survival estimate is exhausted at the largest
    // observation (every unit there is an event; a censoring tied at the
    // maximum leaves mass behind under the events-first convention)
    const double tmax = *std::max_element(times.begin(), times.end());
    bool all_max_are_events = true;
    for (std::size_t i = 0; i < n; ++i)
      if (times[i] == tmax && events[i] == 0) all_max_are_events = false;
    if (all_max_are_events) CHECK(mass == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("reverse estimator equals the flipped estimator without mixed ties") {
  cse::Rng rng(777);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 15;
    std::vector<double> times;
    std::vector<int> events, flipped;
    for (std::size_t i = 0; i < n; ++i) {
      times.push_back(std::exp(rng.normal()));  // continuous: ties have measure zero
      events.push_back(rng.uniform() < 0.5 ? 1 : 0);
      flipped.push_back(1 - events.back());
    }
    const auto g = cse::reverse_kaplan_meier(times, events);
    const auto flip = cse::kaplan_meier(times, flipped);
    REQUIRE(g.jump_times() == flip.jump_times());
    for (std::size_t k = 0; k < g.values_after().size(); ++k)
      CHECK(g.values_after()[k] == Catch::Approx(flip.values_after()[k]).margin(1e-15));
    ++checked;
  }
  CHECK(checked == 400);
}

TEST_CASE("step function validates its shape") {
  CHECK_THROWS_AS(cse::StepFunction(1.0, {2.0, 1.0}, {0.5, 0.2}), cse::DataError);
  CHECK_THROWS_AS(cse::StepFunction(1.0, {1.0}, {}), cse::LengthMismatch);
  CHECK_THROWS_AS(cse::StepFunction(1.0, {-1.0}, {0.5}), cse::DataError);
}
