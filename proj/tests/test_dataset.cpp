#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "cse/dataset.hpp"
#include "cse/rng.hpp"

namespace {

struct TempCsv {
  std::string path;
  explicit TempCsv(const std::string& contents) {
    static int counter = 0;
    path = "cse_test_dataset_" + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << contents;
  }
  ~TempCsv() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_csv parses a two-row file") {
  TempCsv file("time,event,arm,x1\n2,1,0,0.5\n3,0,1,-1.0\n");
  const auto sample = cse::load_csv(file.path);
  REQUIRE(sample.size() == 2);
  REQUIRE(sample.covariate_dim == 1);
  CHECK(sample.observations[0].time == 2.0);
  CHECK(sample.observations[0].event == 1);
  CHECK(sample.observations[0].arm == 0);
  CHECK(sample.observations[0].covariates[0] == 0.5);
  CHECK(sample.observations[1].time == 3.0);
  CHECK(sample.observations[1].event == 0);
  CHECK(sample.observations[1].arm == 1);
  CHECK(sample.observations[1].covariates[0] == -1.0);
}

TEST_CASE("load_csv rejects non-positive time in strict mode") {
  TempCsv file("time,event,arm,x1\n-1,1,0,0.5\n");
  CHECK_THROWS_AS(cse::load_csv(file.path), cse::NonPositiveTime);
}

TEST_CASE("load_csv rejects invalid values in lenient mode too") {
  TempCsv bad_time("time,event,arm,x1\n-1,1,0,0.5\n");
  CHECK_THROWS_AS(cse::load_csv(bad_time.path, {}, cse::MissingPolicy::lenient),
                  cse::NonPositiveTime);
  TempCsv bad_event("time,event,arm,x1\n2,2,0,0.5\n");
  CHECK_THROWS_AS(cse::load_csv(bad_event.path, {}, cse::MissingPolicy::lenient),
                  cse::NonBinaryIndicator);
  TempCsv bad_cov("time,event,arm,x1\n2,1,0,inf\n");
  CHECK_THROWS_AS(cse::load_csv(bad_cov.path, {}, cse::MissingPolicy::lenient),
                  cse::NonFiniteCovariate);
}

TEST_CASE("lenient mode drops rows with missing cells and counts them") {
  TempCsv file(
      "time,event,arm,x1\n"
      "1,1,0,0.1\n2,0,0,0.2\n3,1,1,\n4,0,1,0.4\n5,1,0,0.5\n6,0,1,0.6\n");
  const auto sample = cse::load_csv(file.path, {}, cse::MissingPolicy::lenient);
  CHECK(sample.size() == 5);
  CHECK(sample.dropped_rows == 1);

  SECTION("strict mode rejects the same file") {
    CHECK_THROWS_AS(cse::load_csv(file.path), cse::NonFiniteCovariate);
  }
}

TEST_CASE("load_csv reports missing mapped columns") {
  TempCsv file("time,event,x1\n2,1,0.5\n");
  try {
    cse::load_csv(file.path);
    FAIL("expected MissingColumn");
  } catch (const cse::MissingColumn& e) {
    CHECK(e.column == "arm");
  }
}

TEST_CASE("load_csv maps custom column names and NA markers") {
  TempCsv file("T,D,Z,age,bmi\n10,1,0,60,NA\n20,0,1,70,22.5\n");
  cse::CsvSchema schema;
  schema.time_col = "T";
  schema.event_col = "D";
  schema.arm_col = "Z";
  schema.covariate_cols = {"age", "bmi"};
  const auto sample = cse::load_csv(file.path, schema, cse::MissingPolicy::lenient);
  REQUIRE(sample.size() == 1);
  CHECK(sample.dropped_rows == 1);
  CHECK(sample.covariate_names == std::vector<std::string>{"age", "bmi"});
  CHECK(sample.observations[0].covariates[1] == 22.5);
}

TEST_CASE("load_csv picks up default covariate columns x1..xp") {
  TempCsv file("arm,x2,x1,time,event\n0,5,7,2,1\n");
  const auto sample = cse::load_csv(file.path);
  REQUIRE(sample.covariate_dim == 2);
  CHECK(sample.observations[0].covariates == std::vector<double>{7.0, 5.0});
}

TEST_CASE("load_csv is deterministic on identical bytes") {
  const std::string body = "time,event,arm,x1\n2,1,0,0.5\n3,0,1,-1\n";
  TempCsv a(body), b(body);
  const auto sa = cse::load_csv(a.path);
  const auto sb = cse::load_csv(b.path);
  REQUIRE(sa.size() == sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    CHECK(sa.observations[i].time == sb.observations[i].time);
    CHECK(sa.observations[i].covariates == sb.observations[i].covariates);
  }
}

TEST_CASE("split_arms partitions and preserves order") {
  cse::RightCensoredSample sample;
  sample.covariate_dim = 1;
  for (int arm : {0, 1, 0})
    sample.observations.push_back({1.0 + arm, arm, arm, {0.0}});
  auto [control, treated] = cse::split_arms(sample);
  CHECK(control.size() == 2);
  CHECK(treated.size() == 1);
  CHECK(control.size() + treated.size() == sample.size());
}

TEST_CASE("split_arms flags an empty arm when both are demanded") {
  cse::RightCensoredSample sample;
  sample.covariate_dim = 1;
  sample.observations.push_back({1.0, 1, 0, {0.0}});
  try {
    cse::split_arms(sample);
    FAIL("expected EmptyArm");
  } catch (const cse::EmptyArm& e) {
    CHECK(e.arm == 1);
  }
  CHECK_NOTHROW(cse::split_arms(sample, /*require_both=*/false));
}

TEST_CASE("split_arms rejects an empty sample") {
  CHECK_THROWS_AS(cse::split_arms(cse::RightCensoredSample{}), cse::EmptyInput);
}

TEST_CASE("split_arms partition property on random samples") {
  cse::Rng rng(20240915);
  for (int trial = 0; trial < 200; ++trial) {
    cse::RightCensoredSample sample;
    sample.covariate_dim = 2;
    const std::size_t n = 1 + rng.next_u64() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      const int arm = rng.uniform() < 0.5 ? 0 : 1;
      sample.observations.push_back(
          {std::exp(rng.normal()), rng.uniform() < 0.5 ? 1 : 0, arm, {rng.normal(), rng.normal()}});
    }
    auto [control, treated] = cse::split_arms(sample, /*require_both=*/false);
    REQUIRE(control.size() + treated.size() == sample.size());
    for (const auto& o : control.observations) CHECK(o.arm == 0);
    for (const auto& o : treated.observations) CHECK(o.arm == 1);
  }
}

TEST_CASE("standardize_covariates centers and scales on the pooled sample") {
  cse::RightCensoredSample sample;
  sample.covariate_dim = 2;
  sample.observations.push_back({1.0, 1, 0, {2.0, 7.0}});
  sample.observations.push_back({2.0, 1, 1, {4.0, 7.0}});
  const auto out = cse::standardize_covariates(sample);
  CHECK(out.observations[0].covariates[0] == Catch::Approx(-1.0));
  CHECK(out.observations[1].covariates[0] == Catch::Approx(1.0));
  // constant column: centered only
  CHECK(out.observations[0].covariates[1] == 0.0);
  CHECK(out.observations[1].covariates[1] == 0.0);
}
