#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/harness.hpp"

using namespace auctionmetrics;

namespace {

double brute_ks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  double d = 0.0;
  for (double x : pts) {
    const double fa = std::count_if(a.begin(), a.end(), [x](double v) { return v <= x; }) / double(a.size());
    const double fb = std::count_if(b.begin(), b.end(), [x](double v) { return v <= x; }) / double(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

ExperimentConfig small_config() {
  return experiment_config_from_json(json{{"name", "small"},
                                          {"model", "uniform2"},
                                          {"estimator", "fp-effective"},
                                          {"n", {500, 5000}},
                                          {"seeds", 3},
                                          {"seed_root", 4},
                                          {"metric", "kolmogorov"},
                                          {"support", {0.3, 1.0}},
                                          {"params", {{"p", 0.3}, {"gamma", 0.09}, {"eps", 0.04}}}});
}

}  // namespace

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("quantiles") {
  CHECK(quantile_of({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile_of({0.0, 10.0}, 0.9) == doctest::Approx(9.0));
  CHECK_THROWS_AS(quantile_of({}, 0.5), DomainError);
}

TEST_CASE("two-sample KS agrees with a brute-force count") {
  const std::vector<double> a{0.1, 0.4, 0.4, 0.9, 1.3}, b{0.2, 0.4, 0.5, 2.0};
  CHECK(two_sample_ks(a, b) == doctest::Approx(brute_ks(a, b)));
  CHECK(two_sample_ks_threshold(100, 100) == doctest::Approx(1.358 * std::sqrt(0.02)));
}

TEST_CASE("config validation") {
  json j{{"model", "uniform2"}, {"n", {1000, 100}}, {"seeds", 2}};
  CHECK_THROWS_AS(experiment_config_from_json(j), ParameterError);
  j["n"] = {100, 1000};
  j["seeds"] = 0;
  CHECK_THROWS_AS(experiment_config_from_json(j), ParameterError);
  j["seeds"] = 1;
  j["estimator"] = "nope";
  CHECK_THROWS_AS(experiment_config_from_json(j), ParameterError);
}

TEST_CASE("convergence sweep is deterministic and complete") {
  const ExperimentConfig c = small_config();
  const ExperimentReport a = run_convergence(c);
  CHECK(a.rows.size() == 2 * 3 * 2);
  for (const auto& r : a.rows) CHECK(r.status == "ok");
  CHECK(a.aggregates[1].median < a.aggregates[0].median);
  const ExperimentReport b = run_convergence(c);
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());
  CHECK(a.hash == config_hash(c));
  CHECK(a.hash.size() == 16);
}

TEST_CASE("a failing cell does not abort the sweep") {
  ExperimentConfig c = small_config();
  c.estimator = EstimatorKind::SpPartial;
  c.params = json{{"p", 0.5}, {"gamma", 0.5}, {"eps", 0.1}};
  c.n_schedule = {1, 4000};
  c.seeds = 1;
  const ExperimentReport r = run_convergence(c);
  REQUIRE(r.rows.size() == 4);
  // one query per pointwise estimate leaves some mean at zero for n = 1
  bool saw_error = false;
  for (const auto& row : r.rows) saw_error |= row.status == "error";
  CHECK(saw_error);
  CHECK(r.rows[2].status == "ok");
  CHECK(r.rows[3].status == "ok");
}

TEST_CASE("lower-bound experiment") {
  const LowerBoundReport r = run_lower_bound_experiment(3, 0.1, 0.2, 1000, 10);
  CHECK(r.kolmogorov >= 0.5);
  CHECK(r.scale_count == doctest::Approx(0.4));
  CHECK(r.exact_count == doctest::Approx(1000 * 0.82 * 0.0004));
  CHECK(r.per_trial.size() == 10);
  CHECK(lower_bound_to_json(r).at("kind") == "lower-bound");
}
