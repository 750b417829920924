#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "auctionmetrics/auction_model.hpp"
#include "auctionmetrics/io.hpp"

namespace auctionmetrics {

enum class EstimatorKind { FpEffective, FpFull, FpDensity, FpValue, FpPartial, Sp, SpPartial };
enum class MetricKind { Kolmogorov, Levy, Wasserstein1, L1Density };

EstimatorKind estimator_kind_from(const std::string& name);
std::string to_string(EstimatorKind kind);
MetricKind metric_kind_from(const std::string& name);
std::string to_string(MetricKind kind);

struct ExperimentConfig {
  std::string name;
  json model;  // builtin id string ("uniform2") or an inline model object
  EstimatorKind estimator = EstimatorKind::FpEffective;
  std::vector<std::size_t> n_schedule;
  std::size_t seeds = 1;
  std::uint64_t seed_root = 1;
  MetricKind metric = MetricKind::Kolmogorov;
  double support_lo = 0.0;  // errors are measured on [support_lo, 1]
  json params = json::object();

  /// Throws ParameterError unless the schedule is ascending and seeds >= 1.
  void validate() const;
};

/// Parses a sweep config. A "model" given as {"path": ...} is resolved relative
/// to `base_dir` and inlined.
ExperimentConfig experiment_config_from_json(const json& j, const std::string& base_dir = ".");
json experiment_config_to_json(const ExperimentConfig& config);

/// "uniformK" or an inline model object.
AuctionModel resolve_model(const json& ref);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view text);
/// fnv1a_hex of the config's canonical JSON dump.
std::string config_hash(const ExperimentConfig& config);

struct ReportRow {
  std::size_t n = 0;
  std::size_t seed = 0;
  std::size_t bidder = 0;  // 1-based
  std::optional<double> error;
  std::string status;  // "ok" or "error"
  std::string message;
};

struct NAggregate {
  std::size_t n = 0;
  std::size_t ok = 0;
  double median = 0.0;
  double p90 = 0.0;
};

struct ExperimentReport {
  std::string name;
  ExperimentConfig config;
  std::vector<ReportRow> rows;       // ordered by (n, seed, bidder)
  std::vector<NAggregate> aggregates;
  std::vector<json> diagnostics;     // one per (n, seed) cell
  std::string hash;
  std::string code_version;
};

/// simulate -> estimate -> metric against ground truth for each (n, seed) cell,
/// in a work pool. Estimator failures are recorded in their cell.
ExperimentReport run_convergence(const ExperimentConfig& config);

json report_to_json(const ExperimentReport& report);
/// n,seed,bidder,error,status,message
void write_report_csv(const std::string& path, const ExperimentReport& report);

/// Linear-interpolated empirical quantile, q in [0,1].
double quantile_of(std::vector<double> xs, double q);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double two_sample_ks(std::vector<double> a, std::vector<double> b);
/// 1.358 sqrt((n + m) / (n m)), the asymptotic 95% critical value.
double two_sample_ks_threshold(std::size_t n, std::size_t m);

struct LowerBoundTrial {
  std::size_t low_count_a = 0;  // #{Y <= eps} under the first instance
  std::size_t low_count_b = 0;
  double ks = 0.0;
  double threshold = 0.0;
  bool indistinguishable = true;
};

struct LowerBoundReport {
  std::size_t k = 0;
  double eps = 0.0;
  double lambda = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double kolmogorov = 0.0;
  double wasserstein1 = 0.0;
  double scale_count = 0.0;    // n (lambda eps)^{k-1}
  double exact_count = 0.0;    // n Pr(Y <= eps)
  double mean_low_count = 0.0;
  double sigma_mean = 0.0;     // binomial sd of the trial mean at the analytic scale
  bool within_3sigma = false;
  double indistinguishable_fraction = 0.0;
  std::vector<LowerBoundTrial> per_trial;
};

/// Samples both lower-bound instances; the two-sample test compares the
/// encodings Z + Y of the observations with Y > eps.
LowerBoundReport run_lower_bound_experiment(std::size_t k, double eps, double lambda,
                                            std::size_t n, std::size_t trials,
                                            std::uint64_t seed = 7);
json lower_bound_to_json(const LowerBoundReport& report);

}  // namespace auctionmetrics
