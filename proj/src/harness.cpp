#include "auctionmetrics/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "auctionmetrics/distance.hpp"
#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/fp_estimator.hpp"
#include "auctionmetrics/fp_value.hpp"
#include "auctionmetrics/lower_bound.hpp"
#include "auctionmetrics/random.hpp"
#include "auctionmetrics/simulate.hpp"
#include "auctionmetrics/sp_estimator.hpp"
#include "parallel.hpp"

#ifndef AUCTIONMETRICS_VERSION
#define AUCTIONMETRICS_VERSION "0.0.0"
#endif

namespace auctionmetrics {
namespace {

constexpr const char* kSchemaVersion = "1.0";

const std::pair<EstimatorKind, const char*> kEstimatorNames[] = {
    {EstimatorKind::FpEffective, "fp-effective"}, {EstimatorKind::FpFull, "fp-full"},
    {EstimatorKind::FpDensity, "fp-density"},     {EstimatorKind::FpValue, "fp-value"},
    {EstimatorKind::FpPartial, "fp-partial"},     {EstimatorKind::Sp, "sp"},
    {EstimatorKind::SpPartial, "sp-partial"},
};

const std::pair<MetricKind, const char*> kMetricNames[] = {
    {MetricKind::Kolmogorov, "kolmogorov"},
    {MetricKind::Levy, "levy"},
    {MetricKind::Wasserstein1, "wasserstein1"},
    {MetricKind::L1Density, "L1-density"},
};

double param(const json& p, const char* key, double fallback) {
  if (p.contains(key) && p.at(key).is_number()) return p.at(key).get<double>();
  return fallback;
}

std::optional<double> opt_param(const json& p, const char* key) {
  if (p.contains(key) && p.at(key).is_number()) return p.at(key).get<double>();
  return std::nullopt;
}

double require(std::optional<double> v, const char* what) {
  if (!v) throw ParameterError(std::string("missing parameter '") + what + "'");
  return *v;
}

double measure(MetricKind kind, const PiecewiseCdf& est, const PiecewiseCdf& truth, double lo) {
  switch (kind) {
    case MetricKind::Kolmogorov: return sup_distance(est, truth, lo, 1.0);
    case MetricKind::Levy: return levy(est, truth);
    case MetricKind::Wasserstein1: return wasserstein1(est, truth);
    case MetricKind::L1Density: break;
  }
  throw ParameterError("L1-density applies only to the fp-density estimator");
}

struct CellResult {
  std::vector<double> errors;
  json diagnostics = json::object();
};

double product_at(const std::vector<PiecewiseCdf>& cdfs, double x) {
  double prod = 1.0;
  for (const auto& c : cdfs) prod *= c(x);
  return prod;
}

CellResult run_cell(const ExperimentConfig& c, const AuctionModel& model,
                    const std::vector<PiecewiseCdf>& truth, std::size_t n, std::uint64_t seed) {
  const json& p = c.params;
  const double lo = c.support_lo;
  const std::size_t k = model.k();
  CellResult out;
  auto score_all = [&](const std::vector<PiecewiseCdf>& est, const std::vector<PiecewiseCdf>& ref) {
    for (std::size_t i = 0; i < k; ++i) out.errors.push_back(measure(c.metric, est[i], ref[i], lo));
  };

  switch (c.estimator) {
    case EstimatorKind::FpEffective:
    case EstimatorKind::FpDensity: {
      FpEstimatorConfig fc;
      fc.p = param(p, "p", lo);
      fc.gamma = param(p, "gamma", product_at(truth, fc.p));
      fc.eps = param(p, "eps", std::min(0.05, fc.gamma / 2.0));
      fc.delta = param(p, "delta", 0.05);
      const FpEstimate est = estimate_bid_cdf_effective(simulate_fp(model, n, seed), fc);
      out.diagnostics = {{"clip_rate", est.clip_rate}, {"n", est.n}};
      if (c.estimator == EstimatorKind::FpEffective) {
        score_all(est.cdfs, truth);
        break;
      }
      const double h = require(opt_param(p, "h"), "h");
      for (std::size_t i = 0; i < k; ++i) {
        const auto* dm = model.bid_dists()[i].as_density();
        if (!dm) throw ParameterError("fp-density needs bidders given as density models");
        const PiecewiseFunction fhat = estimate_density(est.cdfs[i], h, fc.p);
        out.errors.push_back(l1_distance(fhat, dm->density_function(), fc.p, 1.0 - h));
      }
      break;
    }
    case EstimatorKind::FpFull: {
      const double lambda = param(p, "lambda", model.metadata().lambda.value_or(1.0));
      const FpEstimate est = estimate_bid_cdf_full(simulate_fp(model, n, seed), lambda,
                                                   param(p, "eps", 0.2), param(p, "delta", 0.05));
      out.diagnostics = {{"clip_rate", est.clip_rate}, {"n", est.n}, {"gamma", est.gamma}};
      score_all(est.cdfs, truth);
      break;
    }
    case EstimatorKind::FpValue: {
      if (!model.has_values()) throw ParameterError("fp-value needs a model with value distributions");
      ValueEstimatorConfig vc;
      vc.p = param(p, "p", vc.p);
      vc.gamma = param(p, "gamma", vc.gamma);
      vc.eps = param(p, "eps", vc.eps);
      vc.delta = param(p, "delta", vc.delta);
      vc.zeta = param(p, "zeta", model.metadata().zeta.value_or(1.0));
      vc.lipschitz = opt_param(p, "lipschitz");
      vc.d = opt_param(p, "d");
      vc.grid_spacing = opt_param(p, "grid_spacing");
      const ValueEstimate est = estimate_value_cdf_effective(simulate_fp(model, n, seed), vc);
      std::vector<PiecewiseCdf> ref;
      for (const auto& v : model.value_dists()) ref.push_back(v.to_piecewise_cdf());
      json d = json::array();
      for (const auto& g : est.diagnostics) {
        d.push_back({{"eps0_used", g.eps0_used}, {"eps1_used", g.eps1_used},
                     {"isotonic_repairs", g.isotonic_repairs}});
      }
      out.diagnostics = {{"bidders", d}};
      score_all(est.cdfs, ref);
      break;
    }
    case EstimatorKind::FpPartial: {
      FpPartialConfig fc;
      fc.p = param(p, "p", fc.p);
      fc.gamma = param(p, "gamma", fc.gamma);
      fc.eps = param(p, "eps", fc.eps);
      fc.delta = param(p, "delta", fc.delta);
      fc.lipschitz = param(p, "lipschitz", fc.lipschitz);
      fc.search_samples = n;
      fc.eval_samples = n;
      SimulatedFpOracle oracle(model, seed);
      const FpPartialEstimate est = fp_partial_estimate(oracle, fc);
      out.diagnostics = {{"oracle_calls", est.oracle_calls}, {"grid_points", est.grid_points}};
      score_all(est.cdfs, truth);
      break;
    }
    case EstimatorKind::Sp: {
      const double alpha = param(p, "alpha", model.metadata().alpha.value_or(0.5));
      const double eta = param(p, "eta", model.metadata().eta.value_or(2.0));
      const double eps = param(p, "eps", 0.1);
      SpParams sp = desk_params(n, alpha, eta, eps);
      sp.theta = param(p, "theta", sp.theta);
      sp.nu = param(p, "nu", std::min(sp.nu, sp.theta / 2.0));
      sp.micro_delta = param(p, "micro_delta", sp.micro_delta);
      if (auto it = opt_param(p, "fp_iters")) sp.fp_iters = static_cast<std::size_t>(*it);
      if (auto it = opt_param(p, "max_refinements")) sp.max_refinements = static_cast<std::size_t>(*it);
      const SpEstimate est = estimate_sp(simulate_sp(model, n, seed), alpha, eta, eps, sp);
      const auto& d = est.diagnostics;
      out.diagnostics = {
          {"T", d.T},
          {"total_micro_points", d.total_micro_points},
          {"max_gamma", d.gamma_per_interval.empty()
                            ? 0.0
                            : *std::max_element(d.gamma_per_interval.begin(), d.gamma_per_interval.end())},
          {"max_contraction", d.contraction_samples.empty()
                                  ? 0.0
                                  : *std::max_element(d.contraction_samples.begin(),
                                                      d.contraction_samples.end())},
          {"box_violations", d.box_violations},
          {"refined_intervals", d.refined_intervals},
          {"isotonic_repair_total", d.isotonic_repair_total}};
      score_all(est.cdfs, truth);
      break;
    }
    case EstimatorKind::SpPartial: {
      SpPartialConfig sc;
      sc.p = param(p, "p", sc.p);
      sc.gamma = param(p, "gamma", sc.gamma);
      sc.eps = param(p, "eps", sc.eps);
      sc.delta = param(p, "delta", sc.delta);
      sc.lipschitz = param(p, "lipschitz", sc.lipschitz);
      sc.pointwise_samples = n;
      SimulatedSpOracle oracle(model, seed);
      const SpPartialEstimate est = sp_partial_estimate(oracle, sc);
      out.diagnostics = {{"oracle_calls", est.oracle_calls}, {"search_steps", est.search_steps}};
      score_all(est.cdfs, truth);
      break;
    }
  }
  return out;
}

}  // namespace

EstimatorKind estimator_kind_from(const std::string& name) {
  for (const auto& [k, s] : kEstimatorNames) {
    if (name == s) return k;
  }
  throw ParameterError("unknown estimator '" + name + "'");
}

std::string to_string(EstimatorKind kind) {
  for (const auto& [k, s] : kEstimatorNames) {
    if (k == kind) return s;
  }
  return "?";
}

MetricKind metric_kind_from(const std::string& name) {
  for (const auto& [k, s] : kMetricNames) {
    if (name == s) return k;
  }
  throw ParameterError("unknown metric '" + name + "'");
}

std::string to_string(MetricKind kind) {
  for (const auto& [k, s] : kMetricNames) {
    if (k == kind) return s;
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (n_schedule.empty()) throw ParameterError("n schedule is empty");
  for (std::size_t t = 0; t < n_schedule.size(); ++t) {
    if (n_schedule[t] == 0) throw ParameterError("sample sizes must be positive");
    if (t > 0 && n_schedule[t] <= n_schedule[t - 1]) throw ParameterError("n schedule must be ascending");
  }
  if (seeds < 1) throw ParameterError("seeds must be >= 1");
  if (!(support_lo >= 0.0 && support_lo < 1.0)) throw ParameterError("support must start in [0,1)");
  if ((metric == MetricKind::L1Density) != (estimator == EstimatorKind::FpDensity)) {
    throw ParameterError("L1-density is the metric for fp-density and only for it");
  }
}

ExperimentConfig experiment_config_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ParameterError("experiment config must be a JSON object");
  ExperimentConfig c;
  c.name = j.value("name", std::string("experiment"));
  if (!j.contains("model")) throw ParameterError("experiment config needs 'model'");
  c.model = j.at("model");
  if (c.model.is_object() && c.model.contains("path")) {
    const auto path = std::filesystem::path(base_dir) / c.model.at("path").get<std::string>();
    c.model = read_json(path.string());
  }
  c.estimator = estimator_kind_from(j.value("estimator", std::string("fp-effective")));
  c.n_schedule = j.value("n", std::vector<std::size_t>{});
  c.seeds = j.value("seeds", std::size_t{1});
  c.seed_root = j.value("seed_root", std::uint64_t{1});
  c.metric = metric_kind_from(j.value("metric", std::string("kolmogorov")));
  if (j.contains("support")) {
    const auto s = j.at("support").get<std::vector<double>>();
    if (s.size() != 2 || s[1] != 1.0) throw ParameterError("support must be [p, 1]");
    c.support_lo = s[0];
  }
  c.params = j.value("params", json::object());
  c.validate();
  return c;
}

json experiment_config_to_json(const ExperimentConfig& c) {
  return json{{"name", c.name},
              {"model", c.model},
              {"estimator", to_string(c.estimator)},
              {"n", c.n_schedule},
              {"seeds", c.seeds},
              {"seed_root", c.seed_root},
              {"metric", to_string(c.metric)},
              {"support", {c.support_lo, 1.0}},
              {"params", c.params}};
}

AuctionModel resolve_model(const json& ref) {
  if (ref.is_string()) {
    const std::string id = ref.get<std::string>();
    if (id.rfind("uniform", 0) == 0 && id.size() > 7) {
      const std::size_t k = std::stoul(id.substr(7));
      return uniform_model(k);
    }
    throw ParameterError("unknown builtin model '" + id + "'");
  }
  return model_from_json(ref);
}

std::string config_hash(const ExperimentConfig& config) {
  return fnv1a_hex(experiment_config_to_json(config).dump());
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double quantile_of(std::vector<double> xs, double q) {
  if (xs.empty()) throw DomainError("quantile of an empty list");
  std::sort(xs.begin(), xs.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

ExperimentReport run_convergence(const ExperimentConfig& config) {
  config.validate();
  const AuctionModel model = resolve_model(config.model);
  const std::vector<PiecewiseCdf> truth = model.bid_cdfs();
  const std::size_t k = model.k();
  const std::size_t cells = config.n_schedule.size() * config.seeds;

  ExperimentReport rep;
  rep.name = config.name;
  rep.config = config;
  rep.hash = config_hash(config);
  rep.code_version = AUCTIONMETRICS_VERSION;
  rep.rows.resize(cells * k);
  rep.diagnostics.assign(cells, json::object());

  const RandomStream root(config.seed_root);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t cell = next++; cell < cells; cell = next++) {
      const std::size_t ni = cell / config.seeds, s = cell % config.seeds;
      const std::size_t n = config.n_schedule[ni];
      const std::uint64_t seed = root.split(n).split(s)();
      json diag{{"n", n}, {"seed", s}, {"cell_seed", seed}};
      std::vector<double> errors;
      std::string message;
      try {
        CellResult r = run_cell(config, model, truth, n, seed);
        errors = std::move(r.errors);
        diag["estimator"] = std::move(r.diagnostics);
      } catch (const std::exception& e) {
        message = e.what();
        diag["error"] = message;
      }
      for (std::size_t i = 0; i < k; ++i) {
        ReportRow& row = rep.rows[cell * k + i];
        row.n = n;
        row.seed = s;
        row.bidder = i + 1;
        if (errors.size() == k) {
          row.error = errors[i];
          row.status = "ok";
        } else {
          row.status = "error";
          row.message = message;
        }
      }
      rep.diagnostics[cell] = std::move(diag);
    }
  };
  const std::size_t workers = std::min(detail::worker_count(), cells);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (std::size_t ni = 0; ni < config.n_schedule.size(); ++ni) {
    NAggregate agg;
    agg.n = config.n_schedule[ni];
    std::vector<double> errs;
    for (std::size_t r = ni * config.seeds * k; r < (ni + 1) * config.seeds * k; ++r) {
      if (rep.rows[r].error) errs.push_back(*rep.rows[r].error);
    }
    agg.ok = errs.size();
    if (!errs.empty()) {
      agg.median = quantile_of(errs, 0.5);
      agg.p90 = quantile_of(errs, 0.9);
    }
    rep.aggregates.push_back(agg);
  }
  return rep;
}

json report_to_json(const ExperimentReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j{{"n", row.n}, {"seed", row.seed}, {"bidder", row.bidder}, {"status", row.status}};
    j["error"] = row.error ? json(*row.error) : json(nullptr);
    if (!row.message.empty()) j["message"] = row.message;
    rows.push_back(j);
  }
  json aggs = json::array();
  for (const auto& a : r.aggregates) {
    json j{{"n", a.n}, {"ok", a.ok}};
    j["median"] = a.ok ? json(a.median) : json(nullptr);
    j["p90"] = a.ok ? json(a.p90) : json(nullptr);
    aggs.push_back(j);
  }
  return json{{"schema_version", kSchemaVersion},
              {"kind", "convergence"},
              {"name", r.name},
              {"config", experiment_config_to_json(r.config)},
              {"provenance",
               {{"config_hash", r.hash}, {"seed_root", r.config.seed_root}, {"code_version", r.code_version}}},
              {"rows", rows},
              {"aggregates", aggs},
              {"diagnostics", r.diagnostics}};
}

void write_report_csv(const std::string& path, const ExperimentReport& r) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << "n,seed,bidder,error,status,message\n";
  for (const auto& row : r.rows) {
    std::string msg = row.message;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    f << row.n << ',' << row.seed << ',' << row.bidder << ','
      << (row.error ? format_real(*row.error) : std::string()) << ',' << row.status << ",\"" << msg
      << "\"\n";
  }
  if (!f) throw IoError("write to '" + path + "' failed");
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double two_sample_ks_threshold(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) return std::numeric_limits<double>::infinity();
  const double a = static_cast<double>(n), b = static_cast<double>(m);
  return 1.358 * std::sqrt((a + b) / (a * b));
}

LowerBoundReport run_lower_bound_experiment(std::size_t k, double eps, double lambda,
                                            std::size_t n, std::size_t trials,
                                            std::uint64_t seed) {
  if (n == 0 || trials == 0) throw ParameterError("n and trials must be positive");
  const auto [a, b] = lower_bound_fixture(k, eps, lambda);
  LowerBoundReport rep;
  rep.k = k;
  rep.eps = eps;
  rep.lambda = lambda;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  const PiecewiseCdf f1 = a.bid_dists()[0].to_piecewise_cdf();
  const PiecewiseCdf f1p = b.bid_dists()[0].to_piecewise_cdf();
  rep.kolmogorov = kolmogorov(f1, f1p);
  rep.wasserstein1 = wasserstein1(f1, f1p);
  const double q = std::pow(lambda * eps, static_cast<double>(k - 1));
  const double nn = static_cast<double>(n);
  rep.scale_count = nn * q;
  rep.exact_count = nn * lower_bound_event_probability(k, eps, lambda);

  const RandomStream root(seed);
  double total = 0.0;
  std::size_t quiet = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const FpSampleSet sa = simulate_fp(a, n, root.split(t).split(0)());
    const FpSampleSet sb = simulate_fp(b, n, root.split(t).split(1)());
    LowerBoundTrial tr;
    std::vector<double> ea, eb;
    for (const auto& o : sa.obs) {
      if (o.y <= eps) ++tr.low_count_a; else ea.push_back(static_cast<double>(o.z) + o.y);
    }
    for (const auto& o : sb.obs) {
      if (o.y <= eps) ++tr.low_count_b; else eb.push_back(static_cast<double>(o.z) + o.y);
    }
    tr.ks = two_sample_ks(ea, eb);
    tr.threshold = two_sample_ks_threshold(ea.size(), eb.size());
    tr.indistinguishable = tr.ks <= tr.threshold;
    if (tr.indistinguishable) ++quiet;
    total += static_cast<double>(tr.low_count_a + tr.low_count_b);
    rep.per_trial.push_back(tr);
  }
  const double draws = 2.0 * static_cast<double>(trials);
  rep.mean_low_count = total / draws;
  rep.sigma_mean = std::sqrt(nn * q * (1.0 - q) / draws);
  rep.within_3sigma = std::abs(rep.mean_low_count - rep.scale_count) <= 3.0 * rep.sigma_mean;
  rep.indistinguishable_fraction = static_cast<double>(quiet) / static_cast<double>(trials);
  return rep;
}

json lower_bound_to_json(const LowerBoundReport& r) {
  json trials = json::array();
  for (const auto& t : r.per_trial) {
    trials.push_back({{"low_count_a", t.low_count_a},
                      {"low_count_b", t.low_count_b},
                      {"ks", t.ks},
                      {"threshold", t.threshold},
                      {"indistinguishable", t.indistinguishable}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"kind", "lower-bound"},
              {"k", r.k},
              {"eps", r.eps},
              {"lambda", r.lambda},
              {"n", r.n},
              {"trials", r.trials},
              {"seed", r.seed},
              {"kolmogorov", r.kolmogorov},
              {"wasserstein1", r.wasserstein1},
              {"scale_count", r.scale_count},
              {"exact_count", r.exact_count},
              {"mean_low_count", r.mean_low_count},
              {"sigma_mean", r.sigma_mean},
              {"within_3sigma", r.within_3sigma},
              {"indistinguishable_fraction", r.indistinguishable_fraction},
              {"per_trial", trials}};
}

}  // namespace auctionmetrics
