#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "auctionmetrics/distance.hpp"
#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/fp_estimator.hpp"
#include "auctionmetrics/fp_value.hpp"
#include "auctionmetrics/harness.hpp"
#include "auctionmetrics/io.hpp"
#include "auctionmetrics/simulate.hpp"
#include "auctionmetrics/sp_estimator.hpp"

using namespace auctionmetrics;

namespace {

enum Exit { kOk = 0, kValidation = 2, kEstimator = 3, kIo = 4 };

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(out, j);
  }
}

json cdf_list(const std::vector<PiecewiseCdf>& cdfs) {
  json list = json::array();
  for (const auto& c : cdfs) list.push_back(cdf_to_json(c));
  return list;
}

AuctionModel load_model(const std::string& ref) {
  if (ref.rfind("uniform", 0) == 0 && ref.find('.') == std::string::npos) return resolve_model(ref);
  return read_model(ref);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimate bid and value distributions from auction outcomes"};
  // estimate-fp-density takes --h, so help is long-form only
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  std::string out;

  // simulate
  std::string model_ref, format = "fp";
  std::size_t n = 0;
  std::uint64_t seed = 1;
  auto* sim = app.add_subcommand("simulate", "Draw auction outcomes from a model");
  sim->add_option("--model", model_ref, "Model JSON or builtin id (uniformK)")->required();
  sim->add_option("--format", format, "fp or sp")->check(CLI::IsMember({"fp", "sp"}));
  sim->add_option("--n", n, "Number of auctions")->required();
  sim->add_option("--seed", seed, "Seed");
  sim->add_option("--out", out, "Output CSV")->required();

  // estimate-fp
  std::string samples, mode = "effective";
  double p = 0.0, gamma = 1.0, eps = 0.05, delta = 0.05;
  std::optional<double> lambda;
  std::optional<std::size_t> k_opt;
  auto* efp = app.add_subcommand("estimate-fp", "Bid CDFs from first-price (Y, Z) samples");
  efp->add_option("--samples", samples, "Sample CSV with header y,z")->required();
  efp->add_option("--mode", mode, "effective or full")->check(CLI::IsMember({"effective", "full"}));
  efp->add_option("--p", p, "Lower end of the support");
  efp->add_option("--gamma", gamma, "Lower bound on prod_j F_j(p)");
  efp->add_option("--eps", eps, "Target accuracy");
  efp->add_option("--delta", delta, "Failure probability");
  efp->add_option("--lambda", lambda, "Growth constant (full mode)");
  efp->add_option("--k", k_opt, "Number of bidders (default: largest index)");
  efp->add_option("--out", out, "Output JSON (default stdout)");

  // estimate-fp-density
  std::string cdf_path;
  double h = 0.02;
  auto* efd = app.add_subcommand("estimate-fp-density", "Forward-difference densities from bid CDFs");
  efd->add_option("--cdf", cdf_path, "CDF JSON")->required();
  efd->add_option("--h", h, "Bandwidth")->required();
  efd->add_option("--p", p, "Lower end of the support");
  efd->add_option("--out", out, "Output JSON (default stdout)");

  // estimate-fp-partial
  double lipschitz = 1.0;
  std::optional<std::uint64_t> max_calls;
  auto* efpp = app.add_subcommand("estimate-fp-partial", "Bid CDFs from a first-price reserve oracle");
  efpp->add_option("--model", model_ref, "Model driving the simulated oracle")->required();
  efpp->add_option("--p", p);
  efpp->add_option("--gamma", gamma);
  efpp->add_option("--eps", eps);
  efpp->add_option("--delta", delta);
  efpp->add_option("--lipschitz", lipschitz);
  efpp->add_option("--seed", seed);
  efpp->add_option("--max-calls", max_calls, "Oracle call budget");
  efpp->add_option("--out", out);

  // estimate-values
  double zeta = 1.0;
  std::optional<double> value_lipschitz, margin;
  bool general = false;
  auto* ev = app.add_subcommand("estimate-values", "Value CDFs from first-price (Y, Z) samples");
  ev->add_option("--samples", samples)->required();
  ev->add_option("--p", p);
  ev->add_option("--gamma", gamma);
  ev->add_option("--eps", eps);
  ev->add_option("--delta", delta);
  ev->add_option("--zeta", zeta, "Value density cap");
  auto* lip_opt = ev->add_option("--lipschitz", value_lipschitz, "Bid CDF Lipschitz constant");
  auto* gen_opt = ev->add_flag("--general", general, "No Lipschitz assumption");
  lip_opt->excludes(gen_opt);
  ev->add_option("--d", margin, "Interior margin (general case)");
  ev->add_option("--k", k_opt);
  ev->add_option("--out", out);

  // estimate-sp
  double alpha = 0.5, eta = 2.0;
  std::optional<double> nu, theta, micro_delta;
  std::optional<std::size_t> fp_iters;
  std::string bound = "jacobian";
  auto* esp = app.add_subcommand("estimate-sp", "Bid CDFs from second-price (Y, W) samples");
  esp->add_option("--samples", samples, "Sample CSV with header y,w")->required();
  esp->add_option("--alpha", alpha, "Density lower bound")->required();
  esp->add_option("--eta", eta, "Density upper bound")->required();
  esp->add_option("--eps", eps)->required();
  esp->add_option("--nu", nu);
  esp->add_option("--theta", theta);
  esp->add_option("--micro-delta", micro_delta);
  esp->add_option("--fp-iters", fp_iters);
  esp->add_option("--bound", bound, "Contraction statistic: jacobian or paper")
      ->check(CLI::IsMember({"jacobian", "paper"}));
  esp->add_option("--k", k_opt);
  esp->add_option("--out", out);

  // estimate-sp-partial
  std::optional<std::size_t> n_pointwise;
  auto* espp = app.add_subcommand("estimate-sp-partial", "Bid CDFs from a second-price reserve oracle");
  espp->add_option("--model", model_ref)->required();
  espp->add_option("--p", p);
  espp->add_option("--gamma", gamma);
  espp->add_option("--eps", eps);
  espp->add_option("--delta", delta);
  espp->add_option("--lipschitz", lipschitz);
  espp->add_option("--n-pointwise", n_pointwise, "Queries per pointwise estimate");
  espp->add_option("--seed", seed);
  espp->add_option("--max-calls", max_calls);
  espp->add_option("--out", out);

  // sweep
  std::string config_path, csv_out;
  auto* sweep = app.add_subcommand("sweep", "Run a convergence experiment");
  sweep->add_option("--config", config_path, "Experiment JSON")->required();
  sweep->add_option("--out", out, "Report JSON (default stdout)");
  sweep->add_option("--csv", csv_out, "Per-row CSV");

  // lower-bound
  std::size_t k = 3, trials = 50;
  std::uint64_t lb_seed = 7;
  double lb_lambda = 0.2;
  auto* lb = app.add_subcommand("lower-bound", "Indistinguishability experiment");
  lb->add_option("--k", k)->required();
  lb->add_option("--eps", eps)->required();
  lb->add_option("--lambda", lb_lambda)->required();
  lb->add_option("--n", n)->required();
  lb->add_option("--trials", trials)->required();
  lb->add_option("--seed", lb_seed);
  lb->add_option("--out", out);

  // metric
  std::string a_path, b_path, kind = "kolmogorov";
  auto* met = app.add_subcommand("metric", "Distances between paired CDFs");
  met->add_option("--a", a_path)->required();
  met->add_option("--b", b_path)->required();
  met->add_option("--kind", kind)->check(CLI::IsMember({"kolmogorov", "levy", "wasserstein1"}));
  met->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*sim) {
      const AuctionModel model = load_model(model_ref);
      if (format == "fp") {
        write_fp_samples(out, simulate_fp(model, n, seed));
      } else {
        write_sp_samples(out, simulate_sp(model, n, seed));
      }
    } else if (*efp) {
      const FpSampleSet s = read_fp_samples(samples, k_opt);
      FpEstimate est;
      if (mode == "full") {
        if (!lambda) throw ParameterError("--mode full needs --lambda");
        est = estimate_bid_cdf_full(s, *lambda, eps, delta);
      } else {
        FpEstimatorConfig c;
        c.p = p;
        c.gamma = gamma;
        c.eps = eps;
        c.delta = delta;
        est = estimate_bid_cdf_effective(s, c);
      }
      emit({{"cdfs", cdf_list(est.cdfs)},
            {"diagnostics",
             {{"n", est.n}, {"clip_rate", est.clip_rate}, {"oracle_calls", 0}, {"p", est.p},
              {"gamma", est.gamma}, {"h_floor", est.h_floor}}}},
           out);
    } else if (*efd) {
      json list = json::array();
      for (const auto& c : read_cdfs(cdf_path)) list.push_back(density_to_json(estimate_density(c, h, p)));
      emit({{"densities", list}, {"diagnostics", {{"h", h}, {"p", p}}}}, out);
    } else if (*efpp) {
      const AuctionModel model = load_model(model_ref);
      FpPartialConfig c;
      c.p = p;
      c.gamma = gamma;
      c.eps = eps;
      c.delta = delta;
      c.lipschitz = lipschitz;
      if (max_calls) c.max_oracle_calls = *max_calls;
      SimulatedFpOracle oracle(model, seed);
      const FpPartialEstimate est = fp_partial_estimate(oracle, c);
      emit({{"cdfs", cdf_list(est.cdfs)},
            {"diagnostics",
             {{"oracle_calls", est.oracle_calls}, {"grid_points", est.grid_points},
              {"isotonic_repairs", est.isotonic_repairs}, {"search_steps", est.plan.search_steps},
              {"search_samples", est.plan.search_samples}, {"eval_samples", est.plan.eval_samples}}}},
           out);
    } else if (*ev) {
      ValueEstimatorConfig c;
      c.p = p;
      c.gamma = gamma;
      c.eps = eps;
      c.delta = delta;
      c.zeta = zeta;
      c.lipschitz = value_lipschitz;
      c.d = margin;
      const ValueEstimate est = estimate_value_cdf_effective(read_fp_samples(samples, k_opt), c);
      json diag = json::array();
      for (const auto& d : est.diagnostics) {
        diag.push_back({{"eps0_used", d.eps0_used}, {"eps1_used", d.eps1_used},
                        {"isotonic_repairs", d.isotonic_repairs}, {"bid_lo", d.bid_lo}});
      }
      emit({{"cdfs", cdf_list(est.cdfs)},
            {"diagnostics", {{"bidders", diag}, {"v_start", est.v_start}}}},
           out);
    } else if (*esp) {
      const SpSampleSet s = read_sp_samples(samples, k_opt);
      SpParams sp = desk_params(s.size(), alpha, eta, eps);
      if (theta) sp.theta = *theta;
      sp.nu = nu.value_or(std::min(sp.nu, sp.theta / 2.0));
      if (micro_delta) sp.micro_delta = *micro_delta;
      if (fp_iters) sp.fp_iters = *fp_iters;
      if (bound == "paper") sp.bound = ContractionBound::Paper;
      const SpEstimate est = estimate_sp(s, alpha, eta, eps, sp);
      const auto& d = est.diagnostics;
      emit({{"cdfs", cdf_list(est.cdfs)},
            {"diagnostics",
             {{"T", d.T},
              {"macro_endpoints", d.macro_endpoints},
              {"gamma_per_interval", d.gamma_per_interval},
              {"contraction_samples", d.contraction_samples},
              {"clip_rates", d.clip_rates},
              {"isotonic_repair_total", d.isotonic_repair_total},
              {"box_violations", d.box_violations},
              {"degenerate_entries", d.degenerate_entries},
              {"refined_intervals", d.refined_intervals},
              {"total_micro_points", d.total_micro_points},
              {"params",
               {{"theta", d.params.theta}, {"nu", d.params.nu}, {"micro_delta", d.params.micro_delta},
                {"fp_iters", d.params.fp_iters}, {"eps_g", d.params.eps_g}}}}}},
           out);
    } else if (*espp) {
      const AuctionModel model = load_model(model_ref);
      SpPartialConfig c;
      c.p = p;
      c.gamma = gamma;
      c.eps = eps;
      c.delta = delta;
      c.lipschitz = lipschitz;
      c.pointwise_samples = n_pointwise;
      if (max_calls) c.max_oracle_calls = *max_calls;
      SimulatedSpOracle oracle(model, seed);
      const SpPartialEstimate est = sp_partial_estimate(oracle, c);
      emit({{"cdfs", cdf_list(est.cdfs)},
            {"diagnostics",
             {{"oracle_calls", est.oracle_calls}, {"pointwise_samples", est.pointwise_samples},
              {"search_steps", est.search_steps}, {"levels", est.levels}}}},
           out);
    } else if (*sweep) {
      const std::string base = std::filesystem::path(config_path).parent_path().string();
      const ExperimentConfig config =
          experiment_config_from_json(read_json(config_path), base.empty() ? "." : base);
      const ExperimentReport rep = run_convergence(config);
      emit(report_to_json(rep), out);
      if (!csv_out.empty()) write_report_csv(csv_out, rep);
    } else if (*lb) {
      emit(lower_bound_to_json(run_lower_bound_experiment(k, eps, lb_lambda, n, trials, lb_seed)), out);
    } else if (*met) {
      const auto as = read_cdfs(a_path), bs = read_cdfs(b_path);
      if (as.size() != bs.size()) throw DomainError("--a and --b hold different numbers of CDFs");
      json values = json::array();
      for (std::size_t i = 0; i < as.size(); ++i) {
        const double v = kind == "kolmogorov" ? kolmogorov(as[i], bs[i])
                         : kind == "levy"     ? levy(as[i], bs[i])
                                              : wasserstein1(as[i], bs[i]);
        values.push_back(v);
      }
      emit({{"kind", kind}, {"values", values}}, out);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const EstimatorError& e) {
    std::cerr << "estimator failure: " << e.what() << '\n';
    return kEstimator;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const json::exception& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEstimator;
  }
  return kOk;
}
