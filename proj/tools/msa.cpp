// msa: command-line front end for the divergence, fitting, combining and
// verification routines.
//
// Exit codes: 0 success, 1 invalid input, 2 solver did not converge,
// 3 a verification suite found violations.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "msa/bounds.hpp"
#include "msa/combiners.hpp"
#include "msa/divergence.hpp"
#include "msa/experiments.hpp"
#include "msa/fitting.hpp"
#include "msa/io.hpp"
#include "msa/suites.hpp"

namespace {

using msa::io::json;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNoConvergence = 2;
constexpr int kViolations = 3;

double parse_real(const std::string& text, const char* what) {
  if (text == "inf" || text == "infinity") return msa::kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw msa::InputError(std::string(what) + ": cannot parse '" + text + "'");
}

std::vector<msa::Dist> read_dists(const std::vector<std::string>& paths) {
  std::vector<msa::Dist> out;
  for (const auto& p : paths) out.push_back(msa::io::read_dist(p));
  return out;
}

std::vector<msa::Hypothesis> read_hyps(const std::vector<std::string>& paths) {
  std::vector<msa::Hypothesis> out;
  for (const auto& p : paths) out.push_back(msa::io::read_hypothesis(p));
  return out;
}

msa::LossSpec make_loss(const std::string& kind, double range_bound) {
  switch (msa::parse_loss_kind(kind)) {
    case msa::LossKind::absolute: return msa::LossSpec::absolute(range_bound);
    case msa::LossKind::squared: return msa::LossSpec::squared(range_bound);
    case msa::LossKind::zero_one: return msa::LossSpec::zero_one();
  }
  throw msa::InputError("unknown loss");
}

void emit(const json& value, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << value.dump(2) << '\n';
  } else {
    msa::io::write_json_file(out_path, value);
  }
}

struct GridFlags {
  std::size_t grid = 64;
  std::size_t lambda_steps = 101;
  std::uint64_t seed = 7;
  std::string alpha = "2";
  std::size_t n_train = 5000;
  std::size_t n_test = 5000;
  std::size_t threads = 0;

  void attach(CLI::App* app) {
    app->add_option("--grid", grid, "Cells per axis")->capture_default_str();
    app->add_option("--lambda-steps", lambda_steps, "Points on the lambda grid")->capture_default_str();
    app->add_option("--seed", seed, "Experiment seed")->capture_default_str();
    app->add_option("--alpha", alpha, "Divergence order (> 1 or inf)")->capture_default_str();
    app->add_option("--n-train", n_train, "Training samples per source")->capture_default_str();
    app->add_option("--n-test", n_test, "Test samples from the target")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads (0: automatic)");
  }

  msa::GaussianGridConfig config() const {
    msa::GaussianGridConfig cfg;
    cfg.grid_cells = grid;
    cfg.lambda_steps = lambda_steps;
    cfg.seed = seed;
    cfg.alpha = parse_real(alpha, "--alpha");
    cfg.n_train = n_train;
    cfg.n_test = n_test;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-source adaptation with Renyi divergence bounds"};
  app.require_subcommand(1);

  // divergence
  std::string p_path, q_path, alpha_text;
  auto* divergence = app.add_subcommand("divergence", "Renyi divergence D_alpha(P||Q) in bits");
  divergence->add_option("--p", p_path, "Distribution P")->required();
  divergence->add_option("--q", q_path, "Distribution Q")->required();
  divergence->add_option("--alpha", alpha_text, "zero|one|inf|<float>")->required();

  // entropy
  auto* entropy = app.add_subcommand("entropy", "Renyi entropy H_alpha(P) in bits");
  entropy->add_option("--p", p_path, "Distribution P")->required();
  entropy->add_option("--alpha", alpha_text, "zero|one|inf|<float>")->required();

  // fit
  std::string target_path;
  std::vector<std::string> source_paths, hyp_paths;
  double tol = msa::kDefaultFitTol;
  std::size_t max_iters = msa::kDefaultFitIters;
  auto* fit = app.add_subcommand("fit", "Mixture weights minimizing D_alpha(P||Q_lambda)");
  fit->add_option("--target", target_path, "Target distribution P")->required();
  fit->add_option("--sources", source_paths, "Source distributions")->required();
  fit->add_option("--alpha", alpha_text, "one|inf|<float >= 1>")->required();
  fit->add_option("--tol", tol, "Optimality gap in bits")->capture_default_str();
  fit->add_option("--max-iters", max_iters, "Iteration cap")->capture_default_str();

  // combine
  std::string rule, weights_path, r_text = "1", out_path;
  double eta = 0.0;
  auto* combine = app.add_subcommand("combine", "Combine source hypotheses");
  combine->add_option("--rule", rule, "dw|smoothed|rnorm")->required();
  combine->add_option("--sources", source_paths, "Source distributions")->required();
  combine->add_option("--hyps", hyp_paths, "Source hypotheses")->required();
  combine->add_option("--weights", weights_path, "Simplex weights (dw, smoothed)");
  combine->add_option("--eta", eta, "Uniform smoothing mass (smoothed)");
  combine->add_option("--r", r_text, "Norm order, >= 1 or inf (rnorm)");
  combine->add_option("--out", out_path, "Output hypothesis file (default stdout)");

  // lowerbound
  std::string h_path, f_path;
  double alpha_real = 2.0, delta_alpha = 1.0;
  auto* lowerbound = app.add_subcommand("lowerbound", "Adversarial target near the Holder bound");
  lowerbound->set_help_flag("--help", "Print this help message and exit");
  lowerbound->add_option("--q", q_path, "Source distribution Q")->required();
  lowerbound->add_option("--h", h_path, "Boolean hypothesis h")->required();
  lowerbound->add_option("--f", f_path, "Boolean target f")->required();
  lowerbound->add_option("--alpha", alpha_real, "Order > 1")->required();
  lowerbound->add_option("--delta-alpha", delta_alpha, "Divergence budget in bits")->required();

  // robust-fit
  double delta = msa::kDefaultRobustDelta;
  double robust_eta = msa::kDefaultRobustEta;
  std::size_t robust_iters = msa::kDefaultRobustIters;
  std::string loss_kind = "absolute";
  auto* robust = app.add_subcommand("robust-fit", "Target-free weights for the smoothed combiner");
  robust->add_option("--sources", source_paths, "Source distributions")->required();
  robust->add_option("--hyps", hyp_paths, "Source hypotheses")->required();
  robust->add_option("--f", f_path, "Target labeling f")->required();
  robust->add_option("--eta", robust_eta, "Uniform smoothing mass")->capture_default_str();
  robust->add_option("--delta", delta, "Requested slack")->capture_default_str();
  robust->add_option("--loss", loss_kind, "absolute|squared")->capture_default_str();
  robust->add_option("--max-iters", robust_iters, "Game rounds")->capture_default_str();

  // verify
  std::string suite;
  std::size_t trials = 1000, threads = 0;
  std::uint64_t seed = 42;
  std::string suite_alpha;
  bool summary_only = false;
  auto* verify = app.add_subcommand("verify", "Randomized bound verification suite");
  verify->add_option("--suite", suite, "Suite name")->required();
  verify->add_option("--trials", trials, "Number of trials")->capture_default_str();
  verify->add_option("--seed", seed, "Seed")->capture_default_str();
  verify->add_option("--alpha", suite_alpha, "Fixed order (r for thm8, thm10, lemma9)");
  verify->add_option("--threads", threads, "Worker threads (0: automatic)");
  verify->add_flag("--summary-only", summary_only, "Print only the summary line");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Synthetic experiments");
  experiment->require_subcommand(1);
  GridFlags gaussian_flags;
  auto* gaussian = experiment->add_subcommand("gaussian", "Four-Gaussian lambda sweep");
  gaussian_flags.attach(gaussian);
  gaussian->add_option("--out", out_path, "CSV output (default: JSON on stdout)");
  GridFlags multi_flags;
  double perturbation = 0.1;
  auto* multifunc = experiment->add_subcommand("multifunc", "Distinct source labelings");
  multi_flags.attach(multifunc);
  multifunc->add_option("--perturbation", perturbation, "Label flip probability")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*divergence) {
      const auto p = msa::io::read_dist(p_path);
      const auto q = msa::io::read_dist(q_path);
      const auto d = msa::renyi_divergence(p, q, msa::AlphaOrder::parse(alpha_text));
      std::cout << json{{"D_alpha_bits", msa::io::real_to_json(d.bits)}, {"d_alpha", msa::io::real_to_json(d.exp2())}}
                       .dump()
                << '\n';
      return kOk;
    }
    if (*entropy) {
      const auto p = msa::io::read_dist(p_path);
      std::cout << json{{"H_alpha_bits", msa::renyi_entropy(p, msa::AlphaOrder::parse(alpha_text))}}.dump() << '\n';
      return kOk;
    }
    if (*fit) {
      const auto p = msa::io::read_dist(target_path);
      const auto sources = read_dists(source_paths);
      const auto result = msa::fit_mixture(p, sources, msa::AlphaOrder::parse(alpha_text), tol, max_iters);
      std::cout << msa::io::to_json(result).dump(2) << '\n';
      return result.converged ? kOk : kNoConvergence;
    }
    if (*combine) {
      const auto sources = read_dists(source_paths);
      const auto hyps = read_hyps(hyp_paths);
      msa::CombinerParams params;
      if (rule == "dw") {
        params.rule = msa::DistributionWeightedRule{};
      } else if (rule == "smoothed") {
        params.rule = msa::SmoothedRule{};
        params.eta = eta;
      } else if (rule == "rnorm") {
        params.rule = msa::RNormRule{parse_real(r_text, "--r")};
      } else {
        throw msa::InputError("--rule: expected dw, smoothed or rnorm, got '" + rule + "'");
      }
      if (!weights_path.empty()) params.weights = msa::io::read_weights(weights_path);
      if (rule != "rnorm" && !params.weights) params.weights = msa::SimplexWeights::uniform(sources.size());
      if (rule == "rnorm") params.weights.reset();
      emit(msa::io::to_json(msa::combine(sources, hyps, params)), out_path);
      return kOk;
    }
    if (*lowerbound) {
      const auto q = msa::io::read_dist(q_path);
      const auto h = msa::io::read_hypothesis(h_path);
      const auto f = msa::io::read_hypothesis(f_path);
      std::cout << msa::io::to_json(msa::adversarial_target(q, h, f, alpha_real, delta_alpha)).dump(2) << '\n';
      return kOk;
    }
    if (*robust) {
      const auto sources = read_dists(source_paths);
      const auto hyps = read_hyps(hyp_paths);
      const auto f = msa::io::read_hypothesis(f_path);
      double b = f.range_bound();
      for (const auto& h : hyps) b = std::max(b, h.range_bound());
      const auto result = msa::robust_fit(sources, hyps, f, make_loss(loss_kind, b), robust_eta, delta, robust_iters);
      std::cout << msa::io::to_json(result).dump(2) << '\n';
      return result.reached_target ? kOk : kNoConvergence;
    }
    if (*verify) {
      msa::SuiteOptions options;
      options.trials = trials;
      options.seed = seed;
      options.threads = threads;
      if (!suite_alpha.empty()) options.alpha = parse_real(suite_alpha, "--alpha");
      const auto result = msa::run_suite(suite, options);
      if (!summary_only) {
        std::cout << "[\n";
        for (std::size_t i = 0; i < result.reports.size(); ++i)
          std::cout << msa::io::to_json(result.reports[i]).dump() << (i + 1 < result.reports.size() ? ",\n" : "\n");
        std::cout << "]\n";
      }
      std::cout << msa::io::suite_summary(result).dump() << '\n';
      return result.violations == 0 ? kOk : kViolations;
    }
    if (*gaussian) {
      const auto result = msa::run_gaussian_experiment(gaussian_flags.config());
      if (out_path.empty()) {
        std::cout << msa::io::to_json(result).dump(2) << '\n';
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw msa::InputError(out_path + ": cannot open file for writing");
        msa::write_experiment_csv(out, result);
      }
      return kOk;
    }
    if (*multifunc) {
      const auto result = msa::run_multi_function_experiment(multi_flags.config(), perturbation);
      std::size_t violations = 0;
      json reports = json::array();
      for (const auto& r : result.reports) {
        if (!r.holds) ++violations;
        reports.push_back(msa::io::to_json(r));
      }
      std::cout << json{{"delta", result.delta}, {"lambdas", result.lambdas}, {"reports", reports}}.dump(2) << '\n';
      std::cout << json{{"suite", "multifunc"}, {"trials", result.reports.size()}, {"violations", violations}}.dump()
                << '\n';
      return violations == 0 ? kOk : kViolations;
    }
  } catch (const msa::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
