#pragma once

// Synthetic experiments on a discretized plane: four isotropic Gaussians,
// the sign(x1 x2) target, least-squares base learners.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "msa/bounds.hpp"
#include "msa/core.hpp"

namespace msa {

using Point2 = std::array<double, 2>;

struct GaussianGridConfig {
  std::array<Point2, 4> centers{{{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}}};
  double variance = 1.0;
  double grid_extent = 4.0;
  std::size_t grid_cells = 64;
  std::size_t n_train = 5000;
  std::size_t n_test = 5000;
  std::uint64_t seed = 7;
  std::size_t lambda_steps = 101;
  double alpha = 2.0;  // order of the divergence column; may be +inf
  std::size_t threads = 0;

  void validate() const;
};

struct GaussianComponent {
  Point2 center;
  double weight = 1.0;
};

/// grid_cells^2 cell-center points over [-extent, extent]^2, ids "c<row>_<col>".
SupportPtr grid_support(const GaussianGridConfig& cfg);

/// Mixture density evaluated at each cell center, normalized over the grid.
Dist discretize_gaussian_mixture(std::span<const GaussianComponent> components, const GaussianGridConfig& cfg,
                                 SupportPtr support = nullptr);

/// n inverse-CDF draws, as indices into the support, from the Philox stream
/// (seed, stream).
std::vector<std::size_t> sample_dist(const Dist& d, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// (count + smoothing) / (n + smoothing |support|).
Dist empirical_dist(std::span<const std::size_t> samples, const SupportPtr& support, double smoothing);

struct LinearFit {
  std::vector<double> w;
  double b = 0.0;
};

/// Ordinary least squares on the support coordinates plus an intercept.
LinearFit fit_least_squares(std::span<const std::size_t> samples, std::span<const double> labels,
                            const SupportPtr& support);

/// clamp(w . coord + b, 0, range_bound) tabulated over the support.
Hypothesis train_least_squares(std::span<const std::size_t> samples, std::span<const double> labels,
                               const SupportPtr& support, double range_bound = 1.0);

struct ExperimentRow {
  double lambda = 0.0;
  double mse = 0.0;
  double divergence_bits = 0.0;
  double thm2_bound = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // ascending lambda
  double argmin_mse = 0.0;
  double argmin_div = 0.0;
  double rank_correlation = 0.0;  // Spearman, MSE vs divergence columns
  double min_divergence_bits = 0.0;  // exact minimum over the mixture segment
};

/// Target labeling of the experiments: 1 where x1 x2 > 0, else 0.
Hypothesis quadrant_target(const SupportPtr& support);

ExperimentResult run_gaussian_experiment(const GaussianGridConfig& cfg);

struct MultiFunctionResult {
  double delta = 0.0;  // max_i L_P(f_i, f) under the absolute loss
  std::vector<double> lambdas;
  std::vector<BoundReport> reports;  // per lambda: thm16 (absolute), thm17 (squared)
};

/// Source labelings flip f with probability `perturbation` on the cells in
/// the top decile of P and invert it on the bottom decile.
MultiFunctionResult run_multi_function_experiment(const GaussianGridConfig& cfg, double perturbation);

/// max_i D_2(Q_i || Qhat_i) with Qhat_i the smoothed empirical estimate from
/// n samples of each source distribution.
double approximation_divergence(const GaussianGridConfig& cfg, std::size_t n, std::uint64_t seed,
                                double smoothing = 0.5);

/// Average-rank Spearman correlation.
double spearman(std::span<const double> a, std::span<const double> b);

/// Header `lambda,mse,d2_bits,thm2_bound`, 12 significant digits, LF.
void write_experiment_csv(std::ostream& out, const ExperimentResult& result);

}  // namespace msa
