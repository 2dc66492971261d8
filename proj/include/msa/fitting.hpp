#pragma once

// Solvers over the simplex of mixture weights:
//  - fit_mixture: lambda* = argmin D_alpha(P || sum_i lambda_i Q_i)
//  - robust_fit: target-free weights for the smoothed combiner whose worst
//    source loss is near the minimax value
//  - adversarial_target: the target that nearly attains the single-source
//    Holder bound

#include <cstddef>
#include <span>

#include "msa/core.hpp"
#include "msa/divergence.hpp"

namespace msa {

struct FitResult {
  SimplexWeights weights;
  double objective_bits = 0.0;  // D_alpha(P || Q_lambda) at `weights`
  std::size_t iterations = 0;
  bool converged = false;
  /// Certified upper bound on objective_bits - optimum, in bits.
  double gap_bits = 0.0;
};

inline constexpr double kDefaultFitTol = 1e-9;
inline constexpr std::size_t kDefaultFitIters = 100000;

/// Requires alpha >= 1 (one, finite > 1, or infinity) and every point
/// charged by P to be charged by at least one source.
///
/// Finite orders run exponentiated gradient with backtracking directly on
/// D_alpha, which is convex in its second argument; convergence is declared
/// on the Frank-Wolfe gap. The infinite order is a linear program
/// (maximize min_x Q_lambda(x)/P(x)) solved exactly by the simplex method.
FitResult fit_mixture(const Dist& p, std::span<const Dist> sources, AlphaOrder alpha,
                      double tol = kDefaultFitTol, std::size_t max_iters = kDefaultFitIters);

/// D_alpha(P || sum_i lambda_i Q_i) in bits, +inf when infinite.
double mixture_divergence_bits(const Dist& p, std::span<const Dist> sources,
                               const SimplexWeights& lambda, AlphaOrder alpha);

struct RobustFitResult {
  SimplexWeights weights;
  double eta = 0.0;
  double worst_source_loss = 0.0;  // max_i L_{Q_i}(h_{lambda,eta}, f)
  double eps = 0.0;                // max_i L_{Q_i}(h_i, f)
  double delta = 0.0;              // achieved slack: worst_source_loss - eps
  bool reached_target = false;     // worst_source_loss <= eps + requested delta
  std::size_t iterations = 0;
};

inline constexpr double kDefaultRobustEta = 1e-3;
inline constexpr double kDefaultRobustDelta = 1e-3;
inline constexpr std::size_t kDefaultRobustIters = 10000;

/// Minimizes max_i L_{Q_i}(h_{lambda,eta}, f) over lambda. Needs a convex
/// loss and eta in (0, 1).
RobustFitResult robust_fit(std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                           const Hypothesis& f, const LossSpec& loss,
                           double eta = kDefaultRobustEta, double delta = kDefaultRobustDelta,
                           std::size_t max_iters = kDefaultRobustIters);

/// max_i L_{Q_i}(h_{lambda,eta}, f) for given weights.
double smoothed_worst_loss(std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                           const Hypothesis& f, const LossSpec& loss,
                           const SimplexWeights& lambda, double eta);

struct AdversarialTarget {
  Dist p;
  double r_factor = 1.0;
  double delta_alpha = 0.0;
  double eps = 0.0;  // L_Q(h, f) under the zero-one loss
  double realized_divergence_bits = 0.0;
  double realized_loss = 0.0;   // L_P(h, f) measured on p
  double predicted_loss = 0.0;  // [2^((alpha-1) delta_alpha) - 1]^(1/alpha) eps^((alpha-1)/alpha)
};

/// Scales Q by r on the error set {h != f} and by (1 - r eps)/(1 - eps)
/// elsewhere, with r = [(2^((alpha-1) delta_alpha) - 1)/eps]^(1/alpha).
AdversarialTarget adversarial_target(const Dist& q, const Hypothesis& h, const Hypothesis& f,
                                     double alpha, double delta_alpha);

}  // namespace msa
