#pragma once

// Closed-form loss and divergence bounds, and verifiers that pair each bound
// with the quantity it controls.

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "msa/core.hpp"
#include "msa/divergence.hpp"

namespace msa {

enum class TheoremId {
  lemma1,
  lemma1_tight,
  thm2,
  thm5,
  thm8,
  lemma9,
  thm10,
  thm13,
  thm14,
  cor15,
  thm16,
  thm17,
  lemma11,
  lemma12,
};

std::string to_string(TheoremId id);
TheoremId parse_theorem_id(std::string_view name);

inline constexpr double kHoldsTolerance = 1e-9;

struct BoundReport {
  TheoremId theorem_id = TheoremId::lemma1;
  double bound_value = 0.0;  // may be +inf
  double measured_value = 0.0;
  double margin = 0.0;  // bound_value - measured_value
  bool holds = true;    // margin >= -kHoldsTolerance
  bool vacuous = false; // bound is +inf
  std::string inputs_digest;

  static BoundReport make(TheoremId id, double bound, double measured, std::string digest);
  /// Copy with a new measured value and recomputed margin/holds.
  BoundReport with_measured(double measured) const;
};

/// FNV-1a over the bit patterns of the inputs, as 16 hex digits.
class InputDigest {
 public:
  InputDigest& add(double v);
  InputDigest& add(std::span<const double> values);
  InputDigest& add(const Dist& d) { return add(d.probs()); }
  InputDigest& add(const Hypothesis& h) { return add(h.values()); }
  InputDigest& add(std::string_view text);
  std::string hex() const;

 private:
  void mix(unsigned char byte);
  unsigned long long state_ = 14695981039346656037ULL;
};

struct NormBoundCert {
  double rho = 0.0;
  double r = 1.0;
  bool holds = true;
  std::string worst_point;
  double worst_ratio = 0.0;  // max_x P(x) / [sum_i Q_i(x)^r]^(1/r)
};

/// Smallest rho with P(x) <= rho [sum_i Q_i^r(x)]^(1/r) everywhere; rho is
/// +inf when P charges a point no source charges.
NormBoundCert check_norm_bounded(const Dist& p, std::span<const Dist> sources, double r);
/// Certificate for a given rho.
NormBoundCert check_norm_bounded(const Dist& p, std::span<const Dist> sources, double r, double rho);

/// (d_alpha(P||Q) L_Q(h,f))^g M^(1/alpha), or with tight = true
/// (d_alpha(P||Q) E_Q[L^(alpha/(alpha-1))])^g; g = (alpha-1)/alpha.
/// Measured value: L_P(h, f).
BoundReport lemma1_bound(const Dist& p, const Dist& q, const Hypothesis& h, const Hypothesis& f,
                         const LossSpec& loss, AlphaOrder alpha, bool tight = false);

/// (d_alpha(P||mixtures) eps)^g M^(1/alpha) with the infimum over mixtures
/// taken by fit_mixture.
BoundReport thm2_bound(const Dist& p, std::span<const Dist> sources, double eps, double loss_M,
                       AlphaOrder alpha, std::optional<double> measured = std::nullopt);

/// As thm2_bound with eps replaced by eps + delta.
BoundReport thm5_bound(const Dist& p, std::span<const Dist> sources, double eps, double delta, double loss_M,
                       AlphaOrder alpha, std::optional<double> measured = std::nullopt);

/// rho k eps against L_P(h_{r-norm}, f).
BoundReport thm8_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                        const Hypothesis& f, const LossSpec& loss, double r);

/// log2(k rho) with rho at order r - 1, against D_r(P || uniform mixture).
BoundReport lemma9_verify(const Dist& p, std::span<const Dist> sources, double r);

/// [rho sum_i L_{Q_i}(h, f)]^((r-1)/r) M^(1/r), rho at order r - 1, against L_P(h, f).
BoundReport thm10_bound(const Dist& p, std::span<const Dist> sources, const Hypothesis& h, const Hypothesis& f,
                        const LossSpec& loss, double r);

/// max_i D_alpha(Q_i || Qhat_i) against D_alpha(Q_mu || Qhat_mu).
BoundReport lemma11_verify(std::span<const Dist> sources, std::span<const Dist> approx, const SimplexWeights& mu,
                           double alpha);

/// Bound on D_a(P||Qhat) through an intermediate Q.
/// additive: D_2a(P||Q) + D_(2a-1)(Q||Qhat), which fails on some inputs.
/// scaled: the D_2a term carries the Cauchy-Schwarz factor (a - 1/2)/(a - 1).
enum class Lemma12Form {
  additive,
  scaled,
};

BoundReport lemma12_verify(const Dist& p, const Dist& q, const Dist& q_hat, double alpha,
                           Lemma12Form form = Lemma12Form::additive);

/// Exponent layout of the approximate-distribution, known-target bound.
/// flat is not homogeneous in the loss scale and fails for small M;
/// composed is the default.
enum class Thm13Form {
  flat,     // eps^g d_2a^g M^((1+g)/a) max d_(2a-1)^g max d_a^g
  composed, // eps^(g^2) d_2a^g M^((1+g)/a) max d_(2a-1)^g max d_a^(g^2)
};

BoundReport thm13_bound(const Dist& p, std::span<const Dist> sources, std::span<const Dist> approx, double eps,
                        double loss_M, double alpha, std::optional<double> measured = std::nullopt,
                        Thm13Form form = Thm13Form::composed);

/// [max_i d_alpha(Qhat_i || Q_i) eps]^g M^(1/alpha) + delta.
BoundReport thm14_bound(std::span<const Dist> sources, std::span<const Dist> approx, double eps, double loss_M,
                        double alpha, double delta, std::optional<double> measured = std::nullopt);

/// [2^(D_2a(P||mixtures) + max_i D_(2a-1)(Q_i||Qhat_i)) (epshat + delta)]^g M^(1/alpha)
/// with epshat = [max_i d_alpha(Qhat_i||Q_i) eps]^g M^(1/alpha).
BoundReport cor15_bound(const Dist& p, std::span<const Dist> sources, std::span<const Dist> approx, double eps,
                        double loss_M, double alpha, double delta, std::optional<double> measured = std::nullopt);

/// Distinct source labelings f_i: [d_alpha(P||Q_lambda) eps]^g M^(1/alpha) + k delta with
/// eps = max_i L_{Q_i}(h_i, f_i), delta = max_i L_P(f_i, f). Requires beta = 1.
BoundReport thm16_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                         std::span<const Hypothesis> source_fs, const Hypothesis& f, const LossSpec& loss,
                         const SimplexWeights& lambda, AlphaOrder alpha);

/// beta times each term of thm16, for a loss with the beta-relaxed triangle inequality.
BoundReport thm17_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                         std::span<const Hypothesis> source_fs, const Hypothesis& f, const LossSpec& loss,
                         const SimplexWeights& lambda, AlphaOrder alpha);

// Pipeline verifiers: they build the combined hypothesis the bound speaks
// about and recompute eps and delta from the inputs.

/// Fits lambda on the true sources, measures L_P(h_lambda, f).
BoundReport thm2_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                        const Hypothesis& f, const LossSpec& loss, AlphaOrder alpha);

/// Runs robust_fit, measures L_P(h_{lambda,eta}, f); delta is the achieved slack.
BoundReport thm5_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                        const Hypothesis& f, const LossSpec& loss, AlphaOrder alpha, double eta, double delta);

/// Fits lambda-hat on the approximations, measures L_P(h_lambda-hat, f) with
/// the combiner built from the approximations.
BoundReport thm13_verify(const Dist& p, std::span<const Dist> sources, std::span<const Dist> approx,
                         std::span<const Hypothesis> hyps, const Hypothesis& f, const LossSpec& loss, double alpha,
                         Thm13Form form = Thm13Form::composed);

/// Runs robust_fit on the approximations; measured value is the largest
/// L_{Qhat_mu}(h_{lambda,eta}, f) over the given mixtures mu.
BoundReport thm14_verify(std::span<const Dist> sources, std::span<const Dist> approx,
                         std::span<const Hypothesis> hyps, const Hypothesis& f, const LossSpec& loss, double alpha,
                         double eta, double delta, std::span<const SimplexWeights> mus);

/// Runs robust_fit on the approximations, measures L_P(h_{lambda,eta}, f).
BoundReport cor15_verify(const Dist& p, std::span<const Dist> sources, std::span<const Dist> approx,
                         std::span<const Hypothesis> hyps, const Hypothesis& f, const LossSpec& loss, double alpha,
                         double eta, double delta);

}  // namespace msa
