#include "msa/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include "msa/combiners.hpp"
#include "msa/fitting.hpp"

namespace msa {

namespace {

struct NamedId {
  TheoremId id;
  const char* name;
};

constexpr NamedId kTheoremNames[] = {
    {TheoremId::lemma1, "lemma1"}, {TheoremId::lemma1_tight, "lemma1_tight"},
    {TheoremId::thm2, "thm2"},     {TheoremId::thm5, "thm5"},
    {TheoremId::thm8, "thm8"},     {TheoremId::lemma9, "lemma9"},
    {TheoremId::thm10, "thm10"},   {TheoremId::thm13, "thm13"},
    {TheoremId::thm14, "thm14"},   {TheoremId::cor15, "cor15"},
    {TheoremId::thm16, "thm16"},   {TheoremId::thm17, "thm17"},
    {TheoremId::lemma11, "lemma11"}, {TheoremId::lemma12, "lemma12"},
};

void require_above_one(AlphaOrder alpha, const char* what) {
  if (!alpha.above_one())
    throw InputError(std::string(what) + ": alpha must exceed 1, got " + alpha.to_string());
}

AlphaOrder finite_above_one(double alpha, const char* what) {
  if (!std::isfinite(alpha) || !(alpha > 1.0))
    throw InputError(std::string(what) + ": alpha must be a finite value above 1");
  return AlphaOrder::finite(alpha);
}

/// M^(1/alpha), 1 at infinity.
double m_root(double loss_M, AlphaOrder alpha) {
  return alpha.is_infinite() ? 1.0 : std::pow(loss_M, 1.0 / alpha.value());
}

/// (d * loss)^g M^(1/alpha) in extended reals: an infinite distortion gives
/// an infinite bound even when loss is 0.
double holder_bound(double d, double loss, double loss_M, AlphaOrder alpha) {
  if (std::isinf(d)) return kInf;
  return std::pow(d * loss, alpha.holder_exponent()) * m_root(loss_M, alpha);
}

double best_mixture_bits(const Dist& p, std::span<const Dist> sources, AlphaOrder alpha) {
  return fit_mixture(p, sources, alpha).objective_bits;
}

double max_divergence_bits(std::span<const Dist> a, std::span<const Dist> b, AlphaOrder alpha) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, renyi_divergence(a[i], b[i], alpha).bits);
  return worst;
}

void require_pairs(std::span<const Dist> sources, std::span<const Dist> approx, const char* what) {
  if (sources.empty()) throw InputError(std::string(what) + ": no sources");
  if (sources.size() != approx.size())
    throw InputError(std::string(what) + ": source and approximation counts differ");
  std::vector<Dist> all(sources.begin(), sources.end());
  all.insert(all.end(), approx.begin(), approx.end());
  require_common_support(all, what);
}

void require_hyps(std::span<const Dist> sources, std::span<const Hypothesis> hyps, const char* what) {
  if (sources.size() != hyps.size())
    throw InputError(std::string(what) + ": source and hypothesis counts differ");
}

double max_source_loss(std::span<const Dist> sources, std::span<const Hypothesis> hyps, const Hypothesis& f,
                       const LossSpec& loss) {
  double eps = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) eps = std::max(eps, expected_loss(sources[i], hyps[i], f, loss));
  return eps;
}

InputDigest digest_of(TheoremId id, std::span<const Dist> dists) {
  InputDigest d;
  d.add(to_string(id));
  for (const auto& q : dists) d.add(q);
  return d;
}

BoundReport multi_function_report(TheoremId id, double beta, const Dist& p, std::span<const Dist> sources,
                                  std::span<const Hypothesis> hyps, std::span<const Hypothesis> source_fs,
                                  const Hypothesis& f, const LossSpec& loss, const SimplexWeights& lambda,
                                  AlphaOrder alpha) {
  const char* what = id == TheoremId::thm16 ? "thm16_verify" : "thm17_verify";
  require_above_one(alpha, what);
  require_hyps(sources, hyps, what);
  if (source_fs.size() != sources.size()) throw InputError(std::string(what) + ": need one labeling per source");
  if (lambda.size() != sources.size()) throw InputError(std::string(what) + ": weight count differs from sources");
  if (!loss.convex_joint) throw InputError(std::string(what) + ": the loss must be jointly convex");
  if (id == TheoremId::thm16 && loss.beta != 1.0)
    throw InputError("thm16_verify: the loss must satisfy the exact triangle inequality (beta = 1)");

  const std::size_t k = sources.size();
  double eps = 0.0;
  double delta = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    eps = std::max(eps, expected_loss(sources[i], hyps[i], source_fs[i], loss));
    delta = std::max(delta, expected_loss(p, source_fs[i], f, loss));
  }
  const double d = renyi_divergence(p, mixture(sources, lambda), alpha).exp2();
  const double head = holder_bound(d, eps, loss.bound_M, alpha);
  const double bound = beta * head + beta * static_cast<double>(k) * delta;

  const Hypothesis h = combine_distribution_weighted(sources, hyps, lambda);
  const double measured = expected_loss(p, h, f, loss);

  InputDigest digest = digest_of(id, sources);
  digest.add(p).add(f).add(lambda.values()).add(alpha.to_string());
  for (const auto& h_i : hyps) digest.add(h_i);
  for (const auto& f_i : source_fs) digest.add(f_i);
  return BoundReport::make(id, bound, measured, digest.hex());
}

}  // namespace

std::string to_string(TheoremId id) {
  for (const auto& entry : kTheoremNames)
    if (entry.id == id) return entry.name;
  return "unknown";
}

TheoremId parse_theorem_id(std::string_view name) {
  for (const auto& entry : kTheoremNames)
    if (name == entry.name) return entry.id;
  throw InputError("unknown theorem id '" + std::string(name) + "'");
}

BoundReport BoundReport::make(TheoremId id, double bound, double measured, std::string digest) {
  BoundReport r;
  r.theorem_id = id;
  r.bound_value = bound;
  r.inputs_digest = std::move(digest);
  return r.with_measured(measured);
}

BoundReport BoundReport::with_measured(double measured) const {
  BoundReport r = *this;
  r.measured_value = measured;
  r.vacuous = std::isinf(bound_value);
  r.margin = r.vacuous ? kInf : bound_value - measured;
  r.holds = r.margin >= -kHoldsTolerance;
  return r;
}

InputDigest& InputDigest::add(double v) {
  unsigned long long bits = 0;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof v);
  for (int b = 0; b < 8; ++b) mix(static_cast<unsigned char>(bits >> (8 * b)));
  return *this;
}

InputDigest& InputDigest::add(std::span<const double> values) {
  add(static_cast<double>(values.size()));
  for (double v : values) add(v);
  return *this;
}

InputDigest& InputDigest::add(std::string_view text) {
  for (char c : text) mix(static_cast<unsigned char>(c));
  mix(0);
  return *this;
}

void InputDigest::mix(unsigned char byte) {
  state_ ^= byte;
  state_ *= 1099511628211ULL;
}

std::string InputDigest::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", state_);
  return buf;
}

NormBoundCert check_norm_bounded(const Dist& p, std::span<const Dist> sources, double r) {
  if (sources.empty()) throw InputError("check_norm_bounded: no sources");
  if (!(r >= 1.0)) throw InputError("check_norm_bounded: r must be at least 1");
  std::vector<Dist> all(sources.begin(), sources.end());
  all.push_back(p);
  require_common_support(all, "check_norm_bounded");

  NormBoundCert cert;
  cert.r = r;
  std::size_t worst = 0;
  std::vector<double> logs;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    double norm = 0.0;
    if (std::isinf(r)) {
      for (const auto& q : sources) norm = std::max(norm, q[x]);
    } else {
      logs.clear();
      for (const auto& q : sources)
        if (q[x] > 0.0) logs.push_back(r * std::log(q[x]));
      norm = logs.empty() ? 0.0 : std::exp(log_sum_exp(logs) / r);
    }
    const double ratio = norm > 0.0 ? p[x] / norm : kInf;
    if (ratio > cert.worst_ratio) {
      cert.worst_ratio = ratio;
      worst = x;
    }
  }
  cert.worst_point = p.support()->id(worst);
  cert.rho = cert.worst_ratio;
  cert.holds = std::isfinite(cert.rho);
  return cert;
}

NormBoundCert check_norm_bounded(const Dist& p, std::span<const Dist> sources, double r, double rho) {
  if (!(rho > 0.0)) throw InputError("check_norm_bounded: rho must be positive");
  NormBoundCert cert = check_norm_bounded(p, sources, r);
  cert.rho = rho;
  cert.holds = cert.worst_ratio <= rho;
  return cert;
}

BoundReport lemma1_bound(const Dist& p, const Dist& q, const Hypothesis& h, const Hypothesis& f,
                         const LossSpec& loss, AlphaOrder alpha, bool tight) {
  require_above_one(alpha, "lemma1_bound");
  const double d = d_alpha(p, q, alpha);
  double bound = 0.0;
  if (tight) {
    const double exponent = alpha.is_infinite() ? 1.0 : alpha.value() / (alpha.value() - 1.0);
    const double moment = expected_power_loss(q, h, f, loss, exponent);
    bound = std::isinf(d) ? kInf : std::pow(d * moment, alpha.holder_exponent());
  } else {
    bound = holder_bound(d, expected_loss(q, h, f, loss), loss.bound_M, alpha);
  }
  const TheoremId id = tight ? TheoremId::lemma1_tight : TheoremId::lemma1;
  InputDigest digest;
  digest.add(to_string(id)).add(p).add(q).add(h).add(f).add(alpha.to_string()).add(loss.bound_M);
  return BoundReport::make(id, bound, expected_loss(p, h, f, loss), digest.hex());
}

BoundReport thm2_bound(const Dist& p, std::span<const Dist> sources, double eps, double loss_M, AlphaOrder alpha,
                       std::optional<double> measured) {
  require_above_one(alpha, "thm2_bound");
  if (!(eps >= 0.0 && eps <= loss_M)) throw InputError("thm2_bound: eps must lie in [0, M]");
  const double d = std::exp2(best_mixture_bits(p, sources, alpha));
  InputDigest digest = digest_of(TheoremId::thm2, sources);
  digest.add(p).add(eps).add(loss_M).add(alpha.to_string());
  return BoundReport::make(TheoremId::thm2, holder_bound(d, eps, loss_M, alpha), measured.value_or(0.0),
                           digest.hex());
}

BoundReport thm5_bound(const Dist& p, std::span<const Dist> sources, double eps, double delta, double loss_M,
                       AlphaOrder alpha, std::optional<double> measured) {
  require_above_one(alpha, "thm5_bound");
  if (!(eps >= 0.0)) throw InputError("thm5_bound: eps must be nonnegative");
  if (!(delta >= 0.0)) throw InputError("thm5_bound: delta must be nonnegative");
  const double d = std::exp2(best_mixture_bits(p, sources, alpha));
  InputDigest digest = digest_of(TheoremId::thm5, sources);
  digest.add(p).add(eps).add(delta).add(loss_M).add(alpha.to_string());
  return BoundReport::make(TheoremId::thm5, holder_bound(d, eps + delta, loss_M, alpha), measured.value_or(0.0),
                           digest.hex());
}

BoundReport thm8_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                        const Hypothesis& f, const LossSpec& loss, double r) {
  require_hyps(sources, hyps, "thm8_verify");
  if (!loss.convex_first) throw InputError("thm8_verify: the loss must be convex");
  const NormBoundCert cert = check_norm_bounded(p, sources, r);
  if (!std::isfinite(cert.rho)) throw InputError("thm8_verify: target is not norm-bounded (rho is infinite)");
  const double eps = max_source_loss(sources, hyps, f, loss);
  const double bound = cert.rho * static_cast<double>(sources.size()) * eps;
  const double measured = expected_loss(p, combine_r_norm(sources, hyps, r), f, loss);
  InputDigest digest = digest_of(TheoremId::thm8, sources);
  digest.add(p).add(f).add(r);
  for (const auto& h : hyps) digest.add(h);
  return BoundReport::make(TheoremId::thm8, bound, measured, digest.hex());
}

BoundReport lemma9_verify(const Dist& p, std::span<const Dist> sources, double r) {
  if (!(r >= 2.0)) throw InputError("lemma9_verify: r must be at least 2");
  const NormBoundCert cert = check_norm_bounded(p, sources, r - 1.0);
  const double k = static_cast<double>(sources.size());
  const double bound = std::isfinite(cert.rho) ? std::log2(k * cert.rho) : kInf;
  const Dist q_u = mixture(sources, SimplexWeights::uniform(sources.size()));
  const double measured = renyi_divergence(p, q_u, AlphaOrder::from_value(r)).bits;
  InputDigest digest = digest_of(TheoremId::lemma9, sources);
  digest.add(p).add(r);
  return BoundReport::make(TheoremId::lemma9, bound, measured, digest.hex());
}

BoundReport thm10_bound(const Dist& p, std::span<const Dist> sources, const Hypothesis& h, const Hypothesis& f,
                        const LossSpec& loss, double r) {
  if (!(r >= 2.0)) throw InputError("thm10_bound: r must be at least 2");
  const NormBoundCert cert = check_norm_bounded(p, sources, r - 1.0);
  if (!std::isfinite(cert.rho)) throw InputError("thm10_bound: target is not norm-bounded (rho is infinite)");
  double total = 0.0;
  for (const auto& q : sources) total += expected_loss(q, h, f, loss);
  const AlphaOrder order = AlphaOrder::from_value(r);
  const double bound = std::pow(cert.rho * total, order.holder_exponent()) * m_root(loss.bound_M, order);
  InputDigest digest = digest_of(TheoremId::thm10, sources);
  digest.add(p).add(h).add(f).add(r).add(loss.bound_M);
  return BoundReport::make(TheoremId::thm10, bound, expected_loss(p, h, f, loss), digest.hex());
}

BoundReport lemma11_verify(std::span<const Dist> sources, std::span<const Dist> approx, const SimplexWeights& mu,
                           double alpha) {
  require_pairs(sources, approx, "lemma11_verify");
  const AlphaOrder order = finite_above_one(alpha, "lemma11_verify");
  const double bound = max_divergence_bits(sources, approx, order);
  const double measured = renyi_divergence(mixture(sources, mu), mixture(approx, mu), order).bits;
  InputDigest digest = digest_of(TheoremId::lemma11, sources);
  for (const auto& q : approx) digest.add(q);
  digest.add(mu.values()).add(alpha);
  return BoundReport::make(TheoremId::lemma11, bound, measured, digest.hex());
}

BoundReport lemma12_verify(const Dist& p, const Dist& q, const Dist& q_hat, double alpha, Lemma12Form form) {
  const AlphaOrder order = finite_above_one(alpha, "lemma12_verify");
  const double factor = form == Lemma12Form::scaled ? (alpha - 0.5) / (alpha - 1.0) : 1.0;
  const double bound = factor * renyi_divergence(p, q, AlphaOrder::finite(2.0 * alpha)).bits +
                       renyi_divergence(q, q_hat, AlphaOrder::finite(2.0 * alpha - 1.0)).bits;
  const double measured = renyi_divergence(p, q_hat, order).bits;
  InputDigest digest;
  digest.add(to_string(TheoremId::lemma12)).add(p).add(q).add(q_hat).add(alpha);
  if (form == Lemma12Form::scaled) digest.add("scaled");
  return BoundReport::make(TheoremId::lemma12, bound, measured, digest.hex());
}

BoundReport thm13_bound(const Dist& p, std::span<const Dist> sources, std::span<const Dist> approx, double eps,
                        double loss_M, double alpha, std::optional<double> measured, Thm13Form form) {
  require_pairs(sources, approx, "thm13_bound");
  const AlphaOrder order = finite_above_one(alpha, "thm13_bound");
  if (!(eps >= 0.0)) throw InputError("thm13_bound: eps must be nonnegative");
  const double g = order.holder_exponent();
  const double outer_bits = best_mixture_bits(p, sources, AlphaOrder::finite(2.0 * alpha)) +
                            max_divergence_bits(sources, approx, AlphaOrder::finite(2.0 * alpha - 1.0));
  const double inner_bits = max_divergence_bits(approx, sources, order);
  const double inner_g = form == Thm13Form::flat ? g : g * g;
  double bound = kInf;
  if (std::isfinite(outer_bits) && std::isfinite(inner_bits))
    bound = std::pow(eps, inner_g) * std::exp2(g * outer_bits + inner_g * inner_bits) *
            std::pow(loss_M, (1.0 + g) / alpha);
  InputDigest digest = digest_of(TheoremId::thm13, sources);
  for (const auto& q : approx) digest.add(q);
  digest.add(p).add(eps).add(loss_M).add(alpha).add(form == Thm13Form::flat ? "flat" : "composed");
  return BoundReport::make(TheoremId::thm13, bound, measured.value_or(0.0), digest.hex());
}

BoundReport thm14_bound(std::span<const Dist> sources, std::span<const Dist> approx, double eps, double loss_M,
                        double alpha, double delta, std::optional<double> measured) {
  require_pairs(sources, approx, "thm14_bound");
  const AlphaOrder order = finite_above_one(alpha, "thm14_bound");
  if (!(eps >= 0.0)) throw InputError("thm14_bound: eps must be nonnegative");
  if (!(delta >= 0.0)) throw InputError("thm14_bound: delta must be nonnegative");
  const double d = std::exp2(max_divergence_bits(approx, sources, order));
  const double bound = holder_bound(d, eps, loss_M, order) + delta;
  InputDigest digest = digest_of(TheoremId::thm14, sources);
  for (const auto& q : approx) digest.add(q);
  digest.add(eps).add(loss_M).add(alpha).add(delta);
  return BoundReport::make(TheoremId::thm14, bound, measured.value_or(0.0), digest.hex());
}

BoundReport cor15_bound(const Dist& p, std::span<const Dist> sources, std::span<const Dist> approx, double eps,
                        double loss_M, double alpha, double delta, std::optional<double> measured) {
  require_pairs(sources, approx, "cor15_bound");
  const AlphaOrder order = finite_above_one(alpha, "cor15_bound");
  if (!(eps >= 0.0)) throw InputError("cor15_bound: eps must be nonnegative");
  if (!(delta >= 0.0)) throw InputError("cor15_bound: delta must be nonnegative");
  const double eps_hat = holder_bound(std::exp2(max_divergence_bits(approx, sources, order)), eps, loss_M, order);
  const double outer_bits = best_mixture_bits(p, sources, AlphaOrder::finite(2.0 * alpha)) +
                            max_divergence_bits(sources, approx, AlphaOrder::finite(2.0 * alpha - 1.0));
  const double bound = holder_bound(std::exp2(outer_bits), eps_hat + delta, loss_M, order);
  InputDigest digest = digest_of(TheoremId::cor15, sources);
  for (const auto& q : approx) digest.add(q);
  digest.add(p).add(eps).add(loss_M).add(alpha).add(delta);
  return BoundReport::make(TheoremId::cor15, bound, measured.value_or(0.0), digest.hex());
}

BoundReport thm16_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                         std::span<const Hypothesis> source_fs, const Hypothesis& f, const LossSpec& loss,
                         const SimplexWeights& lambda, AlphaOrder alpha) {
  return multi_function_report(TheoremId::thm16, 1.0, p, sources, hyps, source_fs, f, loss, lambda, alpha);
}

BoundReport thm17_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                         std::span<const Hypothesis> source_fs, const Hypothesis& f, const LossSpec& loss,
                         const SimplexWeights& lambda, AlphaOrder alpha) {
  if (!(loss.beta >= 1.0)) throw InputError("thm17_verify: beta must be at least 1");
  return multi_function_report(TheoremId::thm17, loss.beta, p, sources, hyps, source_fs, f, loss, lambda, alpha);
}

BoundReport thm2_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                        const Hypothesis& f, const LossSpec& loss, AlphaOrder alpha) {
  require_hyps(sources, hyps, "thm2_verify");
  require_above_one(alpha, "thm2_verify");
  if (!loss.convex_first) throw InputError("thm2_verify: the loss must be convex");
  const FitResult fit = fit_mixture(p, sources, alpha);
  const double eps = max_source_loss(sources, hyps, f, loss);
  const double bound = holder_bound(std::exp2(fit.objective_bits), eps, loss.bound_M, alpha);
  const double measured = expected_loss(p, combine_distribution_weighted(sources, hyps, fit.weights), f, loss);
  InputDigest digest = digest_of(TheoremId::thm2, sources);
  digest.add(p).add(f).add(alpha.to_string());
  for (const auto& h : hyps) digest.add(h);
  return BoundReport::make(TheoremId::thm2, bound, measured, digest.hex());
}

BoundReport thm5_verify(const Dist& p, std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                        const Hypothesis& f, const LossSpec& loss, AlphaOrder alpha, double eta, double delta) {
  require_above_one(alpha, "thm5_verify");
  const RobustFitResult fit = robust_fit(sources, hyps, f, loss, eta, delta);
  const double slack = std::max(delta, fit.delta);
  const double d = std::exp2(best_mixture_bits(p, sources, alpha));
  const double bound = holder_bound(d, fit.eps + slack, loss.bound_M, alpha);
  const double measured = expected_loss(p, combine_smoothed(sources, hyps, fit.weights, eta), f, loss);
  InputDigest digest = digest_of(TheoremId::thm5, sources);
  digest.add(p).add(f).add(alpha.to_string()).add(eta).add(delta);
  for (const auto& h : hyps) digest.add(h);
  return BoundReport::make(TheoremId::thm5, bound, measured, digest.hex());
}

BoundReport thm13_verify(const Dist& p, std::span<const Dist> sources, std::span<const Dist> approx,
                         std::span<const Hypothesis> hyps, const Hypothesis& f, const LossSpec& loss, double alpha,
                         Thm13Form form) {
  require_hyps(sources, hyps, "thm13_verify");
  if (!loss.convex_first) throw InputError("thm13_verify: the loss must be convex");
  const AlphaOrder order = finite_above_one(alpha, "thm13_verify");
  const FitResult fit = fit_mixture(p, approx, order);
  const double measured = expected_loss(p, combine_distribution_weighted(approx, hyps, fit.weights), f, loss);
  const double eps = max_source_loss(sources, hyps, f, loss);
  BoundReport report = thm13_bound(p, sources, approx, eps, loss.bound_M, alpha, measured, form);
  InputDigest digest;
  digest.add(report.inputs_digest).add(f);
  for (const auto& h : hyps) digest.add(h);
  report.inputs_digest = digest.hex();
  return report;
}

BoundReport thm14_verify(std::span<const Dist> sources, std::span<const Dist> approx,
                         std::span<const Hypothesis> hyps, const Hypothesis& f, const LossSpec& loss, double alpha,
                         double eta, double delta, std::span<const SimplexWeights> mus) {
  require_hyps(sources, hyps, "thm14_verify");
  const RobustFitResult fit = robust_fit(approx, hyps, f, loss, eta, delta);
  const double slack = std::max(delta, fit.delta);
  const Hypothesis h = combine_smoothed(approx, hyps, fit.weights, eta);
  std::vector<double> per_source(approx.size());
  for (std::size_t i = 0; i < approx.size(); ++i) per_source[i] = expected_loss(approx[i], h, f, loss);
  double measured = 0.0;
  for (const auto& mu : mus) {
    if (mu.size() != approx.size()) throw InputError("thm14_verify: mixture weight count differs from sources");
    measured = std::max(measured, expected_loss(mixture(approx, mu), h, f, loss));
  }
  const double eps = max_source_loss(sources, hyps, f, loss);
  BoundReport report = thm14_bound(sources, approx, eps, loss.bound_M, alpha, slack, measured);
  InputDigest digest;
  digest.add(report.inputs_digest).add(f).add(eta);
  for (const auto& h_i : hyps) digest.add(h_i);
  for (const auto& mu : mus) digest.add(mu.values());
  report.inputs_digest = digest.hex();
  return report;
}

BoundReport cor15_verify(const Dist& p, std::span<const Dist> sources, std::span<const Dist> approx,
                         std::span<const Hypothesis> hyps, const Hypothesis& f, const LossSpec& loss, double alpha,
                         double eta, double delta) {
  require_hyps(sources, hyps, "cor15_verify");
  const RobustFitResult fit = robust_fit(approx, hyps, f, loss, eta, delta);
  const double slack = std::max(delta, fit.delta);
  const double measured = expected_loss(p, combine_smoothed(approx, hyps, fit.weights, eta), f, loss);
  const double eps = max_source_loss(sources, hyps, f, loss);
  BoundReport report = cor15_bound(p, sources, approx, eps, loss.bound_M, alpha, slack, measured);
  InputDigest digest;
  digest.add(report.inputs_digest).add(f).add(eta);
  for (const auto& h : hyps) digest.add(h);
  report.inputs_digest = digest.hex();
  return report;
}

}  // namespace msa
