#include "msa/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "msa/combiners.hpp"

namespace msa {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kMaxStep = 1e12;
constexpr double kMinStep = 1e-30;

// Softmax of log-weights onto the simplex.
std::vector<double> softmax(std::span<const double> theta) {
  const double peak = *std::max_element(theta.begin(), theta.end());
  std::vector<double> w(theta.size());
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) total += (w[i] = std::exp(theta[i] - peak));
  for (double& v : w) v /= total;
  return w;
}

SimplexWeights to_weights(std::vector<double> w) { return SimplexWeights::normalized(std::move(w)); }

// Restriction of the fitting problem to the points P charges.
struct ChargedPoints {
  std::vector<double> p;                // P(x)
  std::vector<std::vector<double>> qs;  // qs[i][j] = Q_i(x_j)

  ChargedPoints(const Dist& target, std::span<const Dist> sources) : qs(sources.size()) {
    for (std::size_t x = 0; x < target.size(); ++x) {
      if (target[x] == 0.0) continue;
      bool covered = false;
      for (const Dist& q : sources) covered = covered || q[x] > 0.0;
      if (!covered)
        throw InputError("fit_mixture: target charges point '" + target.support()->id(x) +
                         "' which no source charges");
      p.push_back(target[x]);
      for (std::size_t i = 0; i < sources.size(); ++i) qs[i].push_back(sources[i][x]);
    }
  }

  std::size_t points() const { return p.size(); }
  std::size_t k() const { return qs.size(); }

  void mix(std::span<const double> lambda, std::vector<double>& q) const {
    q.assign(points(), 0.0);
    for (std::size_t i = 0; i < k(); ++i) {
      if (lambda[i] == 0.0) continue;
      for (std::size_t j = 0; j < points(); ++j) q[j] += lambda[i] * qs[i][j];
    }
  }
};

// D_alpha(P || Q_lambda) in bits and its gradient in lambda, for alpha = 1
// or finite alpha > 1. With w the normalized terms P^a Q^(1-a), the partial
// derivative is -(1/ln 2) sum_x w_x Q_i(x) / Q_lambda(x).
class MixtureObjective {
 public:
  MixtureObjective(const ChargedPoints& pts, AlphaOrder alpha) : pts_(pts), alpha_(alpha) {}

  double value(std::span<const double> lambda) {
    pts_.mix(lambda, q_);
    for (double v : q_)
      if (!(v > 0.0)) return kInf;
    return renyi_divergence_bits(pts_.p, q_, alpha_);
  }

  // Value at the point last passed to value(); fills the gradient.
  void gradient(std::vector<double>& grad) {
    const std::size_t m = pts_.points();
    w_.resize(m);
    if (alpha_.kind() == AlphaOrder::Kind::one) {
      w_ = pts_.p;
    } else {
      const double a = alpha_.value();
      for (std::size_t j = 0; j < m; ++j) w_[j] = a * std::log(pts_.p[j]) + (1.0 - a) * std::log(q_[j]);
      const double lse = log_sum_exp(w_);
      for (double& v : w_) v = std::exp(v - lse);
    }
    grad.assign(pts_.k(), 0.0);
    for (std::size_t i = 0; i < pts_.k(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += w_[j] * pts_.qs[i][j] / q_[j];
      grad[i] = -acc / kLn2;
    }
  }

  // Hessian at the point of the last gradient() call. With r_i = Q_i / Q_lambda
  // and m_i = sum_x w_x r_i: H_ij = [a sum_x w_x r_i r_j - (a - 1) m_i m_j] / ln 2.
  Eigen::MatrixXd hessian(std::span<const double> grad) const {
    const std::size_t k = pts_.k();
    const double a = alpha_.kind() == AlphaOrder::Kind::one ? 1.0 : alpha_.value();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    std::vector<double> r(k);
    for (std::size_t j = 0; j < pts_.points(); ++j) {
      for (std::size_t i = 0; i < k; ++i) r[i] = pts_.qs[i][j] / q_[j];
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t l = 0; l <= i; ++l) h(i, l) += a * w_[j] * r[i] * r[l];
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l <= i; ++l) {
        // m_i = -ln2 * grad_i
        const double mm = kLn2 * kLn2 * grad[i] * grad[l];
        h(i, l) = (h(i, l) - (a - 1.0) * mm) / kLn2;
        h(l, i) = h(i, l);
      }
    return h;
  }

 private:
  const ChargedPoints& pts_;
  AlphaOrder alpha_;
  std::vector<double> q_;
  std::vector<double> w_;
};

double frank_wolfe_gap(std::span<const double> grad, std::span<const double> lambda) {
  double dot = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) dot += grad[i] * lambda[i];
  return dot - *std::min_element(grad.begin(), grad.end());
}

// Newton step for the objective restricted to the face of the simplex
// spanned by the charged weights plus the descent coordinates, clipped to
// stay feasible.
std::optional<std::vector<double>> newton_step(const MixtureObjective& objective, std::span<const double> lambda,
                                               std::span<const double> grad) {
  const std::size_t k = lambda.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) mean += lambda[i] * grad[i];
  std::vector<std::size_t> face;
  for (std::size_t i = 0; i < k; ++i)
    if (lambda[i] > 1e-12 || grad[i] < mean) face.push_back(i);
  if (face.size() < 2) return std::nullopt;

  const Eigen::MatrixXd h = objective.hessian(grad);
  const auto f = static_cast<Eigen::Index>(face.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(f + 1, f + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(f + 1);
  double scale = 0.0;
  for (Eigen::Index a = 0; a < f; ++a) scale = std::max(scale, h(face[a], face[a]));
  for (Eigen::Index a = 0; a < f; ++a) {
    for (Eigen::Index b = 0; b < f; ++b) kkt(a, b) = h(face[a], face[b]);
    kkt(a, a) += 1e-12 * scale;
    kkt(a, f) = kkt(f, a) = 1.0;
    rhs[a] = -grad[face[a]];
  }
  const Eigen::VectorXd sol = kkt.colPivHouseholderQr().solve(rhs);
  if (!sol.allFinite()) return std::nullopt;

  double t = 1.0;
  for (Eigen::Index a = 0; a < f; ++a)
    if (sol[a] < 0.0) t = std::min(t, lambda[face[a]] / -sol[a]);
  std::vector<double> next(lambda.begin(), lambda.end());
  for (Eigen::Index a = 0; a < f; ++a) next[face[a]] = std::max(0.0, lambda[face[a]] + t * sol[a]);
  double total = 0.0;
  for (double v : next) total += v;
  if (!(total > 0.0)) return std::nullopt;
  for (double& v : next) v /= total;
  return next;
}

FitResult fit_finite_order(const ChargedPoints& pts, AlphaOrder alpha, double tol, std::size_t max_iters) {
  const std::size_t k = pts.k();
  MixtureObjective objective(pts, alpha);
  std::vector<double> theta(k, 0.0);
  std::vector<double> lambda = softmax(theta);
  std::vector<double> grad;
  double value = objective.value(lambda);
  objective.gradient(grad);
  double gap = frank_wolfe_gap(grad, lambda);
  double step = 1.0;

  std::size_t iter = 0;
  bool stalled = false;
  while (gap > tol && iter < max_iters && !stalled) {
    ++iter;
    // A Newton step is kept when it lowers the gap without raising the value
    // beyond rounding; value-based backtracking alone cannot resolve the last
    // digits of the gap.
    if (auto newton = newton_step(objective, lambda, grad)) {
      const double newton_value = objective.value(*newton);
      if (newton_value <= value + 1e-14 * std::max(1.0, std::abs(value))) {
        std::vector<double> newton_grad;
        objective.gradient(newton_grad);
        const double newton_gap = frank_wolfe_gap(newton_grad, *newton);
        if (newton_gap < gap) {
          lambda = std::move(*newton);
          for (std::size_t i = 0; i < k; ++i) theta[i] = std::log(std::max(lambda[i], 1e-300));
          value = newton_value;
          grad = std::move(newton_grad);
          gap = newton_gap;
          continue;
        }
      }
      objective.value(lambda);
      objective.gradient(grad);
    }
    std::vector<double> trial_theta(k);
    std::vector<double> trial;
    double trial_value = kInf;
    step = std::min(2.0 * step, kMaxStep);
    for (;;) {
      for (std::size_t i = 0; i < k; ++i) trial_theta[i] = theta[i] - step * grad[i];
      trial = softmax(trial_theta);
      double decrease = 0.0;  // <grad, trial - lambda>, nonpositive for a mirror step
      for (std::size_t i = 0; i < k; ++i) decrease += grad[i] * (trial[i] - lambda[i]);
      trial_value = objective.value(trial);
      if (trial_value <= value + 0.5 * decrease) break;
      step *= 0.5;
      if (step < kMinStep) {
        stalled = true;
        break;
      }
    }
    if (stalled) break;
    theta = std::move(trial_theta);
    lambda = std::move(trial);
    value = trial_value;
    objective.gradient(grad);
    gap = frank_wolfe_gap(grad, lambda);
  }
  return FitResult{to_weights(lambda), value, iter, gap <= tol, std::max(0.0, gap)};
}

// Maximize v = min_x Q_lambda(x)/P(x) over the simplex. Through y = lambda/v
// this is min sum(y) s.t. A y >= 1, y >= 0, A[x][i] = Q_i(x)/P(x); the dual
// max sum(u) s.t. A^T u <= 1, u >= 0 starts feasible at u = 0, so a single
// phase of the tableau simplex suffices and the optimal y is read off the
// reduced costs of the slack columns.
FitResult fit_infinite_order(const ChargedPoints& pts, double tol, std::size_t max_iters) {
  const std::size_t k = pts.k();
  const std::size_t m = pts.points();
  const std::size_t cols = m + k;

  // Column scaling u_j = u'_j P_j / max_i Q_i(x_j) keeps the tableau in [0, 1].
  std::vector<double> col_scale(m);
  std::vector<double> rc(cols, 0.0);  // reduced costs
  std::vector<std::vector<double>> tab(k, std::vector<double>(cols, 0.0));
  std::vector<double> rhs(k, 1.0);
  std::vector<std::size_t> basis(k);
  for (std::size_t j = 0; j < m; ++j) {
    double peak = 0.0;
    for (std::size_t i = 0; i < k; ++i) peak = std::max(peak, pts.qs[i][j]);
    col_scale[j] = peak;
    rc[j] = pts.p[j] / peak;
    for (std::size_t i = 0; i < k; ++i) tab[i][j] = pts.qs[i][j] / peak;
  }
  for (std::size_t i = 0; i < k; ++i) {
    tab[i][m + i] = 1.0;
    basis[i] = m + i;
  }
  const double cost_eps = 1e-14 * *std::max_element(rc.begin(), rc.begin() + static_cast<std::ptrdiff_t>(m));
  constexpr double kPivotEps = 1e-12;

  std::size_t iter = 0;
  std::size_t degenerate_run = 0;
  bool optimal = false;
  while (iter < max_iters) {
    // Dantzig's rule, falling back to Bland's rule on long degenerate runs.
    const bool bland = degenerate_run > 50;
    std::size_t enter = cols;
    double best = cost_eps;
    for (std::size_t j = 0; j < cols; ++j) {
      if (rc[j] > best) {
        enter = j;
        if (bland) break;
        best = rc[j];
      }
    }
    if (enter == cols) {
      optimal = true;
      break;
    }
    std::size_t leave = k;
    double ratio = kInf;
    for (std::size_t i = 0; i < k; ++i) {
      if (tab[i][enter] <= kPivotEps) continue;
      const double r = rhs[i] / tab[i][enter];
      if (r < ratio || (r == ratio && leave < k && basis[i] < basis[leave])) {
        ratio = r;
        leave = i;
      }
    }
    if (leave == k) throw InputError("fit_mixture: unbounded linear program (uncovered target mass)");
    degenerate_run = ratio == 0.0 ? degenerate_run + 1 : 0;

    const double pivot = tab[leave][enter];
    for (double& v : tab[leave]) v /= pivot;
    rhs[leave] /= pivot;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == leave) continue;
      const double factor = tab[i][enter];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) tab[i][j] -= factor * tab[leave][j];
      rhs[i] = std::max(0.0, rhs[i] - factor * rhs[leave]);
      tab[i][enter] = 0.0;
    }
    const double factor = rc[enter];
    for (std::size_t j = 0; j < cols; ++j) rc[j] -= factor * tab[leave][j];
    rc[enter] = 0.0;
    basis[leave] = enter;
    ++iter;
  }

  std::vector<double> y(k);
  for (std::size_t i = 0; i < k; ++i) y[i] = std::max(0.0, -rc[m + i]);
  if (std::accumulate(y.begin(), y.end(), 0.0) <= 0.0) y.assign(k, 1.0);
  const SimplexWeights weights = to_weights(y);

  // Certificate: the dual point u, normalized, bounds the optimum from above.
  std::vector<double> u(m, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    if (basis[i] < m) u[basis[i]] = rhs[i] * pts.p[basis[i]] / col_scale[basis[i]];
  const double u_total = std::accumulate(u.begin(), u.end(), 0.0);
  double v_upper = kInf;
  if (u_total > 0.0) {
    v_upper = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += u[j] / u_total * pts.qs[i][j] / pts.p[j];
      v_upper = std::max(v_upper, acc);
    }
  }

  std::vector<double> q;
  pts.mix(weights.values(), q);
  double v = kInf;
  for (std::size_t j = 0; j < m; ++j) v = std::min(v, q[j] / pts.p[j]);
  const double objective = std::max(0.0, -std::log2(v));
  const double gap = std::max(0.0, std::log2(v_upper) - std::log2(v));
  return FitResult{weights, objective, iter, optimal && gap <= tol, gap};
}

}  // namespace

double mixture_divergence_bits(const Dist& p, std::span<const Dist> sources, const SimplexWeights& lambda,
                               AlphaOrder alpha) {
  return renyi_divergence(p, mixture(sources, lambda), alpha).bits;
}

FitResult fit_mixture(const Dist& p, std::span<const Dist> sources, AlphaOrder alpha, double tol,
                      std::size_t max_iters) {
  require_common_support(sources, "fit_mixture");
  if (!same_support(p.support(), sources.front().support()))
    throw InputError("fit_mixture: target and sources do not share a support");
  if (!(alpha.kind() == AlphaOrder::Kind::one || alpha.above_one()))
    throw InputError("fit_mixture: alpha must be >= 1, got " + alpha.to_string());
  if (!(tol > 0.0)) throw InputError("fit_mixture: tolerance must be positive");

  const ChargedPoints pts(p, sources);
  if (sources.size() == 1) {
    const auto w = SimplexWeights::vertex(1, 0);
    return FitResult{w, mixture_divergence_bits(p, sources, w, alpha), 0, true, 0.0};
  }
  if (alpha.is_infinite()) return fit_infinite_order(pts, tol, max_iters);
  return fit_finite_order(pts, alpha, tol, max_iters);
}

namespace {

// Per-source losses of the smoothed combiner and their Jacobian in lambda.
// With D(x) = sum_j lambda_j Q_j(x) + eta U(x), dh(x)/dlambda_j = Q_j(x) (h_j(x) - h(x)) / D(x).
class SmoothedLossModel {
 public:
  SmoothedLossModel(std::span<const Dist> sources, std::span<const Hypothesis> hyps, const Hypothesis& f,
                    const LossSpec& loss, double eta)
      : sources_(sources), hyps_(hyps), f_(f), loss_(loss), eta_(eta) {
    n_ = sources.front().size();
    k_ = sources.size();
    share_ = eta / (static_cast<double>(k_) * static_cast<double>(n_));
    uniform_mass_ = eta / static_cast<double>(n_);
  }

  std::size_t k() const { return k_; }

  // Fills losses; with jac != nullptr also jac[i * k + j] = d loss_i / d lambda_j.
  void evaluate(std::span<const double> lambda, std::vector<double>& losses, std::vector<double>* jac) const {
    losses.assign(k_, 0.0);
    if (jac) jac->assign(k_ * k_, 0.0);
    std::vector<double> dh(k_);
    for (std::size_t x = 0; x < n_; ++x) {
      double denom = uniform_mass_;
      double numer = 0.0;
      double lo = kInf;
      double hi = -kInf;
      for (std::size_t i = 0; i < k_; ++i) {
        const double w = lambda[i] * sources_[i][x] + share_;
        denom += lambda[i] * sources_[i][x];
        numer += w * hyps_[i][x];
        lo = std::min(lo, hyps_[i][x]);
        hi = std::max(hi, hyps_[i][x]);
      }
      const double h = std::clamp(numer / denom, lo, hi);
      const double l = loss_(h, f_[x]);
      for (std::size_t i = 0; i < k_; ++i) losses[i] += sources_[i][x] * l;
      if (!jac) continue;
      const double dl = loss_.derivative(h, f_[x]);
      if (dl == 0.0) continue;
      for (std::size_t j = 0; j < k_; ++j) dh[j] = sources_[j][x] * (hyps_[j][x] - h) / denom;
      for (std::size_t i = 0; i < k_; ++i) {
        const double qi = sources_[i][x] * dl;
        if (qi == 0.0) continue;
        for (std::size_t j = 0; j < k_; ++j) (*jac)[i * k_ + j] += qi * dh[j];
      }
    }
  }

  double worst(std::span<const double> lambda) const {
    std::vector<double> losses;
    evaluate(lambda, losses, nullptr);
    return *std::max_element(losses.begin(), losses.end());
  }

 private:
  std::span<const Dist> sources_;
  std::span<const Hypothesis> hyps_;
  const Hypothesis& f_;
  const LossSpec& loss_;
  double eta_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  double share_ = 0.0;
  double uniform_mass_ = 0.0;
};

struct BestPoint {
  std::vector<double> lambda;
  double worst = kInf;

  void offer(std::span<const double> candidate, double value) {
    if (value < worst) {
      worst = value;
      lambda.assign(candidate.begin(), candidate.end());
    }
  }
};

// Exponentiated-gradient descent on the log-sum-exp smoothing of the max
// loss, tau * log sum_i exp(loss_i / tau), for a decreasing sequence of tau.
std::size_t polish(const SmoothedLossModel& model, std::vector<double> lambda, double scale, BestPoint& best) {
  const std::size_t k = model.k();
  std::vector<double> theta(k);
  for (std::size_t i = 0; i < k; ++i) theta[i] = std::log(std::max(lambda[i], 1e-300));
  std::vector<double> losses;
  std::vector<double> jac;
  std::size_t evals = 0;

  auto smooth_max = [](std::span<const double> l, double tau) {
    std::vector<double> t(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) t[i] = l[i] / tau;
    return tau * log_sum_exp(t);
  };

  for (double tau_rel : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double tau = tau_rel * scale;
    double step = 1.0 / scale;
    lambda = softmax(theta);
    model.evaluate(lambda, losses, &jac);
    ++evals;
    best.offer(lambda, *std::max_element(losses.begin(), losses.end()));
    double value = smooth_max(losses, tau);
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<double> t(k);
      for (std::size_t i = 0; i < k; ++i) t[i] = losses[i] / tau;
      const auto pi = softmax(t);
      std::vector<double> grad(k, 0.0);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) grad[j] += pi[i] * jac[i * k + j];
      if (frank_wolfe_gap(grad, lambda) <= 1e-12 * scale) break;

      bool accepted = false;
      std::vector<double> trial_theta(k);
      std::vector<double> trial;
      std::vector<double> trial_losses;
      step = std::min(2.0 * step, kMaxStep);
      while (step > kMinStep) {
        for (std::size_t i = 0; i < k; ++i) trial_theta[i] = theta[i] - step * grad[i];
        trial = softmax(trial_theta);
        double decrease = 0.0;
        for (std::size_t i = 0; i < k; ++i) decrease += grad[i] * (trial[i] - lambda[i]);
        model.evaluate(trial, trial_losses, nullptr);
        ++evals;
        const double trial_value = smooth_max(trial_losses, tau);
        if (trial_value <= value + 0.5 * decrease) {
          accepted = true;
          value = trial_value;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      theta = std::move(trial_theta);
      lambda = std::move(trial);
      model.evaluate(lambda, losses, &jac);
      ++evals;
      best.offer(lambda, *std::max_element(losses.begin(), losses.end()));
    }
  }
  return evals;
}

// Points of the simplex lattice {m / res : sum m = res}.
void lattice(std::size_t k, std::size_t res, std::vector<double>& cur, std::size_t remaining,
             std::vector<std::vector<double>>& out) {
  if (cur.size() + 1 == k) {
    cur.push_back(static_cast<double>(remaining) / static_cast<double>(res));
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t m = 0; m <= remaining; ++m) {
    cur.push_back(static_cast<double>(m) / static_cast<double>(res));
    lattice(k, res, cur, remaining - m, out);
    cur.pop_back();
  }
}

void check_robust_inputs(std::span<const Dist> sources, std::span<const Hypothesis> hyps, const Hypothesis& f,
                         const LossSpec& loss, double eta) {
  require_common_support(sources, "robust_fit");
  if (sources.size() != hyps.size()) throw InputError("robust_fit: source and hypothesis counts differ");
  for (const Hypothesis& h : hyps)
    if (!same_support(sources.front().support(), h.support()))
      throw InputError("robust_fit: hypothesis support differs from the sources");
  if (!same_support(sources.front().support(), f.support()))
    throw InputError("robust_fit: target function support differs from the sources");
  if (!loss.convex_first || loss.kind == LossKind::zero_one)
    throw InputError("robust_fit: the loss must be convex in its first argument");
  if (!(eta > 0.0 && eta < 1.0)) throw InputError("robust_fit: eta must lie in (0, 1)");
  const double b = loss.value_bound() * (1.0 + 1e-12);
  for (const Hypothesis& h : hyps)
    if (h.range_bound() > b) throw InputError("robust_fit: hypothesis range exceeds the loss bound");
  if (f.range_bound() > b) throw InputError("robust_fit: target range exceeds the loss bound");
}

}  // namespace

double smoothed_worst_loss(std::span<const Dist> sources, std::span<const Hypothesis> hyps, const Hypothesis& f,
                           const LossSpec& loss, const SimplexWeights& lambda, double eta) {
  check_robust_inputs(sources, hyps, f, loss, eta);
  const SmoothedLossModel model(sources, hyps, f, loss, eta);
  return model.worst(lambda.values());
}

RobustFitResult robust_fit(std::span<const Dist> sources, std::span<const Hypothesis> hyps, const Hypothesis& f,
                           const LossSpec& loss, double eta, double delta, std::size_t max_iters) {
  check_robust_inputs(sources, hyps, f, loss, eta);
  if (!(delta >= 0.0)) throw InputError("robust_fit: delta must be nonnegative");

  const std::size_t k = sources.size();
  double eps = 0.0;
  for (std::size_t i = 0; i < k; ++i) eps = std::max(eps, expected_loss(sources[i], hyps[i], f, loss));

  const SmoothedLossModel model(sources, hyps, f, loss, eta);
  const double scale = loss.bound_M;
  BestPoint best;
  std::size_t evals = 0;
  std::vector<double> losses;
  std::vector<double> jac;

  if (k == 1) {
    std::vector<double> one{1.0};
    best.offer(one, model.worst(one));
  } else {
    // Repeated game: the adversary runs multiplicative weights over sources,
    // the lambda player answers with one exponentiated-gradient step on the
    // adversary's mixture loss. Both the running average and the best
    // iterate are kept.
    const std::size_t rounds = std::max<std::size_t>(max_iters, 1);
    const double rate = std::sqrt(8.0 * std::log(static_cast<double>(k)) / static_cast<double>(rounds));
    std::vector<double> mu(k, 1.0 / static_cast<double>(k));
    std::vector<double> theta(k, 0.0);
    std::vector<double> average(k, 0.0);
    double step = 1.0 / scale;
    for (std::size_t t = 0; t < rounds; ++t) {
      const auto lambda = softmax(theta);
      model.evaluate(lambda, losses, &jac);
      ++evals;
      best.offer(lambda, *std::max_element(losses.begin(), losses.end()));
      for (std::size_t i = 0; i < k; ++i) average[i] += lambda[i] / static_cast<double>(rounds);

      std::vector<double> grad(k, 0.0);
      double mixed = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        mixed += mu[i] * losses[i];
        for (std::size_t j = 0; j < k; ++j) grad[j] += mu[i] * jac[i * k + j];
      }
      step = std::min(2.0 * step, kMaxStep);
      std::vector<double> trial_theta(k);
      std::vector<double> trial_losses;
      while (step > kMinStep) {
        for (std::size_t i = 0; i < k; ++i) trial_theta[i] = theta[i] - step * grad[i];
        const auto trial = softmax(trial_theta);
        double decrease = 0.0;
        for (std::size_t i = 0; i < k; ++i) decrease += grad[i] * (trial[i] - lambda[i]);
        model.evaluate(trial, trial_losses, nullptr);
        ++evals;
        double trial_mixed = 0.0;
        for (std::size_t i = 0; i < k; ++i) trial_mixed += mu[i] * trial_losses[i];
        if (trial_mixed <= mixed + 0.5 * decrease) {
          theta = trial_theta;
          break;
        }
        step *= 0.5;
      }

      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) total += (mu[i] *= std::exp(rate * losses[i] / scale));
      for (double& v : mu) v /= total;
    }
    const auto avg = to_weights(average);
    best.offer(avg.values(), model.worst(avg.values()));

    // The objective is not convex in lambda: polish from several starts,
    // including the best points of a coarse lattice when k is small.
    std::vector<std::vector<double>> starts{best.lambda,
                                            {avg.values().begin(), avg.values().end()},
                                            std::vector<double>(k, 1.0 / static_cast<double>(k))};
    for (std::size_t i = 0; i < k; ++i) {
      const auto v = SimplexWeights::vertex(k, i);
      starts.emplace_back(v.values().begin(), v.values().end());
    }
    if (k <= 4) {
      const std::size_t res = k == 2 ? 20 : (k == 3 ? 10 : 6);
      std::vector<std::vector<double>> grid;
      std::vector<double> cur;
      lattice(k, res, cur, res, grid);
      std::vector<std::pair<double, std::size_t>> ranked;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double w = model.worst(grid[g]);
        ++evals;
        best.offer(grid[g], w);
        ranked.emplace_back(w, g);
      }
      std::sort(ranked.begin(), ranked.end());
      for (std::size_t r = 0; r < std::min<std::size_t>(3, ranked.size()); ++r)
        starts.push_back(grid[ranked[r].second]);
    }
    for (const auto& start : starts) evals += polish(model, start, scale, best);
  }

  const auto weights = to_weights(best.lambda);
  const double worst = model.worst(weights.values());
  return RobustFitResult{weights, eta, worst, eps, worst - eps, worst <= eps + delta, evals};
}

AdversarialTarget adversarial_target(const Dist& q, const Hypothesis& h, const Hypothesis& f, double alpha,
                                     double delta_alpha) {
  if (!same_support(q.support(), h.support()) || !same_support(q.support(), f.support()))
    throw InputError("adversarial_target: q, h and f do not share a support");
  if (!h.is_boolean() || !f.is_boolean())
    throw InputError("adversarial_target: h and f must be Boolean");
  if (!std::isfinite(alpha) || !(alpha > 1.0)) throw InputError("adversarial_target: alpha must be a finite real > 1");
  if (!std::isfinite(delta_alpha)) throw InputError("adversarial_target: delta_alpha must be finite");

  const double eps = expected_loss(q, h, f, LossSpec::zero_one());
  if (!(eps > 0.0 && eps < 1.0))
    throw InputError("adversarial_target: error mass L_Q(h, f) = " + std::to_string(eps) + " must lie in (0, 1)");
  const double min_delta = std::log2(1.0 + eps) / (alpha - 1.0);
  if (delta_alpha < min_delta * (1.0 - 1e-12))
    throw InputError("adversarial_target: delta_alpha below log2(1 + eps)/(alpha - 1) = " + std::to_string(min_delta));

  const double excess = std::expm1((alpha - 1.0) * delta_alpha * std::numbers::ln2);  // 2^((a-1)d) - 1
  const double r = std::max(1.0, std::pow(excess / eps, 1.0 / alpha));
  if (r * eps > 1.0) throw InputError("adversarial_target: r * eps = " + std::to_string(r * eps) + " exceeds 1");

  const double outside = (1.0 - r * eps) / (1.0 - eps);
  std::vector<double> probs(q.size());
  for (std::size_t x = 0; x < q.size(); ++x) probs[x] = (h[x] != f[x] ? r : outside) * q[x];
  Dist p(q.support(), std::move(probs));

  AdversarialTarget out{p, r, delta_alpha, eps, 0.0, 0.0, 0.0};
  out.realized_divergence_bits = renyi_divergence(p, q, AlphaOrder::finite(alpha)).bits;
  out.realized_loss = expected_loss(p, h, f, LossSpec::zero_one());
  out.predicted_loss = std::pow(excess, 1.0 / alpha) * std::pow(eps, (alpha - 1.0) / alpha);
  return out;
}

}  // namespace msa
