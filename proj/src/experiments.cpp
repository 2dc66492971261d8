#include "msa/experiments.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "msa/combiners.hpp"
#include "msa/divergence.hpp"
#include "msa/fitting.hpp"
#include "msa/parallel.hpp"
#include "msa/random.hpp"

namespace msa {

namespace {

constexpr double kRidge = 1e-8;

// Sample stream ids under the experiment seed.
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 16;
constexpr std::uint64_t kFlipStream = 32;
constexpr std::uint64_t kApproxStream = 48;

struct GridSetup {
  SupportPtr support;
  std::vector<Dist> sources;  // Q_1: g1 g2 g3, Q_2: g1 g3 g4
  Dist p;                     // g1 .. g4
  Hypothesis f;
};

GridSetup build_grid(const GaussianGridConfig& cfg) {
  cfg.validate();
  auto support = grid_support(cfg);
  auto uniform_of = [&](std::initializer_list<std::size_t> which) {
    std::vector<GaussianComponent> comps;
    for (std::size_t i : which) comps.push_back({cfg.centers[i], 1.0});
    return discretize_gaussian_mixture(comps, cfg, support);
  };
  std::vector<Dist> sources{uniform_of({0, 1, 2}), uniform_of({0, 2, 3})};
  Dist p = uniform_of({0, 1, 2, 3});
  Hypothesis f = quadrant_target(support);
  return {support, std::move(sources), std::move(p), std::move(f)};
}

std::vector<double> labels_at(const Hypothesis& f, std::span<const std::size_t> samples) {
  std::vector<double> y;
  y.reserve(samples.size());
  for (std::size_t s : samples) y.push_back(f[s]);
  return y;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = rank;
    i = j + 1;
  }
  return ranks;
}

double first_argmin(const std::vector<ExperimentRow>& rows, double ExperimentRow::*column) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < rows.size(); ++j)
    if (rows[j].*column < rows[best].*column) best = j;
  return rows[best].lambda;
}

double lambda_at(const GaussianGridConfig& cfg, std::size_t j) {
  return static_cast<double>(j) / static_cast<double>(cfg.lambda_steps - 1);
}

}  // namespace

void GaussianGridConfig::validate() const {
  if (grid_cells < 8) throw InputError("config: grid_cells must be at least 8");
  if (lambda_steps < 3) throw InputError("config: lambda_steps must be at least 3");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InputError("config: variance must be positive");
  if (!(grid_extent > 0.0) || !std::isfinite(grid_extent)) throw InputError("config: grid_extent must be positive");
  if (n_train < 3) throw InputError("config: n_train must be at least 3");
  if (n_test < 1) throw InputError("config: n_test must be positive");
  if (!(alpha > 1.0)) throw InputError("config: alpha must exceed 1");
}

SupportPtr grid_support(const GaussianGridConfig& cfg) {
  const std::size_t n = cfg.grid_cells;
  const double step = 2.0 * cfg.grid_extent / static_cast<double>(n);
  std::vector<std::string> ids;
  std::vector<std::vector<double>> coords;
  ids.reserve(n * n);
  coords.reserve(n * n);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      const double x1 = -cfg.grid_extent + (static_cast<double>(col) + 0.5) * step;
      const double x2 = -cfg.grid_extent + (static_cast<double>(row) + 0.5) * step;
      if (n % 2 == 0 && (x1 == 0.0 || x2 == 0.0))
        throw InputError("grid_support: a cell center lies on an axis");
      ids.push_back("c" + std::to_string(row) + "_" + std::to_string(col));
      coords.push_back({x1, x2});
    }
  }
  return make_support(std::move(ids), std::move(coords));
}

Dist discretize_gaussian_mixture(std::span<const GaussianComponent> components, const GaussianGridConfig& cfg,
                                 SupportPtr support) {
  cfg.validate();
  if (components.empty()) throw InputError("discretize: no components");
  double total_weight = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0)) throw InputError("discretize: component weights must be nonnegative");
    total_weight += c.weight;
  }
  if (!(total_weight > 0.0)) throw InputError("discretize: component weights sum to zero");
  if (!support) support = grid_support(cfg);
  if (!support->has_coords()) throw InputError("discretize: support has no coordinates");

  std::vector<double> density(support->size(), 0.0);
  for (std::size_t x = 0; x < support->size(); ++x) {
    const auto c = support->coord(x);
    double v = 0.0;
    for (const auto& comp : components) {
      if (comp.weight == 0.0) continue;
      const double d0 = c[0] - comp.center[0];
      const double d1 = c[1] - comp.center[1];
      v += comp.weight * std::exp(-(d0 * d0 + d1 * d1) / (2.0 * cfg.variance));
    }
    density[x] = v;
  }
  const double total = std::accumulate(density.begin(), density.end(), 0.0);
  for (auto& v : density) v /= total;
  return Dist(support, std::move(density));
}

std::vector<std::size_t> sample_dist(const Dist& d, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) throw InputError("sample_dist: n must be positive");
  const auto probs = d.probs();
  std::vector<double> cdf(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());
  std::size_t last = probs.size() - 1;
  while (last > 0 && probs[last] == 0.0) --last;

  Philox rng(seed, stream);
  std::vector<std::size_t> out(n);
  for (auto& s : out) {
    const double u = rng.uniform() * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    s = std::min(static_cast<std::size_t>(it - cdf.begin()), last);
  }
  return out;
}

Dist empirical_dist(std::span<const std::size_t> samples, const SupportPtr& support, double smoothing) {
  if (samples.empty()) throw InputError("empirical_dist: no samples");
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) throw InputError("empirical_dist: smoothing must be >= 0");
  std::vector<double> counts(support->size(), 0.0);
  for (std::size_t s : samples) {
    if (s >= counts.size()) throw InputError("empirical_dist: sample index outside the support");
    counts[s] += 1.0;
  }
  const double denom = static_cast<double>(samples.size()) + smoothing * static_cast<double>(support->size());
  for (auto& c : counts) c = (c + smoothing) / denom;
  return Dist(support, std::move(counts));
}

LinearFit fit_least_squares(std::span<const std::size_t> samples, std::span<const double> labels,
                            const SupportPtr& support) {
  if (samples.size() < 3) throw InputError("train_least_squares: need at least 3 samples");
  if (samples.size() != labels.size()) throw InputError("train_least_squares: sample and label counts differ");
  if (!support->has_coords()) throw InputError("train_least_squares: support has no coordinates");
  const auto dim = static_cast<Eigen::Index>(support->coord(0).size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim + 1, dim + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + 1);
  Eigen::VectorXd row(dim + 1);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto c = support->coord(samples[s]);
    for (Eigen::Index j = 0; j < dim; ++j) row[j] = c[static_cast<std::size_t>(j)];
    row[dim] = 1.0;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(row);
    rhs += labels[s] * row;
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += kRidge;
  const Eigen::VectorXd sol = gram.ldlt().solve(rhs);
  LinearFit fit;
  fit.w.assign(sol.data(), sol.data() + dim);
  fit.b = sol[dim];
  return fit;
}

Hypothesis train_least_squares(std::span<const std::size_t> samples, std::span<const double> labels,
                               const SupportPtr& support, double range_bound) {
  for (double y : labels)
    if (!(y >= 0.0 && y <= range_bound)) throw InputError("train_least_squares: label outside [0, B]");
  const LinearFit fit = fit_least_squares(samples, labels, support);
  std::vector<double> values(support->size());
  for (std::size_t x = 0; x < values.size(); ++x) {
    const auto c = support->coord(x);
    double v = fit.b;
    for (std::size_t j = 0; j < fit.w.size(); ++j) v += fit.w[j] * c[j];
    values[x] = std::clamp(v, 0.0, range_bound);
  }
  return Hypothesis(support, std::move(values), range_bound);
}

Hypothesis quadrant_target(const SupportPtr& support) {
  if (!support->has_coords()) throw InputError("quadrant_target: support has no coordinates");
  std::vector<double> values(support->size());
  for (std::size_t x = 0; x < values.size(); ++x) {
    const auto c = support->coord(x);
    values[x] = c[0] * c[1] > 0.0 ? 1.0 : 0.0;
  }
  return Hypothesis(support, std::move(values), 1.0);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InputError("spearman: need two equal-length columns");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double mean = 0.5 * static_cast<double>(a.size() + 1);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

ExperimentResult run_gaussian_experiment(const GaussianGridConfig& cfg) {
  const GridSetup grid = build_grid(cfg);
  const AlphaOrder alpha = AlphaOrder::from_value(cfg.alpha);
  const LossSpec loss = LossSpec::squared(1.0);

  std::vector<Hypothesis> hyps;
  for (std::size_t i = 0; i < grid.sources.size(); ++i) {
    const auto train = sample_dist(grid.sources[i], cfg.n_train, cfg.seed, kTrainStream + i);
    hyps.push_back(train_least_squares(train, labels_at(grid.f, train), grid.support));
  }
  const auto test = sample_dist(grid.p, cfg.n_test, cfg.seed, kTestStream);

  double eps = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) eps = std::max(eps, expected_loss(grid.sources[i], hyps[i], grid.f, loss));

  ExperimentResult result;
  result.rows.resize(cfg.lambda_steps);
  parallel_for(
      cfg.lambda_steps,
      [&](std::size_t j) {
        const double lambda = lambda_at(cfg, j);
        const SimplexWeights weights({lambda, 1.0 - lambda});
        const Hypothesis h = combine_distribution_weighted(grid.sources, hyps, weights);
        double sq = 0.0;
        for (std::size_t s : test) sq += loss(h[s], grid.f[s]);
        const double bits = renyi_divergence(grid.p, mixture(grid.sources, weights), alpha).bits;
        const double bound = std::isinf(bits) ? kInf : std::pow(std::exp2(bits) * eps, alpha.holder_exponent());
        result.rows[j] = {lambda, sq / static_cast<double>(test.size()), bits, bound};
      },
      cfg.threads);

  std::vector<double> mse, div;
  for (const auto& r : result.rows) {
    mse.push_back(r.mse);
    div.push_back(r.divergence_bits);
  }
  result.argmin_mse = first_argmin(result.rows, &ExperimentRow::mse);
  result.argmin_div = first_argmin(result.rows, &ExperimentRow::divergence_bits);
  result.rank_correlation = spearman(mse, div);
  result.min_divergence_bits = fit_mixture(grid.p, grid.sources, alpha).objective_bits;
  return result;
}

MultiFunctionResult run_multi_function_experiment(const GaussianGridConfig& cfg, double perturbation) {
  if (!(perturbation >= 0.0 && perturbation < 0.5)) throw InputError("multifunc: perturbation must lie in [0, 0.5)");
  const GridSetup grid = build_grid(cfg);
  const AlphaOrder alpha = AlphaOrder::from_value(cfg.alpha);
  const std::size_t n = grid.support->size();

  std::vector<std::size_t> by_mass(n);
  std::iota(by_mass.begin(), by_mass.end(), std::size_t{0});
  std::stable_sort(by_mass.begin(), by_mass.end(), [&](std::size_t a, std::size_t b) { return grid.p[a] > grid.p[b]; });
  const std::size_t decile = std::max<std::size_t>(1, n / 10);

  std::vector<Hypothesis> source_fs;
  std::vector<Hypothesis> hyps;
  for (std::size_t i = 0; i < grid.sources.size(); ++i) {
    Philox rng(cfg.seed, kFlipStream + i);
    std::vector<double> values(grid.f.values().begin(), grid.f.values().end());
    for (std::size_t m = 0; m < decile; ++m)
      if (rng.bernoulli(perturbation)) values[by_mass[m]] = 1.0 - values[by_mass[m]];
    if (perturbation > 0.0)
      for (std::size_t m = n - decile; m < n; ++m) values[by_mass[m]] = 1.0 - values[by_mass[m]];
    source_fs.emplace_back(grid.support, std::move(values), 1.0);
    const auto train = sample_dist(grid.sources[i], cfg.n_train, cfg.seed, kTrainStream + i);
    hyps.push_back(train_least_squares(train, labels_at(source_fs.back(), train), grid.support));
  }

  MultiFunctionResult result;
  for (const auto& f_i : source_fs)
    result.delta = std::max(result.delta, expected_loss(grid.p, f_i, grid.f, LossSpec::absolute()));
  result.lambdas.resize(cfg.lambda_steps);
  std::vector<std::array<BoundReport, 2>> per_row(cfg.lambda_steps);
  parallel_for(
      cfg.lambda_steps,
      [&](std::size_t j) {
        const double lambda = lambda_at(cfg, j);
        result.lambdas[j] = lambda;
        const SimplexWeights weights({lambda, 1.0 - lambda});
        per_row[j] = {
            thm16_verify(grid.p, grid.sources, hyps, source_fs, grid.f, LossSpec::absolute(), weights, alpha),
            thm17_verify(grid.p, grid.sources, hyps, source_fs, grid.f, LossSpec::squared(), weights, alpha)};
      },
      cfg.threads);
  for (auto& pair : per_row)
    for (auto& r : pair) result.reports.push_back(std::move(r));
  return result;
}

double approximation_divergence(const GaussianGridConfig& cfg, std::size_t n, std::uint64_t seed, double smoothing) {
  const GridSetup grid = build_grid(cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.sources.size(); ++i) {
    const auto samples = sample_dist(grid.sources[i], n, seed, kApproxStream + i);
    const Dist q_hat = empirical_dist(samples, grid.support, smoothing);
    worst = std::max(worst, renyi_divergence(grid.sources[i], q_hat, AlphaOrder::finite(2.0)).bits);
  }
  return worst;
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result) {
  out << "lambda,mse,d2_bits,thm2_bound\n";
  char buf[128];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", r.lambda, r.mse, r.divergence_bits, r.thm2_bound);
    out << buf;
  }
}

}  // namespace msa
