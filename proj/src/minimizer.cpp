#include "votebound/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "votebound/margins.hpp"

namespace votebound {

std::vector<double> MarginOperator::margins(const std::vector<double>& rho) const {
  if (rho.size() != cols) throw ConfigError("posterior length mismatch");
  std::vector<double> m(rows, offset);
  for (std::size_t i = 0; i < rows; ++i) {
    double dot = 0.0;
    const double* row = correct.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) dot += row[j] * rho[j];
    m[i] += dot;
  }
  return m;
}

MarginOperator margin_operator(const Dataset& dataset,
                               const std::vector<Voter>& voters, double omega) {
  if (dataset.label_space.kind != LabelKind::multiclass) {
    throw ConfigError("margin_operator requires a multiclass dataset");
  }
  if (!(omega >= 1.0)) {
    throw ConfigError("omega must be >= 1, got " + std::to_string(omega));
  }
  if (voters.empty()) throw ConfigError("voter pool is empty");
  for (const Voter& v : voters) {
    v.validate(dataset.label_space, dataset.size());
  }
  MarginOperator op;
  op.rows = dataset.size();
  op.cols = voters.size();
  op.offset = -1.0 / omega;
  op.correct.assign(op.rows * op.cols, 0.0);
  for (std::size_t i = 0; i < op.rows; ++i) {
    const int y = dataset.examples[i].target.cls;
    for (std::size_t j = 0; j < op.cols; ++j) {
      if (voters[j].output(dataset, i).cls == y) op.correct[i * op.cols + j] = 1.0;
    }
  }
  return op;
}

std::vector<double> project_to_simplex(std::vector<double> v) {
  if (v.empty()) throw ConfigError("cannot project an empty vector");
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  std::size_t support = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) {
      tau = candidate;
      support = k + 1;
    }
  }
  (void)support;
  for (double& x : v) x = std::max(0.0, x - tau);
  // kill residual drift so iterates stay on the simplex to ~1e-16
  double sum = std::accumulate(v.begin(), v.end(), 0.0);
  if (sum > 0.0 && std::abs(sum - 1.0) > 1e-15) {
    for (double& x : v) x /= sum;
  }
  return v;
}

namespace {

// Projection onto the affine set {1.x = 1, a.x = target}. Falls back to the
// sum constraint alone when a is (numerically) parallel to 1.
std::vector<double> project_to_affine(std::vector<double> v,
                                      const std::vector<double>& a,
                                      double target) {
  const std::size_t n = v.size();
  const double nn = static_cast<double>(n);
  double sum_a = 0.0, aa = 0.0, sum_v = 0.0, av = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sum_a += a[j];
    aa += a[j] * a[j];
    sum_v += v[j];
    av += a[j] * v[j];
  }
  // Gram matrix of the constraint normals {1, a}
  const double det = nn * aa - sum_a * sum_a;
  const double scale = std::max(1.0, nn * aa);
  const double r1 = sum_v - 1.0;
  const double r2 = av - target;
  if (det <= 1e-14 * scale) {
    const double shift = r1 / nn;
    for (double& x : v) x -= shift;
    return v;
  }
  const double lambda1 = (aa * r1 - sum_a * r2) / det;
  const double lambda2 = (nn * r2 - sum_a * r1) / det;
  for (std::size_t j = 0; j < n; ++j) v[j] -= lambda1 + lambda2 * a[j];
  return v;
}

}  // namespace

std::vector<double> project_to_slice(std::vector<double> v,
                                     const std::vector<double>& a,
                                     double target, double* slice_gap) {
  if (v.size() != a.size()) throw ConfigError("projection size mismatch");
  std::vector<double> x = std::move(v);
  double gap = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    x = project_to_affine(std::move(x), a, target);
    x = project_to_simplex(std::move(x));
    double ax = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) ax += a[j] * x[j];
    gap = std::abs(ax - target);
    if (gap <= 1e-13) break;
  }
  if (slice_gap != nullptr) *slice_gap = gap;
  return x;
}

namespace {

struct Subproblem {
  const MarginOperator& op;
  const std::vector<double>& weights;  // dataset weights

  double mu2(const std::vector<double>& rho) const {
    const auto m = op.margins(rho);
    double v = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) v += weights[i] * m[i] * m[i];
    return v;
  }

  std::vector<double> gradient(const std::vector<double>& rho) const {
    const auto m = op.margins(rho);
    std::vector<double> g(op.cols, 0.0);
    for (std::size_t i = 0; i < op.rows; ++i) {
      const double wi = 2.0 * weights[i] * m[i];
      const double* row = op.correct.data() + i * op.cols;
      for (std::size_t j = 0; j < op.cols; ++j) g[j] += wi * row[j];
    }
    return g;
  }
};

struct SliceSolution {
  std::vector<double> rho;
  double mu2 = 0.0;
  int iterations = 0;
  bool converged = false;
  bool monotone = true;
};

// Projected gradient descent for min mu2(rho) over the simplex slice
// {mu1(rho) = mu}. Backtracking line search halves the step from 1.0 until
// the Armijo condition with constant 1e-4 holds along the projected step.
SliceSolution solve_slice(const Subproblem& sub, const std::vector<double>& a,
                          double slice_target,
                          const std::vector<double>& start,
                          int max_iterations, double tolerance) {
  constexpr double kArmijo = 1e-4;
  SliceSolution sol;
  double gap = 0.0;
  sol.rho = project_to_slice(start, a, slice_target, &gap);
  bool use_penalty = gap > 1e-9;  // alternation stalled; penalize the slice
  constexpr double kPenalty = 1e6;

  auto objective = [&](const std::vector<double>& rho) {
    double f = sub.mu2(rho);
    if (use_penalty) {
      double ax = 0.0;
      for (std::size_t j = 0; j < rho.size(); ++j) ax += a[j] * rho[j];
      const double d = ax - slice_target;
      f += kPenalty * d * d;
    }
    return f;
  };
  auto gradient = [&](const std::vector<double>& rho) {
    std::vector<double> g = sub.gradient(rho);
    if (use_penalty) {
      double ax = 0.0;
      for (std::size_t j = 0; j < rho.size(); ++j) ax += a[j] * rho[j];
      const double d = ax - slice_target;
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += 2.0 * kPenalty * d * a[j];
    }
    return g;
  };
  auto project = [&](std::vector<double> rho) {
    return use_penalty ? project_to_simplex(std::move(rho))
                       : project_to_slice(std::move(rho), a, slice_target);
  };

  double f = objective(sol.rho);
  for (; sol.iterations < max_iterations; ++sol.iterations) {
    const std::vector<double> g = gradient(sol.rho);
    double step = 1.0;
    std::vector<double> next;
    double f_next = f;
    double directional = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      std::vector<double> cand(sol.rho.size());
      for (std::size_t j = 0; j < cand.size(); ++j) cand[j] = sol.rho[j] - step * g[j];
      cand = project(std::move(cand));
      directional = 0.0;
      for (std::size_t j = 0; j < cand.size(); ++j) {
        directional += g[j] * (cand[j] - sol.rho[j]);
      }
      const double f_cand = objective(cand);
      if (directional <= 0.0 && f_cand <= f + kArmijo * directional) {
        next = std::move(cand);
        f_next = f_cand;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      sol.converged = true;  // no descent direction left at machine precision
      break;
    }
    if (f_next > f) sol.monotone = false;
    const double decrease = f - f_next;
    sol.rho = std::move(next);
    f = f_next;
    if (decrease < tolerance) {
      sol.converged = true;
      ++sol.iterations;
      break;
    }
  }
  sol.mu2 = sub.mu2(sol.rho);
  return sol;
}

}  // namespace

MinimizeResult minimize(const Dataset& dataset,
                        const std::vector<Voter>& voters,
                        const MinimizeConfig& config) {
  if (!(config.omega >= 1.0)) {
    throw ConfigError("omega must be >= 1, got " + std::to_string(config.omega));
  }
  if (config.grid_points < 1) throw ConfigError("grid must have >= 1 point");

  const MarginOperator op = margin_operator(dataset, voters, config.omega);
  const std::size_t n = op.cols;

  std::vector<double> weights(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    weights[i] = dataset.examples[i].weight;
  }

  // a_j = mu1 at vertex e_j; mu1 is affine in rho, so the reachable range of
  // first moments is exactly [min_j a_j, max_j a_j].
  std::vector<double> a(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = op.offset;
    for (std::size_t i = 0; i < op.rows; ++i) {
      v += weights[i] * op.correct[i * op.cols + j];
    }
    a[j] = v;
  }
  const double mu_min = *std::min_element(a.begin(), a.end());
  const double mu_max = *std::max_element(a.begin(), a.end());
  if (!(mu_max > 0.0)) {
    throw BoundUndefined(
        "every posterior has mu1 <= 0; the omega C-bound is undefined "
        "(mu_max = " + std::to_string(mu_max) + ")");
  }

  const Posterior uniform = Posterior::uniform(n);
  double mu_uniform = op.offset;
  {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += a[j] - op.offset;
    mu_uniform = acc / static_cast<double>(n) + op.offset;
  }

  std::vector<double> grid = config.mu_grid;
  if (grid.empty()) {
    const double hi = mu_max;
    const double lo = std::min(1e-3, hi);
    const int k = config.grid_points;
    for (int t = 0; t < k; ++t) {
      if (t == k - 1 || k == 1) {
        grid.push_back(hi);
      } else {
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(t) /
                                                  static_cast<double>(k - 1)));
      }
    }
    if (mu_uniform > 0.0) grid.push_back(mu_uniform);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const Subproblem sub{op, weights};

  MinimizeResult result;
  result.converged = true;
  double best_bound = std::numeric_limits<double>::infinity();
  bool any_feasible = false;

  auto consider = [&](double mu) {
    if (!(mu > 0.0) || mu < mu_min || mu > mu_max) {
      result.infeasible_grid.push_back(mu);
      return;
    }
    any_feasible = true;
    const SliceSolution sol =
        solve_slice(sub, a, mu, uniform.weights, config.max_iterations,
                    config.tolerance);
    if (!sol.monotone) {
      throw InvariantViolation("objective increased across accepted steps");
    }
    result.iterations += sol.iterations;
    if (!sol.converged) result.converged = false;
    double mu1 = op.offset;
    {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += (a[j] - op.offset) * sol.rho[j];
      mu1 = acc + op.offset;
    }
    if (!(mu1 > 0.0)) return;  // degenerate projection, nothing to report
    const double bound = 1.0 - mu1 * mu1 / sol.mu2;
    if (bound < best_bound) {
      best_bound = bound;
      result.posterior.weights = sol.rho;
      result.mu = mu;
      result.mu1 = mu1;
      result.mu2 = sol.mu2;
      result.bound = bound;
    }
  };

  for (double mu : grid) consider(mu);
  if (!any_feasible) {
    throw BoundUndefined("no feasible mu in the grid; reachable range is [" +
                         std::to_string(mu_min) + ", " +
                         std::to_string(mu_max) + "]");
  }

  // Local refinement: subdivide around the best grid value to decouple the
  // result from the coarse default grid.
  for (int round = 0; round < config.refine_rounds; ++round) {
    if (!std::isfinite(best_bound)) break;
    const double center = result.mu;
    auto it = std::lower_bound(grid.begin(), grid.end(), center);
    const double lo = it == grid.begin() ? std::max(center / 2.0, 1e-6)
                                         : *(it - 1);
    const double hi = (it + 1) == grid.end() || it == grid.end()
                          ? std::min(mu_max, center * 1.5)
                          : *(it + 1);
    std::vector<double> refined;
    for (int t = 1; t <= 8; ++t) {
      refined.push_back(lo + (hi - lo) * static_cast<double>(t) / 9.0);
    }
    for (double mu : refined) consider(mu);
    grid.insert(grid.end(), refined.begin(), refined.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }

  if (!std::isfinite(best_bound)) {
    throw BoundUndefined("no grid point produced a positive first moment");
  }
  result.posterior.validate();
  return result;
}

}  // namespace votebound
