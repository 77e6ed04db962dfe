#pragma once

#include <cstdint>
#include <vector>

#include "votebound/bounds.hpp"
#include "votebound/dataset.hpp"
#include "votebound/ensemble.hpp"

namespace votebound {

/// The omega-margin is affine in the posterior: margins(rho) = A rho + b
/// with A_{ij} = I(h_j(x_i) = y_i) and b = -1/omega. Rows follow dataset
/// order, columns voter order.
struct MarginOperator {
  std::size_t rows = 0;  // examples
  std::size_t cols = 0;  // voters
  std::vector<double> correct;  // row-major m x n indicator matrix
  double offset = 0.0;          // -1/omega

  double entry(std::size_t i, std::size_t j) const {
    return correct[i * cols + j];
  }
  std::vector<double> margins(const std::vector<double>& rho) const;
};

MarginOperator margin_operator(const Dataset& dataset,
                               const std::vector<Voter>& voters, double omega);

struct MinimizeConfig {
  double omega = 2.0;
  /// Target first-moment values; empty means `grid_points` geometrically
  /// spaced points in [1e-3, mu_max] plus the uniform posterior's mu1.
  std::vector<double> mu_grid;
  int grid_points = 20;
  int max_iterations = 10000;
  double tolerance = 1e-8;  // on objective decrease
  std::uint64_t seed = 0;
  /// Local grid refinement rounds around the best mu (0 disables).
  int refine_rounds = 2;
};

struct MinimizeResult {
  Posterior posterior;
  double mu = 0.0;   // chosen target first moment
  double mu1 = 0.0;  // achieved moments at the returned posterior
  double mu2 = 0.0;
  double bound = 0.0;  // 1 - mu1^2/mu2
  int iterations = 0;
  bool converged = false;
  std::vector<double> infeasible_grid;  // skipped grid points
};

/// Minimizes the empirical omega-margin C-bound over the simplex. For each
/// feasible grid value mu the convex subproblem min mu2(rho) subject to
/// mu1(rho) = mu is solved by projected gradient descent with backtracking
/// line search; the grid point with the smallest bound wins. Throws
/// BoundUndefined when no posterior achieves a positive first moment.
MinimizeResult minimize(const Dataset& dataset,
                        const std::vector<Voter>& voters,
                        const MinimizeConfig& config = {});

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::vector<double> v);

/// Projection onto {rho >= 0, sum rho = 1, a . rho = target} by alternating
/// projections with a finite iteration cap. The returned point always lies
/// on the simplex; `slice_gap`, when given, receives |a . rho - target|.
std::vector<double> project_to_slice(std::vector<double> v,
                                     const std::vector<double>& a,
                                     double target,
                                     double* slice_gap = nullptr);

}  // namespace votebound
