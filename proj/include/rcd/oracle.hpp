#pragma once

#include <vector>

#include <Eigen/Core>

#include "rcd/feasibility.hpp"
#include "rcd/objective.hpp"
#include "rcd/probdesign.hpp"

// Brute-force references for tests. None of these share code with the solver
// paths they check.
namespace rcd::oracle {

struct Multiplier {
  double lambda;
  Eigen::VectorXd x;
  double f;
};

/// Scalar blocks only: x*_i solves f_i'(x_i) = lambda with sum_i x*_i = 0.
/// Outer safeguarded Newton/bisection on lambda, inner per-node solves.
Multiplier optimal_multiplier(const SeparableObjective& obj);

/// KKT solve of min <g, s> + 1/2 s^T D_L s s.t. sum s = 0, per block column.
Eigen::MatrixXd qp_direction(const Eigen::VectorXd& lipschitz_path,
                             const Eigen::MatrixXd& grads);

/// sum over paths of p_path * f(x after the path update), by full evaluation.
/// Fails with enumeration_too_large above 1e5 paths.
double expected_value_after_step(const SeparableObjective& obj, const BlockMatrix& x,
                                 const PathDistribution& dist);

/// f(x) - expected_value_after_step(x).
double expected_decrease_exhaustive(const SeparableObjective& obj, const BlockMatrix& x,
                                    const PathDistribution& dist);

/// Dykstra's cyclic projections from v0 until one full sweep moves the iterate
/// by at most tol. Fails with iteration_cap after `max_sweeps`.
Eigen::VectorXd alternating_projections(const std::vector<ConvexSet>& sets,
                                        const Eigen::VectorXd& v0, double tol,
                                        long long max_sweeps = 10'000'000);

}  // namespace rcd::oracle
