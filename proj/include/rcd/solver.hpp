#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rcd/graph.hpp"
#include "rcd/objective.hpp"
#include "rcd/probdesign.hpp"

namespace rcd {

/// Closed-form update on one path: d_i = l_i (gbar - g_i) with l = 1/L and
/// gbar the l-weighted mean of the path gradients. `grads` and `d` are
/// tau x n with rows in path order. Returns the guaranteed decrease
/// 1/2 sum_i l_i ||g_i - gbar||^2.
double path_direction(const Eigen::VectorXd& lipschitz, std::span<const int> path,
                      const BlockMatrix& grads, BlockMatrix& d);

/// Same update evaluated at x; rows of the result follow `path`.
BlockMatrix direction(const SeparableObjective& obj, const BlockMatrix& x,
                      std::span<const int> path);

/// Iterate of one run. The gradient of every node is cached and refreshed only
/// on the nodes a step touches.
struct SolverState {
  BlockMatrix x;
  BlockMatrix grad;
  long long k = 0;
  double f_value = 0.0;
  Rng rng;

  std::vector<int> path;
  BlockMatrix path_grad;
  BlockMatrix d;
  long long since_refresh = 0;
};

SolverState init_state(const SeparableObjective& obj, BlockMatrix x0, std::uint64_t seed);

struct StepInfo {
  double predicted_decrease;  // 1/2 grad_N^T G_N grad_N
  double change;              // f(x+) - f(x) from the incremental update
};

/// One iteration: sample a path, apply its direction, update the cached
/// gradients and f. Recomputes f from scratch every `refresh_interval` steps.
StepInfo step(SolverState& state, const SeparableObjective& obj, const PathDistribution& dist,
              long long refresh_interval = 10000);

/// max over i, j of ||grad f_i - grad f_j||_inf, from the cached gradients.
double grad_disagreement(const BlockMatrix& grad);

/// ||sum_i x_i||_inf relative to 1 + max_i ||x_i||_inf.
double coupling_residual(const BlockMatrix& x);

struct StopRule {
  long long max_iters = 0;
  std::optional<double> f_ref;
  double gap_tol = 0.0;                     // stop once f - f_ref <= gap_tol
  std::optional<double> disagreement_tol;   // checked at record points
};

enum class StopReason { max_iters, f_gap, grad_disagreement };
std::string_view to_string(StopReason reason);

struct TracePoint {
  long long k;
  double f;
};

struct RunOptions {
  StopRule stop;
  std::uint64_t seed = 0;
  long long trace_stride = 0;  // 0: max(1, N / tau)
  long long refresh_interval = 10000;
  double divergence_ceiling = std::numeric_limits<double>::infinity();
  /// Called at every record point with the current state (trace already appended).
  std::function<void(const SolverState&)> on_record;
};

struct SolveReport {
  BlockMatrix x;
  double f;
  long long iterations;
  StopReason reason;
  std::vector<TracePoint> trace;
};

/// RCD_tau from a feasible x0. Fails with infeasible_start when sum_i x0_i != 0
/// and with divergence when max |x| exceeds the ceiling or f is not finite.
SolveReport run(const SeparableObjective& obj, const Network& g, const PathDistribution& dist,
                const BlockMatrix& x0, const RunOptions& options);

/// Full-gradient baselines. One baseline iteration updates every node and is
/// reported at k = t * N so traces share the normalized axis k / N.
struct BaselineOptions {
  long long iterations = 0;
  long long trace_stride = 1;  // in baseline iterations
};

/// x_i += (gbar - g_i) / L_max with gbar the plain mean: the projected gradient
/// step on {sum x_i = 0} with the global constant L_max.
SolveReport run_projected_gradient(const SeparableObjective& obj, const BlockMatrix& x0,
                                   const BaselineOptions& options);

/// Symmetric Metropolis weights w_ij = 1 / (max(deg_i, deg_j) + 1) / (2 L_max) on edges.
std::vector<std::vector<std::pair<int, double>>> metropolis_weights(const Network& g,
                                                                    double l_max);

/// x_i += sum_{j ~ i} w_ij (g_j - g_i) with Metropolis weights.
SolveReport run_center_free(const SeparableObjective& obj, const Network& g,
                            const BlockMatrix& x0, const BaselineOptions& options);

}  // namespace rcd
