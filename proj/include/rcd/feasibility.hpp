#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rcd/graph.hpp"
#include "rcd/objective.hpp"
#include "rcd/probdesign.hpp"
#include "rcd/solver.hpp"

namespace rcd {

struct ConvexSet {
  enum class Kind { box, ball, halfspace };

  Kind kind;
  Eigen::VectorXd p;  // box: lo, ball: center, halfspace: normal a
  Eigen::VectorXd q;  // box: hi, unused otherwise
  double r = 0.0;     // ball: radius, halfspace: offset b in a^T u <= b

  static ConvexSet box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ConvexSet ball(Eigen::VectorXd center, double radius);
  static ConvexSet halfspace(Eigen::VectorXd normal, double offset);

  int dim() const { return static_cast<int>(p.size()); }
  bool contains(const Eigen::VectorXd& z, double tol = 1e-10) const;
};

Eigen::VectorXd project(const ConvexSet& set, const Eigen::VectorXd& z);

/// Ball known to lie inside every set; optional, used for the radius certificate.
struct InteriorBall {
  Eigen::VectorXd center;
  double radius;
};

/// Projection of v0 onto the intersection of the sets, written as
/// min sum_i p_i ||u_i - v0||^2 over u_i in Q_i with u_1 = ... = u_N.
struct FeasibilityProblem {
  std::vector<ConvexSet> sets;
  Eigen::VectorXd v0;
  Eigen::VectorXd weights;
  std::optional<InteriorBall> interior;

  int n_nodes() const { return static_cast<int>(sets.size()); }
  int dim() const { return static_cast<int>(v0.size()); }
  void validate() const;
};

/// f_i(x) = max_{u in Q_i} <x, u> - p_i ||u - v0||^2 and its gradient, the
/// maximizer u_i(x) = P_{Q_i}(v0 + x / (2 p_i)).
std::pair<double, Eigen::VectorXd> conjugate_value_grad(const FeasibilityProblem& prob, int i,
                                                        const Eigen::VectorXd& x_i);

/// The dual objective with L_i = 1 / (2 p_i), or 1 / p_i when `loose_lipschitz`.
SeparableObjective make_dual_objective(const FeasibilityProblem& prob,
                                       bool loose_lipschitz = false);

/// Strong convexity moduli of g_i = p_i ||. - v0||^2 under the same convention.
Eigen::VectorXd primal_sigma(const FeasibilityProblem& prob, bool loose_lipschitz = false);

/// g(u) = sum_i p_i ||u_i - v0||^2.
double primal_value(const FeasibilityProblem& prob, const BlockMatrix& u);

struct PrimalRecovery {
  BlockMatrix u;            // u_i in Q_i
  Eigen::VectorXd spread;   // ||u_i - mean(u)||
  double primal_value;      // g(u)
  double dual_value;        // f(x)
  double duality_sum;       // f(x) + g(u), tends to f* + g* = 0
};

PrimalRecovery recover(const FeasibilityProblem& prob, const BlockMatrix& x);

struct Snapshot {
  long long k;
  BlockMatrix u;
};

struct ProjectionOptions {
  long long iterations = 0;
  std::uint64_t seed = 0;
  long long trace_stride = 0;   // 0: max(1, N / tau)
  bool loose_lipschitz = false;
  double divergence_ceiling = 1e12;
};

struct ProjectionResult {
  PrimalRecovery recovery;
  SolveReport report;
  std::vector<Snapshot> snapshots;  // u(x^k) at every trace point
};

/// RCD_tau on the dual from x0 = 0.
ProjectionResult solve_projection(const FeasibilityProblem& prob, const Network& g,
                                  const PathDistribution& dist, const ProjectionOptions& options);

/// Upper bound on the squared dual-norm radius of {f <= f(0)} from an interior
/// ball B(z, r): f(x) >= r sum_i ||x_i|| - (||z - v0|| + r)^2 on sum x_i = 0, so
/// the level set lies in sum_i ||x_i|| <= rho and radius^2 <= 4 rho^2 / lambda2.
double slater_radius_sq(const FeasibilityProblem& prob, double lambda2);

/// E||u^k - v*||^2_{D_sigma} <= 4 R^2 / k and E|g(u^k) - g*| <= 4 R^2 lambda_N / (sigma_min sqrt(k)).
struct PrimalBounds {
  double radius_sq;
  double lambda_n;
  double sigma_min;

  double infeasibility(double k) const;
  double suboptimality(double k) const;
};

PrimalBounds primal_error_bounds(double radius_sq, const GTau& gt, const Eigen::VectorXd& sigma);

/// sum_i sigma_i ||u_i - v*||^2.
double weighted_infeasibility(const BlockMatrix& u, const Eigen::VectorXd& v_star,
                              const Eigen::VectorXd& sigma);

}  // namespace rcd
