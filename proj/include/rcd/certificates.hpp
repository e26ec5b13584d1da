#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rcd/objective.hpp"
#include "rcd/probdesign.hpp"
#include "rcd/solver.hpp"

namespace rcd {

/// ||x||*_G = sqrt(sum over columns of x_c^T G^+ x_c), eigenvalues below
/// 1e-12 lambda_N dropped. Fails with not_in_subspace unless sum_i x_i = 0
/// (relative tolerance 1e-8).
double dual_norm(const GTau& gt, const BlockMatrix& x);
double dual_norm(const GTau& gt, const Eigen::VectorXd& x);

/// Per-node radii R_i with |x_i - x*_i| <= R_i on {f <= f0}, for scalar blocks.
/// Node minima are found by root-finding on the gradient; the level interval
/// of f_i at budget f0 - sum_{j != i} min f_j is located by bisection.
/// Fails with unbounded_radius when a node minimum or level interval cannot
/// be bracketed.
Eigen::VectorXd level_set_radii(const SeparableObjective& obj, double f0,
                                const Eigen::VectorXd& x_star);

/// Upper bounds on max { z^T G^+ z : z in S, |z_i| <= R_i }.
struct BoxRadius {
  double euclidean;  // sum R_i^2 / lambda2
  double weighted;   // sum L_i R_i^2 / c, c = min on e-perp of x^T G x / x^T M x
  double value;      // min of the two
};
/// M = D_{1/L} - l l^T / sum(l). On K_N with inverse-Lipschitz probabilities
/// c = (tau - 1) / (N - 1), so `weighted` reproduces the complete-graph constant.
BoxRadius box_radius_sq(const GTau& gt, const Eigen::VectorXd& lipschitz,
                        const Eigen::VectorXd& radii);

double bound_thm1(double radius, double k);
double bound_thm3(const Eigen::VectorXd& lipschitz, const Eigen::VectorXd& radii, int n_nodes,
                  int tau, double k);
double bound_estimate3(const Eigen::VectorXd& radii, double lambda2, double k);
double bound_thm2(double sigma_g, double gap0, double k);

struct RateCertificate {
  enum class Kind { smooth_thm1, strongly_convex_thm2, complete_graph_thm3, lambda2_estimate3 };

  Kind kind;
  double coefficient;  // sublinear: bound = coefficient / k; linear: gap0
  double sigma_g;      // linear kind only

  double bound(double k) const;

  static RateCertificate smooth(double radius);
  static RateCertificate complete_graph(const Eigen::VectorXd& lipschitz,
                                        const Eigen::VectorXd& radii, int n_nodes, int tau);
  static RateCertificate lambda2_estimate(const Eigen::VectorXd& radii, double lambda2);
  static RateCertificate strongly_convex(double sigma_g, double gap0);
};

std::string_view to_string(RateCertificate::Kind kind);

struct GapPoint {
  double k;
  double gap;
};

std::vector<GapPoint> gap_trace(const std::vector<TracePoint>& trace, double f_star);

/// First recorded k with gap <= eps; not_reached error otherwise.
double iterations_to_gap(const std::vector<GapPoint>& trace, double eps);

/// iterations_to_gap(a) / iterations_to_gap(b).
double speedup_ratio(const std::vector<GapPoint>& a, const std::vector<GapPoint>& b, double eps);

}  // namespace rcd
