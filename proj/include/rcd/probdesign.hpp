#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rcd/graph.hpp"

namespace rcd {

using Rng = std::mt19937_64;

/// The path space of the complete graph K_N without enumerating it: every
/// ordered tuple of tau distinct nodes up to reversal.
struct CompletePaths {
  int n_nodes;
  int tau;
};

/// Probability distribution over tau-vertex paths.
///
/// Two representations share one interface:
///  - explicit: a probability per enumerated path, sampled by inverse CDF;
///  - complete-graph: p(path) proportional to the sum of per-node weights over
///    the path's vertices, over all paths of K_N. Sampling draws one node with
///    probability proportional to its weight and tau - 1 further nodes
///    uniformly, which realizes exactly that law in O(tau^2) without touching
///    the C(N, tau) tau!/2 paths.
class PathDistribution {
 public:
  PathDistribution(std::shared_ptr<const PathSet> paths, std::vector<double> probabilities);
  static PathDistribution complete_graph(CompletePaths space, std::vector<double> node_weights);

  bool is_explicit() const { return paths_ != nullptr; }
  int n_nodes() const { return n_nodes_; }
  int tau() const { return tau_; }

  const PathSet& path_set() const;
  std::shared_ptr<const PathSet> shared_path_set() const { return paths_; }
  const std::vector<double>& probabilities() const;
  const std::vector<double>& node_weights() const;

  /// Writes a sampled path into `out` (size tau).
  void sample(Rng& rng, std::span<int> out) const;
  std::size_t sample_index(Rng& rng) const;

 private:
  PathDistribution() = default;

  int n_nodes_ = 0;
  int tau_ = 0;
  std::shared_ptr<const PathSet> paths_;
  std::vector<double> p_;
  std::vector<double> cdf_;
  std::vector<double> weights_;
  std::vector<double> weight_cdf_;
};

PathDistribution dist_uniform(std::shared_ptr<const PathSet> ps);
PathDistribution dist_lipschitz_power(std::shared_ptr<const PathSet> ps,
                                      const Eigen::VectorXd& lipschitz, double alpha);
PathDistribution dist_inverse_lipschitz(std::shared_ptr<const PathSet> ps,
                                        const Eigen::VectorXd& lipschitz);

PathDistribution dist_uniform(CompletePaths space);
PathDistribution dist_lipschitz_power(CompletePaths space, const Eigen::VectorXd& lipschitz,
                                      double alpha);
PathDistribution dist_inverse_lipschitz(CompletePaths space, const Eigen::VectorXd& lipschitz);

/// Symmetric PSD matrix with its ascending eigen-decomposition.
struct GTau {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd eigvals;
  Eigen::MatrixXd eigvecs;

  int n_nodes() const { return static_cast<int>(matrix.rows()); }
  double lambda_max() const { return eigvals[eigvals.size() - 1]; }
};

GTau make_gtau(Eigen::MatrixXd matrix);

/// Per-path decrease matrix D^{-1} - l l^T / sum(l) with l = 1/L on the path,
/// returned on the path's own tau x tau coordinates.
Eigen::MatrixXd g_path(const Eigen::VectorXd& lipschitz, std::span<const int> path);

/// sum_path p_path G_path scattered into N x N. Fails with disconnected_support
/// when the paths carrying positive probability do not connect all nodes.
GTau assemble_g_tau(const Eigen::VectorXd& lipschitz, const PathDistribution& dist);

/// Same sum for an arbitrary weight vector over an explicit path set, without
/// the support check (used by the designs and the kernels).
Eigen::MatrixXd assemble_g_tau_matrix(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                                      std::span<const double> weights);

double lambda2(const GTau& gt);

/// min { x^T A x / x^T B x : e^T x = 0 } for symmetric A, B with B positive
/// definite on the complement of e. Also returns a minimizer with x^T B x = 1.
struct ComplementEigen {
  double value;
  Eigen::VectorXd vector;
};
ComplementEigen complement_generalized_min(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Orthonormal basis of the complement of e = (1, ..., 1), N x (N - 1).
Eigen::MatrixXd complement_basis(int n);

struct SigmaG {
  double value;   // clamped to [0, 1]
  double raw;     // before clamping
  Eigen::VectorXd direction;
};

/// Largest sigma with sigma D_sigma^{-1} <= G + zeta e e^T for some zeta >= 0.
SigmaG sigma_g_detail(const GTau& gt, const Eigen::VectorXd& sigma);
double compute_sigma_g(const GTau& gt, const Eigen::VectorXd& sigma);

/// Euclidean projection onto the probability simplex (sort and threshold).
std::vector<double> project_simplex(std::span<const double> v);

struct StepRule {
  enum class Kind { diminishing, constant };
  Kind kind = Kind::diminishing;
  /// Step at iteration t is scale / sqrt(t) (or scale); 0 selects
  /// 1 / max_path ||G_path||_2.
  double scale = 0.0;
};

struct DesignOptions {
  int iterations = 400;
  StepRule step;
};

struct DesignResult {
  PathDistribution distribution;
  double value;          // lambda2 or sigma_G of the returned distribution
  double uniform_value;
  double inverse_lipschitz_value;
  int best_iteration;    // 0 when a heuristic start was never improved on
};

/// Projected subgradient ascent of p -> lambda2(G_tau(p)) over the simplex,
/// started at the better of the uniform and inverse-Lipschitz distributions.
DesignResult design_max_lambda2(std::shared_ptr<const PathSet> ps, const Eigen::VectorXd& lipschitz,
                                const DesignOptions& options = {});

/// Same scheme for p -> sigma_G(G_tau(p)) (unclamped).
DesignResult design_max_sigma(std::shared_ptr<const PathSet> ps, const Eigen::VectorXd& lipschitz,
                              const Eigen::VectorXd& sigma, const DesignOptions& options = {});

}  // namespace rcd
