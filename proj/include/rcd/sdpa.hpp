#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rcd/graph.hpp"

namespace rcd {

/// One nonzero of F_matrix in block `block`, 1-based, upper triangle (i <= j).
struct SdpaEntry {
  int matrix;  // 0 is F_0
  int block;
  int i;
  int j;
  double value;
};

/// min c^T y  s.t.  sum_k y_k F_k - F_0 is PSD, in the sparse SDPA layout.
/// Negative block sizes are diagonal (LP) blocks.
struct SdpaProblem {
  int n_vars = 0;
  std::vector<int> block_sizes;
  Eigen::VectorXd c;
  std::vector<SdpaEntry> entries;
  std::vector<std::string> comments;

  /// Dense blocks of sum_k y_k F_k - F_0.
  std::vector<Eigen::MatrixXd> slack(const Eigen::VectorXd& y) const;
  double objective(const Eigen::VectorXd& y) const { return c.dot(y); }
  /// Smallest eigenvalue over all blocks of the slack.
  double min_eigenvalue(const Eigen::VectorXd& y) const;
};

void write_sdpa(const SdpaProblem& problem, std::ostream& out);
SdpaProblem read_sdpa(std::istream& in);

/// Same sizes, costs and entry multiset (after sorting) up to `tol`.
bool same_problem(const SdpaProblem& a, const SdpaProblem& b, double tol = 0.0);

/// Variables y = (p_1 .. p_|P|, zeta, nu_1 .. nu_N), cost R_i^2 on nu_i.
/// Block 1 (2N x 2N): [[sum_k p_k G_k + zeta e e^T, I], [I, diag(nu)]].
/// Block 2 (diagonal): p >= 0, zeta >= 0, nu >= 0, sum p >= 1, -sum p >= -1.
SdpaProblem build_rate_bound_sdp(const PathSet& ps, const Eigen::VectorXd& lipschitz,
                                 const Eigen::VectorXd& radii);

/// Variables y = (p_1 .. p_|P|, t), cost -t.
/// Block 1 (N x N): sum_k p_k G_k + e e^T / N - t (I - e e^T / N).
/// Block 2 (diagonal): p >= 0, sum p >= 1, -sum p >= -1.
SdpaProblem build_max_lambda2_sdp(const PathSet& ps, const Eigen::VectorXd& lipschitz);

/// Feasible point of the rate-bound SDP from probabilities p:
/// t = lambda2(G(p)), zeta = t / N, nu_i = 1 / t. Its cost is sum R_i^2 / t.
Eigen::VectorXd rate_bound_heuristic_point(const PathSet& ps, const Eigen::VectorXd& lipschitz,
                                           const std::vector<double>& p);

/// Writes `out` (.dat-s) and `out` + ".map.txt" describing the variable
/// layout, then re-reads the file and fails with io unless it parses back to
/// the same problem.
void export_sdp(const PathSet& ps, const Eigen::VectorXd& lipschitz, const Eigen::VectorXd& radii,
                const std::filesystem::path& out);
void export_lambda2_sdp(const PathSet& ps, const Eigen::VectorXd& lipschitz,
                        const std::filesystem::path& out);

}  // namespace rcd
