#include "rcd/probdesign.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "rcd/error.hpp"
#include "rcd/kernels.hpp"

namespace rcd {

namespace {

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

std::size_t draw_from_cdf(const std::vector<double>& cdf, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::vector<double> normalized(std::vector<double> w, const char* what) {
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(ErrorKind::invalid_argument, std::string(what) + " must be finite and nonnegative");
    total += v;
  }
  if (!(total > 0.0)) fail(ErrorKind::invalid_argument, std::string(what) + " sum to zero");
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

PathDistribution::PathDistribution(std::shared_ptr<const PathSet> paths,
                                   std::vector<double> probabilities) {
  if (!paths) fail(ErrorKind::invalid_argument, "distribution without a path set");
  if (probabilities.size() != paths->paths.size())
    fail(ErrorKind::dimension_mismatch, "one probability per path required");
  if (paths->paths.empty()) fail(ErrorKind::invalid_size, "empty path set");
  const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9)
    fail(ErrorKind::invalid_argument, "probabilities sum to " + std::to_string(total));
  p_ = normalized(std::move(probabilities), "probabilities");

  std::vector<char> covered(paths->n_nodes, 0);
  for (std::size_t k = 0; k < p_.size(); ++k)
    if (p_[k] > 0.0)
      for (int v : paths->paths[k]) covered[v] = 1;
  for (int v = 0; v < paths->n_nodes; ++v)
    if (!covered[v])
      fail(ErrorKind::uncovered_node,
           "node " + std::to_string(v) + " has no path with positive probability");

  n_nodes_ = paths->n_nodes;
  tau_ = paths->tau;
  cdf_ = cumulative(p_);
  paths_ = std::move(paths);
}

PathDistribution PathDistribution::complete_graph(CompletePaths space,
                                                  std::vector<double> node_weights) {
  if (space.n_nodes < 2) fail(ErrorKind::invalid_size, "complete graph needs N >= 2");
  if (space.tau < 2 || space.tau > space.n_nodes)
    fail(ErrorKind::invalid_tau, "tau must lie in [2, N]");
  if (static_cast<int>(node_weights.size()) != space.n_nodes)
    fail(ErrorKind::dimension_mismatch, "one weight per node required");
  PathDistribution d;
  d.n_nodes_ = space.n_nodes;
  d.tau_ = space.tau;
  d.weights_ = normalized(std::move(node_weights), "node weights");
  d.weight_cdf_ = cumulative(d.weights_);
  return d;
}

const PathSet& PathDistribution::path_set() const {
  if (!paths_) fail(ErrorKind::unsupported, "complete-graph distribution has no enumerated paths");
  return *paths_;
}

const std::vector<double>& PathDistribution::probabilities() const {
  if (!paths_) fail(ErrorKind::unsupported, "complete-graph distribution has no probability vector");
  return p_;
}

const std::vector<double>& PathDistribution::node_weights() const {
  if (paths_) fail(ErrorKind::unsupported, "explicit distribution has no node weights");
  return weights_;
}

std::size_t PathDistribution::sample_index(Rng& rng) const {
  if (!paths_) fail(ErrorKind::unsupported, "complete-graph distribution has no path indices");
  return draw_from_cdf(cdf_, rng);
}

void PathDistribution::sample(Rng& rng, std::span<int> out) const {
  if (paths_) {
    const auto& path = paths_->paths[draw_from_cdf(cdf_, rng)];
    std::copy(path.begin(), path.end(), out.begin());
    return;
  }
  // The anchor carries the weight, the companions are uniform over the
  // remaining nodes, and the anchor lands at a uniform position, so every
  // ordering has probability proportional to sum_{i in path} w_i.
  out[0] = static_cast<int>(draw_from_cdf(weight_cdf_, rng));
  std::uniform_int_distribution<int> node(0, n_nodes_ - 1);
  for (int r = 1; r < tau_; ++r) {
    int v;
    do {
      v = node(rng);
    } while (std::find(out.begin(), out.begin() + r, v) != out.begin() + r);
    out[r] = v;
  }
  std::swap(out[0], out[std::uniform_int_distribution<int>(0, tau_ - 1)(rng)]);
}

PathDistribution dist_uniform(std::shared_ptr<const PathSet> ps) {
  if (!ps || ps->paths.empty()) fail(ErrorKind::invalid_size, "empty path set");
  std::vector<double> p(ps->paths.size(), 1.0 / static_cast<double>(ps->paths.size()));
  return PathDistribution(std::move(ps), std::move(p));
}

PathDistribution dist_lipschitz_power(std::shared_ptr<const PathSet> ps,
                                      const Eigen::VectorXd& lipschitz, double alpha) {
  if (!ps || ps->paths.empty()) fail(ErrorKind::invalid_size, "empty path set");
  if (lipschitz.size() != ps->n_nodes)
    fail(ErrorKind::dimension_mismatch, "one Lipschitz constant per node required");
  if ((lipschitz.array() <= 0.0).any())
    fail(ErrorKind::invalid_argument, "Lipschitz constants must be positive");
  std::vector<double> w(ps->paths.size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k)
    for (int i : ps->paths[k]) w[k] += std::pow(lipschitz[i], alpha);
  return PathDistribution(std::move(ps), normalized(std::move(w), "path weights"));
}

PathDistribution dist_inverse_lipschitz(std::shared_ptr<const PathSet> ps,
                                        const Eigen::VectorXd& lipschitz) {
  return dist_lipschitz_power(std::move(ps), lipschitz, -1.0);
}

PathDistribution dist_uniform(CompletePaths space) {
  return PathDistribution::complete_graph(space, std::vector<double>(space.n_nodes, 1.0));
}

PathDistribution dist_lipschitz_power(CompletePaths space, const Eigen::VectorXd& lipschitz,
                                      double alpha) {
  if (lipschitz.size() != space.n_nodes)
    fail(ErrorKind::dimension_mismatch, "one Lipschitz constant per node required");
  if ((lipschitz.array() <= 0.0).any())
    fail(ErrorKind::invalid_argument, "Lipschitz constants must be positive");
  std::vector<double> w(space.n_nodes);
  for (int i = 0; i < space.n_nodes; ++i) w[i] = std::pow(lipschitz[i], alpha);
  return PathDistribution::complete_graph(space, std::move(w));
}

PathDistribution dist_inverse_lipschitz(CompletePaths space, const Eigen::VectorXd& lipschitz) {
  return dist_lipschitz_power(space, lipschitz, -1.0);
}

GTau make_gtau(Eigen::MatrixXd matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 2)
    fail(ErrorKind::dimension_mismatch, "G_tau must be square with N >= 2");
  matrix = 0.5 * (matrix + matrix.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix);
  if (eig.info() != Eigen::Success) fail(ErrorKind::no_bracket, "eigen-decomposition failed");
  return GTau{std::move(matrix), eig.eigenvalues(), eig.eigenvectors()};
}

Eigen::MatrixXd g_path(const Eigen::VectorXd& lipschitz, std::span<const int> path) {
  const auto tau = static_cast<Eigen::Index>(path.size());
  Eigen::VectorXd inv(tau);
  for (Eigen::Index r = 0; r < tau; ++r) {
    const double l = lipschitz[path[r]];
    if (!(l > 0.0)) fail(ErrorKind::invalid_argument, "Lipschitz constants must be positive");
    inv[r] = 1.0 / l;
  }
  Eigen::MatrixXd g = inv.asDiagonal();
  g -= inv * inv.transpose() / inv.sum();
  return g;
}

Eigen::MatrixXd assemble_g_tau_matrix(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                                      std::span<const double> weights) {
  if (lipschitz.size() != ps.n_nodes)
    fail(ErrorKind::dimension_mismatch, "one Lipschitz constant per node required");
  if (weights.size() != ps.paths.size())
    fail(ErrorKind::dimension_mismatch, "one weight per path required");
  return kernels::parallel::assemble_g_tau(lipschitz, ps, weights);
}

GTau assemble_g_tau(const Eigen::VectorXd& lipschitz, const PathDistribution& dist) {
  const int n = dist.n_nodes();
  if (lipschitz.size() != n)
    fail(ErrorKind::dimension_mismatch, "one Lipschitz constant per node required");
  if ((lipschitz.array() <= 0.0).any())
    fail(ErrorKind::invalid_argument, "Lipschitz constants must be positive");

  if (!dist.is_explicit()) {
    // Closed form over all paths of K_N, valid when the node weights are
    // proportional to 1/L: G = (tau-1)/(N-1) (D_{1/L} - l l^T / e^T l).
    const auto& w = dist.node_weights();
    double lo = INFINITY, hi = 0.0;
    for (int i = 0; i < n; ++i) {
      lo = std::min(lo, w[i] * lipschitz[i]);
      hi = std::max(hi, w[i] * lipschitz[i]);
    }
    if (hi - lo > 1e-12 * hi)
      fail(ErrorKind::unsupported,
           "complete-graph G_tau has a closed form only for weights proportional to 1/L; "
           "enumerate the paths explicitly instead");
    const Eigen::VectorXd inv = lipschitz.cwiseInverse();
    Eigen::MatrixXd g = inv.asDiagonal();
    g -= inv * inv.transpose() / inv.sum();
    g *= static_cast<double>(dist.tau() - 1) / static_cast<double>(n - 1);
    return make_gtau(std::move(g));
  }

  const auto& ps = dist.path_set();
  const auto& p = dist.probabilities();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
  int components = n;
  for (std::size_t k = 0; k < ps.paths.size(); ++k) {
    if (p[k] <= 0.0) continue;
    const auto& path = ps.paths[k];
    for (std::size_t r = 1; r < path.size(); ++r) {
      const int a = find(path[r - 1]), b = find(path[r]);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
  }
  if (components != 1)
    fail(ErrorKind::disconnected_support,
         "paths with positive probability leave " + std::to_string(components) + " components");
  return make_gtau(assemble_g_tau_matrix(lipschitz, ps, p));
}

double lambda2(const GTau& gt) { return gt.eigvals[1]; }

Eigen::MatrixXd complement_basis(int n) {
  // Householder reflection sending e_1 to e / sqrt(n); its other columns span
  // the complement of e.
  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  u[0] -= 1.0;
  const double norm = u.norm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  if (norm > 0.0) {
    u /= norm;
    h -= 2.0 * u * u.transpose();
  }
  return h.rightCols(n - 1);
}

ComplementEigen complement_generalized_min(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const auto n = static_cast<int>(a.rows());
  const Eigen::MatrixXd basis = complement_basis(n);
  const Eigen::MatrixXd ar = basis.transpose() * a * basis;
  const Eigen::MatrixXd br = basis.transpose() * b * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (ar + ar.transpose()), 0.5 * (br + br.transpose()));
  if (eig.info() != Eigen::Success)
    fail(ErrorKind::invalid_argument, "generalized eigenproblem failed (B not definite on e-perp)");
  return ComplementEigen{eig.eigenvalues()[0], basis * eig.eigenvectors().col(0)};
}

SigmaG sigma_g_detail(const GTau& gt, const Eigen::VectorXd& sigma) {
  if (sigma.size() != gt.n_nodes())
    fail(ErrorKind::dimension_mismatch, "one strong-convexity constant per node required");
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (!(sigma[i] > 0.0))
      fail(ErrorKind::nonpositive_sigma, "sigma_" + std::to_string(i) + " must be positive");
  const Eigen::MatrixXd inv = sigma.cwiseInverse().asDiagonal();
  auto ce = complement_generalized_min(gt.matrix, inv);
  return SigmaG{std::clamp(ce.value, 0.0, 1.0), ce.value, std::move(ce.vector)};
}

double compute_sigma_g(const GTau& gt, const Eigen::VectorXd& sigma) {
  return sigma_g_detail(gt, sigma).value;
}

std::vector<double> project_simplex(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    running += sorted[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::max(v[k] - theta, 0.0);
  return out;
}

namespace {

double default_step_scale(const Eigen::VectorXd& lipschitz, const PathSet& ps) {
  double largest = 0.0;
  for (const auto& path : ps.paths) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g_path(lipschitz, path),
                                                       Eigen::EigenvaluesOnly);
    largest = std::max(largest, eig.eigenvalues().maxCoeff());
  }
  return 1.0 / largest;
}

// Value of the concave design objective at p and a supergradient direction
// vector v: the supergradient component of path k is v^T G_k v.
using DesignOracle =
    std::function<std::pair<double, Eigen::VectorXd>(const std::vector<double>& p)>;

DesignResult ascend(std::shared_ptr<const PathSet> ps, const Eigen::VectorXd& lipschitz,
                    const DesignOptions& options, const DesignOracle& oracle) {
  const auto uniform = dist_uniform(ps);
  const auto inverse = dist_inverse_lipschitz(ps, lipschitz);
  const double uniform_value = oracle(uniform.probabilities()).first;
  const double inverse_value = oracle(inverse.probabilities()).first;

  std::vector<double> p =
      inverse_value > uniform_value ? inverse.probabilities() : uniform.probabilities();
  std::vector<double> best = p;
  double best_value = std::max(uniform_value, inverse_value);
  int best_iteration = 0;

  const double scale =
      options.step.scale > 0.0 ? options.step.scale : default_step_scale(lipschitz, *ps);
  std::vector<double> sub(ps->paths.size());
  for (int t = 1; t <= options.iterations; ++t) {
    auto [value, direction] = oracle(p);
    if (value > best_value) {
      best_value = value;
      best = p;
      best_iteration = t - 1;
    }
    kernels::parallel::path_quadratic_forms(lipschitz, *ps, direction, sub);
    const double step = options.step.kind == StepRule::Kind::diminishing
                            ? scale / std::sqrt(static_cast<double>(t))
                            : scale;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] += step * sub[k];
    p = project_simplex(p);
  }
  if (const double last = oracle(p).first; last > best_value) {
    best_value = last;
    best = p;
    best_iteration = options.iterations;
  }
  return DesignResult{PathDistribution(ps, std::move(best)), best_value, uniform_value,
                      inverse_value, best_iteration};
}

// lambda2 of an assembled matrix whose support may be disconnected (then 0).
std::pair<double, Eigen::VectorXd> lambda2_with_vector(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  return {eig.eigenvalues()[1], eig.eigenvectors().col(1)};
}

}  // namespace

DesignResult design_max_lambda2(std::shared_ptr<const PathSet> ps, const Eigen::VectorXd& lipschitz,
                                const DesignOptions& options) {
  if (!ps) fail(ErrorKind::invalid_argument, "design needs a path set");
  return ascend(ps, lipschitz, options, [&](const std::vector<double>& p) {
    return lambda2_with_vector(assemble_g_tau_matrix(lipschitz, *ps, p));
  });
}

DesignResult design_max_sigma(std::shared_ptr<const PathSet> ps, const Eigen::VectorXd& lipschitz,
                              const Eigen::VectorXd& sigma, const DesignOptions& options) {
  if (!ps) fail(ErrorKind::invalid_argument, "design needs a path set");
  if (sigma.size() != ps->n_nodes)
    fail(ErrorKind::dimension_mismatch, "one strong-convexity constant per node required");
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (!(sigma[i] > 0.0))
      fail(ErrorKind::nonpositive_sigma, "sigma_" + std::to_string(i) + " must be positive");
  const Eigen::MatrixXd inv = sigma.cwiseInverse().asDiagonal();
  return ascend(ps, lipschitz, options, [&](const std::vector<double>& p) {
    auto ce = complement_generalized_min(assemble_g_tau_matrix(lipschitz, *ps, p), inv);
    return std::make_pair(ce.value, std::move(ce.vector));
  });
}

}  // namespace rcd
