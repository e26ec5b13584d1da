#include "rcd/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "rcd/error.hpp"
#include "scalar.hpp"

namespace rcd::oracle {

namespace {

struct NodeInverse {
  const NodeFunctions& fns;
  int i;

  double grad(double t) const {
    double g;
    fns.gradient(i, {&t, 1}, {&g, 1});
    return g;
  }
  double curvature(double t) const { return fns.second_derivative(i, t); }

  // Solution of f_i'(t) = lambda, +-inf when lambda is outside the gradient's range.
  double solve(double lambda, double hint) const {
    auto h = [this](double t) { return grad(t); };
    auto dh = [this](double t) { return curvature(t); };
    const auto br = detail::bracket_increasing(h, lambda, hint);
    if (!br) {
      const double inf = std::numeric_limits<double>::infinity();
      return grad(hint) < lambda ? inf : -inf;
    }
    return detail::solve_increasing(h, dh, lambda, br->first, br->second);
  }
};

}  // namespace

Multiplier optimal_multiplier(const SeparableObjective& obj) {
  if (obj.block_dim() != 1)
    fail(ErrorKind::unsupported, "optimal_multiplier handles scalar blocks only");
  const int n = obj.n_nodes();
  std::vector<NodeInverse> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({obj.functions(), i});

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  auto total = [&](double lambda) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = nodes[i].solve(lambda, std::isfinite(x[i]) ? x[i] : 0.0);
      x[i] = xi;
      s += xi;
    }
    return s;
  };
  // d/dlambda sum_i x_i(lambda) = sum_i 1 / f_i''(x_i).
  auto slope = [&](double) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += 1.0 / nodes[i].curvature(x[i]);
    return s;
  };

  double start = 0.0;
  for (int i = 0; i < n; ++i) start += nodes[i].grad(0.0);
  start /= n;
  const auto br = detail::bracket_increasing(total, 0.0, start);
  if (!br) fail(ErrorKind::no_bracket, "no multiplier bracket found");

  // Safeguarded Newton with the convergence test on sum_i x_i.
  double lo = br->first, hi = br->second;
  double lambda = 0.5 * (lo + hi);
  const double tol = 1e-12 * n;
  for (int it = 0; it < 500; ++it) {
    const double s = total(lambda);
    if (std::abs(s) <= tol) break;
    (s < 0.0 ? lo : hi) = lambda;
    double next = 0.5 * (lo + hi);
    const double d = slope(lambda);
    if (d > 0.0 && std::isfinite(d)) {
      const double newton = lambda - s / d;
      if (newton > lo && newton < hi) next = newton;
    }
    if (next == lambda) break;
    lambda = next;
  }
  total(lambda);
  if (!x.allFinite()) fail(ErrorKind::no_bracket, "multiplier outside a node's gradient range");

  // Remove the last rounding residual along the Newton direction.
  const double residual = x.sum();
  Eigen::VectorXd weight(n);
  for (int i = 0; i < n; ++i) {
    const double c = nodes[i].curvature(x[i]);
    weight[i] = (c > 0.0 && std::isfinite(c)) ? 1.0 / c : 1.0;
  }
  x -= weight * (residual / weight.sum());

  BlockMatrix xm = x;
  return {lambda, x, obj.eval(xm)};
}

Eigen::MatrixXd qp_direction(const Eigen::VectorXd& lipschitz_path,
                             const Eigen::MatrixXd& grads) {
  const auto tau = lipschitz_path.size();
  if (grads.rows() != tau) fail(ErrorKind::dimension_mismatch, "one gradient row per path node");
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(tau + 1, tau + 1);
  kkt.topLeftCorner(tau, tau) = lipschitz_path.asDiagonal();
  kkt.block(0, tau, tau, 1).setOnes();
  kkt.block(tau, 0, 1, tau).setOnes();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(tau + 1, grads.cols());
  rhs.topRows(tau) = -grads;
  const Eigen::MatrixXd sol = kkt.fullPivLu().solve(rhs);
  return sol.topRows(tau);
}

double expected_value_after_step(const SeparableObjective& obj, const BlockMatrix& x,
                                 const PathDistribution& dist) {
  if (!dist.is_explicit())
    fail(ErrorKind::enumeration_too_large, "implicit distributions cannot be enumerated");
  const auto& ps = dist.path_set();
  if (ps.size() > 100'000) fail(ErrorKind::enumeration_too_large, "more than 1e5 paths");
  const auto& p = dist.probabilities();
  const auto& lip = obj.lipschitz();

  double expected = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const auto& path = ps.paths[k];
    const auto tau = static_cast<Eigen::Index>(path.size());
    Eigen::VectorXd l(tau);
    Eigen::MatrixXd g(tau, obj.block_dim());
    for (Eigen::Index r = 0; r < tau; ++r) {
      l[r] = lip[path[r]];
      g.row(r) = obj.grad_node(path[r], row_span(x, path[r])).transpose();
    }
    const Eigen::MatrixXd s = qp_direction(l, g);
    BlockMatrix moved = x;
    for (Eigen::Index r = 0; r < tau; ++r) moved.row(path[r]) += s.row(r);
    expected += p[k] * obj.eval(moved);
  }
  return expected;
}

double expected_decrease_exhaustive(const SeparableObjective& obj, const BlockMatrix& x,
                                    const PathDistribution& dist) {
  return obj.eval(x) - expected_value_after_step(obj, x, dist);
}

Eigen::VectorXd alternating_projections(const std::vector<ConvexSet>& sets,
                                        const Eigen::VectorXd& v0, double tol,
                                        long long max_sweeps) {
  if (sets.empty()) fail(ErrorKind::invalid_size, "no sets to project onto");
  const auto m = sets.size();
  Eigen::VectorXd x = v0;
  std::vector<Eigen::VectorXd> corr(m, Eigen::VectorXd::Zero(v0.size()));
  if (m == 1) return project(sets[0], v0);
  for (long long sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::VectorXd y = project(sets[i], x + corr[i]);
      corr[i] += x - y;
      moved += (y - x).squaredNorm();
      x = y;
    }
    if (std::sqrt(moved) <= tol) return x;
  }
  fail(ErrorKind::iteration_cap,
       "Dykstra projections did not settle within " + std::to_string(max_sweeps) + " sweeps");
}

}  // namespace rcd::oracle
