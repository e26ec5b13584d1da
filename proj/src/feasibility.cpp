#include "rcd/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcd/error.hpp"

namespace rcd {

ConvexSet ConvexSet::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() != hi.size() || lo.size() == 0)
    fail(ErrorKind::dimension_mismatch, "box bounds must have equal positive length");
  if ((lo.array() > hi.array()).any()) fail(ErrorKind::invalid_argument, "box needs lo <= hi");
  return {Kind::box, std::move(lo), std::move(hi), 0.0};
}

ConvexSet ConvexSet::ball(Eigen::VectorXd center, double radius) {
  if (center.size() == 0) fail(ErrorKind::dimension_mismatch, "ball center is empty");
  if (!(radius > 0.0)) fail(ErrorKind::invalid_argument, "ball radius must be positive");
  return {Kind::ball, std::move(center), {}, radius};
}

ConvexSet ConvexSet::halfspace(Eigen::VectorXd normal, double offset) {
  if (normal.size() == 0) fail(ErrorKind::dimension_mismatch, "halfspace normal is empty");
  if (normal.squaredNorm() == 0.0) fail(ErrorKind::invalid_argument, "halfspace normal is zero");
  return {Kind::halfspace, std::move(normal), {}, offset};
}

bool ConvexSet::contains(const Eigen::VectorXd& z, double tol) const {
  return (project(*this, z) - z).norm() <= tol * (1.0 + z.norm());
}

Eigen::VectorXd project(const ConvexSet& set, const Eigen::VectorXd& z) {
  if (z.size() != set.dim()) fail(ErrorKind::dimension_mismatch, "point and set dimensions differ");
  switch (set.kind) {
    case ConvexSet::Kind::box:
      return z.cwiseMax(set.p).cwiseMin(set.q);
    case ConvexSet::Kind::ball: {
      const Eigen::VectorXd off = z - set.p;
      const double dist = off.norm();
      if (dist <= set.r) return z;
      return set.p + off * (set.r / dist);
    }
    case ConvexSet::Kind::halfspace: {
      const double excess = set.p.dot(z) - set.r;
      if (excess <= 0.0) return z;
      return z - set.p * (excess / set.p.squaredNorm());
    }
  }
  return z;
}

void FeasibilityProblem::validate() const {
  if (sets.empty()) fail(ErrorKind::invalid_size, "feasibility problem has no sets");
  if (weights.size() != n_nodes())
    fail(ErrorKind::dimension_mismatch, "one weight per set required");
  for (const auto& s : sets)
    if (s.dim() != dim()) fail(ErrorKind::dimension_mismatch, "set dimension differs from v0");
  if ((weights.array() <= 0.0).any())
    fail(ErrorKind::invalid_argument, "weights must be positive");
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    fail(ErrorKind::invalid_argument, "weights must sum to 1");
  if (interior) {
    if (interior->center.size() != dim() || !(interior->radius > 0.0))
      fail(ErrorKind::invalid_argument, "interior ball has wrong dimension or radius");
  }
}

std::pair<double, Eigen::VectorXd> conjugate_value_grad(const FeasibilityProblem& prob, int i,
                                                        const Eigen::VectorXd& x_i) {
  if (i < 0 || i >= prob.n_nodes()) fail(ErrorKind::index_out_of_range, "set index out of range");
  const double p = prob.weights[i];
  Eigen::VectorXd u = project(prob.sets[i], prob.v0 + x_i / (2.0 * p));
  const double value = x_i.dot(u) - p * (u - prob.v0).squaredNorm();
  return {value, std::move(u)};
}

namespace {

class ConjugateFunctions final : public NodeFunctions {
 public:
  explicit ConjugateFunctions(FeasibilityProblem prob) : prob_(std::move(prob)) {}

  double value(int i, std::span<const double> x) const override {
    return conjugate_value_grad(prob_, i, as_vector(x)).first;
  }
  void gradient(int i, std::span<const double> x, std::span<double> out) const override {
    const Eigen::VectorXd u = conjugate_value_grad(prob_, i, as_vector(x)).second;
    std::copy(u.data(), u.data() + u.size(), out.begin());
  }

 private:
  static Eigen::VectorXd as_vector(std::span<const double> x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  }

  FeasibilityProblem prob_;
};

}  // namespace

SeparableObjective make_dual_objective(const FeasibilityProblem& prob, bool loose_lipschitz) {
  prob.validate();
  const Eigen::VectorXd lipschitz =
      (loose_lipschitz ? prob.weights : Eigen::VectorXd(2.0 * prob.weights)).cwiseInverse();
  return SeparableObjective(std::make_shared<ConjugateFunctions>(prob), prob.dim(), lipschitz);
}

Eigen::VectorXd primal_sigma(const FeasibilityProblem& prob, bool loose_lipschitz) {
  return loose_lipschitz ? Eigen::VectorXd(prob.weights) : Eigen::VectorXd(2.0 * prob.weights);
}

double primal_value(const FeasibilityProblem& prob, const BlockMatrix& u) {
  double total = 0.0;
  for (int i = 0; i < prob.n_nodes(); ++i)
    total += prob.weights[i] * (u.row(i).transpose() - prob.v0).squaredNorm();
  return total;
}

PrimalRecovery recover(const FeasibilityProblem& prob, const BlockMatrix& x) {
  if (x.rows() != prob.n_nodes() || x.cols() != prob.dim())
    fail(ErrorKind::dimension_mismatch, "dual iterate has wrong shape");
  PrimalRecovery out;
  out.u.resize(prob.n_nodes(), prob.dim());
  out.dual_value = 0.0;
  for (int i = 0; i < prob.n_nodes(); ++i) {
    auto [value, u] = conjugate_value_grad(prob, i, x.row(i).transpose());
    out.dual_value += value;
    out.u.row(i) = u.transpose();
  }
  const Eigen::RowVectorXd mean = out.u.colwise().mean();
  out.spread = (out.u.rowwise() - mean).rowwise().norm();
  out.primal_value = primal_value(prob, out.u);
  out.duality_sum = out.dual_value + out.primal_value;
  return out;
}

ProjectionResult solve_projection(const FeasibilityProblem& prob, const Network& g,
                                  const PathDistribution& dist, const ProjectionOptions& options) {
  const auto obj = make_dual_objective(prob, options.loose_lipschitz);
  const BlockMatrix x0 = BlockMatrix::Zero(prob.n_nodes(), prob.dim());

  ProjectionResult result;
  RunOptions run_options;
  run_options.stop.max_iters = options.iterations;
  run_options.seed = options.seed;
  run_options.trace_stride = options.trace_stride;
  run_options.divergence_ceiling = options.divergence_ceiling;
  // The cached gradients are exactly u(x^k), refreshed only on touched nodes.
  run_options.on_record = [&](const SolverState& s) {
    result.snapshots.push_back({s.k, s.grad});
  };
  result.report = run(obj, g, dist, x0, run_options);
  result.recovery = recover(prob, result.report.x);
  return result;
}

double slater_radius_sq(const FeasibilityProblem& prob, double lambda2) {
  if (!prob.interior)
    fail(ErrorKind::unsupported, "radius certificate needs an interior ball");
  if (!(lambda2 > 0.0)) fail(ErrorKind::disconnected_support, "lambda2 must be positive");
  const auto& ball = *prob.interior;
  double f0 = 0.0;
  for (int i = 0; i < prob.n_nodes(); ++i)
    f0 += conjugate_value_grad(prob, i, Eigen::VectorXd::Zero(prob.dim())).first;
  const double reach = (ball.center - prob.v0).norm() + ball.radius;
  const double rho = (f0 + reach * reach * prob.weights.sum()) / ball.radius;
  return 4.0 * rho * rho / lambda2;
}

double PrimalBounds::infeasibility(double k) const { return 4.0 * radius_sq / k; }

double PrimalBounds::suboptimality(double k) const {
  return 4.0 * radius_sq * lambda_n / (sigma_min * std::sqrt(k));
}

PrimalBounds primal_error_bounds(double radius_sq, const GTau& gt, const Eigen::VectorXd& sigma) {
  if (sigma.size() == 0 || (sigma.array() <= 0.0).any())
    fail(ErrorKind::nonpositive_sigma, "sigma must be positive");
  return {radius_sq, gt.lambda_max(), sigma.minCoeff()};
}

double weighted_infeasibility(const BlockMatrix& u, const Eigen::VectorXd& v_star,
                              const Eigen::VectorXd& sigma) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    total += sigma[i] * (u.row(i).transpose() - v_star).squaredNorm();
  return total;
}

}  // namespace rcd
