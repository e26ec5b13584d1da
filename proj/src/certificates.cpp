#include "rcd/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rcd/error.hpp"
#include "scalar.hpp"

namespace rcd {

double dual_norm(const GTau& gt, const BlockMatrix& x) {
  if (x.rows() != gt.n_nodes())
    fail(ErrorKind::dimension_mismatch, "dual norm needs one row per node");
  const double scale = 1.0 + (x.size() ? x.cwiseAbs().maxCoeff() : 0.0);
  if (x.size() && x.colwise().sum().cwiseAbs().maxCoeff() > 1e-8 * scale)
    fail(ErrorKind::not_in_subspace, "dual norm is defined on sum_i x_i = 0 only");
  const double cutoff = 1e-12 * gt.lambda_max();
  const Eigen::MatrixXd coeff = gt.eigvecs.transpose() * x;
  double total = 0.0;
  for (Eigen::Index j = 0; j < gt.eigvals.size(); ++j)
    if (gt.eigvals[j] > cutoff) total += coeff.row(j).squaredNorm() / gt.eigvals[j];
  return std::sqrt(total);
}

double dual_norm(const GTau& gt, const Eigen::VectorXd& x) {
  BlockMatrix m = x;
  return dual_norm(gt, m);
}

namespace {

// min_t f_i(t) for a scalar node, from the root of its gradient.
double node_minimum(const SeparableObjective& obj, int i, double& argmin) {
  const auto& fns = obj.functions();
  auto grad = [&](double t) {
    double g;
    fns.gradient(i, {&t, 1}, {&g, 1});
    return g;
  };
  auto curvature = [&](double t) { return fns.second_derivative(i, t); };
  const auto br = detail::bracket_increasing(grad, 0.0, 0.0);
  if (!br)
    fail(ErrorKind::unbounded_radius,
         "node " + std::to_string(i) + " has no minimizer (f_i unbounded or not attained)");
  argmin = detail::solve_increasing(grad, curvature, 0.0, br->first, br->second);
  return fns.value(i, {&argmin, 1});
}

}  // namespace

Eigen::VectorXd level_set_radii(const SeparableObjective& obj, double f0,
                                const Eigen::VectorXd& x_star) {
  if (obj.block_dim() != 1)
    fail(ErrorKind::unsupported, "level-set radii are implemented for scalar blocks");
  const int n = obj.n_nodes();
  if (x_star.size() != n) fail(ErrorKind::dimension_mismatch, "x* has wrong length");
  const auto& fns = obj.functions();

  Eigen::VectorXd minima(n);
  for (int i = 0; i < n; ++i) {
    double argmin;
    minima[i] = node_minimum(obj, i, argmin);
  }
  const double total_min = minima.sum();

  Eigen::VectorXd radii(n);
  for (int i = 0; i < n; ++i) {
    // Rounding slack keeps x*_i inside when f0 is f* itself; it only enlarges R_i.
    const double budget = f0 - (total_min - minima[i]) +
                          1e-12 * (1.0 + std::abs(f0) + std::abs(total_min));
    const double center = x_star[i];
    auto inside = [&](double t) { return fns.value(i, {&t, 1}) <= budget; };
    if (!inside(center))
      fail(ErrorKind::invalid_argument,
           "x*_" + std::to_string(i) + " lies outside the level set; is f0 >= f*?");
    double reach = 0.0;
    for (double dir : {-1.0, 1.0}) {
      double width = 1.0;
      int e = 0;
      while (inside(center + dir * width)) {
        width *= 2.0;
        if (++e > 200)
          fail(ErrorKind::unbounded_radius, "level set of node " + std::to_string(i) +
                                                " is unbounded");
      }
      const double edge = detail::bisect_boundary(inside, center, center + dir * width);
      reach = std::max(reach, std::abs(edge - center));
    }
    radii[i] = reach;
  }
  return radii;
}

BoxRadius box_radius_sq(const GTau& gt, const Eigen::VectorXd& lipschitz,
                        const Eigen::VectorXd& radii) {
  const int n = gt.n_nodes();
  if (lipschitz.size() != n || radii.size() != n)
    fail(ErrorKind::dimension_mismatch, "box radius needs one L_i and R_i per node");
  const double l2 = lambda2(gt);
  if (!(l2 > 0.0)) fail(ErrorKind::disconnected_support, "lambda2(G_tau) must be positive");

  const Eigen::VectorXd inv = lipschitz.cwiseInverse();
  Eigen::MatrixXd m = inv.asDiagonal();
  m -= inv * inv.transpose() / inv.sum();
  const double c = complement_generalized_min(gt.matrix, m).value;

  BoxRadius out;
  out.euclidean = radii.squaredNorm() / l2;
  out.weighted = c > 0.0 ? lipschitz.dot(radii.cwiseAbs2()) / c
                         : std::numeric_limits<double>::infinity();
  out.value = std::min(out.euclidean, out.weighted);
  return out;
}

double bound_thm1(double radius, double k) { return 2.0 * radius * radius / k; }

double bound_thm3(const Eigen::VectorXd& lipschitz, const Eigen::VectorXd& radii, int n_nodes,
                  int tau, double k) {
  return static_cast<double>(n_nodes - 1) / static_cast<double>(tau - 1) * 2.0 *
         lipschitz.dot(radii.cwiseAbs2()) / k;
}

double bound_estimate3(const Eigen::VectorXd& radii, double lambda2, double k) {
  return 2.0 * radii.squaredNorm() / (lambda2 * k);
}

double bound_thm2(double sigma_g, double gap0, double k) {
  return std::pow(1.0 - sigma_g, k) * gap0;
}

double RateCertificate::bound(double k) const {
  if (kind == Kind::strongly_convex_thm2) return bound_thm2(sigma_g, coefficient, k);
  return coefficient / k;
}

RateCertificate RateCertificate::smooth(double radius) {
  return {Kind::smooth_thm1, bound_thm1(radius, 1.0), 0.0};
}

RateCertificate RateCertificate::complete_graph(const Eigen::VectorXd& lipschitz,
                                                const Eigen::VectorXd& radii, int n_nodes,
                                                int tau) {
  return {Kind::complete_graph_thm3, bound_thm3(lipschitz, radii, n_nodes, tau, 1.0), 0.0};
}

RateCertificate RateCertificate::lambda2_estimate(const Eigen::VectorXd& radii, double lambda2) {
  return {Kind::lambda2_estimate3, bound_estimate3(radii, lambda2, 1.0), 0.0};
}

RateCertificate RateCertificate::strongly_convex(double sigma_g, double gap0) {
  if (!(sigma_g > 0.0 && sigma_g <= 1.0))
    fail(ErrorKind::invalid_argument, "the linear rate needs sigma_G in (0, 1]");
  return {Kind::strongly_convex_thm2, gap0, sigma_g};
}

std::string_view to_string(RateCertificate::Kind kind) {
  switch (kind) {
    case RateCertificate::Kind::smooth_thm1: return "smooth";
    case RateCertificate::Kind::strongly_convex_thm2: return "strongly_convex";
    case RateCertificate::Kind::complete_graph_thm3: return "complete_graph";
    case RateCertificate::Kind::lambda2_estimate3: return "lambda2_estimate";
  }
  return "unknown";
}

std::vector<GapPoint> gap_trace(const std::vector<TracePoint>& trace, double f_star) {
  std::vector<GapPoint> out;
  out.reserve(trace.size());
  for (const auto& t : trace) out.push_back({static_cast<double>(t.k), t.f - f_star});
  return out;
}

double iterations_to_gap(const std::vector<GapPoint>& trace, double eps) {
  for (const auto& p : trace)
    if (p.gap <= eps) return p.k;
  fail(ErrorKind::not_reached, "trace never reaches gap " + std::to_string(eps));
}

double speedup_ratio(const std::vector<GapPoint>& a, const std::vector<GapPoint>& b, double eps) {
  const double kb = iterations_to_gap(b, eps);
  const double ka = iterations_to_gap(a, eps);
  if (kb == 0.0) return ka == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return ka / kb;
}

}  // namespace rcd
