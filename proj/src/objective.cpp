#include "rcd/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "rcd/error.hpp"

namespace rcd {

double NodeFunctions::value_change(int i, std::span<const double> x,
                                   std::span<const double> d) const {
  std::vector<double> moved(x.begin(), x.end());
  for (std::size_t c = 0; c < moved.size(); ++c) moved[c] += d[c];
  return value(i, moved) - value(i, x);
}

double NodeFunctions::second_derivative(int, double) const {
  return std::numeric_limits<double>::quiet_NaN();
}

SeparableObjective::SeparableObjective(std::shared_ptr<const NodeFunctions> functions,
                                       int block_dim, Eigen::VectorXd lipschitz,
                                       std::optional<Eigen::VectorXd> strong_convexity)
    : functions_(std::move(functions)),
      block_dim_(block_dim),
      lipschitz_(std::move(lipschitz)),
      strong_convexity_(std::move(strong_convexity)) {
  if (!functions_) fail(ErrorKind::invalid_argument, "objective without node functions");
  if (block_dim_ < 1) fail(ErrorKind::invalid_size, "block dimension must be >= 1");
  if (lipschitz_.size() < 1) fail(ErrorKind::invalid_size, "objective has no nodes");
  for (Eigen::Index i = 0; i < lipschitz_.size(); ++i)
    if (!(lipschitz_[i] > 0.0) || !std::isfinite(lipschitz_[i]))
      fail(ErrorKind::invalid_argument,
           "Lipschitz constant of node " + std::to_string(i) + " must be positive and finite");
  if (strong_convexity_) {
    if (strong_convexity_->size() != lipschitz_.size())
      fail(ErrorKind::dimension_mismatch, "strong convexity vector has wrong length");
    for (Eigen::Index i = 0; i < lipschitz_.size(); ++i) {
      const double s = (*strong_convexity_)[i];
      if (s < 0.0 || s > lipschitz_[i] * (1.0 + 1e-12))
        fail(ErrorKind::invalid_argument,
             "node " + std::to_string(i) + " needs 0 <= sigma_i <= L_i");
    }
  }
}

void SeparableObjective::check_shape(const BlockMatrix& x) const {
  if (x.rows() != n_nodes() || x.cols() != block_dim_)
    fail(ErrorKind::dimension_mismatch,
         "expected a " + std::to_string(n_nodes()) + "x" + std::to_string(block_dim_) +
             " iterate, got " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
}

double SeparableObjective::eval(const BlockMatrix& x) const {
  check_shape(x);
  double total = 0.0;
  for (int i = 0; i < n_nodes(); ++i) total += functions_->value(i, row_span(x, i));
  return total;
}

double SeparableObjective::node_value(int i, std::span<const double> x_i) const {
  if (i < 0 || i >= n_nodes()) fail(ErrorKind::index_out_of_range, "node index out of range");
  if (static_cast<int>(x_i.size()) != block_dim_)
    fail(ErrorKind::dimension_mismatch, "node block has wrong dimension");
  return functions_->value(i, x_i);
}

Eigen::VectorXd SeparableObjective::grad_node(int i, std::span<const double> x_i) const {
  Eigen::VectorXd out(block_dim_);
  grad_node(i, x_i, {out.data(), static_cast<std::size_t>(block_dim_)});
  return out;
}

void SeparableObjective::grad_node(int i, std::span<const double> x_i,
                                   std::span<double> out) const {
  if (i < 0 || i >= n_nodes()) fail(ErrorKind::index_out_of_range, "node index out of range");
  if (static_cast<int>(x_i.size()) != block_dim_ || static_cast<int>(out.size()) != block_dim_)
    fail(ErrorKind::dimension_mismatch, "node block has wrong dimension");
  functions_->gradient(i, x_i, out);
}

BlockMatrix SeparableObjective::gradient(const BlockMatrix& x) const {
  check_shape(x);
  BlockMatrix g(x.rows(), x.cols());
  for (int i = 0; i < n_nodes(); ++i) functions_->gradient(i, row_span(x, i), row_span(g, i));
  return g;
}

namespace {

class QuadraticFunctions final : public NodeFunctions {
 public:
  QuadraticFunctions(Eigen::VectorXd a, BlockMatrix c) : a_(std::move(a)), c_(std::move(c)) {}

  double value(int i, std::span<const double> x) const override {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double r = x[k] - c_(i, k);
      s += r * r;
    }
    return 0.5 * a_[i] * s;
  }

  void gradient(int i, std::span<const double> x, std::span<double> out) const override {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = a_[i] * (x[k] - c_(i, k));
  }

  double value_change(int i, std::span<const double> x,
                      std::span<const double> d) const override {
    // a/2 (||r + d||^2 - ||r||^2) = a/2 <d, 2r + d>
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += d[k] * (2.0 * (x[k] - c_(i, k)) + d[k]);
    return 0.5 * a_[i] * s;
  }

  double second_derivative(int i, double) const override { return a_[i]; }

 private:
  Eigen::VectorXd a_;
  BlockMatrix c_;
};

// log(1 + e^t) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log1p(s(u) expm1(-delta)) for delta >= 0. When the argument nears -1 it is
// rewritten as log(s(-u) + s(u) e^{-delta}) in log-sum-exp form.
double log_mix(double u, double delta) {
  const double q = logistic(u) * std::expm1(-delta);
  if (q > -0.5) return std::log1p(q);
  const double a = -softplus(u), b = -softplus(-u) - delta;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

class QuadLogisticFunctions final : public NodeFunctions {
 public:
  explicit QuadLogisticFunctions(QuadLogisticParams p) : p_(std::move(p)) {}

  double value(int i, std::span<const double> x) const override {
    const double r = x[0] - p_.c[i];
    return 0.5 * p_.a[i] * r * r + softplus(p_.b[i] * (x[0] - p_.d[i]));
  }

  void gradient(int i, std::span<const double> x, std::span<double> out) const override {
    out[0] = p_.a[i] * (x[0] - p_.c[i]) + p_.b[i] * logistic(p_.b[i] * (x[0] - p_.d[i]));
  }

  double value_change(int i, std::span<const double> x,
                      std::span<const double> d) const override {
    const double r = x[0] - p_.c[i];
    const double quad = 0.5 * p_.a[i] * d[0] * (2.0 * r + d[0]);
    // softplus(t + delta) - softplus(t) = log1p(s(t) * expm1(delta)); for
    // delta > 0 the mirrored form keeps the argument of expm1 non-positive.
    const double t = p_.b[i] * (x[0] - p_.d[i]);
    const double delta = p_.b[i] * d[0];
    const double soft = delta >= 0.0 ? -log_mix(t + delta, delta) : log_mix(t, -delta);
    return quad + soft;
  }

  double second_derivative(int i, double x) const override {
    const double s = logistic(p_.b[i] * (x - p_.d[i]));
    return p_.a[i] + p_.b[i] * p_.b[i] * s * (1.0 - s);
  }

 private:
  QuadLogisticParams p_;
};

class ScaledFunctions final : public NodeFunctions {
 public:
  // g_i(y) = f_i((y + shift) / alpha_i)
  ScaledFunctions(std::shared_ptr<const NodeFunctions> base, Eigen::VectorXd alpha,
                  Eigen::VectorXd shift)
      : base_(std::move(base)), alpha_(std::move(alpha)), shift_(std::move(shift)) {}

  double value(int i, std::span<const double> y) const override {
    std::vector<double> x;
    map(i, y, x);
    return base_->value(i, x);
  }

  void gradient(int i, std::span<const double> y, std::span<double> out) const override {
    std::vector<double> x;
    map(i, y, x);
    base_->gradient(i, x, out);
    for (double& g : out) g /= alpha_[i];
  }

  double value_change(int i, std::span<const double> y,
                      std::span<const double> d) const override {
    std::vector<double> x, dx;
    map(i, y, x);
    dx.assign(d.begin(), d.end());
    for (double& v : dx) v /= alpha_[i];
    return base_->value_change(i, x, dx);
  }

  double second_derivative(int i, double y) const override {
    return base_->second_derivative(i, (y + shift_[0]) / alpha_[i]) / (alpha_[i] * alpha_[i]);
  }

 private:
  void map(int i, std::span<const double> y, std::vector<double>& x) const {
    x.resize(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) x[k] = (y[k] + shift_[k]) / alpha_[i];
  }

  std::shared_ptr<const NodeFunctions> base_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd shift_;
};

}  // namespace

SeparableObjective make_quadratic(Eigen::VectorXd curvature, BlockMatrix centers) {
  if (curvature.size() != centers.rows())
    fail(ErrorKind::dimension_mismatch, "curvature and centers disagree on N");
  const int n = static_cast<int>(centers.cols());
  Eigen::VectorXd lipschitz = curvature;
  auto fns = std::make_shared<QuadraticFunctions>(curvature, std::move(centers));
  return SeparableObjective(std::move(fns), n, lipschitz, curvature);
}

SeparableObjective make_quad_logistic(const QuadLogisticParams& params) {
  const auto n = params.a.size();
  if (n < 1 || params.b.size() != n || params.c.size() != n || params.d.size() != n)
    fail(ErrorKind::dimension_mismatch, "quad-logistic coefficient vectors must share one length");
  if ((params.a.array() < 0.0).any())
    fail(ErrorKind::invalid_argument, "quad-logistic curvature a_i must be nonnegative");
  Eigen::VectorXd sigma = params.a;
  Eigen::VectorXd lipschitz = params.a.array() + 0.25 * params.b.array().square();
  return SeparableObjective(std::make_shared<QuadLogisticFunctions>(params), 1,
                            std::move(lipschitz), std::move(sigma));
}

QuadLogisticParams random_quad_logistic_params(int n_nodes, std::uint64_t seed,
                                               double min_curvature) {
  if (n_nodes < 2) fail(ErrorKind::invalid_size, "need N >= 2");
  if (min_curvature < 0.0 || min_curvature > 15.0)
    fail(ErrorKind::invalid_argument, "min_curvature must lie in [0, 15]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-15.0, 15.0);
  QuadLogisticParams p{Eigen::VectorXd(n_nodes), Eigen::VectorXd(n_nodes),
                       Eigen::VectorXd(n_nodes), Eigen::VectorXd(n_nodes)};
  for (int i = 0; i < n_nodes; ++i) {
    const double a = std::abs(coef(rng));
    p.a[i] = min_curvature + a * (15.0 - min_curvature) / 15.0;
    p.b[i] = coef(rng);
    p.c[i] = coef(rng);
    p.d[i] = coef(rng);
  }
  return p;
}

SeparableObjective make_quad_logistic(int n_nodes, std::uint64_t seed, double min_curvature) {
  return make_quad_logistic(random_quad_logistic_params(n_nodes, seed, min_curvature));
}

BlockMatrix NormalizedProblem::to_original(const BlockMatrix& y) const {
  const double n = static_cast<double>(y.rows());
  BlockMatrix x(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    x.row(i) = (y.row(i) + offset.transpose() / n) / alpha[i];
  return x;
}

BlockMatrix NormalizedProblem::to_normalized(const BlockMatrix& x) const {
  const double n = static_cast<double>(x.rows());
  BlockMatrix y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    y.row(i) = alpha[i] * x.row(i) - offset.transpose() / n;
  return y;
}

NormalizedProblem normalize_constraint(const Eigen::VectorXd& alpha, const Eigen::VectorXd& b,
                                       const SeparableObjective& obj) {
  if (alpha.size() != obj.n_nodes())
    fail(ErrorKind::dimension_mismatch, "alpha must have one entry per node");
  if (b.size() != obj.block_dim())
    fail(ErrorKind::dimension_mismatch, "b must have the block dimension");
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    if (alpha[i] == 0.0 || !std::isfinite(alpha[i]))
      fail(ErrorKind::singular_scaling, "alpha_" + std::to_string(i) + " is zero");

  const Eigen::VectorXd shift = b / static_cast<double>(obj.n_nodes());
  auto fns = std::make_shared<ScaledFunctions>(obj.shared_functions(), alpha, shift);
  const Eigen::VectorXd scale = alpha.array().square();
  Eigen::VectorXd lipschitz = obj.lipschitz().array() / scale.array();
  std::optional<Eigen::VectorXd> sigma;
  if (obj.strong_convexity()) sigma = Eigen::VectorXd(obj.strong_convexity()->array() / scale.array());
  return NormalizedProblem{
      SeparableObjective(std::move(fns), obj.block_dim(), std::move(lipschitz), std::move(sigma)),
      alpha, b};
}

}  // namespace rcd
