#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rcd {

/// N x n matrix of node blocks; row i is x_i and is contiguous in memory.
using BlockMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const BlockMatrix& x, Eigen::Index i) {
  return {x.data() + i * x.cols(), static_cast<std::size_t>(x.cols())};
}
inline std::span<double> row_span(BlockMatrix& x, Eigen::Index i) {
  return {x.data() + i * x.cols(), static_cast<std::size_t>(x.cols())};
}

/// Per-node convex functions f_i : R^n -> R of a separable objective.
class NodeFunctions {
 public:
  virtual ~NodeFunctions() = default;

  virtual double value(int i, std::span<const double> x) const = 0;
  virtual void gradient(int i, std::span<const double> x, std::span<double> out) const = 0;

  /// f_i(x + d) - f_i(x). Families override this with a cancellation-free
  /// form; the incremental objective in the solver relies on it.
  virtual double value_change(int i, std::span<const double> x,
                              std::span<const double> d) const;

  /// Scalar second derivative for n == 1 families, NaN when unavailable.
  virtual double second_derivative(int i, double x) const;
};

/// f(x) = sum_i f_i(x_i) together with the per-node constants the method needs.
class SeparableObjective {
 public:
  SeparableObjective(std::shared_ptr<const NodeFunctions> functions, int block_dim,
                     Eigen::VectorXd lipschitz,
                     std::optional<Eigen::VectorXd> strong_convexity = std::nullopt);

  int n_nodes() const { return static_cast<int>(lipschitz_.size()); }
  int block_dim() const { return block_dim_; }
  const Eigen::VectorXd& lipschitz() const { return lipschitz_; }
  const std::optional<Eigen::VectorXd>& strong_convexity() const { return strong_convexity_; }
  const NodeFunctions& functions() const { return *functions_; }
  std::shared_ptr<const NodeFunctions> shared_functions() const { return functions_; }

  double eval(const BlockMatrix& x) const;
  double node_value(int i, std::span<const double> x_i) const;
  Eigen::VectorXd grad_node(int i, std::span<const double> x_i) const;
  void grad_node(int i, std::span<const double> x_i, std::span<double> out) const;
  BlockMatrix gradient(const BlockMatrix& x) const;

  void check_shape(const BlockMatrix& x) const;

 private:
  std::shared_ptr<const NodeFunctions> functions_;
  int block_dim_;
  Eigen::VectorXd lipschitz_;
  std::optional<Eigen::VectorXd> strong_convexity_;
};

/// f_i(x) = a_i/2 * ||x - c_i||^2 with a_i > 0, so L_i = sigma_i = a_i.
/// `centers` is N x n.
SeparableObjective make_quadratic(Eigen::VectorXd curvature, BlockMatrix centers);

/// Coefficients of f_i(t) = a_i/2 (t - c_i)^2 + log(1 + exp(b_i (t - d_i))).
struct QuadLogisticParams {
  Eigen::VectorXd a, b, c, d;
};

/// Scalar quadratic-plus-logistic family; sigma_i = a_i, L_i = a_i + b_i^2 / 4.
SeparableObjective make_quad_logistic(const QuadLogisticParams& params);

/// Random instance with coefficients drawn uniformly on [-15, 15] and a_i = |draw|.
/// With `min_curvature > 0`, a_i is mapped affinely into [min_curvature, 15].
QuadLogisticParams random_quad_logistic_params(int n_nodes, std::uint64_t seed,
                                               double min_curvature = 0.0);
SeparableObjective make_quad_logistic(int n_nodes, std::uint64_t seed,
                                      double min_curvature = 0.0);

/// Change of coordinates turning sum_i alpha_i x_i = b into sum_i y_i = 0 with
/// y_i = alpha_i x_i - b / N.
struct NormalizedProblem {
  SeparableObjective objective;
  Eigen::VectorXd alpha;
  Eigen::VectorXd offset;  // b

  BlockMatrix to_original(const BlockMatrix& y) const;
  BlockMatrix to_normalized(const BlockMatrix& x) const;
};

NormalizedProblem normalize_constraint(const Eigen::VectorXd& alpha, const Eigen::VectorXd& b,
                                       const SeparableObjective& obj);

}  // namespace rcd
