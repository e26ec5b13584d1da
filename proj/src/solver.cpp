#include "rcd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcd/error.hpp"

namespace rcd {

double path_direction(const Eigen::VectorXd& lipschitz, std::span<const int> path,
                      const BlockMatrix& grads, BlockMatrix& d) {
  const auto tau = static_cast<Eigen::Index>(path.size());
  const Eigen::Index n = grads.cols();
  d.resize(tau, n);
  double inv_sum = 0.0;
  for (int i : path) inv_sum += 1.0 / lipschitz[i];
  double decrease = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    double mean = 0.0;
    for (Eigen::Index r = 0; r < tau; ++r) mean += grads(r, c) / lipschitz[path[r]];
    mean /= inv_sum;
    for (Eigen::Index r = 0; r < tau; ++r) {
      const double gap = mean - grads(r, c);
      d(r, c) = gap / lipschitz[path[r]];
      decrease += gap * d(r, c);
    }
  }
  return 0.5 * decrease;
}

BlockMatrix direction(const SeparableObjective& obj, const BlockMatrix& x,
                      std::span<const int> path) {
  obj.check_shape(x);
  BlockMatrix grads(static_cast<Eigen::Index>(path.size()), obj.block_dim());
  for (std::size_t r = 0; r < path.size(); ++r) {
    if (path[r] < 0 || path[r] >= obj.n_nodes())
      fail(ErrorKind::index_out_of_range, "path vertex out of range");
    obj.grad_node(path[r], row_span(x, path[r]), row_span(grads, static_cast<Eigen::Index>(r)));
  }
  BlockMatrix d;
  path_direction(obj.lipschitz(), path, grads, d);
  return d;
}

SolverState init_state(const SeparableObjective& obj, BlockMatrix x0, std::uint64_t seed) {
  obj.check_shape(x0);
  SolverState s;
  s.grad = obj.gradient(x0);
  s.f_value = obj.eval(x0);
  s.x = std::move(x0);
  s.rng.seed(seed);
  return s;
}

StepInfo step(SolverState& state, const SeparableObjective& obj, const PathDistribution& dist,
              long long refresh_interval) {
  const auto& fns = obj.functions();
  const int tau = dist.tau();
  state.path.resize(tau);
  dist.sample(state.rng, state.path);
  state.path_grad.resize(tau, obj.block_dim());
  for (int r = 0; r < tau; ++r) state.path_grad.row(r) = state.grad.row(state.path[r]);

  StepInfo info{path_direction(obj.lipschitz(), state.path, state.path_grad, state.d), 0.0};
  for (int r = 0; r < tau; ++r) {
    const int i = state.path[r];
    info.change += fns.value_change(i, row_span(state.x, i), row_span(state.d, r));
    state.x.row(i) += state.d.row(r);
    fns.gradient(i, row_span(state.x, i), row_span(state.grad, i));
  }
  state.f_value += info.change;
  ++state.k;
  if (refresh_interval > 0 && ++state.since_refresh >= refresh_interval) {
    state.f_value = obj.eval(state.x);
    state.since_refresh = 0;
  }
  return info;
}

double grad_disagreement(const BlockMatrix& grad) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < grad.cols(); ++c)
    worst = std::max(worst, grad.col(c).maxCoeff() - grad.col(c).minCoeff());
  return worst;
}

double coupling_residual(const BlockMatrix& x) {
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();
  return x.colwise().sum().cwiseAbs().maxCoeff() / scale;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::f_gap: return "f_gap";
    case StopReason::grad_disagreement: return "grad_disagreement";
  }
  return "unknown";
}

namespace {

void check_paths_on(const Network& g, const PathDistribution& dist) {
  if (g.n_nodes() != dist.n_nodes())
    fail(ErrorKind::dimension_mismatch, "distribution and network disagree on N");
  if (!dist.is_explicit()) {
    if (!g.is_complete())
      fail(ErrorKind::invalid_argument, "complete-graph distribution on a non-complete network");
    return;
  }
  const auto& ps = dist.path_set();
  for (const auto& path : ps.paths)
    for (std::size_t r = 1; r < path.size(); ++r)
      if (!g.has_edge(path[r - 1], path[r]))
        fail(ErrorKind::invalid_argument, "distribution uses a path that is not in the network");
}

void check_divergence(const SolverState& s, double ceiling) {
  if (!std::isfinite(s.f_value))
    fail(ErrorKind::divergence, "objective became non-finite at k = " + std::to_string(s.k));
  if (s.x.cwiseAbs().maxCoeff() > ceiling)
    fail(ErrorKind::divergence, "iterate left the ball of radius " + std::to_string(ceiling) +
                                    " at k = " + std::to_string(s.k));
}

}  // namespace

SolveReport run(const SeparableObjective& obj, const Network& g, const PathDistribution& dist,
                const BlockMatrix& x0, const RunOptions& options) {
  obj.check_shape(x0);
  check_paths_on(g, dist);
  if (obj.n_nodes() != dist.n_nodes())
    fail(ErrorKind::dimension_mismatch, "objective and distribution disagree on N");
  if (coupling_residual(x0) > 1e-9)
    fail(ErrorKind::infeasible_start, "x0 violates sum_i x_i = 0 (relative residual " +
                                          std::to_string(coupling_residual(x0)) + ")");

  const long long stride =
      options.trace_stride > 0 ? options.trace_stride
                               : std::max<long long>(1, obj.n_nodes() / dist.tau());
  const auto& stop = options.stop;

  SolverState s = init_state(obj, x0, options.seed);
  SolveReport report{{}, 0.0, 0, StopReason::max_iters, {}};
  auto record = [&] {
    if (report.trace.empty() || report.trace.back().k != s.k) report.trace.push_back({s.k, s.f_value});
    if (options.on_record) options.on_record(s);
  };
  auto disagreement_met = [&] {
    return stop.disagreement_tol && grad_disagreement(s.grad) <= *stop.disagreement_tol;
  };
  auto gap_met = [&] { return stop.f_ref && s.f_value - *stop.f_ref <= stop.gap_tol; };

  record();
  bool done = false;
  if (gap_met()) {
    report.reason = StopReason::f_gap;
    done = true;
  } else if (disagreement_met()) {
    report.reason = StopReason::grad_disagreement;
    done = true;
  }
  while (!done && s.k < stop.max_iters) {
    step(s, obj, dist, options.refresh_interval);
    if (gap_met()) {
      report.reason = StopReason::f_gap;
      done = true;
    }
    if (s.k % stride == 0 || done) {
      check_divergence(s, options.divergence_ceiling);
      record();
      if (!done && disagreement_met()) {
        report.reason = StopReason::grad_disagreement;
        done = true;
      }
    }
  }
  if (report.trace.back().k != s.k) record();
  report.x = std::move(s.x);
  report.f = s.f_value;
  report.iterations = s.k;
  return report;
}

namespace {

SolveReport run_full(const SeparableObjective& obj, const BlockMatrix& x0,
                     const BaselineOptions& options,
                     const std::function<void(const BlockMatrix& grad, BlockMatrix& x)>& update) {
  obj.check_shape(x0);
  if (coupling_residual(x0) > 1e-9)
    fail(ErrorKind::infeasible_start, "x0 violates sum_i x_i = 0");
  const long long n = obj.n_nodes();
  const long long stride = std::max<long long>(1, options.trace_stride);
  BlockMatrix x = x0;
  SolveReport report{{}, obj.eval(x), 0, StopReason::max_iters, {{0, obj.eval(x)}}};
  for (long long t = 1; t <= options.iterations; ++t) {
    update(obj.gradient(x), x);
    if (t % stride == 0 || t == options.iterations) {
      const double f = obj.eval(x);
      if (!std::isfinite(f)) fail(ErrorKind::divergence, "baseline diverged");
      report.trace.push_back({t * n, f});
    }
  }
  report.f = obj.eval(x);
  report.iterations = options.iterations * n;
  report.x = std::move(x);
  return report;
}

}  // namespace

SolveReport run_projected_gradient(const SeparableObjective& obj, const BlockMatrix& x0,
                                   const BaselineOptions& options) {
  const double l_max = obj.lipschitz().maxCoeff();
  return run_full(obj, x0, options, [&](const BlockMatrix& grad, BlockMatrix& x) {
    const Eigen::RowVectorXd mean = grad.colwise().mean();
    x += ((-grad).rowwise() + mean) / l_max;
  });
}

std::vector<std::vector<std::pair<int, double>>> metropolis_weights(const Network& g,
                                                                    double l_max) {
  std::vector<std::vector<std::pair<int, double>>> w(g.n_nodes());
  for (const auto& [a, b] : g.edges()) {
    const double wij = 1.0 / (std::max(g.degree(a), g.degree(b)) + 1) / (2.0 * l_max);
    w[a].emplace_back(b, wij);
    w[b].emplace_back(a, wij);
  }
  return w;
}

SolveReport run_center_free(const SeparableObjective& obj, const Network& g,
                            const BlockMatrix& x0, const BaselineOptions& options) {
  if (g.n_nodes() != obj.n_nodes())
    fail(ErrorKind::dimension_mismatch, "objective and network disagree on N");
  const auto w = metropolis_weights(g, obj.lipschitz().maxCoeff());
  return run_full(obj, x0, options, [&](const BlockMatrix& grad, BlockMatrix& x) {
    for (int i = 0; i < obj.n_nodes(); ++i)
      for (const auto& [j, wij] : w[i]) x.row(i) += wij * (grad.row(j) - grad.row(i));
  });
}

}  // namespace rcd
