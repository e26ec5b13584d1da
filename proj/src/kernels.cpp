#include "rcd/kernels.hpp"

#include <algorithm>
#include <mutex>
#include <vector>

namespace rcd::kernels {

void accumulate_path(const Eigen::VectorXd& lipschitz, std::span<const int> path, double w,
                     Eigen::MatrixXd& out) {
  if (w == 0.0) return;
  double inv_sum = 0.0;
  for (int i : path) inv_sum += 1.0 / lipschitz[i];
  const double scale = w / inv_sum;
  for (int i : path) {
    const double li = 1.0 / lipschitz[i];
    out(i, i) += w * li;
    for (int j : path) out(i, j) -= scale * li / lipschitz[j];
  }
}

double path_quadratic_form(const Eigen::VectorXd& lipschitz, std::span<const int> path,
                           const Eigen::VectorXd& v) {
  double inv_sum = 0.0, weighted = 0.0, square = 0.0;
  for (int i : path) {
    const double li = 1.0 / lipschitz[i];
    inv_sum += li;
    weighted += li * v[i];
    square += li * v[i] * v[i];
  }
  return square - weighted * weighted / inv_sum;
}

namespace serial {

Eigen::MatrixXd assemble_g_tau(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                               std::span<const double> weights) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(ps.n_nodes, ps.n_nodes);
  for (std::size_t p = 0; p < ps.paths.size(); ++p)
    accumulate_path(lipschitz, ps.paths[p], weights[p], g);
  return g;
}

void path_quadratic_forms(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                          const Eigen::VectorXd& v, std::span<double> out) {
  for (std::size_t p = 0; p < ps.paths.size(); ++p)
    out[p] = path_quadratic_form(lipschitz, ps.paths[p], v);
}

}  // namespace serial

namespace parallel {

Eigen::MatrixXd assemble_g_tau(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                               std::span<const double> weights) {
  const std::size_t count = ps.paths.size();
  // A chunk costs an N x N partial; give each one at least that much path work.
  const auto n2 = static_cast<std::size_t>(ps.n_nodes) * static_cast<std::size_t>(ps.n_nodes);
  const std::size_t work = count * static_cast<std::size_t>(ps.tau) * static_cast<std::size_t>(ps.tau);
  const std::size_t chunks = std::clamp<std::size_t>(work / std::max<std::size_t>(n2, 1), 1,
                                                     std::min(kReductionChunks, std::max<std::size_t>(count, 1)));
  const std::size_t per_chunk = (count + chunks - 1) / chunks;
  std::vector<Eigen::MatrixXd> partial(chunks);

  // Chunk boundaries do not depend on the thread count, and the partial sums
  // are folded serially below, so the result is reproducible.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ps.n_nodes, ps.n_nodes);
    const std::size_t lo = static_cast<std::size_t>(c) * per_chunk;
    const std::size_t hi = std::min(count, lo + per_chunk);
    for (std::size_t p = lo; p < hi; ++p) accumulate_path(lipschitz, ps.paths[p], weights[p], acc);
    partial[c] = std::move(acc);
  }

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(ps.n_nodes, ps.n_nodes);
  for (const auto& m : partial) g += m;
  return g;
}

void path_quadratic_forms(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                          const Eigen::VectorXd& v, std::span<double> out) {
  const auto count = static_cast<std::ptrdiff_t>(ps.paths.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < count; ++p)
    out[p] = path_quadratic_form(lipschitz, ps.paths[p], v);
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body) {
  std::exception_ptr first;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace parallel

}  // namespace rcd::kernels
