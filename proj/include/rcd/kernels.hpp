#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <span>

#include <Eigen/Core>

#include "rcd/graph.hpp"

// Data-parallel inner loops of the design and experiment code. Each kernel has
// a serial reference in `serial` and an OpenMP version in `parallel`; the two
// agree to rounding (tests pin 1e-12) and the parallel reductions are
// deterministic for any thread count.
namespace rcd::kernels {

namespace serial {

/// sum_p weights[p] * G_path(p), scattered into N x N.
Eigen::MatrixXd assemble_g_tau(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                               std::span<const double> weights);

/// out[p] = v^T G_path(p) v for every path.
void path_quadratic_forms(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                          const Eigen::VectorXd& v, std::span<double> out);

}  // namespace serial

namespace parallel {

Eigen::MatrixXd assemble_g_tau(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                               std::span<const double> weights);

void path_quadratic_forms(const Eigen::VectorXd& lipschitz, const PathSet& ps,
                          const Eigen::VectorXd& v, std::span<double> out);

/// Runs body(0..count-1) on the OpenMP pool. The first exception thrown by any
/// task is rethrown after the loop.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace parallel

/// Upper bound on the chunks the parallel reductions split paths into. The
/// actual count depends only on the problem size, never on the thread count.
inline constexpr std::size_t kReductionChunks = 64;

/// Adds w * G_path into `out` (N x N) for one path; shared by both variants.
void accumulate_path(const Eigen::VectorXd& lipschitz, std::span<const int> path, double w,
                     Eigen::MatrixXd& out);

/// v^T G_path v = sum_i l_i v_i^2 - (sum_i l_i v_i)^2 / sum_i l_i on the path.
double path_quadratic_form(const Eigen::VectorXd& lipschitz, std::span<const int> path,
                           const Eigen::VectorXd& v);

}  // namespace rcd::kernels
