#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "rcd/graph.hpp"
#include "rcd/objective.hpp"
#include "rcd/probdesign.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int integer(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Eigen::VectorXd vec(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

/// Log-uniform positive constants in [lo, hi].
inline Eigen::VectorXd lipschitz(Rng& rng, int n, double lo = 0.1, double hi = 10.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = std::exp(uniform(rng, std::log(lo), std::log(hi)));
  return v;
}

inline rcd::BlockMatrix block(Rng& rng, int rows, int cols, double lo, double hi) {
  rcd::BlockMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(rng, lo, hi);
  return m;
}

/// Random point with every column summing to zero.
inline rcd::BlockMatrix feasible(Rng& rng, int rows, int cols, double scale = 1.0) {
  rcd::BlockMatrix m = block(rng, rows, cols, -scale, scale);
  m.rowwise() -= m.colwise().mean();
  return m;
}

inline rcd::Network complete(int n) {
  return rcd::make_topology({rcd::TopologyKind::complete, n});
}

inline rcd::Network random_graph(Rng& rng, int n, double edge_prob) {
  rcd::TopologySpec spec{rcd::TopologyKind::random_connected, n, edge_prob, rng()};
  return rcd::make_topology(spec);
}

inline std::shared_ptr<const rcd::PathSet> paths(const rcd::Network& g, int tau) {
  return std::make_shared<const rcd::PathSet>(rcd::enumerate_paths(g, tau));
}

/// Random point of the simplex with full support.
inline std::vector<double> simplex(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& v : p) s += v = std::exponential_distribution<double>(1.0)(rng) + 1e-3;
  for (auto& v : p) v /= s;
  return p;
}

inline rcd::SeparableObjective quadratic(Rng& rng, int n, int dim = 1) {
  return rcd::make_quadratic(lipschitz(rng, n, 0.5, 5.0), block(rng, n, dim, -3.0, 3.0));
}

}  // namespace gen
