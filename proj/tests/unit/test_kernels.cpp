#include <doctest.h>

#include <atomic>
#include <stdexcept>

#include "generators.hpp"
#include "rcd/kernels.hpp"

TEST_SUITE("kernels") {

TEST_CASE("serial and parallel G_tau assembly agree") {
  gen::Rng rng(81);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = gen::integer(rng, 5, 12);
    const auto ps = rcd::enumerate_paths(gen::complete(n), gen::integer(rng, 2, 4));
    const Eigen::VectorXd L = gen::lipschitz(rng, n);
    const auto w = gen::simplex(rng, ps.size());
    const auto a = rcd::kernels::serial::assemble_g_tau(L, ps, w);
    const auto b = rcd::kernels::parallel::assemble_g_tau(L, ps, w);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((b - rcd::kernels::parallel::assemble_g_tau(L, ps, w)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("path quadratic forms agree and match the matrix form") {
  gen::Rng rng(82);
  const int n = 9;
  const auto ps = rcd::enumerate_paths(gen::complete(n), 3);
  const Eigen::VectorXd L = gen::lipschitz(rng, n);
  const Eigen::VectorXd v = gen::vec(rng, n, -2, 2);
  std::vector<double> a(ps.size()), b(ps.size());
  rcd::kernels::serial::path_quadratic_forms(L, ps, v, a);
  rcd::kernels::parallel::path_quadratic_forms(L, ps, v, b);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    CHECK(std::abs(a[k] - b[k]) <= 1e-12);
    const auto& p = ps.paths[k];
    const Eigen::MatrixXd gp = rcd::g_path(L, p);
    Eigen::VectorXd vp(3);
    for (int i = 0; i < 3; ++i) vp[i] = v[p[i]];
    CHECK(std::abs(a[k] - vp.dot(gp * vp)) <= 1e-12);
  }
}

TEST_CASE("for_each_index visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  rcd::kernels::parallel::for_each_index(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(rcd::kernels::parallel::for_each_index(
                      100, [](std::size_t i) { if (i == 37) throw std::runtime_error("boom"); }),
                  std::runtime_error);
}

}
