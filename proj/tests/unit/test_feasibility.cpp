#include <cmath>

#include <doctest.h>

#include "generators.hpp"
#include "rcd/feasibility.hpp"
#include "rcd/oracle.hpp"

using doctest::Approx;
using rcd::ConvexSet;

namespace {

Eigen::VectorXd v(std::initializer_list<double> xs) {
  Eigen::VectorXd out(xs.size());
  int i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

rcd::FeasibilityProblem two_intervals() {
  rcd::FeasibilityProblem prob;
  prob.sets = {ConvexSet::box(v({0.0}), v({2.0})), ConvexSet::box(v({1.0}), v({3.0}))};
  prob.v0 = v({5.0});
  prob.weights = v({0.5, 0.5});
  prob.interior = rcd::InteriorBall{v({1.5}), 0.5};
  return prob;
}

rcd::FeasibilityProblem random_balls(gen::Rng& rng, int count, int dim) {
  const Eigen::VectorXd shared = gen::vec(rng, dim, -1, 1);
  rcd::FeasibilityProblem prob;
  for (int i = 0; i < count; ++i) {
    const double r = gen::uniform(rng, 1.5, 3.0);
    Eigen::VectorXd dir = gen::vec(rng, dim, -1, 1);
    dir.normalize();
    prob.sets.push_back(ConvexSet::ball(shared + (r - 0.5) * dir, r));
  }
  Eigen::VectorXd dir = gen::vec(rng, dim, -1, 1);
  prob.v0 = shared + 5.0 * dir.normalized();
  prob.weights = Eigen::VectorXd::Constant(count, 1.0 / count);
  prob.interior = rcd::InteriorBall{shared, 0.5};
  return prob;
}

}  // namespace

TEST_SUITE("feasibility") {

TEST_CASE("projection examples") {
  CHECK(rcd::project(ConvexSet::box(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3)),
                     Eigen::VectorXd::Constant(3, 2.0))
            .isApprox(Eigen::VectorXd::Ones(3)));
  const auto b = rcd::project(ConvexSet::ball(Eigen::VectorXd::Zero(2), 1.0), v({3.0, 4.0}));
  CHECK(b[0] == Approx(0.6));
  CHECK(b[1] == Approx(0.8));
  const auto h = rcd::project(ConvexSet::halfspace(v({1.0, 0.0}), 0.0), v({1.0, 1.0}));
  CHECK(h[0] == Approx(0.0));
  CHECK(h[1] == Approx(1.0));
  CHECK_THROWS(ConvexSet::box(v({1.0}), v({0.0})));
  CHECK_THROWS(ConvexSet::ball(v({0.0}), 0.0));
  CHECK_THROWS(ConvexSet::halfspace(v({0.0, 0.0}), 1.0));
}

TEST_CASE("projections are idempotent and satisfy the obtuse-angle condition") {
  gen::Rng rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = gen::integer(rng, 1, 4);
    ConvexSet set = ConvexSet::ball(gen::vec(rng, dim, -1, 1), gen::uniform(rng, 0.5, 2));
    switch (trial % 3) {
      case 0: {
        const Eigen::VectorXd lo = gen::vec(rng, dim, -2, 0);
        set = ConvexSet::box(lo, lo + gen::vec(rng, dim, 0.1, 2));
        break;
      }
      case 1: set = ConvexSet::halfspace(gen::vec(rng, dim, -1, 1) + Eigen::VectorXd::Constant(dim, 1.5), gen::uniform(rng, -1, 1)); break;
      default: break;
    }
    const Eigen::VectorXd z = gen::vec(rng, dim, -5, 5);
    const Eigen::VectorXd p = rcd::project(set, z);
    CHECK(set.contains(p));
    CHECK((rcd::project(set, p) - p).norm() <= 1e-12);
    for (int s = 0; s < 5; ++s) {
      const Eigen::VectorXd q = rcd::project(set, gen::vec(rng, dim, -5, 5));
      CHECK((z - p).dot(q - p) <= 1e-10);
    }
  }
}

TEST_CASE("conjugate: value, gradient and examples") {
  rcd::FeasibilityProblem prob;
  prob.sets = {ConvexSet::ball(Eigen::VectorXd::Zero(2), 2.0),
               ConvexSet::box(Eigen::VectorXd::Constant(2, -1e9), Eigen::VectorXd::Constant(2, 1e9))};
  prob.v0 = v({0.5, -0.5});
  prob.weights = v({0.3, 0.7});
  const auto [f0, g0] = rcd::conjugate_value_grad(prob, 0, Eigen::VectorXd::Zero(2));
  CHECK(f0 == 0.0);
  CHECK(g0.isApprox(prob.v0));

  gen::Rng rng(62);
  for (int s = 0; s < 20; ++s) {
    const Eigen::VectorXd x = gen::vec(rng, 2, -3, 3);
    const auto [f, g] = rcd::conjugate_value_grad(prob, 1, x);
    CHECK(f == Approx(x.dot(prob.v0) + x.squaredNorm() / (4 * 0.7)).epsilon(1e-12));
    CHECK(g.isApprox(prob.v0 + x / (2 * 0.7), 1e-12));
  }

  prob.sets[1] = ConvexSet::box(v({-0.2, -1.0}), v({0.4, 0.3}));
  for (int s = 0; s < 100; ++s) {
    const int i = s % 2;
    const Eigen::VectorXd x = gen::vec(rng, 2, -4, 4);
    const auto [f, g] = rcd::conjugate_value_grad(prob, i, x);
    CHECK(prob.sets[i].contains(g));
    for (int c = 0; c < 2; ++c) {
      Eigen::VectorXd xp = x, xm = x;
      xp[c] += 1e-6;
      xm[c] -= 1e-6;
      const double fd = (rcd::conjugate_value_grad(prob, i, xp).first -
                         rcd::conjugate_value_grad(prob, i, xm).first) / 2e-6;
      CHECK(std::abs(fd - g[c]) <= 1e-5);
    }
  }
}

TEST_CASE("dual objective constants") {
  const auto prob = two_intervals();
  CHECK(rcd::make_dual_objective(prob).lipschitz().isApprox(v({1.0, 1.0})));
  CHECK(rcd::make_dual_objective(prob, true).lipschitz().isApprox(v({2.0, 2.0})));
  CHECK(rcd::primal_sigma(prob).isApprox(v({1.0, 1.0})));
  CHECK(rcd::primal_sigma(prob, true).isApprox(v({0.5, 0.5})));
}

TEST_CASE("Dykstra oracle") {
  CHECK(rcd::oracle::alternating_projections({ConvexSet::ball(Eigen::VectorXd::Zero(2), 1.0)},
                                              v({3.0, 4.0}), 1e-12)
            .isApprox(v({0.6, 0.8})));
  const auto prob = two_intervals();
  CHECK(rcd::oracle::alternating_projections(prob.sets, prob.v0, 1e-12)[0] == Approx(2.0).epsilon(1e-12));
  // Two half-planes x >= 0, y >= 0 from (-1, -2): the answer is the origin, where
  // plain alternating projections also land; a slanted pair separates the two.
  const std::vector<ConvexSet> wedge{ConvexSet::halfspace(v({-1.0, 0.0}), 0.0),
                                     ConvexSet::halfspace(v({1.0, -1.0}), 0.0)};
  const auto p = rcd::oracle::alternating_projections(wedge, v({2.0, -1.0}), 1e-13);
  // Nearest point of {x >= 0, y >= x} to (2, -1) is (0.5, 0.5).
  CHECK(p[0] == Approx(0.5).epsilon(1e-9));
  CHECK(p[1] == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("v0 already in every set") {
  rcd::FeasibilityProblem prob;
  for (int i = 0; i < 4; ++i) prob.sets.push_back(ConvexSet::ball(Eigen::VectorXd::Zero(2), 3.0));
  prob.v0 = v({0.5, 0.5});
  prob.weights = Eigen::VectorXd::Constant(4, 0.25);
  const auto g = gen::complete(4);
  const auto res = rcd::solve_projection(prob, g, rcd::dist_uniform(gen::paths(g, 2)), {50, 1});
  for (int i = 0; i < 4; ++i) CHECK((res.recovery.u.row(i).transpose() - prob.v0).norm() == 0.0);
  CHECK(res.recovery.duality_sum == Approx(0.0).scale(1.0));
}

TEST_CASE("two intervals: recovery converges to the analytic projection") {
  const auto prob = two_intervals();
  const auto g = gen::complete(2);
  const auto dist = rcd::dist_uniform(gen::paths(g, 2));
  const auto res = rcd::solve_projection(prob, g, dist, {200, 3, 1});
  for (int i = 0; i < 2; ++i) CHECK(res.recovery.u(i, 0) == Approx(2.0).epsilon(1e-9));
  CHECK(res.recovery.primal_value == Approx(9.0).epsilon(1e-9));
  CHECK(res.recovery.duality_sum == Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("recovery changes only on the sampled path") {
  gen::Rng rng(64);
  const auto prob = random_balls(rng, 6, 3);
  const auto g = gen::complete(6);
  const auto res = rcd::solve_projection(prob, g, rcd::dist_uniform(gen::paths(g, 3)), {300, 5, 1});
  REQUIRE(res.snapshots.size() == 301);
  for (std::size_t s = 1; s < res.snapshots.size(); ++s) {
    int changed = 0;
    for (int i = 0; i < 6; ++i) changed += res.snapshots[s].u.row(i) != res.snapshots[s - 1].u.row(i);
    CHECK(changed <= 3);
  }
}

TEST_CASE("random balls: recovery, chain inequality, bounds") {
  gen::Rng rng(63);
  for (int trial = 0; trial < 4; ++trial) {
    const auto prob = random_balls(rng, 5, 2);
    const Eigen::VectorXd vstar = rcd::oracle::alternating_projections(prob.sets, prob.v0, 1e-12);
    const auto g = gen::complete(5);
    const auto dist = rcd::dist_uniform(gen::paths(g, 2));
    const auto gt = rcd::assemble_g_tau(rcd::make_dual_objective(prob).lipschitz(), dist);
    const auto sigma = rcd::primal_sigma(prob);
    const auto bounds = rcd::primal_error_bounds(rcd::slater_radius_sq(prob, rcd::lambda2(gt)), gt, sigma);
    CHECK(bounds.infeasibility(2.0) == Approx(bounds.infeasibility(1.0) / 2));
    CHECK(bounds.suboptimality(4.0) == Approx(bounds.suboptimality(1.0) / 2));

    const auto res = rcd::solve_projection(prob, g, dist, {20000, rng(), 50});
    for (int i = 0; i < 5; ++i) CHECK((res.recovery.u.row(i).transpose() - vstar).norm() <= 1e-4);

    // f(x) - f* >= 1/2 sum sigma_i ||u_i(x) - v*||^2, with f* = -g*.
    const auto obj = rcd::make_dual_objective(prob);
    const double gstar = prob.weights.sum() * (vstar - prob.v0).squaredNorm();
    for (std::size_t s = 0; s < res.snapshots.size(); s += 10) {
      const double fk = res.report.trace[s].f;
      const double infeas = rcd::weighted_infeasibility(res.snapshots[s].u, vstar, sigma);
      CHECK(0.5 * infeas <= fk + gstar + 1e-9);
      if (res.snapshots[s].k > 0) CHECK(infeas <= bounds.infeasibility(res.snapshots[s].k));
    }
    for (int i = 0; i < 5; ++i) CHECK(prob.sets[i].contains(res.recovery.u.row(i).transpose()));
  }
}

}
