#include <cmath>

#include <doctest.h>

#include "generators.hpp"
#include "rcd/error.hpp"
#include "rcd/objective.hpp"
#include "rcd/oracle.hpp"

using doctest::Approx;

namespace {

// Independent scalar evaluation of a/2 (t - c)^2 + log(1 + exp(b (t - d))).
long double apl1_scalar(long double a, long double b, long double c, long double d,
                        long double t) {
  const long double z = b * (t - d);
  const long double soft = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return 0.5L * a * (t - c) * (t - c) + soft;
}

rcd::QuadLogisticParams one_node(double a, double b, double c, double d) {
  rcd::QuadLogisticParams p;
  p.a = Eigen::VectorXd::Constant(1, a);
  p.b = Eigen::VectorXd::Constant(1, b);
  p.c = Eigen::VectorXd::Constant(1, c);
  p.d = Eigen::VectorXd::Constant(1, d);
  return p;
}

double grad1(const rcd::SeparableObjective& obj, int i, double t) {
  return obj.grad_node(i, std::span<const double>(&t, 1))[0];
}

double value1(const rcd::SeparableObjective& obj, int i, double t) {
  return obj.node_value(i, std::span<const double>(&t, 1));
}

double change1(const rcd::SeparableObjective& obj, int i, double t, double d) {
  return obj.functions().value_change(i, std::span<const double>(&t, 1),
                                      std::span<const double>(&d, 1));
}

}  // namespace

TEST_SUITE("objective") {

TEST_CASE("eval examples") {
  const auto obj = rcd::make_quadratic(Eigen::VectorXd::Ones(3), rcd::BlockMatrix::Zero(3, 1));
  rcd::BlockMatrix x(3, 1);
  x << 1, 2, 3;
  CHECK(obj.eval(x) == Approx(7.0).epsilon(1e-15));
  const double t = 3.0;
  CHECK(obj.grad_node(0, std::span<const double>(&t, 1))[0] == 3.0);
}

TEST_CASE("apl1 at zero and against scalar re-evaluation") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto p = rcd::random_quad_logistic_params(20, seed);
    const auto obj = rcd::make_quad_logistic(p);
    long double expected0 = 0.0L;
    for (int i = 0; i < 20; ++i)
      expected0 += 0.5L * p.a[i] * p.c[i] * p.c[i] + std::log1p(std::exp((long double)(-p.b[i] * p.d[i])));
    CHECK(obj.eval(rcd::BlockMatrix::Zero(20, 1)) == Approx((double)expected0).epsilon(1e-12));

    gen::Rng rng(seed);
    const auto x = gen::block(rng, 20, 1, -20.0, 20.0);
    long double expected = 0.0L;
    for (int i = 0; i < 20; ++i) expected += apl1_scalar(p.a[i], p.b[i], p.c[i], p.d[i], x(i, 0));
    CHECK(obj.eval(x) == Approx((double)expected).epsilon(1e-12));
  }
}

TEST_CASE("apl1 constants and generator") {
  const auto p = rcd::random_quad_logistic_params(100, 4);
  const auto obj = rcd::make_quad_logistic(p);
  REQUIRE(obj.strong_convexity().has_value());
  for (int i = 0; i < 100; ++i) {
    CHECK(p.a[i] >= 0.0);
    CHECK(p.a[i] <= 15.0);
    for (double v : {p.b[i], p.c[i], p.d[i]}) CHECK(std::abs(v) <= 15.0);
    CHECK((*obj.strong_convexity())[i] == p.a[i]);
    CHECK(obj.lipschitz()[i] == Approx(p.a[i] + 0.25 * p.b[i] * p.b[i]).epsilon(1e-15));
  }
  const auto q = rcd::random_quad_logistic_params(100, 4);
  CHECK(p.a == q.a);
  CHECK(p.d == q.d);
  const auto strong = rcd::random_quad_logistic_params(100, 4, 1.0);
  CHECK(strong.a.minCoeff() >= 1.0);

  const auto flat = rcd::make_quad_logistic(one_node(2.0, 0.0, 1.0, 0.0));
  CHECK(flat.lipschitz()[0] == 2.0);
  CHECK((*flat.strong_convexity())[0] == 2.0);
}

TEST_CASE("apl1 gradient formula and saturation") {
  const double a = 1.5, b = 4.0, c = -2.0, d = 0.5;
  const auto obj = rcd::make_quad_logistic(one_node(a, b, c, d));
  for (double t : {-3.0, 0.0, 0.7, 2.0}) {
    const double e = std::exp(b * (t - d));
    CHECK(grad1(obj, 0, t) == Approx(a * (t - c) + b * e / (1 + e)).epsilon(1e-13));
  }
  const double t_hi = d + 50.0 / b;
  CHECK(std::abs(grad1(obj, 0, t_hi) - (a * (t_hi - c) + b)) <= 1e-10);
  const double t_far = d + 1e4;
  CHECK(std::isfinite(value1(obj, 0, t_far)));
  CHECK(std::abs(grad1(obj, 0, t_far) - (a * (t_far - c) + b)) <= 1e-8);
  CHECK(std::abs(grad1(obj, 0, d - 1e4) - a * (d - 1e4 - c)) <= 1e-8);
}

TEST_CASE("gradients match finite differences") {
  gen::Rng rng(21);
  const auto apl1 = rcd::make_quad_logistic(30, 5);
  const auto quad = gen::quadratic(rng, 30, 3);
  for (int probe = 0; probe < 100; ++probe) {
    const int i = gen::integer(rng, 0, 29);
    const double t = gen::uniform(rng, -15.0, 15.0);
    const double h = 1e-5 * (1.0 + std::abs(t));
    const double fd = (value1(apl1, i, t + h) - value1(apl1, i, t - h)) / (2 * h);
    const double g = grad1(apl1, i, t);
    CHECK(std::abs(g - fd) / (1.0 + std::abs(g)) <= 1e-6);

    Eigen::VectorXd x = gen::vec(rng, 3, -5.0, 5.0);
    const Eigen::VectorXd gq = quad.grad_node(i, {x.data(), 3});
    for (int c = 0; c < 3; ++c) {
      Eigen::VectorXd xp = x, xm = x;
      xp[c] += 1e-5;
      xm[c] -= 1e-5;
      const double fdq = (quad.node_value(i, {xp.data(), 3}) - quad.node_value(i, {xm.data(), 3})) / 2e-5;
      CHECK(std::abs(gq[c] - fdq) / (1.0 + std::abs(gq[c])) <= 1e-6);
    }
  }
}

TEST_CASE("Lipschitz and descent-lemma checks") {
  gen::Rng rng(22);
  const auto obj = rcd::make_quad_logistic(30, 6);
  for (int probe = 0; probe < 200; ++probe) {
    const int i = gen::integer(rng, 0, 29);
    const double x = gen::uniform(rng, -15.0, 15.0);
    const double y = gen::uniform(rng, -15.0, 15.0);
    const double L = obj.lipschitz()[i];
    CHECK(std::abs(grad1(obj, i, x) - grad1(obj, i, y)) <= L * std::abs(x - y) * (1 + 1e-10) + 1e-10);
    const double d = y - x;
    CHECK(value1(obj, i, y) <=
          value1(obj, i, x) + grad1(obj, i, x) * d + 0.5 * L * d * d + 1e-10 * (1 + std::abs(value1(obj, i, x))));
  }
}

TEST_CASE("value_change agrees with the direct difference") {
  gen::Rng rng(23);
  const auto obj = rcd::make_quad_logistic(30, 7);
  for (int probe = 0; probe < 500; ++probe) {
    const int i = gen::integer(rng, 0, 29);
    const double t = gen::uniform(rng, -5.0, 5.0);
    const double d = gen::uniform(rng, -2.0, 2.0);
    const double expected = value1(obj, i, t + d) - value1(obj, i, t);
    CHECK(change1(obj, i, t, d) == Approx(expected).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("value_change at saturated logistic arguments") {
  // f(t) = log(1 + exp(t)); differences far in either tail have simple limits.
  const auto obj = rcd::make_quad_logistic(one_node(0.0, 1.0, 0.0, 0.0));
  for (double t : {40.0, 400.0, 4000.0})
    for (double d : {-1e-3, 1e-3, -3.0, 3.0})
      CHECK(change1(obj, 0, t, d) == Approx(d).epsilon(1e-12));
  for (double t : {-40.0, -400.0})
    for (double d : {-1.0, 1.0}) {
      const double expected = std::exp(t) * std::expm1(d);
      CHECK(change1(obj, 0, t, d) == Approx(expected).epsilon(1e-10));
    }
  // Crossing the origin from far out: log(1 + e^{t+d}) - log(1 + e^t) with t + d = 0.
  CHECK(change1(obj, 0, 700.0, -700.0) == Approx(std::log(2.0) - 700.0).epsilon(1e-12));
  CHECK(change1(obj, 0, -700.0, 700.0) == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::isfinite(change1(obj, 0, 1e6, -2e6)));
}

TEST_CASE("normalize_constraint") {
  gen::Rng rng(24);
  const auto quad = rcd::make_quadratic(Eigen::VectorXd::Ones(4), rcd::BlockMatrix::Zero(4, 1));

  const auto id = rcd::normalize_constraint(Eigen::VectorXd::Ones(4), Eigen::VectorXd::Zero(1), quad);
  CHECK(id.objective.lipschitz().isApprox(quad.lipschitz()));
  const auto y = gen::feasible(rng, 4, 1);
  CHECK(id.to_original(y).isApprox(y));
  CHECK(id.objective.eval(y) == Approx(quad.eval(y)));

  const auto scaled = rcd::normalize_constraint(Eigen::VectorXd::Constant(4, 2.0),
                                                Eigen::VectorXd::Zero(1), quad);
  CHECK(scaled.objective.lipschitz().isApprox(Eigen::VectorXd::Constant(4, 0.25)));

  CHECK_THROWS_AS(rcd::normalize_constraint(Eigen::Vector4d(1, 0, 1, 1), Eigen::VectorXd::Zero(1), quad),
                  rcd::Error);

  // Solve in normalized coordinates, map back, check the original coupling.
  const auto obj = rcd::make_quad_logistic(6, 8, 1.0);
  const Eigen::VectorXd alpha = gen::vec(rng, 6, 0.5, 2.0);
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(1, 3.0);
  const auto norm = rcd::normalize_constraint(alpha, b, obj);
  const auto m = rcd::oracle::optimal_multiplier(norm.objective);
  rcd::BlockMatrix ystar = m.x;
  const auto xstar = norm.to_original(ystar);
  CHECK(std::abs(alpha.dot(xstar.col(0)) - 3.0) <= 1e-10);
  CHECK(norm.to_normalized(xstar).isApprox(ystar, 1e-12));
  // Stationarity in the original coordinates: f_i'(x_i) / alpha_i is constant.
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 6; ++i) {
    const double r = grad1(obj, i, xstar(i, 0)) / alpha[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi - lo <= 1e-8);
}

TEST_CASE("shape errors") {
  const auto obj = rcd::make_quad_logistic(4, 1);
  CHECK_THROWS_AS(obj.eval(rcd::BlockMatrix::Zero(3, 1)), rcd::Error);
  const double t = 0.0;
  CHECK_THROWS_AS(obj.grad_node(4, std::span<const double>(&t, 1)), rcd::Error);
  CHECK_THROWS_AS(rcd::make_quadratic(Eigen::Vector2d(1.0, -1.0), rcd::BlockMatrix::Zero(2, 1)), rcd::Error);
}

}
