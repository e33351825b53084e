#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <random>

#include "dmfw/constraint.hpp"
#include "dmfw/rng.hpp"

using namespace dmfw;

namespace {

// Brute-force l1 oracle: enumerate the 2p vertices +-r e_i in index order and
// keep the first strict minimizer (matching the documented tie-break).
VectorXd l1_brute_force(const NormBall<double>& ball, const VectorXd& p) {
  VectorXd best = VectorXd::Zero(ball.dim);
  double best_val = 0;  // value of the center
  bool have = false;
  for (Index i = 0; i < ball.dim; ++i) {
    for (const double sgn : {+1.0, -1.0}) {
      VectorXd v = VectorXd::Zero(ball.dim);
      v[i] = sgn * ball.radius;
      const double val = p.dot(v);
      if (!have || val < best_val) {
        best = v;
        best_val = val;
        have = true;
      }
    }
  }
  return best_val < 0 ? best : VectorXd::Zero(ball.dim);
}

}  // namespace

TEST_CASE("closed-form examples") {
  const auto l2 = norm_ball(2.0, 5.0, 2);
  VectorXd p(2);
  p << 3, 4;
  const VectorXd theta = lmo(l2, p);
  CHECK(theta[0] == doctest::Approx(-3.0));
  CHECK(theta[1] == doctest::Approx(-4.0));

  const auto l1 = norm_ball(1.0, 5.0, 3);
  VectorXd p3(3);
  p3 << 1, -2, 0;
  const VectorXd v = lmo(l1, p3);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 5.0);
  CHECK(v[2] == 0.0);

  // p = 0 returns the center for every family
  for (double q : {1.0, 1.25, 2.0, 3.0}) {
    const auto ball = norm_ball(q, 5.0, 4);
    CHECK(lmo(ball, VectorXd::Zero(4)).norm() == 0.0);
  }

  VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(lmo(l2, bad), std::invalid_argument);
  CHECK_THROWS_AS(lmo(l2, VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("membership") {
  const auto l2 = norm_ball(2.0, 5.0, 2);
  VectorXd x(2);
  x << 3, 4;
  CHECK(membership(l2, x));  // boundary point, norm exactly 5
  const auto l1 = norm_ball(1.0, 5.0, 2);
  VectorXd y(2);
  y << 3, 3;
  CHECK_FALSE(membership(l1, y));  // ||y||_1 = 6
  const auto l54 = norm_ball(1.25, 5.0, 3);
  CHECK(membership(l54, VectorXd::Zero(3)));
  VectorXd nan2(2);
  nan2 << 0.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(membership(l2, nan2), std::invalid_argument);
  CHECK(l2.diameter() == 10.0);
}

TEST_CASE("l1 oracle equals brute-force vertex enumeration") {
  auto rng = make_engine(31, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> dim_pick(1, 20);
  for (int t = 0; t < 1000; ++t) {
    const int d = dim_pick(rng);
    const auto ball = norm_ball(1.0, 5.0, d);
    VectorXd p(d);
    for (int i = 0; i < d; ++i) p[i] = gauss(rng);
    const VectorXd a = lmo(ball, p);
    const VectorXd b = l1_brute_force(ball, p);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);  // exact
  }
}

TEST_CASE("duality value, feasibility, optimality over random inputs") {
  auto rng = make_engine(32, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double q : {1.0, 1.25, 2.0, 4.0}) {
    const auto ball = norm_ball(q, 5.0, 12);
    for (int t = 0; t < 1000; ++t) {
      VectorXd p(12);
      for (int i = 0; i < 12; ++i) p[i] = gauss(rng);
      const VectorXd theta = lmo(ball, p);
      const double attained = p.dot(theta);
      const double dual = -ball.radius * dual_norm(ball, p);
      CHECK(attained == doctest::Approx(dual).epsilon(1e-9));
      CHECK(membership(ball, theta));
      CHECK(lq_norm(ball, theta) == doctest::Approx(ball.radius).epsilon(1e-9));
      // optimality against a random feasible point
      const VectorXd phi = random_feasible_point(ball, rng);
      CHECK(attained <= p.dot(phi) + 1e-9);
    }
  }
}

TEST_CASE("convex combination closure keeps iterates feasible") {
  auto rng = make_engine(33, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double q : {1.0, 1.25, 2.0}) {
    const auto ball = norm_ball(q, 5.0, 6);
    for (int t = 0; t < 500; ++t) {
      const VectorXd a = random_feasible_point(ball, rng);
      const VectorXd b = random_feasible_point(ball, rng);
      const double eta = unif(rng);
      CHECK(membership(ball, a + eta * (b - a)));
      CHECK((a - b).norm() <= ball.diameter() + 1e-12);
    }
  }
  // diameter attained by antipodal l2 boundary points
  const auto l2 = norm_ball(2.0, 5.0, 3);
  VectorXd u(3);
  u << 5, 0, 0;
  CHECK((u - (-u)).norm() == doctest::Approx(l2.diameter()));
}

TEST_CASE("conjugate exponent is exact for l5/4") {
  CHECK(conjugate_exponent(1.25) == doctest::Approx(5.0));
  CHECK(conjugate_exponent(2.0) == doctest::Approx(2.0));
  CHECK(conjugate_exponent(1.0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("scalar-generic instantiation") {
  const auto ballf = norm_ball<float>(2.0f, 1.0f, 3);
  Vector<float> p(3);
  p << 1.f, 2.f, 2.f;
  const Vector<float> theta = lmo(ballf, p);
  CHECK(theta[0] == doctest::Approx(-1.f / 3.f));
}
