#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "funkernel/grid.hpp"
#include "oracle.hpp"

using namespace funkernel;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("trapezoid weights on two points") {
  const Eigen::VectorXd w = trapezoid_weights(vec({0.0, 1.0}));
  CHECK(w(0) == doctest::Approx(0.5));
  CHECK(w(1) == doctest::Approx(0.5));
}

TEST_CASE("trapezoid weights on uniform three points") {
  const Eigen::VectorXd w = trapezoid_weights(vec({0.0, 0.5, 1.0}));
  CHECK(w(0) == doctest::Approx(0.25));
  CHECK(w(1) == doctest::Approx(0.5));
  CHECK(w(2) == doctest::Approx(0.25));
}

TEST_CASE("trapezoid weights on a non-uniform grid") {
  const Eigen::VectorXd w = trapezoid_weights(vec({0.0, 0.1, 1.0}));
  CHECK(w(0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(w(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w(2) == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(trapezoid_weights(vec({0.0})), InvalidGridError);
  CHECK_THROWS_AS(trapezoid_weights(vec({0.0, 0.0, 1.0})), InvalidGridError);
  CHECK_THROWS_AS(trapezoid_weights(vec({1.0, 0.0})), InvalidGridError);
  CHECK_THROWS_AS(Grid::uniform(0.0, 1.0, 1), InvalidGridError);
}

TEST_CASE("integrate constant and linear curves") {
  const GridPtr g = Grid::uniform(0.0, 1.0, 11);
  CHECK(integrate(Curve(g, Eigen::VectorXd::Ones(11))) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(Curve(g, g->points())) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("integrate s^2 against the analytic value") {
  const GridPtr g = Grid::uniform(0.0, 1.0, 101);
  const Curve c(g, g->points().array().square().matrix());
  CHECK(std::abs(integrate(c) - 1.0 / 3.0) < 2e-4);
}

TEST_CASE("l2 inner product basics") {
  const GridPtr g = Grid::uniform(0.0, 1.0, 11);
  const Curve ones(g, Eigen::VectorXd::Ones(11));
  const Curve zero(g, Eigen::VectorXd::Zero(11));
  CHECK(l2_inner(ones, ones) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l2_inner(zero, ones) == 0.0);
}

TEST_CASE("sin and cos are orthogonal on a period") {
  const GridPtr g = Grid::uniform(0.0, 2.0 * std::numbers::pi, 201);
  const Curve a(g, g->points().array().sin().matrix());
  const Curve b(g, g->points().array().cos().matrix());
  CHECK(std::abs(l2_inner(a, b)) < 1e-3);
}

TEST_CASE("l2 distance examples") {
  const GridPtr g = Grid::uniform(0.0, 1.0, 101);
  const Curve ones(g, Eigen::VectorXd::Ones(101));
  const Curve zero(g, Eigen::VectorXd::Zero(101));
  const Curve lin(g, g->points());
  CHECK(l2_distance_sq(ones, ones) == 0.0);
  CHECK(l2_distance_sq(ones, zero) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(l2_distance_sq(lin, zero) - 1.0 / 3.0) < 2e-4);
}

TEST_CASE("curves on different grids are never silently combined") {
  const GridPtr g1 = Grid::uniform(0.0, 1.0, 11);
  const GridPtr g2 = Grid::uniform(0.0, 1.0, 12);
  const Curve a(g1, Eigen::VectorXd::Zero(11));
  const Curve b(g2, Eigen::VectorXd::Zero(12));
  CHECK_THROWS_AS(l2_inner(a, b), IncompatibleError);
  CHECK_THROWS_AS(l2_distance_sq(a, b), IncompatibleError);
}

TEST_CASE("curve invariants") {
  const GridPtr g = Grid::uniform(0.0, 1.0, 3);
  CHECK_THROWS_AS(Curve(g, Eigen::VectorXd::Zero(2)), IncompatibleError);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(3);
  bad(1) = std::nan("");
  CHECK_THROWS_AS(Curve(g, bad), DataError);
}

TEST_CASE("property: weights sum to the span on random non-uniform grids") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.01, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 40);
    Eigen::VectorXd pts(n);
    double acc = unif(rng);
    for (int i = 0; i < n; ++i) {
      pts(i) = acc;
      acc += unif(rng);
    }
    const GridPtr g = Grid::make(pts);
    CHECK(g->weights().minCoeff() > 0);
    CHECK(std::abs(g->weights().sum() - g->span()) <= 1e-12 * std::abs(g->span()));
  }
}

TEST_CASE("property: integrate is linear") {
  std::mt19937_64 rng(11);
  const GridPtr g = Grid::uniform(0.0, 2.0, 31);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Curve a = funkernel::testing::random_curve(g, rng);
    const Curve b = funkernel::testing::random_curve(g, rng);
    const double ca = unif(rng);
    const double cb = unif(rng);
    const Curve mix(g, ca * a.values + cb * b.values);
    const double lhs = integrate(mix);
    const double rhs = ca * integrate(a) + cb * integrate(b);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("property: l2_inner is a PSD bilinear form") {
  std::mt19937_64 rng(13);
  const GridPtr g = Grid::uniform(0.0, 1.0, 25);
  const int r = 8;
  std::vector<Curve> cs;
  for (int i = 0; i < r; ++i) cs.push_back(funkernel::testing::random_curve(g, rng));
  Eigen::MatrixXd G(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) G(i, j) = l2_inner(cs[i], cs[j]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * G.trace());
}

TEST_CASE("property: distance expands into inner products") {
  std::mt19937_64 rng(17);
  const GridPtr g = Grid::uniform(-1.0, 1.0, 41);
  for (int trial = 0; trial < 30; ++trial) {
    const Curve a = funkernel::testing::random_curve(g, rng);
    const Curve b = funkernel::testing::random_curve(g, rng);
    const double lhs = l2_distance_sq(a, b);
    const double rhs = l2_inner(a, a) - 2.0 * l2_inner(a, b) + l2_inner(b, b);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}
