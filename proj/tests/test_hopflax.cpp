#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fhl/hopflax.hpp"

using namespace fhl;

namespace {

// Dense 1D scan of min_y { t L((x - y)/t) + g(y) } with step h.
template <class G, class L>
double brute_1d(G&& g, L&& lag, double x, double t, double lo, double hi, double h = 1e-4) {
  double best = kInfinity;
  for (double y = lo; y <= hi; y += h) best = std::min(best, t * lag((x - y) / t) + g(y));
  return best;
}

}  // namespace

TEST(Legendre, QuadraticPairsWithQuarterInverse) {
  const auto h = HamiltonianSpec::scaled_quadratic(0.5);
  for (double q : {-2.0, -0.3, 0.0, 1.7}) EXPECT_NEAR(legendre_transform(h, Point::of(q)), q * q / 2.0, 1e-12);
  const auto l = lagrangian_of(h);
  EXPECT_NEAR(l(Point::of(3.0)), 4.5, 1e-12);
}

TEST(Legendre, NormGivesUnitBallIndicator) {
  const auto h = HamiltonianSpec::norm(2);
  EXPECT_EQ(legendre_transform(h, Point::of(0.3, 0.4)), 0.0);
  EXPECT_TRUE(std::isinf(legendre_transform(h, Point::of(0.9, 0.9))));
  EXPECT_EQ(lagrangian_of(h).speed_limit(), 1.0);
}

TEST(Legendre, SampledTableAgreesWithBruteForceSupremum) {
  ConvexTable t;
  for (int i = 0; i <= 200; ++i) {
    const double p = -4.0 + 0.04 * i;
    t.x.push_back(p);
    t.y.push_back(std::cosh(p));
  }
  const auto h = HamiltonianSpec::sampled(t);
  for (double q : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    double sup = -kInfinity;
    for (double p = -4.0; p <= 4.0; p += 1e-5) sup = std::max(sup, p * q - t(p));
    EXPECT_NEAR(legendre_transform(h, Point::of(q)), sup, 1e-6) << q;
  }
}

TEST(Legendre, FenchelYoungInequalityProperty) {
  const auto h = HamiltonianSpec::scaled_quadratic(0.8, 2);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const Point p = Point::of(n(rng), n(rng)), q = Point::of(n(rng), n(rng));
    EXPECT_GE(h(p) + legendre_transform(h, q) + 1e-12, p[0] * q[0] + p[1] * q[1]);
  }
}

TEST(ConvexTable, RejectsNonConvexSamples) {
  ConvexTable t{{0.0, 1.0, 2.0}, {0.0, 1.0, 1.5}};
  EXPECT_THROW(t.validate_convex(), ValidationError);
  EXPECT_THROW(LagrangianSpec::scaled_quadratic(0.0), ValidationError);
}

TEST(ClassicalReference, Test1ClosedForm) {
  EXPECT_DOUBLE_EQ(classical_reference(ClassicalTest::Test1, Point::of(0.0), 1.0), -1.0);
  EXPECT_DOUBLE_EQ(classical_reference(ClassicalTest::Test1, Point::of(-2.0), 0.5), -6.25);
}

TEST(ClassicalReference, Test2MatchesBruteForceHopfLax) {
  auto g = [](double y) { return std::max(0.0, y * y - 1.0); };
  auto lag = [](double q) { return 0.5 * q * q; };
  for (double t : {0.05, 0.5, 1.0, 2.0})
    for (double x : {0.0, 0.8, 1.05, 1.5, 2.0, 3.0, 4.5}) {
      const double ref = brute_1d(g, lag, x, t, -6.0, 6.0);
      EXPECT_NEAR(classical_reference(ClassicalTest::Test2, Point::of(x), t), ref, 1e-7) << x << " " << t;
    }
}

TEST(ClassicalReference, QuotedTest2FormulaDiffersInsideTheTransitionBand) {
  const Point x = Point::of(1.5);
  EXPECT_DOUBLE_EQ(test2_quoted_formula(x, 1.0), 0.0);
  EXPECT_NEAR(classical_reference(ClassicalTest::Test2, x, 1.0), 0.125, 1e-15);
  EXPECT_NEAR(test2_quoted_formula(Point::of(5.0), 1.0), classical_reference(ClassicalTest::Test2, Point::of(5.0), 1.0), 1e-15);
}

TEST(HopfLax, QuadraticLagrangianOnTest2Lattice) {
  const auto box = SpaceTimeGrid::line(-4.0, 4.0, 0.01);
  const auto g = InitialDatum::parabola_hinge(box);
  const auto lag = LagrangianSpec::scaled_quadratic(0.5);
  for (double t : {0.005, 0.5, 2.0})
    for (double x = -4.0; x <= 4.0; x += 0.37) {
      const auto r = hopf_lax(g, lag, Point::of(x), t, box);
      EXPECT_NEAR(r.value, classical_reference(ClassicalTest::Test2, Point::of(x), t), 1e-9) << x << " " << t;
      EXPECT_FALSE(r.boundary_contaminated);
    }
}

TEST(HopfLax, EikonalTest1) {
  const auto box = SpaceTimeGrid::line(-10.0, 10.0, 0.01);
  const auto g = InitialDatum::neg_square(box);
  for (double x : {-3.0, 0.0, 0.42, 2.5})
    for (double t : {0.1, 1.0, 2.0}) {
      const auto r = eikonal_hopf_lax(g, Point::of(x), t, box);
      EXPECT_NEAR(r.value, classical_reference(ClassicalTest::Test1, Point::of(x), t), 1e-9);
    }
}

TEST(HopfLax, EikonalCircleIn2D) {
  const auto box = SpaceTimeGrid::square(-5.0, 5.0, 0.05);
  const auto g = InitialDatum::signed_circle(box);
  for (const Point& x : {Point::of(0.3, -0.2), Point::of(2.0, 1.0), Point::of(-1.1, 0.0)})
    for (double t : {0.5, 1.5}) {
      const double d = std::max(x.norm() - t, 0.0);
      EXPECT_NEAR(eikonal_hopf_lax(g, x, t, box).value, d * d - 1.0, 1e-7) << x[0] << "," << x[1] << " " << t;
    }
}

TEST(HopfLax, TwoCircleBallMinimumMatchesScan) {
  const auto box = SpaceTimeGrid::square(-6.0, 6.0, 0.05);
  const auto g = InitialDatum::two_circles({Point::of(-1.5, 0.0), Point::of(1.5, 0.0)}, {1.0, 1.0}, box);
  for (const Point& x : {Point::of(0.0, 0.0), Point::of(0.0, 2.0), Point::of(3.0, -1.0)})
    for (double t : {0.2, 1.0}) {
      const double scan = hopf_lax(g, LagrangianSpec::indicator_ball(1.0), x, t, box).value;
      EXPECT_NEAR(*g.ball_min(x, t), scan, 1e-7);
    }
}

TEST(HopfLax, BoundaryContaminationIsFlagged) {
  const auto box = SpaceTimeGrid::line(-2.0, 2.0, 0.01);
  const auto g = InitialDatum::neg_square(box);
  EXPECT_TRUE(eikonal_hopf_lax(g, Point::of(1.5), 1.0, box).boundary_contaminated);
  EXPECT_FALSE(eikonal_hopf_lax(g, Point::of(0.0), 1.0, box).boundary_contaminated);
}

TEST(HopfLax, StayingPutBoundProperty) {
  // u(x, t) <= g(x) + t L(0) for every x and t.
  const auto box = SpaceTimeGrid::line(-4.0, 4.0, 0.01);
  const auto g = InitialDatum::parabola_hinge(box);
  const auto lag = LagrangianSpec::scaled_quadratic(0.5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(-3.5, 3.5), ut(0.01, 2.0);
  for (int k = 0; k < 50; ++k) {
    const double x = ux(rng), t = ut(rng);
    EXPECT_LE(hopf_lax(g, lag, Point::of(x), t, box).value, g(Point::of(x)) + 1e-12);
  }
}

TEST(HopfLax, SemigroupProperty) {
  // u(., t + s) = HopfLax[u(., t)](s): checked with the closed form as datum.
  const auto box = SpaceTimeGrid::line(-6.0, 6.0, 0.01);
  std::vector<double> u1;
  for (std::size_t i = 0; i < box.size(); ++i) u1.push_back(classical_reference(ClassicalTest::Test2, box.point(i), 0.5));
  const auto g = InitialDatum::sampled(u1, 12.0, box);
  const auto lag = LagrangianSpec::scaled_quadratic(0.5);
  for (double x : {0.0, 1.3, 2.2, 3.4}) {
    EXPECT_NEAR(hopf_lax(g, lag, Point::of(x), 0.5, box).value, classical_reference(ClassicalTest::Test2, Point::of(x), 1.0),
                5e-4)
        << x;
  }
}

TEST(HopfLax, RejectsNonPositiveTimeAndOutsidePoints) {
  const auto box = SpaceTimeGrid::line(-1.0, 1.0, 0.1);
  const auto g = InitialDatum::constant(1.0, box);
  EXPECT_THROW(hopf_lax(g, LagrangianSpec::scaled_quadratic(1.0), Point::of(0.0), 0.0, box), DomainError);
  EXPECT_THROW(hopf_lax(g, LagrangianSpec::scaled_quadratic(1.0), Point::of(2.0), 1.0, box), DomainError);
  EXPECT_THROW(SpaceTimeGrid::line(0.0, 1.0, 0.3).validate(), ValidationError);
}

TEST(HopfLax, ConstantDatumStaysConstant) {
  const auto box = SpaceTimeGrid::square(-1.0, 1.0, 0.1);
  const auto g = InitialDatum::constant(-0.7, box);
  EXPECT_DOUBLE_EQ(hopf_lax(g, LagrangianSpec::scaled_quadratic(1.0), Point::of(0.2, 0.3), 1.0, box).value, -0.7);
}
