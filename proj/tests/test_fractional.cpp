#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fhl/fractional.hpp"

using namespace fhl;

namespace {

// int_0^inf u(r) E_{1/2}(r, t) dr with the half-Gaussian density, Simpson on [0, 40 sqrt(t)].
template <class U>
double half_gaussian_average(U&& u, double t) {
  const int n = 20000;
  const double hi = 40.0 * std::sqrt(t), h = hi / n;
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double r = k * h;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * u(r) * std::exp(-r * r / (4.0 * t)) / std::sqrt(std::numbers::pi * t);
  }
  return sum * h / 3.0;
}

}  // namespace

TEST(Presets, NamesRoundTrip) {
  for (auto p : {Preset::Test1, Preset::Test2, Preset::Test3Circle, Preset::Test3TwoCircles, Preset::Custom})
    EXPECT_EQ(parse_preset(to_string(p)), p);
  EXPECT_THROW(parse_preset("test9"), ValidationError);
  for (auto m : {Method::Classical, Method::Quadrature, Method::MonteCarlo}) EXPECT_EQ(parse_method(to_string(m)), m);
}

TEST(Presets, DimensionMismatchIsRejected) {
  EXPECT_THROW(make_problem(Preset::Test1, SpaceTimeGrid::square(-1, 1, 0.1)), ValidationError);
  EXPECT_THROW(make_problem(Preset::Test3Circle, SpaceTimeGrid::line(-1, 1, 0.1)), ValidationError);
}

TEST(Configs, Validation) {
  MonteCarloConfig mc;
  mc.n_paths = 10;
  EXPECT_THROW(mc.validate(), ValidationError);
  QuadratureConfig q;
  q.n_intervals = 2;
  EXPECT_THROW(q.validate(), ValidationError);
}

TEST(Quadrature, Test1AtOriginIsMinusSecondMoment) {
  const auto p = make_problem(Preset::Test1);
  for (double b : {0.4, 0.5, 0.8})
    for (double t : {0.1, 1.0, 2.0}) {
      const FractionalOrder beta(b);
      const auto d = density_for(beta, {t}, {}, {});
      EXPECT_NEAR(problem_quadrature(p, Point::of(0.0), d, 0), -moment(2.0, beta, t), 1e-6 * moment(2.0, beta, t)) << b << " " << t;
    }
}

TEST(Quadrature, Test1OffOriginExpandsTheSquare) {
  const auto p = make_problem(Preset::Test1);
  const FractionalOrder beta(0.6);
  const auto d = density_for(beta, {1.5}, {}, {});
  const double x = 1.3;
  const double expected = -(x * x + 2.0 * x * moment(1.0, beta, 1.5) + moment(2.0, beta, 1.5));
  EXPECT_NEAR(problem_quadrature(p, Point::of(x), d, 0), expected, 1e-5);
}

TEST(Quadrature, Test2HalfOrderAgainstHalfGaussianSimpson) {
  const auto p = make_problem(Preset::Test2);
  const FractionalOrder beta(0.5);
  for (double t : {0.05, 0.5, 1.0})
    for (double x : {0.5, 1.2, 2.0, 3.5}) {
      const auto d = density_for(beta, {t}, {}, {});
      const double oracle =
          half_gaussian_average([&](double r) { return classical_reference(ClassicalTest::Test2, Point::of(x), r); }, t);
      EXPECT_NEAR(problem_quadrature(p, Point::of(x), d, 0), oracle, 2e-5) << x << " " << t;
    }
}

TEST(Quadrature, GenericEvaluatorReturnsFirstMoment) {
  const FractionalOrder beta(0.7);
  const auto r = frac_hopf_lax_quadrature([](const Point&, double s) { return s; }, Point::of(0.0), 2.0, beta, {}, {});
  EXPECT_NEAR(r.value, moment(1.0, beta, 2.0), 1e-6);
  EXPECT_LT(r.tail_mass, 1e-6);
  EXPECT_NEAR(r.captured_mass, 1.0, 1e-6);
}

TEST(Quadrature, NearClassicalOrderApproachesClassicalValues) {
  const auto p = make_problem(Preset::Test1);
  const FractionalOrder beta(0.99);
  for (double x : {0.0, 1.0}) {
    const auto d = density_for(beta, {1.0}, {}, {});
    const double c = classical_reference(ClassicalTest::Test1, Point::of(x), 1.0);
    EXPECT_NEAR(problem_quadrature(p, Point::of(x), d, 0), c, 0.02 * std::abs(c)) << x;
  }
}

TEST(Quadrature, MonotonicityTransferOnTest1Origin) {
  const auto p = make_problem(Preset::Test1);
  const FractionalOrder beta(0.4);
  double prev = 0.0;
  for (double t = 0.1; t <= 2.0; t += 0.1) {
    const double v = problem_quadrature(p, Point::of(0.0), density_for(beta, {t}, {}, {}), 0);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(RunningStats, MergeEqualsSequential) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(1.0, 2.0);
  RunningStats all, a, b;
  for (int k = 0; k < 1000; ++k) {
    const double v = n(rng);
    all.push(v);
    (k < 370 ? a : b).push(v);
  }
  a.merge(b);
  EXPECT_EQ(a.n, all.n);
  EXPECT_NEAR(a.mean, all.mean, 1e-12);
  EXPECT_NEAR(a.m2, all.m2, 1e-9);
}

TEST(RunningStats, InfiniteSamplesPropagate) {
  RunningStats s;
  s.push(1.0);
  s.push(kInfinity);
  EXPECT_TRUE(std::isinf(s.estimate()));
}

TEST(MonteCarlo, AgreesWithQuadratureOnTest2) {
  const auto p = make_problem(Preset::Test2);
  const FractionalOrder beta(0.6);
  MonteCarloConfig mc;
  mc.n_paths = 4000;
  const auto est = frac_hopf_lax_mc(p.datum, p.lagrangian, Point::of(2.0), 1.0, beta, mc, p.box);
  const double q = problem_quadrature(p, Point::of(2.0), density_for(beta, {1.0}, {}, {}), 0);
  EXPECT_NEAR(est.mean, q, 4.0 * est.std_error);
  EXPECT_EQ(est.contaminated, 0u);
  EXPECT_EQ(est.samples, 4000u);
}

TEST(MonteCarlo, DeterministicAndIndependentOfWorkers) {
  const auto p = make_problem(Preset::Test1);
  MonteCarloConfig mc;
  mc.n_paths = 1000;
  const auto a = frac_hopf_lax_mc(p.datum, p.lagrangian, Point::of(0.5), 1.0, FractionalOrder(0.5), mc, p.box);
  mc.workers = 3;
  const auto b = frac_hopf_lax_mc(p.datum, p.lagrangian, Point::of(0.5), 1.0, FractionalOrder(0.5), mc, p.box);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  mc.seed += 1;
  const auto c = frac_hopf_lax_mc(p.datum, p.lagrangian, Point::of(0.5), 1.0, FractionalOrder(0.5), mc, p.box);
  EXPECT_NE(a.mean, c.mean);
}

TEST(MonteCarlo, ValueFunctionBoundsEveryCost) {
  const auto p = make_problem(Preset::Test2);
  const FractionalOrder beta(0.5);
  MonteCarloConfig mc;
  mc.n_paths = 2000;
  const Point x = Point::of(1.7);
  const auto v = frac_hopf_lax_mc(p.datum, p.lagrangian, x, 1.0, beta, mc, p.box);
  for (double y : {-1.0, 0.0, 0.5, 1.0, 1.7, 2.5}) {
    const auto c = cost_functional_mc(Point::of(y), p.datum, p.lagrangian, x, 1.0, beta, mc);
    EXPECT_LE(v.mean, c.mean + 3.0 * std::hypot(v.std_error, c.std_error)) << y;
  }
}

TEST(MonteCarlo, InfeasibleCostIsInfinite) {
  const auto p = make_problem(Preset::Test1);
  MonteCarloConfig mc;
  mc.n_paths = 200;
  const auto c = cost_functional_mc(Point::of(5.0), p.datum, p.lagrangian, Point::of(0.0), 0.1, FractionalOrder(0.5), mc);
  EXPECT_TRUE(std::isinf(c.mean));
}

TEST(Dpp, TrivialProbeIsExact) {
  const auto p = make_problem(Preset::Test2);
  MonteCarloConfig mc;
  mc.n_paths = 500;
  const auto d = dpp_check(p, Point::of(0.0), 1.0, 0.25, FractionalOrder(0.5), mc, {});
  EXPECT_EQ(d.lhs, 0.0);
  EXPECT_EQ(d.rhs, 0.0);
}

TEST(Dpp, RejectsBadTimes) {
  const auto p = make_problem(Preset::Test2);
  EXPECT_THROW(dpp_check(p, Point::of(0.0), 1.0, 1.5, FractionalOrder(0.5), {}, {}), DomainError);
}

TEST(Solve, ClassicalFieldMatchesClosedForm) {
  const auto p = make_problem(Preset::Test2);
  SpaceTimeGrid g = p.box;
  g.times = {0.25, 1.0};
  SolveOptions opt;
  opt.method = Method::Classical;
  const auto f = solve_field(p, g, opt);
  ASSERT_EQ(f.values.size(), g.size() * 2);
  for (std::size_t i = 0; i < f.points.size(); i += 17)
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_NEAR(f.at(i, j), classical_reference(ClassicalTest::Test2, f.points[i], f.times[j]), 1e-9);
  EXPECT_EQ(f.failed_points, 0u);
}

TEST(Solve, QuadraturePointsRecordTruncation) {
  const auto p = make_problem(Preset::Test1);
  SolveOptions opt;
  opt.method = Method::Quadrature;
  opt.beta = FractionalOrder(0.5);
  const auto f = solve_points(p, {Point::of(0.0), Point::of(1.0)}, {0.5, 1.0}, opt);
  EXPECT_EQ(f.truncation_M.size(), 2u);
  EXPECT_NEAR(f.at(0, 1), -2.0, 1e-6);
  for (double tail : f.tail_mass) EXPECT_LT(tail, 1e-6);
}

TEST(Solve, ConfigurationErrors) {
  const auto p = make_problem(Preset::Test1);
  SolveOptions opt;
  opt.method = Method::Quadrature;
  EXPECT_THROW(solve_points(p, {Point::of(0.0)}, {1.0}, opt), ValidationError);
  opt.beta = FractionalOrder(0.5);
  EXPECT_THROW(solve_points(p, {Point::of(50.0)}, {1.0}, opt), ValidationError);
  EXPECT_THROW(solve_points(p, {Point::of(0.0)}, {}, opt), ValidationError);
}

TEST(Solve, MonteCarloFieldCarriesStandardErrors) {
  const auto p = make_problem(Preset::Test1);
  SolveOptions opt;
  opt.method = Method::MonteCarlo;
  opt.beta = FractionalOrder(0.5);
  opt.monte_carlo.n_paths = 500;
  const auto f = solve_points(p, {Point::of(0.0)}, {1.0}, opt);
  ASSERT_EQ(f.std_errors.size(), 1u);
  EXPECT_GT(f.std_errors[0], 0.0);
  EXPECT_NEAR(f.at(0, 0), -2.0, 5.0 * f.std_errors[0]);
}
