#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fhl/stablelaw.hpp"

using namespace fhl;

namespace {

double levy(double x) { return std::pow(x, -1.5) * std::exp(-1.0 / (4.0 * x)) / (2.0 * std::sqrt(std::numbers::pi)); }

// E_{1/2}(r, t): the inverse 1/2-stable subordinator is |N(0, 2t)|.
double half_gaussian(double r, double t) { return std::exp(-r * r / (4.0 * t)) / std::sqrt(std::numbers::pi * t); }

// Trapezoid in w = log x on a wide window; independent of the library quadrature.
double laplace_trapezoid(double s, double beta) {
  const FractionalOrder b(beta);
  const double lo = -30.0, hi = std::log(80.0 / s);
  const int n = 6000;
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = lo + k * h, x = std::exp(w);
    const double f = std::exp(-s * x) * stable_pdf(x, b) * x;
    sum += (k == 0 || k == n) ? 0.5 * f : f;
  }
  return sum * h;
}

}  // namespace

TEST(FractionalOrder, RejectsOutsideOpenUnitInterval) {
  EXPECT_THROW(FractionalOrder(0.0), DomainError);
  EXPECT_THROW(FractionalOrder(1.0), DomainError);
  EXPECT_THROW(FractionalOrder(-0.2), DomainError);
  EXPECT_THROW(FractionalOrder(std::nan("")), DomainError);
  EXPECT_DOUBLE_EQ(FractionalOrder(0.999).value(), 0.999);
}

TEST(StablePdf, HalfOrderMatchesLevyDensity) {
  for (double x : {0.05, 0.1, 0.3, 1.0, 2.5, 7.0, 20.0}) EXPECT_NEAR(stable_pdf(x, FractionalOrder(0.5)), levy(x), 1e-10) << x;
}

TEST(StablePdf, NonPositiveArgumentIsADomainError) {
  EXPECT_THROW(stable_pdf(0.0, FractionalOrder(0.6)), DomainError);
  EXPECT_THROW(stable_pdf(-1.0, FractionalOrder(0.6)), DomainError);
  EXPECT_THROW(inverse_stable_pdf(1.0, 0.0, FractionalOrder(0.6)), DomainError);
}

TEST(StablePdf, LaplaceTransformByIndependentTrapezoid) {
  for (double beta : {0.4, 0.7})
    for (double s : {0.5, 1.0, 2.0}) EXPECT_NEAR(laplace_trapezoid(s, beta), std::exp(-std::pow(s, beta)), 1e-7) << beta << " " << s;
}

TEST(StableCdf, HalfOrderMatchesErfc) {
  for (double y : {0.1, 0.5, 1.0, 4.0}) EXPECT_NEAR(stable_cdf(y, FractionalOrder(0.5)), std::erfc(1.0 / (2.0 * std::sqrt(y))), 1e-9) << y;
}

TEST(InverseStablePdf, HalfOrderIsHalfGaussian) {
  for (double t : {0.5, 1.0, 2.0})
    for (double r : {0.05, 0.5, 1.0, 2.0, 4.0}) EXPECT_NEAR(inverse_stable_pdf(r, t, FractionalOrder(0.5)), half_gaussian(r, t), 1e-10);
}

TEST(InverseStablePdf, TailOfHalfOrder) {
  for (double m : {0.5, 2.0, 5.0}) EXPECT_NEAR(inverse_stable_tail(m, 1.0, FractionalOrder(0.5)), std::erfc(m / 2.0), 1e-9) << m;
}

TEST(InverseStablePdf, SelfSimilarityProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ub(0.3, 0.9), ur(0.05, 5.0), ut(0.2, 3.0);
  for (int k = 0; k < 40; ++k) {
    const double b = ub(rng), r = ur(rng), t = ut(rng);
    const double s = std::pow(t, -b);
    EXPECT_NEAR(inverse_stable_pdf(r, t, FractionalOrder(b)), s * inverse_stable_pdf(r * s, 1.0, FractionalOrder(b)), 1e-9)
        << b << " " << r << " " << t;
  }
}

TEST(InverseStablePdf, NonnegativeProperty) {
  for (double b : {0.3, 0.55, 0.9})
    for (double r = 0.01; r < 10.0; r *= 1.7) EXPECT_GE(inverse_stable_pdf(r, 1.0, FractionalOrder(b)), 0.0);
}

TEST(Moments, KnownConstants) {
  EXPECT_NEAR(moment_constant(1.0, FractionalOrder(0.5)), 2.0 / std::sqrt(std::numbers::pi), 1e-14);
  EXPECT_NEAR(moment_constant(2.0, FractionalOrder(0.5)), 2.0, 1e-14);
  EXPECT_NEAR(moment(2.0, FractionalOrder(0.5), 1.0), 2.0, 1e-14);
  EXPECT_NEAR(moment(1.0, FractionalOrder(0.25), 16.0), 2.0 / std::tgamma(1.25), 1e-13);
}

TEST(Moments, AgreeWithDensityIntegral) {
  const FractionalOrder b(0.6);
  const auto g = make_density_grid(b, {1.0}, 12.0, 6000);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < g.r_nodes.size(); ++i) {
    m1 += g.r_nodes[i] * g.at(i, 0) * g.delta_r;
    m2 += g.r_nodes[i] * g.r_nodes[i] * g.at(i, 0) * g.delta_r;
  }
  EXPECT_NEAR(m1, moment(1.0, b, 1.0), 1e-5);
  EXPECT_NEAR(m2, moment(2.0, b, 1.0), 1e-4);
}

TEST(Sampler, IncrementLaplaceTransform) {
  const FractionalOrder b(0.7);
  const double tau = 0.3, s = 1.5;
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = std::exp(-s * sample_stable_increment(b, tau, rng));
    sum += v, sq += v * v;
  }
  const double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, std::exp(-tau * std::pow(s, 0.7)), 4.0 * se);
}

TEST(Sampler, IncrementsArePositive) {
  Rng rng(3);
  for (int k = 0; k < 10000; ++k) EXPECT_GT(sample_stable_increment(FractionalOrder(0.4), 1e-3, rng), 0.0);
}

TEST(Sampler, FirstPassageMeanMatchesMoment) {
  const FractionalOrder b(0.6);
  const double t = 1.0, tau = 1e-3 * moment(1.0, b, t);
  Rng rng(5);
  const int n = 20000;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double e = sample_first_passages({t}, b, tau, rng)[0];
    sum += e, sq += e * e;
  }
  const double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, moment(1.0, b, t), 4.0 * se);
}

TEST(Sampler, PassagesAreMonotoneAndMatchStoredPath) {
  const FractionalOrder b(0.5);
  Rng a(42), c(42);
  const auto many = sample_first_passages({0.25, 0.5, 1.0}, b, 1e-3, a);
  EXPECT_LE(many[0], many[1]);
  EXPECT_LE(many[1], many[2]);
  const auto path = sample_inverse_subordinator(1.0, b, 1e-3, c);
  EXPECT_DOUBLE_EQ(path.value, many[2]);
  EXPECT_DOUBLE_EQ(path.path.first_passage(0.25), many[0]);
  EXPECT_DOUBLE_EQ(path.path.first_passage(0.5), many[1]);
}

TEST(Sampler, StepBudgetRaisesTruncation) {
  Rng rng(1);
  EXPECT_THROW(sample_first_passages({100.0}, FractionalOrder(0.9), 1e-6, rng, 1000), TruncationError);
}

TEST(DensityGrid, UnitMassAndTailBookkeeping) {
  const auto g = make_density_grid(FractionalOrder(0.5), {0.5, 1.0}, 12.0, 4000);
  EXPECT_NEAR(g.midpoint_mass(0), 1.0, 1e-6);
  EXPECT_NEAR(g.midpoint_mass(1), 1.0, 1e-6);
  EXPECT_NEAR(g.tail_mass[1], std::erfc(6.0), 1e-12);
}

TEST(DensityGrid, ShortTruncationIsAnAccuracyError) {
  EXPECT_THROW(make_density_grid(FractionalOrder(0.5), {1.0}, 1.0, 500), AccuracyError);
}

TEST(DensityGrid, RejectsBadArguments) {
  EXPECT_THROW(make_density_grid(FractionalOrder(0.5), {}, 5.0, 100), DomainError);
  EXPECT_THROW(make_density_grid(FractionalOrder(0.5), {1.0, 0.5}, 5.0, 100), DomainError);
  EXPECT_THROW(make_density_grid(FractionalOrder(0.5), {1.0}, -1.0, 100), DomainError);
}
