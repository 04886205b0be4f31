#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hypmass/fit.hpp"

using namespace hypmass;

TEST(Fit, LineAndLogSlope) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  std::vector<double> e;
  for (double v : x) e.push_back(-4.0 * std::exp(-1.5 * v));
  EXPECT_NEAR(fit_log_slope(x, e), -1.5, 1e-13);
  e[2] = 0.0;
  EXPECT_THROW(fit_log_slope(x, e), DegenerateFitError);
}

TEST(Fit, ExtrapolatesSingleExponential) {
  const std::vector<double> R{4, 5, 6, 7, 8};
  std::vector<double> m;
  for (double r : R) m.push_back(5.0 + std::exp(-2.0 * r));
  const auto x = extrapolate(R, m);
  EXPECT_NEAR(x.limit, 5.0, 1e-8);
  ASSERT_TRUE(x.exponent.has_value());
  EXPECT_NEAR(*x.exponent, 2.0, 1e-8);
  EXPECT_NEAR(x.coefficient, 1.0, 1e-6);
  EXPECT_LT(x.rms_residual, 1e-12);
  EXPECT_NEAR(x.uncertainty, std::exp(-16.0), 1e-12);
}

TEST(Fit, ExtrapolatesFromBelow) {
  const std::vector<double> R{3, 4, 5, 6, 7};
  std::vector<double> m;
  for (double r : R) m.push_back(0.25 - 3.0 * std::exp(-0.8 * r));
  const auto x = extrapolate(R, m);
  EXPECT_NEAR(x.limit, 0.25, 1e-9);
  EXPECT_NEAR(*x.exponent, 0.8, 1e-8);
}

TEST(Fit, ConstantSequenceHasNoRate) {
  const std::vector<double> R{4, 5, 6};
  const std::vector<double> m{1.25, 1.25, 1.25};
  const auto x = extrapolate(R, m);
  EXPECT_EQ(x.limit, 1.25);
  EXPECT_FALSE(x.exponent.has_value());
  EXPECT_EQ(x.uncertainty, 0.0);
}

TEST(Fit, RejectsNonDecayingAndMalformedInput) {
  const std::vector<double> R{4, 5, 6, 7};
  std::vector<double> grow;
  for (double r : R) grow.push_back(std::exp(r));
  EXPECT_THROW(extrapolate(R, grow), DegenerateFitError);
  const std::vector<double> alt{1.0, 2.0, 1.5, 1.7};
  EXPECT_THROW(extrapolate(R, alt), DegenerateFitError);
  const std::vector<double> two{4, 5};
  EXPECT_THROW(extrapolate(two, std::vector<double>{1, 2}), DegenerateFitError);
  const std::vector<double> unsorted{4, 6, 5, 7};
  EXPECT_THROW(extrapolate(unsorted, std::vector<double>{1, 0.5, 0.3, 0.2}), DegenerateFitError);
  EXPECT_THROW(extrapolate(R, std::vector<double>{1, 0.5, std::nan(""), 0.2}), DegenerateFitError);
}
