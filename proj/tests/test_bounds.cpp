#include "gtlab/bounds.hpp"

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>

#include "gtlab/errors.hpp"
#include "oracles.hpp"

namespace gtlab::bounds {
namespace {

// Reference values below were evaluated at 30 significant digits with mpmath.
constexpr double kEntropyAtInvE = 0.949029944640169494948847860443;
constexpr double kInvELn2 = 0.530737845423042988533377357234;
constexpr double kDdFirstMinimandAtOne = 0.774174103834883826483261830429;
constexpr double kThetaStar = 0.406723109344551026366969861547;
constexpr double kDdPlateau = 0.853175083887282212999690000487;
constexpr double kDdPlateauNu = 0.593934136795629247735850389084;
constexpr double kLipoCoefficient = 0.0732178282435366468194603718245;
constexpr double kLog2Binom500_10 = 67.7361089618831304526585317461;

double log2_binomial_exact(unsigned n, unsigned k) {
  using boost::multiprecision::cpp_int;
  cpp_int num = 1;
  cpp_int den = 1;
  for (unsigned j = 1; j <= k; ++j) {
    num *= n - k + j;
    den *= j;
  }
  const cpp_int c = num / den;
  // log2 via the top 53 bits plus the shift.
  const std::size_t bits = boost::multiprecision::msb(c) + 1;
  const std::size_t shift = bits > 60 ? bits - 60 : 0;
  const cpp_int top = c >> shift;
  return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
}

TEST(BinaryEntropy, Values) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(std::exp(-1.0)), kEntropyAtInvE, 1e-14);
  EXPECT_NEAR(binary_entropy(std::exp(-1.0)), 0.9490, 1e-4);
  EXPECT_THROW(binary_entropy(-0.01), ParameterError);
  EXPECT_THROW(binary_entropy(1.01), ParameterError);
}

TEST(TestProfile, Exact) {
  const TestProfile tp = test_profile(0.1, 2);
  EXPECT_NEAR(tp.q0, 0.81, 1e-15);
  EXPECT_NEAR(tp.q1, 0.18, 1e-15);
  EXPECT_NEAR(tp.q1plus, 0.19, 1e-15);
  const TestProfile zero = test_profile(0.0, 7);
  EXPECT_EQ(zero.q0, 1.0);
  EXPECT_EQ(zero.q1, 0.0);
}

TEST(TestProfile, Asymptotic) {
  const TestProfile tp = test_profile_asymptotic(1.0);
  EXPECT_NEAR(tp.q0, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(tp.q1, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(tp.q1plus, 1.0 - std::exp(-1.0), 1e-15);
}

TEST(TestProfile, InvariantsHold) {
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    for (std::size_t k : {0, 1, 2, 5, 40}) {
      const TestProfile tp = test_profile(p, k);
      EXPECT_NEAR(tp.q0 + tp.q1plus, 1.0, 1e-15);
      EXPECT_GE(tp.q1, 0.0);
      EXPECT_LE(tp.q1, tp.q1plus + 1e-15);
    }
  }
}

TEST(TestProfile, ExactConvergesToAsymptotic) {
  // |q0 - e^-nu| should shrink like 1/k.
  const double nu = 1.3;
  double previous_scaled = 0.0;
  for (std::size_t k : {10, 100, 1000, 10000}) {
    const double gap = std::abs(test_profile(nu / static_cast<double>(k), k).q0 - std::exp(-nu));
    const double scaled = gap * static_cast<double>(k);
    EXPECT_LT(scaled, 1.0);
    if (previous_scaled > 0.0) EXPECT_NEAR(scaled, previous_scaled, 0.1 * previous_scaled);
    previous_scaled = scaled;
  }
}

TEST(Capacity, SimplifiedForm) {
  EXPECT_NEAR(capacity(0.2), 1.0, 1e-3);
  EXPECT_NEAR(capacity(0.5), 0.531, 1e-3);
  EXPECT_NEAR(capacity(0.75), 0.531 / 3.0, 1e-3);
  EXPECT_NEAR(capacity(0.75), kInvELn2 / 3.0, 1e-9);
  for (double theta = 0.36; theta < 0.995; theta += 0.01) {
    EXPECT_NEAR(capacity(theta), kInvELn2 * (1 - theta) / theta, 1e-3) << theta;
  }
  for (double theta = 0.01; theta <= 1.0 / 3.0; theta += 0.01) {
    EXPECT_NEAR(capacity(theta), 1.0, 1e-3) << theta;
  }
}

TEST(Capacity, MatchesDenseGridMaximum) {
  for (const double theta : {0.1, 0.34, 0.345, 0.35, 0.355, 0.4, 0.6}) {
    const double reference = testing::dense_grid_max([theta](double nu) {
      const double q0 = std::exp(-nu);
      const double h = -q0 * std::log2(q0) - (1 - q0) * std::log2(1 - q0);
      return std::min(h, nu / (std::exp(nu) * std::numbers::ln2) * (1 - theta) / theta);
    });
    EXPECT_NEAR(capacity(theta), reference, 1e-8) << theta;
    EXPECT_GE(capacity(theta), reference - 1e-8) << theta;
  }
}

TEST(DdLower, Values) {
  EXPECT_NEAR(dd_lower_rate(0.25), kInvELn2, 1e-12);
  EXPECT_NEAR(dd_lower_rate(0.25), 0.5307, 1e-4);
  EXPECT_NEAR(dd_lower_rate(0.5), 0.5307, 1e-4);
  EXPECT_NEAR(dd_lower_rate(0.75), 0.1769, 1e-4);
  EXPECT_THROW(dd_lower_rate(0.0), ParameterError);
  EXPECT_THROW(dd_lower_rate(1.0), ParameterError);
}

TEST(DdUpper, Values) {
  EXPECT_NEAR(dd_upper_rate(0.30), 0.853, 2e-3);
  EXPECT_NEAR(dd_upper_rate(0.30), kDdPlateau, 1e-9);
  EXPECT_NEAR(dd_upper_rate(0.45), capacity(0.45), 1e-3);
  EXPECT_NEAR(dd_entropy_term(1.0), kDdFirstMinimandAtOne, 1e-14);
  EXPECT_NEAR(dd_entropy_term(1.0), 0.7742, 1e-4);
}

TEST(DdUpper, PlateauOptimizer) {
  const MaxMin plateau = dd_plateau();
  EXPECT_NEAR(plateau.value, kDdPlateau, 1e-12);
  EXPECT_NEAR(plateau.nu, kDdPlateauNu, 1e-6);
  for (double theta = 0.05; theta <= 0.35; theta += 0.05) {
    EXPECT_NEAR(dd_upper_rate(theta), 0.853, 2e-3) << theta;
  }
}

TEST(DdUpper, MatchesDenseGridMaximum) {
  for (const double theta : {0.2, 0.36, 0.38, 0.40, 0.42}) {
    const double reference = testing::dense_grid_max([theta](double nu) {
      const double q0 = std::exp(-nu);
      const double first = q0 * nu / std::numbers::ln2 - nu * q0 * std::log2(1 - q0);
      return std::min(first, nu / (std::exp(nu) * std::numbers::ln2) * (1 - theta) / theta);
    });
    EXPECT_NEAR(dd_upper_rate(theta), reference, 1e-8) << theta;
  }
}

TEST(ThetaStar, Value) {
  EXPECT_NEAR(theta_star(), kThetaStar, 1e-15);
  EXPECT_NEAR(theta_star(), 0.407, 5e-4);
  EXPECT_NEAR(dd_upper_rate(theta_star() + 0.01), capacity(theta_star() + 0.01), 1e-3);
  EXPECT_LT(dd_upper_rate(theta_star() - 0.05), capacity(theta_star() - 0.05) - 0.01);
}

TEST(ThetaStar, ArgmaxIsOneWhenCountingTermBinds) {
  for (double theta = 0.45; theta < 0.995; theta += 0.05) {
    EXPECT_NEAR(capacity_detail(theta).nu, 1.0, 1e-3) << theta;
    EXPECT_NEAR(dd_upper_detail(theta).nu, 1.0, 1e-3) << theta;
  }
}

TEST(Comp, Rates) {
  EXPECT_NEAR(comp_upper(), 0.5307, 1e-4);
  EXPECT_NEAR(comp_rate(0.0), comp_upper(), 1e-15);
  EXPECT_NEAR(comp_rate(1e-12), 0.5307, 1e-4);
  EXPECT_NEAR(comp_rate(0.5), 0.2654, 1e-4);
}

TEST(Lipo, Rates) {
  EXPECT_NEAR(lipo_rate(1e-12), kLipoCoefficient, 1e-10);
  EXPECT_NEAR(lipo_rate(1e-12), 0.0732, 1e-4);
  EXPECT_NEAR(lipo_rate(1.0 / 3.0), 0.0366, 1e-4);
  EXPECT_LT(lipo_rate(1.0 - 1e-9), 1e-9);
}

TEST(DdEntropyBound, Values) {
  EXPECT_NEAR(dd_entropy_bound({0.5, 0.5, 0.5}), 1.0, 1e-15);
  const TestProfile no_singles{0.3, 0.0, 0.7};
  EXPECT_NEAR(dd_entropy_bound(no_singles), -0.3 * std::log2(0.3), 1e-15);
  EXPECT_NEAR(dd_entropy_bound(test_profile_asymptotic(1.0)), kDdFirstMinimandAtOne, 1e-14);
  EXPECT_EQ(dd_entropy_bound({0.0, 0.0, 1.0}), 0.0);
}

TEST(CountingBound, Values) {
  EXPECT_EQ(counting_bound_tests(17, 17), 0.0);
  EXPECT_NEAR(counting_bound_tests(500, 10), kLog2Binom500_10, 1e-9);
  EXPECT_NEAR(counting_bound_tests(500, 10), log2_binomial_exact(500, 10), 1e-9);
  EXPECT_NEAR(counting_bound_tests(300, 150), log2_binomial_exact(300, 150), 1e-9);
  EXPECT_NEAR(achieved_rate(500, 10, 135), 0.50, 2e-3);
  EXPECT_THROW(counting_bound_tests(3, 4), ParameterError);
  EXPECT_THROW(achieved_rate(3, 2, 0), ParameterError);
}

TEST(Curves, OrderingOnGrid) {
  for (const double theta : theta_grid(0.01, 0.99, 0.01)) {
    const double lipo = lipo_rate(theta);
    const double lower = dd_lower_rate(theta);
    const double upper = dd_upper_rate(theta);
    const double cap = capacity(theta);
    EXPECT_LE(lipo, lower) << theta;
    EXPECT_LE(lower, upper + 1e-12) << theta;
    EXPECT_LE(upper, 1.0) << theta;
    EXPECT_LE(lower, cap + 1e-12) << theta;
    EXPECT_LE(upper, cap + 1e-12) << theta;
    EXPECT_LE(upper, std::max(cap, kDdPlateau) + 1e-12) << theta;
    if (theta >= 0.41) EXPECT_NEAR(upper, cap, 1e-3) << theta;
  }
}

TEST(Curves, GridAndSampling) {
  const auto grid = theta_grid(0.01, 0.99, 0.01);
  ASSERT_EQ(grid.size(), 99U);
  EXPECT_NEAR(grid.front(), 0.01, 1e-15);
  EXPECT_NEAR(grid.back(), 0.99, 1e-12);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_GT(grid[i], grid[i - 1]);
  const RateCurve curve = sample_curve("comp", grid);
  EXPECT_EQ(curve.name, "comp");
  EXPECT_EQ(curve.samples.size(), 99U);
  EXPECT_THROW(sample_curve("nope", grid), ParameterError);
  EXPECT_THROW(theta_grid(0.0, 0.5, 0.1), ParameterError);
  EXPECT_THROW(theta_grid(0.5, 0.4, 0.1), ParameterError);
}

TEST(Crossovers, Locations) {
  const Crossovers x = locate_crossovers();
  EXPECT_NEAR(x.capacity_unit_end, 1.0 / 3.0, 1e-5);
  // Closed form: counting term at nu = 1 equals h(1/e).
  EXPECT_NEAR(x.capacity_counting_start, 1.0 / (1.0 + kEntropyAtInvE / kInvELn2), 1e-5);
  EXPECT_NEAR(x.capacity_counting_start, 0.359, 1e-3);
  EXPECT_NEAR(x.dd_plateau_end, 0.357, 1e-3);
  EXPECT_NEAR(x.dd_meets_capacity, kThetaStar, 1e-5);
}

}  // namespace
}  // namespace gtlab::bounds
