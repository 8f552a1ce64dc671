#include "gtlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gtlab/errors.hpp"

namespace gtlab::bounds {
namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kE = std::numbers::e;

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("theta must lie in (0, 1)");
}

double xlog2_inv(double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; }

// Finds the boundary of a predicate that holds on [lo, boundary) and fails on
// (boundary, hi].
template <typename Pred>
double bisect(double lo, double hi, double tolerance, Pred&& holds) {
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("entropy argument must lie in [0, 1]");
  return xlog2_inv(x) + xlog2_inv(1.0 - x);
}

TestProfile test_profile(double p, std::size_t k) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
  const double kd = static_cast<double>(k);
  TestProfile profile;
  profile.q0 = std::pow(1.0 - p, kd);
  profile.q1 = k == 0 ? 0.0 : kd * p * std::pow(1.0 - p, kd - 1.0);
  profile.q1plus = 1.0 - profile.q0;
  return profile;
}

TestProfile test_profile_asymptotic(double nu) {
  if (!(nu > 0.0)) throw ParameterError("nu must be positive");
  const double q0 = std::exp(-nu);
  return {q0, nu * q0, -std::expm1(-nu)};
}

double counting_term(double nu, double theta) {
  return nu / (std::exp(nu) * kLn2) * (1.0 - theta) / theta;
}

double dd_entropy_term(double nu) {
  return dd_entropy_bound(test_profile_asymptotic(nu));
}

MaxMin capacity_detail(double theta, const OptimizerSettings& opt) {
  check_theta(theta);
  return maximize_over_nu(
      [theta](double nu) {
        return std::min(binary_entropy(std::exp(-nu)), counting_term(nu, theta));
      },
      opt);
}

MaxMin dd_upper_detail(double theta, const OptimizerSettings& opt) {
  check_theta(theta);
  return maximize_over_nu(
      [theta](double nu) { return std::min(dd_entropy_term(nu), counting_term(nu, theta)); },
      opt);
}

MaxMin dd_plateau(const OptimizerSettings& opt) {
  return maximize_over_nu([](double nu) { return dd_entropy_term(nu); }, opt);
}

double capacity(double theta, const OptimizerSettings& opt) {
  return capacity_detail(theta, opt).value;
}

double dd_lower_rate(double theta) {
  check_theta(theta);
  return std::min(1.0, (1.0 - theta) / theta) / (kE * kLn2);
}

double dd_upper_rate(double theta, const OptimizerSettings& opt) {
  return dd_upper_detail(theta, opt).value;
}

double theta_star() { return 1.0 / (2.0 - std::log(1.0 - std::exp(-1.0))); }

double comp_rate(double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw ParameterError("theta must lie in [0, 1)");
  return (1.0 - theta) / (kE * kLn2);
}

double comp_upper() { return 1.0 / (kE * kLn2); }

double lipo_rate(double theta) {
  check_theta(theta);
  return (1.0 - theta) / (1.0 + theta) / (8.0 / 3.0 * kE * kE * kLn2);
}

double counting_bound_tests(std::size_t n, std::size_t k) {
  if (k > n) throw ParameterError("k must not exceed n");
  const std::size_t r = std::min(k, n - k);
  double bits = 0.0;
  for (std::size_t j = 1; j <= r; ++j) {
    bits += std::log2(static_cast<double>(n - r + j)) - std::log2(static_cast<double>(j));
  }
  return bits;
}

double achieved_rate(std::size_t n, std::size_t k, std::size_t t) {
  if (t == 0) throw ParameterError("t must be positive");
  return counting_bound_tests(n, k) / static_cast<double>(t);
}

double dd_entropy_bound(const TestProfile& profile) {
  const double negative = xlog2_inv(profile.q0);
  const double positive =
      profile.q1 > 0.0 ? -profile.q1 * std::log2(profile.q1plus) : 0.0;
  return negative + positive;
}

const std::vector<std::string>& curve_names() {
  static const std::vector<std::string> names{"capacity", "dd_lower", "dd_upper", "comp",
                                              "lipo"};
  return names;
}

bool is_curve_name(const std::string& name) {
  const auto& names = curve_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

double evaluate_curve(const std::string& name, double theta, const OptimizerSettings& opt) {
  if (name == "capacity") return capacity(theta, opt);
  if (name == "dd_lower") return dd_lower_rate(theta);
  if (name == "dd_upper") return dd_upper_rate(theta, opt);
  if (name == "comp") return comp_rate(theta);
  if (name == "lipo") return lipo_rate(theta);
  throw ParameterError("unknown curve '" + name + "'");
}

std::vector<double> theta_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(lo > 0.0) || !(hi < 1.0) || !(lo <= hi)) {
    throw ParameterError("theta grid must satisfy 0 < lo <= hi < 1 and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = lo + static_cast<double>(i) * step;
    if (theta >= 1.0) break;
    grid.push_back(theta);
  }
  return grid;
}

RateCurve sample_curve(const std::string& name, const std::vector<double>& thetas,
                       const OptimizerSettings& opt) {
  RateCurve curve{name, {}};
  curve.samples.reserve(thetas.size());
  for (const double theta : thetas) {
    curve.samples.emplace_back(theta, evaluate_curve(name, theta, opt));
  }
  return curve;
}

Crossovers locate_crossovers(double tolerance, const OptimizerSettings& opt) {
  constexpr double kSlack = 1e-9;
  const double plateau = dd_plateau(opt).value;
  Crossovers out;
  out.capacity_unit_end = bisect(0.2, 0.5, tolerance, [&](double theta) {
    return capacity(theta, opt) >= 1.0 - kSlack;
  });
  out.capacity_counting_start = bisect(0.3, 0.5, tolerance, [&](double theta) {
    return capacity(theta, opt) < counting_term(1.0, theta) - kSlack;
  });
  out.dd_plateau_end = bisect(0.2, 0.5, tolerance, [&](double theta) {
    return dd_upper_rate(theta, opt) >= plateau - kSlack;
  });
  out.dd_meets_capacity = bisect(0.3, 0.6, tolerance, [&](double theta) {
    return capacity(theta, opt) - dd_upper_rate(theta, opt) > kSlack;
  });
  return out;
}

}  // namespace gtlab::bounds
