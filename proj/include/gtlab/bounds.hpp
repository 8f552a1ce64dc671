#pragma once

// Rate expressions for Bernoulli nonadaptive group testing. All rates are in
// bits per test (log base 2). theta is the sparsity exponent in k ~ n^theta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace gtlab::bounds {

/// Probabilities that a test holds zero, exactly one, and at least one
/// defective.
struct TestProfile {
  double q0 = 0.0;
  double q1 = 0.0;
  double q1plus = 0.0;
};

/// Settings for max over nu > 0 of the min of two rate terms: a grid scan on
/// (0, nu_max] followed by golden-section refinement of the best cell.
struct OptimizerSettings {
  double nu_max = 8.0;
  double grid_step = 1e-3;
  double tolerance = 1e-7;
};

struct MaxMin {
  double value = 0.0;
  double nu = 0.0;
};

/// Binary entropy in bits; h(0) = h(1) = 0.
double binary_entropy(double x);

/// Exact profile for Bernoulli(p) pools and k defectives.
TestProfile test_profile(double p, std::size_t k);
/// Large-k limit of test_profile(nu / k, k).
TestProfile test_profile_asymptotic(double nu);

/// The term (nu / (e^nu ln 2)) (1 - theta) / theta shared by the capacity and
/// the DD upper bound.
double counting_term(double nu, double theta);
/// First minimand of the DD upper bound: the DD entropy bound at the
/// asymptotic profile for nu.
double dd_entropy_term(double nu);

/// Generic max over nu of f(nu).
template <typename Fn>
MaxMin maximize_over_nu(Fn&& f, const OptimizerSettings& opt = {}) {
  const auto steps = static_cast<std::size_t>(std::floor(opt.nu_max / opt.grid_step));
  MaxMin best{f(opt.grid_step), opt.grid_step};
  for (std::size_t s = 2; s <= steps; ++s) {
    const double nu = static_cast<double>(s) * opt.grid_step;
    const double v = f(nu);
    if (v > best.value) best = {v, nu};
  }

  // Golden section on the bracketing cells; the min of two smooth terms may
  // have a kink at the maximum, which golden section tolerates.
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = std::max(best.nu - opt.grid_step, opt.grid_step * 1e-3);
  double hi = std::min(best.nu + opt.grid_step, opt.nu_max);
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > opt.tolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  const double nu = 0.5 * (lo + hi);
  const double v = f(nu);
  if (v > best.value) best = {v, nu};
  return best;
}

MaxMin capacity_detail(double theta, const OptimizerSettings& opt = {});
MaxMin dd_upper_detail(double theta, const OptimizerSettings& opt = {});
/// max over nu of the first DD minimand alone: the DD plateau rate.
MaxMin dd_plateau(const OptimizerSettings& opt = {});

double capacity(double theta, const OptimizerSettings& opt = {});
double dd_lower_rate(double theta);
double dd_upper_rate(double theta, const OptimizerSettings& opt = {});
double theta_star();
double comp_rate(double theta);
double comp_upper();
double lipo_rate(double theta);

/// log2 C(n, k).
double counting_bound_tests(std::size_t n, std::size_t k);
/// log2 C(n, k) / t.
double achieved_rate(std::size_t n, std::size_t k, std::size_t t);

/// q0 log(1/q0) + q1 log(1/q1plus), with 0 log(1/0) = 0.
double dd_entropy_bound(const TestProfile& profile);

struct RateCurve {
  std::string name;
  std::vector<std::pair<double, double>> samples;
};

/// Known curve names: capacity, dd_lower, dd_upper, comp, lipo.
const std::vector<std::string>& curve_names();
bool is_curve_name(const std::string& name);
double evaluate_curve(const std::string& name, double theta,
                      const OptimizerSettings& opt = {});

/// Samples lo, lo + step, ... up to hi (inclusive within half a step).
std::vector<double> theta_grid(double lo, double hi, double step);
RateCurve sample_curve(const std::string& name, const std::vector<double>& thetas,
                       const OptimizerSettings& opt = {});

/// Sparsity values where the curves change regime, found by bisection.
struct Crossovers {
  /// capacity leaves 1.
  double capacity_unit_end = 0.0;
  /// capacity becomes (1/(e ln 2)) (1 - theta) / theta.
  double capacity_counting_start = 0.0;
  /// dd_upper leaves its plateau.
  double dd_plateau_end = 0.0;
  /// dd_upper meets capacity.
  double dd_meets_capacity = 0.0;
};

Crossovers locate_crossovers(double tolerance = 1e-6, const OptimizerSettings& opt = {});

}  // namespace gtlab::bounds
