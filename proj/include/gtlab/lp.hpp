#pragma once

// LP relaxation of the smallest-satisfying-set integer program:
//
//   minimize  sum_i z_i
//   s.t.      sum_{i in pool t} z_i >= 1   for each positive test t
//             z_i = 0                       for items in a negative test
//             z_i >= 0
//
// The equality rows are eliminated by substitution, so only possible
// defectives become variables. The solver is a dense two-phase primal simplex
// with Bland's rule.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gtlab/decode.hpp"
#include "gtlab/design.hpp"
#include "gtlab/random.hpp"

namespace gtlab {

/// Feasibility and integrality tolerance.
inline constexpr double kLpTolerance = 1e-9;

struct CoverLp {
  /// Size of the item universe.
  std::size_t items = 0;
  /// Possible defectives, increasing.
  std::vector<std::size_t> variables;
  /// One ">= 1" row per positive test: the variables (item indices,
  /// increasing) appearing in that test.
  std::vector<std::vector<std::size_t>> constraints;
};

enum class LpStatus { kOptimal, kInfeasible };

struct LpSolution {
  /// z per item; items that are not variables are 0.
  std::vector<double> values;
  double objective = 0.0;
  LpStatus status = LpStatus::kOptimal;
  /// All values within tolerance of 0 or 1.
  bool integral = true;
  std::size_t pivots = 0;
};

CoverLp build_relaxation(const TestDesign& design, const Outcomes& outcomes);

/// Drops duplicate rows and rows whose support contains another row's
/// support. The feasible region is unchanged.
CoverLp remove_redundant_constraints(const CoverLp& lp);

/// Optimal basic solution of the covering LP. Throws SolverError when the
/// pivot cap is exceeded (0 picks a cap from the problem size).
LpSolution simplex_solve(const CoverLp& lp, double tol = kLpTolerance,
                         std::size_t max_pivots = 0);

enum class Rounding { kMalioutov, kHalf, kCrude, kRandomized };

std::string to_string(Rounding rule);

/// Estimate from an optimal LP solution; nullopt is the crude rule's global
/// error on a fractional solution. Every rule maps an integral solution to
/// its support.
std::optional<ItemSet> round_solution(const LpSolution& solution, Rounding rule,
                                      Rng& rng, double tol = kLpTolerance);

/// build_relaxation -> simplex_solve -> round_solution. Solver failures and
/// the crude global error come back as a failed DecodeResult.
DecodeResult lp_decode(const TestDesign& design, const Outcomes& outcomes,
                       Rounding rule, Rng& rng);

/// Text dump, one line per constraint: ">=1: i1 i2 ...".
void write_lp_dump(std::ostream& out, const CoverLp& lp);
/// Reads a dump; variables become the union of the constraint supports.
CoverLp read_lp_dump(std::istream& in, std::size_t items);

}  // namespace gtlab
