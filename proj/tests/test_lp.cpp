#include "gtlab/lp.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gtlab/errors.hpp"
#include "oracles.hpp"

namespace gtlab {
namespace {

using testing::worked_design;
using testing::worked_outcomes;

CoverLp make_lp(std::size_t items, std::vector<std::vector<std::size_t>> rows) {
  CoverLp lp;
  lp.items = items;
  for (const auto& row : rows) lp.variables.insert(lp.variables.end(), row.begin(), row.end());
  std::sort(lp.variables.begin(), lp.variables.end());
  lp.variables.erase(std::unique(lp.variables.begin(), lp.variables.end()), lp.variables.end());
  lp.constraints = std::move(rows);
  return lp;
}

// Odd cycle: the only optimum is z = (1/2, 1/2, 1/2).
CoverLp triangle() { return make_lp(3, {{0, 1}, {1, 2}, {0, 2}}); }

TEST(BuildRelaxation, WorkedInstance) {
  const CoverLp lp = build_relaxation(worked_design(), worked_outcomes());
  EXPECT_EQ(lp.variables, (std::vector<std::size_t>{0, 1, 3}));
  ASSERT_EQ(lp.constraints.size(), 2U);
  EXPECT_EQ(lp.constraints[0], (std::vector<std::size_t>{0}));
  EXPECT_EQ(lp.constraints[1], (std::vector<std::size_t>{1, 3}));
}

TEST(BuildRelaxation, AllNegative) {
  const TestDesign d = TestDesign::from_pools(3, {{0, 1}, {2}});
  const CoverLp lp = build_relaxation(d, Outcomes({false, false}));
  EXPECT_TRUE(lp.variables.empty());
  EXPECT_TRUE(lp.constraints.empty());
  const LpSolution sol = simplex_solve(lp);
  EXPECT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_DOUBLE_EQ(sol.objective, 0.0);
  EXPECT_TRUE(sol.integral);
}

TEST(BuildRelaxation, PositiveTestWithoutCandidatesIsInconsistent) {
  const TestDesign d = TestDesign::from_pools(2, {{0}, {0}});
  EXPECT_THROW(build_relaxation(d, Outcomes({false, true})), InputError);
}

TEST(BuildRelaxation, DefiniteDefectivesSatisfyEveryRow) {
  // Every positive test holds a definite defective (0 via test 0, 3 via test 2).
  const TestDesign d = TestDesign::from_pools(5, {{0}, {0, 1}, {3}, {1, 3}, {2}});
  const Outcomes y = compute_outcomes(d, ItemSet{0, 3});
  const CoverLp lp = build_relaxation(d, y);
  const ItemSet dd = definite_defectives(d, y);
  EXPECT_EQ(dd, (ItemSet{0, 3}));
  for (const auto& row : lp.constraints) {
    const auto hits = std::count_if(row.begin(), row.end(),
                                    [&](std::size_t i) { return dd.contains(i); });
    EXPECT_GE(hits, 1);
  }
  const LpSolution sol = simplex_solve(lp);
  EXPECT_NEAR(sol.objective, 2.0, kLpTolerance);
}

TEST(Simplex, WorkedInstance) {
  const LpSolution sol = simplex_solve(build_relaxation(worked_design(), worked_outcomes()));
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 2.0, 1e-9);
  EXPECT_NEAR(sol.values[0], 1.0, 1e-9);
  EXPECT_NEAR(sol.values[1] + sol.values[3], 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(sol.values[2], 0.0);
}

TEST(Simplex, FractionalVertex) {
  const LpSolution sol = simplex_solve(triangle());
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 1.5, 1e-9);
  EXPECT_FALSE(sol.integral);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(sol.values[i], 0.5, 1e-9);
}

TEST(Simplex, EmptyRowIsInfeasible) {
  CoverLp lp = make_lp(2, {{0}});
  lp.constraints.push_back({});
  EXPECT_EQ(simplex_solve(lp).status, LpStatus::kInfeasible);
}

TEST(Simplex, PivotCapRaises) {
  EXPECT_THROW(simplex_solve(triangle(), kLpTolerance, 1), SolverError);
}

TEST(Simplex, MatchesVertexEnumeration) {
  Rng rng = make_rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t nv = 1 + uniform_below(rng, 6);
    const std::size_t m = 1 + uniform_below(rng, 7);
    std::vector<std::vector<std::size_t>> rows;
    for (std::size_t r = 0; r < m; ++r) {
      std::vector<std::size_t> row;
      for (std::size_t c = 0; c < nv; ++c) {
        if (uniform01(rng) < 0.4) row.push_back(c);
      }
      if (row.empty()) row.push_back(uniform_below(rng, nv));
      rows.push_back(row);
    }
    const double expected = testing::vertex_enumeration_minimum(rows, nv);
    CoverLp lp = make_lp(nv, rows);
    const LpSolution sol = simplex_solve(lp);
    ASSERT_EQ(sol.status, LpStatus::kOptimal);
    EXPECT_NEAR(sol.objective, expected, 1e-7) << "trial " << trial;
    for (const auto& row : rows) {
      double lhs = 0.0;
      for (const auto c : row) lhs += sol.values[c];
      EXPECT_GE(lhs, 1.0 - 1e-9);
    }
    for (const double v : sol.values) EXPECT_GE(v, -1e-9);
  }
}

TEST(Simplex, DuplicatesAndOrderDoNotChangeObjective) {
  Rng rng = make_rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<std::size_t>> rows;
    const std::size_t nv = 2 + uniform_below(rng, 8);
    for (std::size_t r = 0; r < 3 + uniform_below(rng, 8); ++r) {
      std::vector<std::size_t> row;
      for (std::size_t c = 0; c < nv; ++c) {
        if (uniform01(rng) < 0.35) row.push_back(c);
      }
      if (row.empty()) row.push_back(uniform_below(rng, nv));
      rows.push_back(row);
    }
    const double base = simplex_solve(make_lp(nv, rows)).objective;
    auto shuffled = rows;
    shuffled.insert(shuffled.end(), rows.begin(), rows.end());
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[uniform_below(rng, i)]);
    }
    EXPECT_NEAR(simplex_solve(make_lp(nv, shuffled)).objective, base, 1e-9);
    EXPECT_NEAR(simplex_solve(remove_redundant_constraints(make_lp(nv, rows))).objective,
                base, 1e-9);
  }
}

TEST(Simplex, RedundantRowRemoval) {
  const CoverLp lp = make_lp(4, {{0, 1, 2}, {1}, {1}, {1, 3}, {2, 3}});
  const CoverLp reduced = remove_redundant_constraints(lp);
  EXPECT_EQ(reduced.constraints,
            (std::vector<std::vector<std::size_t>>{{1}, {2, 3}}));
}

TEST(Rounding, IntegralSolutionAgreesAcrossRules) {
  LpSolution sol;
  sol.values = {1.0, 0.0, 0.0};
  sol.objective = 1.0;
  for (const auto rule :
       {Rounding::kMalioutov, Rounding::kHalf, Rounding::kCrude, Rounding::kRandomized}) {
    Rng rng = make_rng(1);
    const auto est = round_solution(sol, rule, rng);
    ASSERT_TRUE(est.has_value()) << to_string(rule);
    EXPECT_EQ(*est, (ItemSet{0}));
  }
}

TEST(Rounding, HalfHalf) {
  LpSolution sol;
  sol.values = {0.5, 0.5};
  sol.objective = 1.0;
  sol.integral = false;
  Rng rng = make_rng(1);
  EXPECT_EQ(round_solution(sol, Rounding::kMalioutov, rng), (ItemSet{0, 1}));
  EXPECT_EQ(round_solution(sol, Rounding::kHalf, rng), (ItemSet{0, 1}));
  EXPECT_EQ(round_solution(sol, Rounding::kCrude, rng), std::nullopt);
}

TEST(Rounding, HalfThresholdDropsSmallValues) {
  LpSolution sol;
  sol.values = {1.0 / 3.0, 2.0 / 3.0, 0.0};
  sol.integral = false;
  Rng rng = make_rng(1);
  EXPECT_EQ(round_solution(sol, Rounding::kHalf, rng), (ItemSet{1}));
  EXPECT_EQ(round_solution(sol, Rounding::kMalioutov, rng), (ItemSet{0, 1}));
}

TEST(Rounding, WorkedInstanceMalioutov) {
  const LpSolution sol = simplex_solve(build_relaxation(worked_design(), worked_outcomes()));
  Rng rng = make_rng(1);
  const auto est = round_solution(sol, Rounding::kMalioutov, rng);
  ASSERT_TRUE(est.has_value());
  // Which of b or d gets weight is up to the pivot rule; a is forced.
  EXPECT_TRUE(*est == (ItemSet{0, 1}) || *est == (ItemSet{0, 3}) || *est == (ItemSet{0, 1, 3}));
  EXPECT_TRUE(est->contains(0));
}

TEST(Rounding, RandomizedMeanSizeIsObjective) {
  const LpSolution sol = simplex_solve(triangle());
  Rng rng = make_rng(77);
  constexpr int kDraws = 40000;
  double total = 0.0;
  double total_sq = 0.0;
  for (int s = 0; s < kDraws; ++s) {
    const double size = static_cast<double>(round_solution(sol, Rounding::kRandomized, rng)->size());
    total += size;
    total_sq += size * size;
  }
  const double mean = total / kDraws;
  const double var = total_sq / kDraws - mean * mean;
  EXPECT_NEAR(mean, sol.objective, 4.0 * std::sqrt(var / kDraws));
}

TEST(Rounding, RequiresOptimalSolution) {
  LpSolution sol;
  sol.status = LpStatus::kInfeasible;
  Rng rng = make_rng(1);
  EXPECT_THROW(round_solution(sol, Rounding::kHalf, rng), ParameterError);
}

TEST(LpDecode, AllNegative) {
  const TestDesign d = TestDesign::from_pools(3, {{0, 1, 2}});
  Rng rng = make_rng(1);
  const DecodeResult r = lp_decode(d, Outcomes({false}), Rounding::kMalioutov, rng);
  EXPECT_TRUE(r.estimate.empty());
  EXPECT_TRUE(r.satisfying);
  EXPECT_FALSE(r.failed);
}

TEST(LpDecode, CrudeGlobalErrorIsAFailedDecode) {
  const TestDesign d = TestDesign::from_pools(3, {{0, 1}, {1, 2}, {0, 2}});
  const Outcomes y({true, true, true});
  Rng rng = make_rng(1);
  const DecodeResult crude = lp_decode(d, y, Rounding::kCrude, rng);
  EXPECT_TRUE(crude.failed);
  EXPECT_TRUE(crude.estimate.empty());
  const DecodeResult mal = lp_decode(d, y, Rounding::kMalioutov, rng);
  EXPECT_FALSE(mal.failed);
  EXPECT_EQ(mal.estimate, (ItemSet{0, 1, 2}));
  EXPECT_TRUE(mal.satisfying);
}

// Property P plus the relaxation bound, on random small instances checked
// against brute-force smallest satisfying sets.
TEST(LpDecode, PropertyPAndRelaxationBound) {
  std::size_t dd_satisfying = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    Rng rng = make_rng(seed);
    const std::size_t n = 8 + seed % 7;
    const std::size_t k = 1 + seed % 3;
    const ItemSet defectives = sample_defective_set(n, k, rng);
    const TestDesign d = bernoulli_design(n, 4 + seed % 12, 1.0 / (k + 1.0), rng);
    const Outcomes y = compute_outcomes(d, defectives);

    const LpSolution sol = simplex_solve(build_relaxation(d, y));
    const auto brute = testing::brute_smallest_satisfying(d, y);
    ASSERT_TRUE(brute);
    EXPECT_LE(sol.objective, static_cast<double>(brute->size) + 1e-9);

    const DecodeResult dd = dd_decode(d, y);
    if (!dd.satisfying) continue;
    ++dd_satisfying;
    EXPECT_TRUE(sol.integral);
    EXPECT_NEAR(sol.objective, static_cast<double>(dd.estimate.size()), 1e-9);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(sol.values[i], dd.estimate.contains(i) ? 1.0 : 0.0, 1e-9);
    }
    for (const auto rule :
         {Rounding::kMalioutov, Rounding::kHalf, Rounding::kCrude, Rounding::kRandomized}) {
      Rng round_rng = make_rng(seed);
      const DecodeResult r = lp_decode(d, y, rule, round_rng);
      EXPECT_FALSE(r.failed);
      EXPECT_EQ(r.estimate, dd.estimate) << to_string(rule) << " seed " << seed;
    }
  }
  EXPECT_GT(dd_satisfying, 50U);
}

TEST(LpDump, ReplayReproducesObjective) {
  Rng rng = make_rng(8);
  const ItemSet k = sample_defective_set(40, 4, rng);
  const TestDesign d = bernoulli_design(40, 25, 0.2, rng);
  const Outcomes y = compute_outcomes(d, k);
  const CoverLp lp = build_relaxation(d, y);

  std::stringstream text;
  write_lp_dump(text, lp);
  const CoverLp replayed = read_lp_dump(text, 40);
  EXPECT_EQ(replayed.constraints, lp.constraints);
  EXPECT_NEAR(simplex_solve(replayed).objective, simplex_solve(lp).objective, 1e-12);
}

TEST(LpDump, Format) {
  std::stringstream text;
  write_lp_dump(text, build_relaxation(worked_design(), worked_outcomes()));
  EXPECT_EQ(text.str(), ">=1: 0\n>=1: 1 3\n");
  std::istringstream bad(">=2: 1\n");
  EXPECT_THROW(read_lp_dump(bad, 4), InputError);
  std::istringstream range(">=1: 9\n");
  EXPECT_THROW(read_lp_dump(range, 4), InputError);
}

}  // namespace
}  // namespace gtlab
