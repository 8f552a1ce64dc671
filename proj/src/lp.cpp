#include "gtlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gtlab/errors.hpp"

namespace gtlab {

CoverLp build_relaxation(const TestDesign& design, const Outcomes& outcomes) {
  const BitVector pd = possible_defective_mask(design, outcomes);
  CoverLp lp;
  lp.items = design.items();
  lp.variables = ItemSet::from_mask(pd).items();
  for (std::size_t t = 0; t < design.tests(); ++t) {
    if (!outcomes.positive(t)) continue;
    std::vector<std::size_t> row;
    for (const auto i : lp.variables) {
      if (design.contains(t, i)) row.push_back(i);
    }
    if (row.empty()) {
      throw InputError("positive test " + std::to_string(t) +
                       " contains no possible defective");
    }
    lp.constraints.push_back(std::move(row));
  }
  return lp;
}

CoverLp remove_redundant_constraints(const CoverLp& lp) {
  std::vector<std::vector<std::size_t>> rows = lp.constraints;
  for (auto& r : rows) std::sort(r.begin(), r.end());
  // Shorter rows first, so a row can only be dominated by an earlier one.
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  CoverLp out;
  out.items = lp.items;
  out.variables = lp.variables;
  for (auto& row : rows) {
    const bool dominated =
        std::any_of(out.constraints.begin(), out.constraints.end(), [&](const auto& kept) {
          return std::includes(row.begin(), row.end(), kept.begin(), kept.end());
        });
    if (!dominated) out.constraints.push_back(std::move(row));
  }
  return out;
}

namespace {

// Dense simplex tableau for  A z - s + a = 1,  z, s, a >= 0.
// Column layout: [0, nv) structural, [nv, nv+m) surplus, [nv+m, nv+2m)
// artificial, then the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t structural)
      : m_(rows),
        nv_(structural),
        cols_(structural + 2 * rows),
        width_(cols_ + 1),
        cells_(rows * width_, 0.0),
        reduced_(width_, 0.0),
        basis_(rows),
        allowed_(cols_, 1) {}

  double& at(std::size_t r, std::size_t c) { return cells_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return cells_[r * width_ + c]; }
  double rhs(std::size_t r) const { return at(r, cols_); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return cols_; }
  std::size_t structural() const { return nv_; }
  bool is_artificial(std::size_t c) const { return c >= nv_ + m_; }

  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  void forbid(std::size_t c) { allowed_[c] = 0; }

  // Reduced costs and objective for `cost` under the current basis.
  void price(const std::vector<double>& cost) {
    for (std::size_t c = 0; c < cols_; ++c) reduced_[c] = cost[c];
    reduced_[cols_] = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) reduced_[c] -= cb * at(r, c);
    }
  }
  double objective() const { return -reduced_[cols_]; }

  void pivot(std::size_t row, std::size_t col) {
    const double inv = 1.0 / at(row, col);
    double* pr = &cells_[row * width_];
    for (std::size_t c = 0; c <= cols_; ++c) pr[c] *= inv;
    pr[col] = 1.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == row) continue;
      double* rr = &cells_[r * width_];
      const double f = rr[col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) rr[c] -= f * pr[c];
      rr[col] = 0.0;
    }
    const double f = reduced_[col];
    if (f != 0.0) {
      for (std::size_t c = 0; c <= cols_; ++c) reduced_[c] -= f * pr[c];
      reduced_[col] = 0.0;
    }
    basis_[row] = col;
  }

  // Bland's rule: lowest-index improving column enters; among minimum-ratio
  // rows, the one whose basic variable has the lowest index leaves.
  // Returns false on unboundedness (impossible here: costs are >= 0).
  bool optimize(double tol, std::size_t& pivots, std::size_t max_pivots) {
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (allowed_[c] && reduced_[c] < -tol) {
          enter = c;
          break;
        }
      }
      if (enter == cols_) return true;

      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= tol) continue;
        const double ratio = rhs(r) / a;
        if (ratio < best - tol ||
            (ratio <= best + tol && leave < m_ && basis_[r] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave == m_) return false;
      if (++pivots > max_pivots) {
        throw SolverError("simplex exceeded " + std::to_string(max_pivots) + " pivots");
      }
      pivot(leave, enter);
    }
  }

  void drop_row(std::size_t row) {
    cells_.erase(cells_.begin() + static_cast<std::ptrdiff_t>(row * width_),
                 cells_.begin() + static_cast<std::ptrdiff_t>((row + 1) * width_));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(row));
    --m_;
  }

 private:
  std::size_t m_;
  std::size_t nv_;
  std::size_t cols_;
  std::size_t width_;
  std::vector<double> cells_;
  std::vector<double> reduced_;
  std::vector<std::size_t> basis_;
  std::vector<char> allowed_;
};

}  // namespace

LpSolution simplex_solve(const CoverLp& lp, double tol, std::size_t max_pivots) {
  const CoverLp reduced = remove_redundant_constraints(lp);
  LpSolution solution;
  solution.values.assign(lp.items, 0.0);

  for (const auto& row : reduced.constraints) {
    if (row.empty()) {
      solution.status = LpStatus::kInfeasible;
      solution.integral = false;
      return solution;
    }
  }
  if (reduced.constraints.empty()) return solution;

  // Only variables that appear in some row can be nonzero at an optimum.
  std::vector<std::size_t> columns;
  for (const auto& row : reduced.constraints) columns.insert(columns.end(), row.begin(), row.end());
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());

  const std::size_t m = reduced.constraints.size();
  const std::size_t nv = columns.size();
  if (max_pivots == 0) max_pivots = 50 * (nv + 2 * m) + 1000;

  Tableau tab(m, nv);
  for (std::size_t r = 0; r < m; ++r) {
    for (const auto item : reduced.constraints[r]) {
      const auto c = static_cast<std::size_t>(
          std::lower_bound(columns.begin(), columns.end(), item) - columns.begin());
      tab.at(r, c) = 1.0;
    }
    tab.at(r, nv + r) = -1.0;
    tab.at(r, nv + m + r) = 1.0;
    tab.at(r, tab.cols()) = 1.0;
    tab.basis()[r] = nv + m + r;
  }

  // Phase 1: minimize the artificial sum.
  std::vector<double> cost(tab.cols(), 0.0);
  for (std::size_t r = 0; r < m; ++r) cost[nv + m + r] = 1.0;
  tab.price(cost);
  tab.optimize(tol, solution.pivots, max_pivots);
  if (tab.objective() > tol * static_cast<double>(m + 1)) {
    solution.status = LpStatus::kInfeasible;
    solution.integral = false;
    return solution;
  }

  // Drive zero-level artificials out of the basis; drop rows that are
  // linear combinations of the others.
  for (std::size_t r = 0; r < tab.rows();) {
    if (!tab.is_artificial(tab.basis()[r])) {
      ++r;
      continue;
    }
    std::size_t col = tab.cols();
    for (std::size_t c = 0; c < nv + m; ++c) {
      if (std::abs(tab.at(r, c)) > tol) {
        col = c;
        break;
      }
    }
    if (col == tab.cols()) {
      tab.drop_row(r);
    } else {
      tab.pivot(r, col);
      ++solution.pivots;
      ++r;
    }
  }
  for (std::size_t r = 0; r < m; ++r) tab.forbid(nv + m + r);

  // Phase 2: minimize sum z.
  std::fill(cost.begin(), cost.end(), 0.0);
  for (std::size_t c = 0; c < nv; ++c) cost[c] = 1.0;
  tab.price(cost);
  tab.optimize(tol, solution.pivots, max_pivots);

  for (std::size_t r = 0; r < tab.rows(); ++r) {
    const std::size_t b = tab.basis()[r];
    if (b < nv) solution.values[columns[b]] = tab.rhs(r);
  }
  solution.objective = 0.0;
  for (const auto v : solution.values) {
    solution.objective += v;
    if (std::abs(v) > tol && std::abs(v - 1.0) > tol) solution.integral = false;
  }
  return solution;
}

std::string to_string(Rounding rule) {
  switch (rule) {
    case Rounding::kMalioutov:
      return "malioutov";
    case Rounding::kHalf:
      return "half";
    case Rounding::kCrude:
      return "crude";
    case Rounding::kRandomized:
      return "randomized";
  }
  return "unknown";
}

std::optional<ItemSet> round_solution(const LpSolution& solution, Rounding rule,
                                      Rng& rng, double tol) {
  if (solution.status != LpStatus::kOptimal) {
    throw ParameterError("rounding needs an optimal LP solution");
  }
  std::vector<std::size_t> items;
  const auto& z = solution.values;
  if (solution.integral) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (std::abs(z[i] - 1.0) <= tol) items.push_back(i);
    }
    return ItemSet(std::move(items));
  }
  switch (rule) {
    case Rounding::kCrude:
      return std::nullopt;
    case Rounding::kMalioutov:
      for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] > tol) items.push_back(i);
      }
      break;
    case Rounding::kHalf:
      for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] >= 0.5 - tol) items.push_back(i);
      }
      break;
    case Rounding::kRandomized:
      for (std::size_t i = 0; i < z.size(); ++i) {
        if (bernoulli(rng, std::clamp(z[i], 0.0, 1.0))) items.push_back(i);
      }
      break;
  }
  return ItemSet(std::move(items));
}

DecodeResult lp_decode(const TestDesign& design, const Outcomes& outcomes,
                       Rounding rule, Rng& rng) {
  const CoverLp lp = build_relaxation(design, outcomes);
  DecodeResult result;
  result.possible_defectives = lp.variables.size();
  result.dd_core = definite_defectives(design, outcomes);

  std::optional<ItemSet> estimate;
  try {
    const LpSolution solution = simplex_solve(lp);
    if (solution.status != LpStatus::kOptimal) {
      result.failure = "LP infeasible";
    } else {
      estimate = round_solution(solution, rule, rng);
      if (!estimate) result.failure = "fractional LP solution under crude rounding";
    }
  } catch (const SolverError& e) {
    result.failure = e.what();
  }

  if (!estimate) {
    result.failed = true;
    result.satisfying = is_satisfying(design, outcomes, result.estimate);
    result.unexplained_tests = count_unexplained(design, outcomes, result.estimate);
    return result;
  }
  result.estimate = std::move(*estimate);
  result.satisfying = is_satisfying(design, outcomes, result.estimate);
  result.unexplained_tests = count_unexplained(design, outcomes, result.estimate);
  return result;
}

void write_lp_dump(std::ostream& out, const CoverLp& lp) {
  for (const auto& row : lp.constraints) {
    out << ">=1:";
    for (const auto i : row) out << ' ' << i;
    out << '\n';
  }
}

CoverLp read_lp_dump(std::istream& in, std::size_t items) {
  CoverLp lp;
  lp.items = items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind(">=1:", 0) != 0) {
      throw InputError("LP dump line " + std::to_string(line_no) + ": expected '>=1:'");
    }
    std::istringstream fields(line.substr(4));
    std::vector<std::size_t> row;
    long long value;
    while (fields >> value) {
      if (value < 0 || static_cast<std::size_t>(value) >= items) {
        throw InputError("LP dump line " + std::to_string(line_no) + ": index out of range");
      }
      row.push_back(static_cast<std::size_t>(value));
    }
    if (!fields.eof()) {
      throw InputError("LP dump line " + std::to_string(line_no) + ": malformed index");
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    lp.variables.insert(lp.variables.end(), row.begin(), row.end());
    lp.constraints.push_back(std::move(row));
  }
  std::sort(lp.variables.begin(), lp.variables.end());
  lp.variables.erase(std::unique(lp.variables.begin(), lp.variables.end()),
                     lp.variables.end());
  return lp;
}

}  // namespace gtlab
