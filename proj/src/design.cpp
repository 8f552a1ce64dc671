#include "gtlab/design.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "gtlab/errors.hpp"

namespace gtlab {

std::size_t BitVector::count() const {
  std::size_t total = 0;
  for (const auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

ItemSet::ItemSet(std::vector<std::size_t> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  if (std::adjacent_find(items_.begin(), items_.end()) != items_.end()) {
    throw ParameterError("item set contains a duplicate index");
  }
}

ItemSet ItemSet::from_mask(const BitVector& mask) {
  ItemSet out;
  const auto words = mask.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t word = words[w];
    while (word != 0) {
      const int bit = std::countr_zero(word);
      out.items_.push_back(w * BitVector::kWordBits + static_cast<std::size_t>(bit));
      word &= word - 1;
    }
  }
  return out;
}

bool ItemSet::contains(std::size_t item) const {
  return std::binary_search(items_.begin(), items_.end(), item);
}

bool ItemSet::is_subset_of(const ItemSet& other) const {
  return std::includes(other.items_.begin(), other.items_.end(), items_.begin(),
                       items_.end());
}

void ItemSet::check_bounds(std::size_t n) const {
  if (!items_.empty() && items_.back() >= n) {
    throw ParameterError("item index " + std::to_string(items_.back()) +
                         " out of range for n = " + std::to_string(n));
  }
}

BitVector ItemSet::to_mask(std::size_t n) const {
  check_bounds(n);
  BitVector mask(n);
  for (const auto i : items_) mask.set(i);
  return mask;
}

TestDesign::TestDesign(std::size_t n, std::size_t t, double p)
    : n_(n), t_(t), p_(p), stride_(BitVector::words_for(n)), bits_(stride_ * t, 0) {}

TestDesign TestDesign::from_pools(std::size_t n,
                                  const std::vector<std::vector<std::size_t>>& pools) {
  TestDesign design(n, pools.size());
  for (std::size_t t = 0; t < pools.size(); ++t) {
    for (const auto i : pools[t]) {
      if (i >= n) throw ParameterError("pool member out of range");
      design.set(t, i);
    }
  }
  return design;
}

void TestDesign::set(std::size_t test, std::size_t item, bool value) {
  auto& word = bits_[test * stride_ + item / BitVector::kWordBits];
  const std::uint64_t bit = std::uint64_t{1} << (item % BitVector::kWordBits);
  word = value ? (word | bit) : (word & ~bit);
}

bool TestDesign::intersects(std::size_t test, const BitVector& mask) const {
  const auto r = row(test);
  const auto m = mask.words();
  for (std::size_t w = 0; w < stride_; ++w) {
    if ((r[w] & m[w]) != 0) return true;
  }
  return false;
}

std::size_t TestDesign::count_in(std::size_t test, const BitVector& mask) const {
  const auto r = row(test);
  const auto m = mask.words();
  std::size_t total = 0;
  for (std::size_t w = 0; w < stride_; ++w) {
    total += static_cast<std::size_t>(std::popcount(r[w] & m[w]));
  }
  return total;
}

std::size_t TestDesign::inclusions() const {
  std::size_t total = 0;
  for (const auto w : bits_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::size_t Outcomes::positives() const {
  return static_cast<std::size_t>(std::count(results_.begin(), results_.end(), true));
}

double p_from_k(std::size_t k, PMode mode) {
  switch (mode.kind) {
    case PMode::Kind::kReciprocal:
      return 1.0 / (static_cast<double>(k) + 1.0);
    case PMode::Kind::kNuOverK:
      if (!(mode.nu > 0.0)) throw ParameterError("nu must be positive");
      if (k == 0) return 1.0;
      return std::min(mode.nu / static_cast<double>(k), 1.0);
  }
  return 0.0;
}

TestDesign bernoulli_design(std::size_t n, std::size_t t, double p, Rng& rng) {
  if (n == 0 || t == 0) throw ParameterError("design needs n >= 1 and t >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
  TestDesign design(n, t, p);
  if (p == 0.0) return design;
  const std::size_t cells = n * t;
  if (p == 1.0) {
    for (std::size_t c = 0; c < cells; ++c) design.set(c / n, c % n);
    return design;
  }
  // Walk the row-major cells by geometric gaps between successive inclusions;
  // this is distributionally identical to one coin per cell.
  const double log_miss = std::log1p(-p);
  std::size_t next = 0;
  while (true) {
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    const double gap = std::floor(std::log(u) / log_miss);
    if (gap >= static_cast<double>(cells - next)) break;
    next += static_cast<std::size_t>(gap);
    design.set(next / n, next % n);
    if (++next >= cells) break;
  }
  return design;
}

ItemSet sample_defective_set(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw ParameterError("k must not exceed n");
  // Floyd's algorithm: one draw per member.
  std::vector<char> chosen(n, 0);
  std::vector<std::size_t> items;
  items.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    const auto r = static_cast<std::size_t>(uniform_below(rng, j + 1));
    const std::size_t pick = chosen[r] ? j : r;
    chosen[pick] = 1;
    items.push_back(pick);
  }
  return ItemSet(std::move(items));
}

Outcomes compute_outcomes(const TestDesign& design, const ItemSet& defectives) {
  const BitVector mask = defectives.to_mask(design.items());
  std::vector<bool> results(design.tests());
  for (std::size_t t = 0; t < design.tests(); ++t) {
    results[t] = design.intersects(t, mask);
  }
  return Outcomes(std::move(results));
}

}  // namespace gtlab
