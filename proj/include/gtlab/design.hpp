#pragma once

// Bernoulli nonadaptive test designs, defective sets and noiseless outcomes.
//
// Items and tests are 0-indexed. A design stores its T x n inclusion matrix
// row-bit-packed, so "does pool t meet set S" is a word-wise AND.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include "gtlab/random.hpp"

namespace gtlab {

/// Fixed-size packed bit vector.
class BitVector {
 public:
  static constexpr std::size_t kWordBits = 64;

  BitVector() = default;
  explicit BitVector(std::size_t size)
      : size_(size), words_(words_for(size), 0) {}

  static constexpr std::size_t words_for(std::size_t bits) {
    return (bits + kWordBits - 1) / kWordBits;
  }

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
  }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i % kWordBits);
    if (value) {
      words_[i / kWordBits] |= bit;
    } else {
      words_[i / kWordBits] &= ~bit;
    }
  }
  std::size_t count() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Strictly increasing list of item indices (a defective set or an estimate).
class ItemSet {
 public:
  using const_iterator = std::vector<std::size_t>::const_iterator;

  ItemSet() = default;
  /// Sorts `items`; throws ParameterError on duplicates.
  explicit ItemSet(std::vector<std::size_t> items);
  ItemSet(std::initializer_list<std::size_t> items)
      : ItemSet(std::vector<std::size_t>(items)) {}

  /// Members of a bit mask, in increasing order.
  static ItemSet from_mask(const BitVector& mask);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool contains(std::size_t item) const;
  /// True iff every member of this set is in `other`.
  bool is_subset_of(const ItemSet& other) const;
  const std::vector<std::size_t>& items() const { return items_; }
  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }

  /// Throws ParameterError if any index is >= n.
  void check_bounds(std::size_t n) const;
  BitVector to_mask(std::size_t n) const;

  friend bool operator==(const ItemSet&, const ItemSet&) = default;

 private:
  std::vector<std::size_t> items_;
};

/// The pooling plan: entry (t, i) is set iff item i is in pool t.
class TestDesign {
 public:
  /// Empty pools. `p` records the Bernoulli parameter the design was drawn
  /// with (NaN when hand-built).
  TestDesign(std::size_t n, std::size_t t,
             double p = std::numeric_limits<double>::quiet_NaN());

  /// Builds a design from explicit pools; throws ParameterError on an index
  /// >= n.
  static TestDesign from_pools(std::size_t n,
                               const std::vector<std::vector<std::size_t>>& pools);

  std::size_t items() const { return n_; }
  std::size_t tests() const { return t_; }
  double p() const { return p_; }

  bool contains(std::size_t test, std::size_t item) const {
    return (bits_[test * stride_ + item / BitVector::kWordBits] >>
            (item % BitVector::kWordBits)) &
           1U;
  }
  void set(std::size_t test, std::size_t item, bool value = true);

  std::span<const std::uint64_t> row(std::size_t test) const {
    return {bits_.data() + test * stride_, stride_};
  }

  /// Does pool `test` contain any item of `mask`? `mask` must have size n.
  bool intersects(std::size_t test, const BitVector& mask) const;
  /// Number of items of `mask` in pool `test`.
  std::size_t count_in(std::size_t test, const BitVector& mask) const;
  /// Total number of (test, item) inclusions.
  std::size_t inclusions() const;

  friend bool operator==(const TestDesign& a, const TestDesign& b) {
    return a.n_ == b.n_ && a.t_ == b.t_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t n_;
  std::size_t t_;
  double p_;
  std::size_t stride_;
  std::vector<std::uint64_t> bits_;
};

/// Test results; entry t is true iff test t is positive.
class Outcomes {
 public:
  Outcomes() = default;
  explicit Outcomes(std::vector<bool> results) : results_(std::move(results)) {}

  std::size_t size() const { return results_.size(); }
  bool positive(std::size_t test) const { return results_[test]; }
  std::size_t positives() const;
  const std::vector<bool>& results() const { return results_; }

  friend bool operator==(const Outcomes&, const Outcomes&) = default;

 private:
  std::vector<bool> results_;
};

/// How to choose the Bernoulli parameter from k.
struct PMode {
  enum class Kind { kReciprocal, kNuOverK };
  Kind kind = Kind::kReciprocal;
  double nu = 1.0;

  static PMode reciprocal() { return {Kind::kReciprocal, 1.0}; }
  static PMode nu_over_k(double nu = 1.0) { return {Kind::kNuOverK, nu}; }
};

/// 1/(k+1) in reciprocal mode; min(nu/k, 1) in nu_over_k mode (1 when k = 0).
double p_from_k(std::size_t k, PMode mode = PMode::reciprocal());

/// Each entry is an independent Bernoulli(p) draw.
TestDesign bernoulli_design(std::size_t n, std::size_t t, double p, Rng& rng);

/// Uniformly random k-subset of [0, n).
ItemSet sample_defective_set(std::size_t n, std::size_t k, Rng& rng);

/// Test t is positive iff its pool meets `defectives`.
Outcomes compute_outcomes(const TestDesign& design, const ItemSet& defectives);

}  // namespace gtlab
