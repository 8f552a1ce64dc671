#pragma once

// COMP, DD and SCOMP decoders, satisfying-set checks and the exhaustive
// smallest-satisfying-set oracle.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gtlab/design.hpp"

namespace gtlab {

struct DecodeResult {
  ItemSet estimate;
  /// Whether `estimate` explains every test.
  bool satisfying = false;
  /// Definite defectives; filled by DD, SCOMP and the LP decoder.
  ItemSet dd_core;
  std::size_t possible_defectives = 0;
  /// Positive tests containing no member of `estimate`.
  std::size_t unexplained_tests = 0;
  /// Set when the decoder declared a global error (estimate is then empty).
  bool failed = false;
  std::string failure;
};

/// SCOMP tie-breaking among candidates in equally many unexplained tests.
struct TieRule {
  enum class Kind { kLowestIndex, kRandom };
  Kind kind = Kind::kLowestIndex;
  std::uint64_t seed = 0;

  static TieRule lowest() { return {}; }
  static TieRule random(std::uint64_t seed) { return {Kind::kRandom, seed}; }
};

/// Throws InputError unless outcomes.size() == design.tests().
void check_dimensions(const TestDesign& design, const Outcomes& outcomes);

/// Items in no negative test. Items that are in no test at all qualify.
BitVector possible_defective_mask(const TestDesign& design, const Outcomes& outcomes);
ItemSet possible_defectives(const TestDesign& design, const Outcomes& outcomes);

/// Items that are the only possible defective in some positive test.
ItemSet definite_defectives(const TestDesign& design, const Outcomes& outcomes);

bool is_satisfying(const TestDesign& design, const Outcomes& outcomes,
                   const ItemSet& candidate);

/// Positive tests that `candidate` does not hit.
std::size_t count_unexplained(const TestDesign& design, const Outcomes& outcomes,
                              const ItemSet& candidate);

DecodeResult comp_decode(const TestDesign& design, const Outcomes& outcomes);
DecodeResult dd_decode(const TestDesign& design, const Outcomes& outcomes);

/// Starts from the DD set and greedily adds the possible defective lying in
/// the most unexplained tests until every positive test is explained.
DecodeResult scomp_decode(const TestDesign& design, const Outcomes& outcomes,
                          TieRule tie = TieRule::lowest());

struct OracleResult {
  enum class Status { kUnique, kAmbiguous, kNoneWithinCap };
  Status status = Status::kNoneWithinCap;
  /// The unique minimum when status is kUnique, else the first minimum found
  /// (kAmbiguous) or empty.
  ItemSet set;
  /// Minimum size when one was found.
  std::size_t min_size = 0;
  /// Satisfying sets of the minimum size seen; counting stops at 2.
  std::size_t minimizers = 0;
};

/// Most possible defectives the oracle agrees to enumerate.
inline constexpr std::size_t kOracleMaxCandidates = 25;

/// Exhaustive search over subsets of the possible defectives by increasing
/// size, up to `size_cap`. Throws CapacityError with more than
/// kOracleMaxCandidates possible defectives.
OracleResult smallest_satisfying_oracle(const TestDesign& design,
                                        const Outcomes& outcomes,
                                        std::size_t size_cap);

std::string to_string(OracleResult::Status status);

}  // namespace gtlab
