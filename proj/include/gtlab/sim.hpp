#pragma once

// Monte Carlo success-probability sweeps and the Property P audit.
//
// Trial seeds are derive_seed(master_seed, t, trial), so results do not depend
// on the number of worker threads. All decoders in a trial see the same
// design, defective set and outcomes.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gtlab/decode.hpp"
#include "gtlab/design.hpp"
#include "gtlab/lp.hpp"

namespace gtlab::sim {

enum class Decoder {
  kComp,
  kDd,
  kScomp,
  kLpMalioutov,
  kLpCrude,
  kLpHalf,
  kLpRandomized,
  kOracle,
};

std::string to_string(Decoder decoder);
std::optional<Decoder> parse_decoder(const std::string& name);
const std::vector<Decoder>& all_decoders();

/// Largest n for which the oracle decoder may be requested.
inline constexpr std::size_t kOracleMaxItems = 25;

/// How a sweep picks its Bernoulli parameter.
struct PChoice {
  enum class Kind { kReciprocal, kNuOverK, kExplicit };
  Kind kind = Kind::kReciprocal;
  double value = 1.0;

  static PChoice reciprocal() { return {}; }
  static PChoice nu_over_k(double nu) { return {Kind::kNuOverK, nu}; }
  static PChoice explicit_p(double p) { return {Kind::kExplicit, p}; }

  double resolve(std::size_t k) const;
};

struct SweepConfig {
  std::size_t n = 0;
  std::size_t k = 0;
  PChoice p_mode;
  std::vector<std::size_t> t_values;
  std::size_t trials = 1;
  std::vector<Decoder> decoders;
  std::uint64_t master_seed = 0;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 1;
  TieRule::Kind tie = TieRule::Kind::kLowestIndex;

  /// Throws ParameterError on an invalid configuration.
  void validate() const;
};

struct Instance {
  ItemSet defectives;
  TestDesign design;
  Outcomes outcomes;
};

/// Draws K, then the design, from one stream seeded with `seed`.
Instance make_instance(std::size_t n, std::size_t k, double p, std::size_t t,
                       std::uint64_t seed);

struct TrialResult {
  bool success = false;
  DecodeResult decode;
  double seconds = 0.0;
};

/// Decodes one instance. `seed` drives any decoder randomness (random ties,
/// randomized rounding).
TrialResult run_decoder(const Instance& instance, Decoder decoder, std::uint64_t seed,
                        TieRule::Kind tie = TieRule::Kind::kLowestIndex);

/// Samples an instance from `trial_seed` and decodes it; success is exact
/// recovery of K.
TrialResult run_trial(std::size_t n, std::size_t k, double p, std::size_t t,
                      Decoder decoder, std::uint64_t trial_seed);

struct SweepRow {
  Decoder decoder = Decoder::kDd;
  std::size_t t = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_decode_seconds = 0.0;
  /// Trials in which DD's output was satisfying.
  std::size_t dd_satisfying = 0;
  /// Of those, trials where this decoder returned the DD set.
  std::size_t dd_agreement = 0;
  /// Trials where DD succeeded but this decoder did not.
  std::size_t dominance_violations = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  const SweepRow* find(Decoder decoder, std::size_t t) const;
};

SweepResult run_sweep(const SweepConfig& config);

/// Wilson score interval for `successes` out of `trials` at normal quantile z.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                          double z = 1.959963984540054);

struct AuditCheck {
  std::string name;
  std::size_t checked = 0;
  std::size_t violations = 0;
};

struct AuditReport {
  std::size_t instances = 0;
  std::size_t dd_satisfying = 0;
  std::size_t dd_success = 0;
  /// One entry per algorithm whose output must equal DD's whenever DD's
  /// output is satisfying, plus "lp-integral" and, when run, "oracle-unique".
  std::vector<AuditCheck> checks;
  /// Human-readable descriptions of the first few violations.
  std::vector<std::string> counterexamples;

  std::size_t total_violations() const;
  const AuditCheck* find(const std::string& name) const;
  AuditReport& operator+=(const AuditReport& other);
};

struct AuditOptions {
  /// Run the oracle; nullopt enables it exactly when n <= kOracleMaxItems.
  std::optional<bool> oracle;
  unsigned threads = 1;
  std::size_t max_counterexamples = 10;
};

AuditReport property_p_audit(std::size_t n, std::size_t k, double p, std::size_t t,
                             std::size_t trials, std::uint64_t master_seed,
                             const AuditOptions& options = {});

/// Runs fn(i) for i in [0, count) on `threads` workers (0 = hardware).
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace gtlab::sim
