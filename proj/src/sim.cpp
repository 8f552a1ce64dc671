#include "gtlab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "gtlab/errors.hpp"

namespace gtlab::sim {
namespace {

struct DecoderName {
  Decoder decoder;
  const char* name;
};

constexpr DecoderName kDecoderNames[] = {
    {Decoder::kComp, "comp"},
    {Decoder::kDd, "dd"},
    {Decoder::kScomp, "scomp"},
    {Decoder::kLpMalioutov, "lp-malioutov"},
    {Decoder::kLpCrude, "lp-crude"},
    {Decoder::kLpHalf, "lp-half"},
    {Decoder::kLpRandomized, "lp-randomized"},
    {Decoder::kOracle, "oracle"},
};

// Stream tags for seeds derived from a trial seed.
constexpr std::uint64_t kDecoderStream = 0x64656300;
constexpr std::uint64_t kAuditStream = 0x61756400;

std::string describe(const ItemSet& set) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const auto i : set) {
    out << (first ? "" : ",") << i;
    first = false;
  }
  out << '}';
  return out.str();
}

}  // namespace

std::string to_string(Decoder decoder) {
  for (const auto& entry : kDecoderNames) {
    if (entry.decoder == decoder) return entry.name;
  }
  return "unknown";
}

std::optional<Decoder> parse_decoder(const std::string& name) {
  for (const auto& entry : kDecoderNames) {
    if (name == entry.name) return entry.decoder;
  }
  return std::nullopt;
}

const std::vector<Decoder>& all_decoders() {
  static const std::vector<Decoder> decoders = [] {
    std::vector<Decoder> out;
    for (const auto& entry : kDecoderNames) out.push_back(entry.decoder);
    return out;
  }();
  return decoders;
}

double PChoice::resolve(std::size_t k) const {
  switch (kind) {
    case Kind::kReciprocal:
      return p_from_k(k, PMode::reciprocal());
    case Kind::kNuOverK:
      return p_from_k(k, PMode::nu_over_k(value));
    case Kind::kExplicit:
      if (!(value >= 0.0 && value <= 1.0)) throw ParameterError("p must lie in [0, 1]");
      return value;
  }
  return 0.0;
}

void SweepConfig::validate() const {
  if (n == 0) throw ParameterError("n must be positive");
  if (k > n) throw ParameterError("k must not exceed n");
  if (trials == 0) throw ParameterError("trials must be positive");
  if (t_values.empty()) throw ParameterError("at least one t value is required");
  if (t_values.front() == 0) throw ParameterError("t values must be positive");
  for (std::size_t i = 1; i < t_values.size(); ++i) {
    if (t_values[i] <= t_values[i - 1]) {
      throw ParameterError("t values must be strictly increasing");
    }
  }
  if (decoders.empty()) throw ParameterError("at least one decoder is required");
  const bool wants_oracle =
      std::find(decoders.begin(), decoders.end(), Decoder::kOracle) != decoders.end();
  if (wants_oracle && n > kOracleMaxItems) {
    throw ParameterError("the oracle decoder needs n <= " + std::to_string(kOracleMaxItems));
  }
  p_mode.resolve(k);
}

Instance make_instance(std::size_t n, std::size_t k, double p, std::size_t t,
                       std::uint64_t seed) {
  Rng rng = make_rng(seed);
  ItemSet defectives = sample_defective_set(n, k, rng);
  TestDesign design = bernoulli_design(n, t, p, rng);
  Outcomes outcomes = compute_outcomes(design, defectives);
  return {std::move(defectives), std::move(design), std::move(outcomes)};
}

namespace {

DecodeResult decode_with(const Instance& inst, Decoder decoder, std::uint64_t seed,
                         TieRule::Kind tie) {
  Rng rng = make_rng(seed);
  switch (decoder) {
    case Decoder::kComp:
      return comp_decode(inst.design, inst.outcomes);
    case Decoder::kDd:
      return dd_decode(inst.design, inst.outcomes);
    case Decoder::kScomp:
      return scomp_decode(inst.design, inst.outcomes,
                          tie == TieRule::Kind::kRandom ? TieRule::random(seed)
                                                        : TieRule::lowest());
    case Decoder::kLpMalioutov:
      return lp_decode(inst.design, inst.outcomes, Rounding::kMalioutov, rng);
    case Decoder::kLpCrude:
      return lp_decode(inst.design, inst.outcomes, Rounding::kCrude, rng);
    case Decoder::kLpHalf:
      return lp_decode(inst.design, inst.outcomes, Rounding::kHalf, rng);
    case Decoder::kLpRandomized:
      return lp_decode(inst.design, inst.outcomes, Rounding::kRandomized, rng);
    case Decoder::kOracle: {
      const OracleResult oracle =
          smallest_satisfying_oracle(inst.design, inst.outcomes, inst.design.items());
      DecodeResult result;
      result.possible_defectives = possible_defectives(inst.design, inst.outcomes).size();
      if (oracle.status == OracleResult::Status::kUnique) {
        result.estimate = oracle.set;
      } else {
        result.failed = true;
        result.failure = "oracle: " + gtlab::to_string(oracle.status);
      }
      result.satisfying = is_satisfying(inst.design, inst.outcomes, result.estimate);
      result.unexplained_tests =
          count_unexplained(inst.design, inst.outcomes, result.estimate);
      return result;
    }
  }
  throw ParameterError("unknown decoder");
}

}  // namespace

TrialResult run_decoder(const Instance& instance, Decoder decoder, std::uint64_t seed,
                        TieRule::Kind tie) {
  const auto start = std::chrono::steady_clock::now();
  TrialResult trial;
  trial.decode = decode_with(instance, decoder, seed, tie);
  trial.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  trial.success = !trial.decode.failed && trial.decode.estimate == instance.defectives;
  return trial;
}

TrialResult run_trial(std::size_t n, std::size_t k, double p, std::size_t t,
                      Decoder decoder, std::uint64_t trial_seed) {
  const Instance instance = make_instance(n, k, p, t, trial_seed);
  return run_decoder(instance, decoder,
                     derive_seed(trial_seed, kDecoderStream, static_cast<std::uint64_t>(decoder)));
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (error) std::rethrow_exception(error);
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                          double z) {
  if (trials == 0) return {0.0, 1.0};
  const double nt = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double centre = (phat + z2 / (2.0 * nt)) / (1.0 + z2 / nt);
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nt + z2 / (4.0 * nt * nt)) / (1.0 + z2 / nt);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

const SweepRow* SweepResult::find(Decoder decoder, std::size_t t) const {
  for (const auto& row : rows) {
    if (row.decoder == decoder && row.t == t) return &row;
  }
  return nullptr;
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const double p = config.p_mode.resolve(config.k);
  const std::size_t nd = config.decoders.size();
  const std::size_t cells = config.t_values.size() * config.trials;

  struct Record {
    bool success = false;
    bool agrees_with_dd = false;
    double seconds = 0.0;
  };
  struct Cell {
    bool dd_satisfying = false;
    bool dd_success = false;
    std::vector<Record> records;
  };
  std::vector<Cell> results(cells);

  parallel_for(cells, config.threads, [&](std::size_t cell) {
    const std::size_t ti = cell / config.trials;
    const std::size_t trial = cell % config.trials;
    const std::size_t t = config.t_values[ti];
    const std::uint64_t seed = derive_seed(config.master_seed, t, trial);
    const Instance inst = make_instance(config.n, config.k, p, t, seed);
    const DecodeResult dd = dd_decode(inst.design, inst.outcomes);

    Cell& out = results[cell];
    out.dd_satisfying = dd.satisfying;
    out.dd_success = dd.estimate == inst.defectives;
    out.records.resize(nd);
    for (std::size_t d = 0; d < nd; ++d) {
      const Decoder decoder = config.decoders[d];
      const TrialResult trial_result = run_decoder(
          inst, decoder,
          derive_seed(seed, kDecoderStream, static_cast<std::uint64_t>(decoder)),
          config.tie);
      out.records[d] = {trial_result.success,
                        !trial_result.decode.failed && trial_result.decode.estimate == dd.estimate,
                        trial_result.seconds};
    }
  });

  SweepResult sweep;
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t ti = 0; ti < config.t_values.size(); ++ti) {
      SweepRow row;
      row.decoder = config.decoders[d];
      row.t = config.t_values[ti];
      row.trials = config.trials;
      // COMP is not guaranteed to beat DD; DD against itself is trivial
      const bool guarded =
          row.decoder != Decoder::kComp && row.decoder != Decoder::kDd;
      double seconds = 0.0;
      for (std::size_t trial = 0; trial < config.trials; ++trial) {
        const Cell& cell = results[ti * config.trials + trial];
        const Record& rec = cell.records[d];
        row.successes += rec.success ? 1 : 0;
        seconds += rec.seconds;
        if (cell.dd_satisfying) {
          ++row.dd_satisfying;
          row.dd_agreement += rec.agrees_with_dd ? 1 : 0;
        }
        if (guarded && cell.dd_success && !rec.success) ++row.dominance_violations;
      }
      row.success_rate =
          static_cast<double>(row.successes) / static_cast<double>(row.trials);
      std::tie(row.ci_low, row.ci_high) = wilson_interval(row.successes, row.trials);
      row.mean_decode_seconds = seconds / static_cast<double>(row.trials);
      sweep.rows.push_back(row);
    }
  }
  return sweep;
}

std::size_t AuditReport::total_violations() const {
  std::size_t total = 0;
  for (const auto& check : checks) total += check.violations;
  return total;
}

const AuditCheck* AuditReport::find(const std::string& name) const {
  for (const auto& check : checks) {
    if (check.name == name) return &check;
  }
  return nullptr;
}

AuditReport& AuditReport::operator+=(const AuditReport& other) {
  instances += other.instances;
  dd_satisfying += other.dd_satisfying;
  dd_success += other.dd_success;
  for (const auto& check : other.checks) {
    auto it = std::find_if(checks.begin(), checks.end(),
                           [&](const AuditCheck& c) { return c.name == check.name; });
    if (it == checks.end()) {
      checks.push_back(check);
    } else {
      it->checked += check.checked;
      it->violations += check.violations;
    }
  }
  counterexamples.insert(counterexamples.end(), other.counterexamples.begin(),
                         other.counterexamples.end());
  return *this;
}

AuditReport property_p_audit(std::size_t n, std::size_t k, double p, std::size_t t,
                             std::size_t trials, std::uint64_t master_seed,
                             const AuditOptions& options) {
  const bool use_oracle = options.oracle.value_or(n <= kOracleMaxItems);
  if (use_oracle && n > kOracleMaxItems) {
    throw ParameterError("the oracle audit needs n <= " + std::to_string(kOracleMaxItems));
  }

  const std::vector<std::string> names = [&] {
    std::vector<std::string> out{"scomp",   "scomp-random",  "lp-malioutov", "lp-half",
                                 "lp-crude", "lp-randomized", "lp-integral"};
    if (use_oracle) out.push_back("oracle-unique");
    return out;
  }();
  constexpr Rounding kRules[] = {Rounding::kMalioutov, Rounding::kHalf, Rounding::kCrude,
                                 Rounding::kRandomized};

  struct Cell {
    bool dd_satisfying = false;
    bool dd_success = false;
    std::vector<char> violated;
    std::string counterexample;
  };
  std::vector<Cell> cells(trials);

  parallel_for(trials, options.threads, [&](std::size_t trial) {
    const std::uint64_t seed = derive_seed(master_seed, t, trial);
    const Instance inst = make_instance(n, k, p, t, seed);
    const DecodeResult dd = dd_decode(inst.design, inst.outcomes);
    Cell& cell = cells[trial];
    cell.dd_success = dd.estimate == inst.defectives;
    cell.dd_satisfying = dd.satisfying;
    if (!dd.satisfying) return;

    cell.violated.assign(names.size(), 0);
    std::ostringstream why;
    auto flag = [&](std::size_t check, const std::string& detail) {
      cell.violated[check] = 1;
      why << ' ' << names[check] << ": " << detail << ';';
    };

    const DecodeResult scomp = scomp_decode(inst.design, inst.outcomes);
    if (scomp.estimate != dd.estimate) flag(0, describe(scomp.estimate));
    const DecodeResult scomp_random = scomp_decode(
        inst.design, inst.outcomes, TieRule::random(derive_seed(seed, kAuditStream, 0)));
    if (scomp_random.estimate != dd.estimate) flag(1, describe(scomp_random.estimate));

    const LpSolution lp = simplex_solve(build_relaxation(inst.design, inst.outcomes));
    for (std::size_t r = 0; r < std::size(kRules); ++r) {
      Rng rng = make_rng(derive_seed(seed, kAuditStream, r + 1));
      const auto rounded = round_solution(lp, kRules[r], rng);
      if (!rounded) {
        flag(2 + r, "global error");
      } else if (*rounded != dd.estimate) {
        flag(2 + r, describe(*rounded));
      }
    }
    bool matches_indicator = lp.integral;
    for (std::size_t i = 0; i < n && matches_indicator; ++i) {
      const double want = dd.estimate.contains(i) ? 1.0 : 0.0;
      matches_indicator = std::abs(lp.values[i] - want) <= kLpTolerance;
    }
    if (!matches_indicator) flag(6, "objective " + std::to_string(lp.objective));

    if (use_oracle) {
      const OracleResult oracle = smallest_satisfying_oracle(inst.design, inst.outcomes, n);
      if (oracle.status != OracleResult::Status::kUnique || oracle.set != dd.estimate) {
        flag(7, gtlab::to_string(oracle.status) + " " + describe(oracle.set));
      }
    }
    const std::string detail = why.str();
    if (!detail.empty()) {
      cell.counterexample = "seed " + std::to_string(seed) + " (n=" + std::to_string(n) +
                            " k=" + std::to_string(k) + " t=" + std::to_string(t) +
                            ") dd=" + describe(dd.estimate) + ":" + detail;
    }
  });

  AuditReport report;
  report.instances = trials;
  for (const auto& name : names) report.checks.push_back({name, 0, 0});
  for (const auto& cell : cells) {
    report.dd_success += cell.dd_success ? 1 : 0;
    if (!cell.dd_satisfying) continue;
    ++report.dd_satisfying;
    for (std::size_t c = 0; c < names.size(); ++c) {
      ++report.checks[c].checked;
      report.checks[c].violations += cell.violated[c] ? 1 : 0;
    }
    if (!cell.counterexample.empty() &&
        report.counterexamples.size() < options.max_counterexamples) {
      report.counterexamples.push_back(cell.counterexample);
    }
  }
  return report;
}

}  // namespace gtlab::sim
