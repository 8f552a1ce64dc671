#include "gtlab/decode.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "gtlab/errors.hpp"

namespace gtlab {
namespace {

template <typename Fn>
void for_each_bit_in_and(std::span<const std::uint64_t> a,
                         std::span<const std::uint64_t> b, Fn&& fn) {
  for (std::size_t w = 0; w < a.size(); ++w) {
    std::uint64_t word = a[w] & b[w];
    while (word != 0) {
      fn(w * BitVector::kWordBits + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
}

DecodeResult finish(const TestDesign& design, const Outcomes& outcomes,
                    ItemSet estimate, ItemSet core, std::size_t pd_count) {
  DecodeResult result;
  result.satisfying = is_satisfying(design, outcomes, estimate);
  result.unexplained_tests = count_unexplained(design, outcomes, estimate);
  result.estimate = std::move(estimate);
  result.dd_core = std::move(core);
  result.possible_defectives = pd_count;
  return result;
}

}  // namespace

void check_dimensions(const TestDesign& design, const Outcomes& outcomes) {
  if (outcomes.size() != design.tests()) {
    throw InputError("outcome vector has " + std::to_string(outcomes.size()) +
                     " entries but the design has " +
                     std::to_string(design.tests()) + " tests");
  }
}

BitVector possible_defective_mask(const TestDesign& design, const Outcomes& outcomes) {
  check_dimensions(design, outcomes);
  BitVector eliminated(design.items());
  auto words = eliminated.words();
  for (std::size_t t = 0; t < design.tests(); ++t) {
    if (outcomes.positive(t)) continue;
    const auto row = design.row(t);
    for (std::size_t w = 0; w < words.size(); ++w) words[w] |= row[w];
  }
  BitVector pd(design.items());
  for (std::size_t i = 0; i < design.items(); ++i) {
    if (!eliminated.test(i)) pd.set(i);
  }
  return pd;
}

ItemSet possible_defectives(const TestDesign& design, const Outcomes& outcomes) {
  return ItemSet::from_mask(possible_defective_mask(design, outcomes));
}

namespace {

ItemSet definite_from_mask(const TestDesign& design, const Outcomes& outcomes,
                           const BitVector& pd) {
  BitVector definite(design.items());
  for (std::size_t t = 0; t < design.tests(); ++t) {
    if (!outcomes.positive(t) || design.count_in(t, pd) != 1) continue;
    for_each_bit_in_and(design.row(t), pd.words(),
                        [&](std::size_t i) { definite.set(i); });
  }
  return ItemSet::from_mask(definite);
}

}  // namespace

ItemSet definite_defectives(const TestDesign& design, const Outcomes& outcomes) {
  return definite_from_mask(design, outcomes, possible_defective_mask(design, outcomes));
}

bool is_satisfying(const TestDesign& design, const Outcomes& outcomes,
                   const ItemSet& candidate) {
  check_dimensions(design, outcomes);
  const BitVector mask = candidate.to_mask(design.items());
  for (std::size_t t = 0; t < design.tests(); ++t) {
    if (design.intersects(t, mask) != outcomes.positive(t)) return false;
  }
  return true;
}

std::size_t count_unexplained(const TestDesign& design, const Outcomes& outcomes,
                              const ItemSet& candidate) {
  check_dimensions(design, outcomes);
  const BitVector mask = candidate.to_mask(design.items());
  std::size_t unexplained = 0;
  for (std::size_t t = 0; t < design.tests(); ++t) {
    if (outcomes.positive(t) && !design.intersects(t, mask)) ++unexplained;
  }
  return unexplained;
}

DecodeResult comp_decode(const TestDesign& design, const Outcomes& outcomes) {
  const BitVector pd = possible_defective_mask(design, outcomes);
  const std::size_t pd_count = pd.count();
  return finish(design, outcomes, ItemSet::from_mask(pd), ItemSet{}, pd_count);
}

DecodeResult dd_decode(const TestDesign& design, const Outcomes& outcomes) {
  const BitVector pd = possible_defective_mask(design, outcomes);
  ItemSet definite = definite_from_mask(design, outcomes, pd);
  ItemSet estimate = definite;
  return finish(design, outcomes, std::move(estimate), std::move(definite), pd.count());
}

DecodeResult scomp_decode(const TestDesign& design, const Outcomes& outcomes,
                          TieRule tie) {
  const std::size_t n = design.items();
  const BitVector pd = possible_defective_mask(design, outcomes);
  const ItemSet core = definite_from_mask(design, outcomes, pd);

  BitVector chosen = core.to_mask(n);
  BitVector candidates = pd;
  for (const auto i : core) candidates.set(i, false);

  // Unexplained positive tests and, per candidate, how many of them it is in.
  std::vector<char> unexplained(design.tests(), 0);
  std::vector<std::size_t> hits(n, 0);
  std::size_t remaining = 0;
  for (std::size_t t = 0; t < design.tests(); ++t) {
    if (!outcomes.positive(t) || design.intersects(t, chosen)) continue;
    unexplained[t] = 1;
    ++remaining;
    for_each_bit_in_and(design.row(t), candidates.words(),
                        [&](std::size_t i) { ++hits[i]; });
  }

  Rng tie_rng = make_rng(tie.seed);
  std::vector<std::size_t> tied;
  while (remaining > 0) {
    std::size_t best = 0;
    tied.clear();
    for_each_bit_in_and(candidates.words(), candidates.words(), [&](std::size_t i) {
      if (hits[i] > best) {
        best = hits[i];
        tied.assign(1, i);
      } else if (hits[i] == best && best > 0) {
        tied.push_back(i);
      }
    });
    // An unexplained test with no possible defective cannot arise from the
    // noiseless model; stop rather than loop.
    if (best == 0) break;
    const std::size_t pick =
        tie.kind == TieRule::Kind::kRandom && tied.size() > 1
            ? tied[static_cast<std::size_t>(uniform_below(tie_rng, tied.size()))]
            : tied.front();

    chosen.set(pick);
    candidates.set(pick, false);
    hits[pick] = 0;
    for (std::size_t t = 0; t < design.tests(); ++t) {
      if (!unexplained[t] || !design.contains(t, pick)) continue;
      unexplained[t] = 0;
      --remaining;
      for_each_bit_in_and(design.row(t), candidates.words(),
                          [&](std::size_t i) { --hits[i]; });
    }
  }
  return finish(design, outcomes, ItemSet::from_mask(chosen), core, pd.count());
}

OracleResult smallest_satisfying_oracle(const TestDesign& design,
                                        const Outcomes& outcomes,
                                        std::size_t size_cap) {
  const ItemSet pd = possible_defectives(design, outcomes);
  const std::size_t m = pd.size();
  if (m > kOracleMaxCandidates) {
    throw CapacityError("oracle asked to enumerate " + std::to_string(m) +
                        " possible defectives (limit " +
                        std::to_string(kOracleMaxCandidates) + ")");
  }
  // Each positive test as a mask over possible-defective positions. Subsets of
  // possible defectives avoid every negative test by construction.
  std::vector<std::uint32_t> covers;
  for (std::size_t t = 0; t < design.tests(); ++t) {
    if (!outcomes.positive(t)) continue;
    std::uint32_t mask = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (design.contains(t, pd.items()[j])) mask |= std::uint32_t{1} << j;
    }
    covers.push_back(mask);
  }
  std::sort(covers.begin(), covers.end());
  covers.erase(std::unique(covers.begin(), covers.end()), covers.end());

  auto satisfies = [&](std::uint32_t subset) {
    return std::all_of(covers.begin(), covers.end(),
                       [subset](std::uint32_t c) { return (c & subset) != 0; });
  };
  auto to_items = [&](std::uint32_t subset) {
    std::vector<std::size_t> items;
    for (std::size_t j = 0; j < m; ++j) {
      if ((subset >> j) & 1U) items.push_back(pd.items()[j]);
    }
    return ItemSet(std::move(items));
  };

  OracleResult result;
  const std::size_t top = std::min(size_cap, m);
  for (std::size_t size = 0; size <= top; ++size) {
    std::size_t found = 0;
    std::uint32_t first = 0;
    if (size == 0) {
      if (satisfies(0)) {
        found = 1;
      }
    } else {
      // Gosper's hack: all m-bit words with `size` bits set, in order.
      const std::uint64_t limit = std::uint64_t{1} << m;
      std::uint64_t subset = (std::uint64_t{1} << size) - 1;
      while (subset < limit) {
        if (satisfies(static_cast<std::uint32_t>(subset))) {
          if (found++ == 0) first = static_cast<std::uint32_t>(subset);
          if (found > 1) break;
        }
        const std::uint64_t low = subset & (~subset + 1);
        const std::uint64_t ripple = subset + low;
        subset = (((ripple ^ subset) >> 2) / low) | ripple;
      }
    }
    if (found > 0) {
      result.status = found == 1 ? OracleResult::Status::kUnique
                                 : OracleResult::Status::kAmbiguous;
      result.set = to_items(first);
      result.min_size = size;
      result.minimizers = found;
      return result;
    }
  }
  return result;
}

std::string to_string(OracleResult::Status status) {
  switch (status) {
    case OracleResult::Status::kUnique:
      return "unique";
    case OracleResult::Status::kAmbiguous:
      return "ambiguous";
    case OracleResult::Status::kNoneWithinCap:
      return "none-within-cap";
  }
  return "unknown";
}

}  // namespace gtlab
