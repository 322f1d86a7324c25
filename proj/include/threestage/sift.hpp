#pragma once

// Parity comparison on random subsets of the key, the way BB84 checks for
// disturbance after sifting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "threestage/errors.hpp"
#include "threestage/qcore.hpp"
#include "threestage/random.hpp"

namespace threestage {

struct ParityRound {
  BitString subset;  // mask over key indices
  std::uint8_t alice_parity = 0;
  std::uint8_t bob_parity = 0;
};

struct SiftReport {
  std::vector<ParityRound> rounds;
  bool detected = false;
  std::set<std::size_t> disclosed_indices;
};

inline std::uint8_t masked_parity(const BitString& key, const BitString& mask) {
  std::uint8_t parity = 0;
  for (std::size_t i = 0; i < key.size(); ++i) parity ^= static_cast<std::uint8_t>(key[i] & mask[i] & 1U);
  return parity;
}

// Uniform over the 2^n - 1 nonempty subsets, by rejecting the empty mask.
inline BitString random_nonempty_subset(std::size_t n, RandomStream& rng) {
  BitString mask(n);
  for (;;) {
    bool any = false;
    for (std::size_t i = 0; i < n; i += 64) {
      std::uint64_t word = rng.next_u64();
      for (std::size_t j = i; j < std::min(n, i + 64); ++j, word >>= 1) {
        mask[j] = static_cast<std::uint8_t>(word & 1U);
        any = any || mask[j];
      }
    }
    if (any) return mask;
  }
}

inline SiftReport parity_check(const BitString& alice_key, const BitString& bob_key, std::size_t rounds,
                               RandomStream& rng) {
  if (alice_key.size() != bob_key.size()) throw DomainError("parity_check: key lengths differ");
  if (alice_key.empty()) throw DomainError("parity_check: keys are empty");
  if (rounds < 1) throw DomainError("parity_check: need at least one round");

  SiftReport report;
  report.rounds.reserve(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    ParityRound round;
    round.subset = random_nonempty_subset(alice_key.size(), rng);
    round.alice_parity = masked_parity(alice_key, round.subset);
    round.bob_parity = masked_parity(bob_key, round.subset);
    for (std::size_t i = 0; i < round.subset.size(); ++i) {
      if (round.subset[i]) report.disclosed_indices.insert(i);
    }
    report.detected = report.detected || round.alice_parity != round.bob_parity;
    report.rounds.push_back(std::move(round));
  }
  return report;
}

// Probability that at least one of `rounds` uniform nonempty subsets has odd
// overlap with a fixed error pattern of the given weight. Any nonzero pattern
// has odd overlap with exactly 2^(n-1) of the 2^n - 1 nonempty subsets.
inline double detection_probability(std::size_t key_length, std::size_t error_weight, std::size_t rounds) {
  if (key_length < 1) throw DomainError("detection_probability: key_length must be positive");
  if (error_weight > key_length) throw DomainError("detection_probability: error_weight exceeds key_length");
  if (rounds < 1) throw DomainError("detection_probability: need at least one round");
  if (error_weight == 0) return 0.0;
  // 2^(n-1) / (2^n - 1) = 1 / (2 - 2^(1-n))
  const double per_round = 1.0 / (2.0 - std::ldexp(1.0, 1 - static_cast<int>(std::min<std::size_t>(key_length, 2000))));
  return 1.0 - std::pow(1.0 - per_round, static_cast<double>(rounds));
}

}  // namespace threestage
