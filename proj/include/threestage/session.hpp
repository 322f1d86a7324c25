#pragma once

// Multi-block key distribution. Each block carries one basis-state secret:
// one bit for 2-dim families, two bits (b1 b0 -> index 2*b1 + b0) for 4-dim
// ones. Bob reads his bits by measuring the recovered state; operator choices
// are never disclosed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "threestage/adversary.hpp"
#include "threestage/channel.hpp"
#include "threestage/opsets.hpp"
#include "threestage/protocol.hpp"
#include "threestage/random.hpp"

namespace threestage {

struct SessionConfig {
  std::string family_name;
  std::size_t blocks = 1;
  std::optional<EveStrategy> eve_strategy;
  std::optional<NoiseModel> noise;
  std::uint64_t seed = 0;
  bool keep_transcripts = true;
};

struct SessionReport {
  BitString alice_bits;
  BitString bob_bits;
  std::vector<Transcript> block_transcripts;
  double bit_error_rate = 0.0;
  std::optional<double> eve_guess_success_rate;
};

inline SessionReport run_key_session(const SessionConfig& config) {
  const OperatorFamily& family = family_by_name(config.family_name);
  if (config.blocks < 1) throw ConfigError("a session needs at least one block");
  const ChannelContext channel{config.eve_strategy, config.noise};
  std::optional<EveGuesser> guesser;
  if (config.eve_strategy) guesser.emplace(family, *config.eve_strategy);

  SessionReport report;
  const int nq = family.num_qubits();
  report.alice_bits.reserve(config.blocks * static_cast<std::size_t>(nq));
  report.bob_bits.reserve(config.blocks * static_cast<std::size_t>(nq));
  if (config.keep_transcripts) report.block_transcripts.reserve(config.blocks);

  std::size_t eve_hits = 0;
  for (std::size_t b = 0; b < config.blocks; ++b) {
    RandomStream rng(derive_seed(config.seed, StreamDomain::kBlock, b));
    const std::size_t secret = rng.below(family.dim());
    const auto& alice = family[rng.below(family.size())];
    const auto& bob = family[rng.below(family.size())];
    auto t = run_three_stage(basis_state(secret, nq), alice, bob, channel, rng);

    const Outcome sent(secret, nq);
    report.alice_bits.insert(report.alice_bits.end(), sent.bits.begin(), sent.bits.end());
    report.bob_bits.insert(report.bob_bits.end(), t.measured.bits.begin(), t.measured.bits.end());
    if (guesser && guesser->guess(t.eve_records) == secret) ++eve_hits;
    if (config.keep_transcripts) report.block_transcripts.push_back(std::move(t));
  }

  std::size_t errors = 0;
  for (std::size_t i = 0; i < report.alice_bits.size(); ++i) errors += report.alice_bits[i] != report.bob_bits[i];
  report.bit_error_rate = static_cast<double>(errors) / static_cast<double>(report.alice_bits.size());
  if (guesser) report.eve_guess_success_rate = static_cast<double>(eve_hits) / static_cast<double>(config.blocks);
  return report;
}

}  // namespace threestage
