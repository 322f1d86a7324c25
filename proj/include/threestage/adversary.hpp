#pragma once

// Exact and sampled analysis of the exchange under intercept-resend
// eavesdropping and bit-flip noise.
//
// exact_analysis walks every (alice_op, bob_op) pair with uniform weight and,
// inside each pair, the full tree of Eve's measurement outcomes with their
// Born probabilities, ending in Bob's own measurement. No sampling is
// involved, which makes it the reference for every Monte Carlo statistic.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "threestage/channel.hpp"
#include "threestage/opsets.hpp"
#include "threestage/protocol.hpp"
#include "threestage/qcore.hpp"
#include "threestage/random.hpp"

namespace threestage {

// One leaf of the enumeration tree.
struct Branch {
  double probability = 0.0;
  std::size_t alice_member = 0;
  std::size_t bob_member = 0;
  std::vector<std::size_t> eve_outcomes;  // one per attacked stage, in stage order
  std::size_t bob_outcome = 0;
};

namespace detail {

inline void descend(const std::array<const UnitaryOperator*, 3>& senders, const UnitaryOperator& bob_undo,
                    const EveStrategy* eve, std::size_t stage, const StateVector& in_flight, Branch partial,
                    std::vector<Branch>& leaves) {
  if (stage == 3) {
    const auto p = outcome_distribution(apply(bob_undo, in_flight));
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] <= 0.0) continue;
      Branch leaf = partial;
      leaf.probability *= p[k];
      leaf.bob_outcome = k;
      leaves.push_back(std::move(leaf));
    }
    return;
  }
  const StateVector wire = apply(*senders[stage], in_flight);
  if (eve == nullptr || !eve->attacks(kStages[stage])) {
    descend(senders, bob_undo, eve, stage + 1, wire, std::move(partial), leaves);
    return;
  }
  const auto& rot = eve->pre_rotation();
  if (rot && rot->dim() != wire.dim()) throw DomainError("Eve pre-rotation dimension does not match the family");
  const auto p = outcome_distribution(rot ? apply(*rot, wire) : wire);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    const StateVector collapsed = basis_state(k, wire.num_qubits());
    Branch next = partial;
    next.probability *= p[k];
    next.eve_outcomes.push_back(k);
    descend(senders, bob_undo, eve, stage + 1, rot ? apply(adjoint(*rot), collapsed) : collapsed, std::move(next),
            leaves);
  }
}

inline std::size_t hamming(std::size_t a, std::size_t b) { return static_cast<std::size_t>(std::popcount(a ^ b)); }

}  // namespace detail

// All leaves for a fixed secret. eve may be null (clean channel).
inline std::vector<Branch> enumerate_branches(const OperatorFamily& family, const EveStrategy* eve,
                                              const StateVector& secret) {
  if (family.dim() != secret.dim()) throw DomainError("exact analysis: secret dimension does not match the family");
  const double pair_weight = 1.0 / static_cast<double>(family.size() * family.size());
  std::vector<Branch> leaves;
  for (std::size_t a = 0; a < family.size(); ++a) {
    const auto alice_undo = adjoint(family[a]);
    for (std::size_t b = 0; b < family.size(); ++b) {
      if (!commutation_phase(family[a], family[b])) {
        throw NonCommutingPairError("family '" + family.name() + "' contains a non-commuting pair");
      }
      const std::array<const UnitaryOperator*, 3> senders = {&family[a], &family[b], &alice_undo};
      Branch root;
      root.probability = pair_weight;
      root.alice_member = a;
      root.bob_member = b;
      detail::descend(senders, adjoint(family[b]), eve, 0, secret, std::move(root), leaves);
    }
  }
  return leaves;
}

// Eve's maximum-a-posteriori guess of the secret basis index from her
// outcome records, under a uniform prior over all basis secrets and uniform
// operator choices. Ties go to the lowest secret index.
class EveGuesser {
 public:
  EveGuesser(const OperatorFamily& family, const EveStrategy& eve) : dim_(family.dim()) {
    std::map<std::vector<std::size_t>, std::vector<double>> joint;
    const double prior = 1.0 / static_cast<double>(dim_);
    for (std::size_t s = 0; s < dim_; ++s) {
      for (const auto& leaf : enumerate_branches(family, &eve, basis_state(s, family.num_qubits()))) {
        auto& row = joint[leaf.eve_outcomes];
        row.resize(dim_, 0.0);
        row[s] += prior * leaf.probability;
      }
    }
    for (const auto& [records, row] : joint) {
      const double best = *std::max_element(row.begin(), row.end());
      std::size_t guess = 0;
      while (row[guess] < best - kTieTolerance) ++guess;
      table_.emplace(records, guess);
    }
  }

  // Record sequences outside the noise-free table fall back to the first
  // recorded outcome.
  std::size_t guess(const std::vector<std::size_t>& records) const {
    if (auto it = table_.find(records); it != table_.end()) return it->second;
    return records.empty() ? 0 : records.front() % dim_;
  }

  std::size_t guess(const std::vector<EveRecord>& records) const {
    std::vector<std::size_t> outcomes;
    outcomes.reserve(records.size());
    for (const auto& r : records) outcomes.push_back(r.outcome.index);
    return guess(outcomes);
  }

  const std::map<std::vector<std::size_t>, std::size_t>& table() const noexcept { return table_; }

 private:
  static constexpr double kTieTolerance = 1e-12;
  std::size_t dim_;
  std::map<std::vector<std::size_t>, std::size_t> table_;
};

struct ExactAnalysis {
  double bit_error_rate = 0.0;                  // expected fraction of Bob's bits that differ
  double detection_relevant_disturbance = 0.0;  // P(Bob's outcome != secret)
  std::optional<double> eve_guess_success_rate;
  std::size_t branch_count = 0;
  double total_probability = 0.0;
};

inline constexpr double kProbabilityConservationTolerance = 1e-12;

inline ExactAnalysis exact_analysis(const OperatorFamily& family, const std::optional<EveStrategy>& eve,
                                    const StateVector& secret) {
  const auto secret_index = basis_index(secret);
  if (!secret_index) throw DomainError("exact analysis needs a computational basis secret");
  const EveStrategy* eve_ptr = eve ? &*eve : nullptr;
  const auto leaves = enumerate_branches(family, eve_ptr, secret);
  std::optional<EveGuesser> guesser;
  if (eve) guesser.emplace(family, *eve);

  ExactAnalysis result;
  result.branch_count = leaves.size();
  double eve_success = 0.0;
  const double nq = static_cast<double>(family.num_qubits());
  for (const auto& leaf : leaves) {
    result.total_probability += leaf.probability;
    const auto wrong = detail::hamming(leaf.bob_outcome, *secret_index);
    result.bit_error_rate += leaf.probability * static_cast<double>(wrong) / nq;
    if (wrong != 0) result.detection_relevant_disturbance += leaf.probability;
    if (guesser && guesser->guess(leaf.eve_outcomes) == *secret_index) eve_success += leaf.probability;
  }
  if (std::abs(result.total_probability - 1.0) > kProbabilityConservationTolerance) {
    throw std::logic_error("exact analysis lost probability mass");
  }
  if (guesser) result.eve_guess_success_rate = eve_success;
  return result;
}

inline ExactAnalysis exact_analysis(const OperatorFamily& family, const EveStrategy& eve, const StateVector& secret) {
  return exact_analysis(family, std::optional<EveStrategy>(eve), secret);
}

struct MonteCarloEstimate {
  std::size_t trials = 0;
  double bit_error_rate = 0.0;
  double bit_error_rate_stderr = 0.0;
  std::optional<double> eve_guess_success_rate;
  std::optional<double> eve_guess_success_rate_stderr;
};

namespace detail {

// Standard error of the mean from a sum and sum of squares.
inline double standard_error(double sum, double sum_sq, std::size_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1));
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace detail

// Repeats the exchange for a fixed secret with uniformly drawn operator pairs.
// Trial t uses its own stream derived from (seed, t).
inline MonteCarloEstimate monte_carlo_analysis(const OperatorFamily& family, const ChannelContext& ctx,
                                               const StateVector& secret, std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("monte_carlo_analysis needs at least one trial");
  const auto secret_index = basis_index(secret);
  if (!secret_index) throw DomainError("monte_carlo_analysis needs a computational basis secret");
  std::optional<EveGuesser> guesser;
  if (ctx.eve) guesser.emplace(family, *ctx.eve);

  double ber_sum = 0.0, ber_sq = 0.0, eve_sum = 0.0;
  const double nq = static_cast<double>(family.num_qubits());
  for (std::size_t t = 0; t < trials; ++t) {
    RandomStream rng(derive_seed(seed, StreamDomain::kMonteCarlo, t));
    const auto& alice = family[rng.below(family.size())];
    const auto& bob = family[rng.below(family.size())];
    const auto transcript = run_three_stage(secret, alice, bob, ctx, rng);
    const double ber = static_cast<double>(detail::hamming(transcript.measured.index, *secret_index)) / nq;
    ber_sum += ber;
    ber_sq += ber * ber;
    if (guesser && guesser->guess(transcript.eve_records) == *secret_index) eve_sum += 1.0;
  }
  MonteCarloEstimate est;
  est.trials = trials;
  est.bit_error_rate = ber_sum / static_cast<double>(trials);
  est.bit_error_rate_stderr = detail::standard_error(ber_sum, ber_sq, trials);
  if (guesser) {
    est.eve_guess_success_rate = eve_sum / static_cast<double>(trials);
    est.eve_guess_success_rate_stderr = detail::standard_error(eve_sum, eve_sum, trials);
  }
  return est;
}

}  // namespace threestage
