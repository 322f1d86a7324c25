#pragma once

// The four-step three-stage exchange:
//   1. Alice sends U_A S.
//   2. Bob applies U_B and returns U_B U_A S.
//   3. Alice removes U_A (U_A^dagger) and forwards U_B S up to phase.
//   4. Bob removes U_B (U_B^dagger) and measures S.
// Exactly three channel transmissions occur, one per stage.

#include <array>
#include <vector>

#include "threestage/channel.hpp"
#include "threestage/errors.hpp"
#include "threestage/opsets.hpp"
#include "threestage/qcore.hpp"

namespace threestage {

struct Transcript {
  StateVector secret;
  UnitaryOperator alice_op;
  UnitaryOperator bob_op;
  std::array<StateVector, 3> wire_states;       // as it left the sender, indexed by stage
  std::array<StateVector, 3> delivered_states;  // after Eve and noise
  StateVector recovered;
  Outcome measured;
  std::vector<EveRecord> eve_records;

  const StateVector& wire(StageLabel s) const { return wire_states[stage_index(s)]; }
  const StateVector& delivered(StageLabel s) const { return delivered_states[stage_index(s)]; }
};

inline Transcript run_three_stage(const StateVector& secret, const UnitaryOperator& alice_op,
                                  const UnitaryOperator& bob_op, const ChannelContext& channel, RandomStream& rng) {
  if (alice_op.dim() != secret.dim() || bob_op.dim() != secret.dim()) {
    throw DomainError("operator dimensions do not match the secret");
  }
  if (!commutation_phase(alice_op, bob_op)) {
    throw NonCommutingPairError("operators '" + alice_op.label() + "' and '" + bob_op.label() +
                                "' do not commute up to a global phase");
  }

  Transcript t{secret, alice_op, bob_op, {}, {}, {}, {}, {}};
  StateVector in_flight = secret;
  const std::array<UnitaryOperator, 3> senders = {alice_op, bob_op, adjoint(alice_op)};
  for (auto stage : kStages) {
    const std::size_t s = stage_index(stage);
    t.wire_states[s] = apply(senders[s], in_flight);
    auto [delivered, record] = transmit(stage, t.wire_states[s], channel, rng);
    t.delivered_states[s] = delivered;
    if (record) t.eve_records.push_back(std::move(*record));
    in_flight = std::move(delivered);
  }
  t.recovered = apply(adjoint(bob_op), in_flight);
  t.measured = measure(t.recovered, rng).first;
  return t;
}

inline bool verify_recovery(const Transcript& t, double tol = kDerivedTolerance) {
  return equal_up_to_global_phase(t.recovered, t.secret, tol);
}

}  // namespace threestage
