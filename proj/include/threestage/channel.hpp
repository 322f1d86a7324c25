#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "threestage/errors.hpp"
#include "threestage/qcore.hpp"

namespace threestage {

enum class StageLabel { AliceToBob1 = 0, BobToAlice2 = 1, AliceToBob3 = 2 };

inline constexpr std::array<StageLabel, 3> kStages = {StageLabel::AliceToBob1, StageLabel::BobToAlice2,
                                                      StageLabel::AliceToBob3};

inline constexpr std::size_t stage_index(StageLabel s) { return static_cast<std::size_t>(s); }

// 1-based stage number as used on the command line.
inline constexpr int stage_number(StageLabel s) { return static_cast<int>(s) + 1; }

inline StageLabel stage_from_number(int n) {
  if (n < 1 || n > 3) throw DomainError("stage number must be 1, 2 or 3, got " + std::to_string(n));
  return static_cast<StageLabel>(n - 1);
}

inline const char* to_string(StageLabel s) {
  switch (s) {
    case StageLabel::AliceToBob1: return "AliceToBob1";
    case StageLabel::BobToAlice2: return "BobToAlice2";
    case StageLabel::AliceToBob3: return "AliceToBob3";
  }
  return "?";
}

// Intercept-resend eavesdropper. When pre_rotation R is set, Eve measures
// R psi in the computational basis and resends R^dagger |k>.
class EveStrategy {
 public:
  explicit EveStrategy(std::vector<StageLabel> stages, std::optional<UnitaryOperator> pre_rotation = std::nullopt)
      : pre_rotation_(std::move(pre_rotation)) {
    for (auto s : stages) attacked_[stage_index(s)] = true;
    if (stages.empty()) throw DomainError("Eve must attack at least one stage");
  }

  bool attacks(StageLabel s) const noexcept { return attacked_[stage_index(s)]; }
  const std::optional<UnitaryOperator>& pre_rotation() const noexcept { return pre_rotation_; }

  std::vector<StageLabel> stages() const {
    std::vector<StageLabel> out;
    for (auto s : kStages) {
      if (attacks(s)) out.push_back(s);
    }
    return out;
  }

 private:
  std::array<bool, 3> attacked_{};
  std::optional<UnitaryOperator> pre_rotation_;
};

// Independent bit flip on each qubit of each transmission.
class NoiseModel {
 public:
  explicit NoiseModel(double bit_flip_probability) : p_(bit_flip_probability) {
    if (!(p_ >= 0.0 && p_ <= 1.0)) throw DomainError("bit-flip probability must lie in [0, 1]");
  }
  double bit_flip_probability() const noexcept { return p_; }

 private:
  double p_;
};

struct ChannelContext {
  std::optional<EveStrategy> eve;
  std::optional<NoiseModel> noise;

  static ChannelContext clean() { return {}; }
};

struct EveRecord {
  StageLabel stage;
  Outcome outcome;

  friend bool operator==(const EveRecord&, const EveRecord&) = default;
};

// Pauli X on one qubit: swaps the amplitudes whose indices differ in that bit.
inline StateVector flip_qubit(const StateVector& psi, int qubit) {
  if (qubit < 0 || qubit >= psi.num_qubits()) throw DomainError("qubit index out of range");
  const std::size_t mask = std::size_t{1} << (psi.num_qubits() - 1 - qubit);
  std::array<Complex, kMaxDim> out{};
  for (std::size_t k = 0; k < psi.dim(); ++k) out[k ^ mask] = psi[k];
  return StateVector(std::span<const Complex>(out.data(), psi.dim()));
}

// Eve's intercept-resend on one transiting state (no noise).
inline std::pair<StateVector, Outcome> intercept(const EveStrategy& eve, const StateVector& psi, RandomStream& rng) {
  const auto& rot = eve.pre_rotation();
  if (rot && rot->dim() != psi.dim()) throw DomainError("Eve pre-rotation dimension does not match the state");
  auto [outcome, collapsed] = measure(rot ? apply(*rot, psi) : psi, rng);
  return {rot ? apply(adjoint(*rot), collapsed) : collapsed, outcome};
}

// One pass over the channel: Eve (if she attacks this stage), then noise.
inline std::pair<StateVector, std::optional<EveRecord>> transmit(StageLabel stage, const StateVector& psi,
                                                                 const ChannelContext& ctx, RandomStream& rng) {
  StateVector out = psi;
  std::optional<EveRecord> record;
  if (ctx.eve && ctx.eve->attacks(stage)) {
    auto [resent, outcome] = intercept(*ctx.eve, psi, rng);
    out = std::move(resent);
    record = EveRecord{stage, std::move(outcome)};
  }
  if (ctx.noise) {
    for (int q = 0; q < out.num_qubits(); ++q) {
      if (rng.bernoulli(ctx.noise->bit_flip_probability())) out = flip_qubit(out, q);
    }
  }
  return {std::move(out), std::move(record)};
}

}  // namespace threestage
