#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "threestage/protocol.hpp"

using namespace threestage;

namespace {

const Complex kI{0.0, 1.0};
const double kH = 1.0 / std::numbers::sqrt2;

void expect_state(const StateVector& psi, std::initializer_list<Complex> expected, double tol = 1e-12) {
  ASSERT_EQ(psi.dim(), expected.size());
  std::size_t k = 0;
  for (const auto& e : expected) {
    EXPECT_LT(std::abs(psi[k] - e), tol) << "index " << k << " got " << psi[k];
    ++k;
  }
}

}  // namespace

TEST(RunThreeStage, IdentityPair) {
  const auto p = pauli_family();
  RandomStream rng(1);
  const auto t = run_three_stage(basis_state(0, 1), p.member("I"), p.member("I"), ChannelContext::clean(), rng);
  for (auto s : kStages) {
    expect_state(t.wire(s), {1, 0});
    expect_state(t.delivered(s), {1, 0});
  }
  expect_state(t.recovered, {1, 0});
  EXPECT_EQ(t.measured.index, 0u);
  EXPECT_TRUE(t.eve_records.empty());
}

TEST(RunThreeStage, PauliXThenY) {
  // Hand oracle: X|0> = |1>, Y|1> = -i|0>, X(-i|0>) = -i|1>, Y(-i|1>) = -|0>.
  const auto p = pauli_family();
  RandomStream rng(2);
  const auto t = run_three_stage(basis_state(0, 1), p.member("X"), p.member("Y"), ChannelContext::clean(), rng);
  expect_state(t.wire(StageLabel::AliceToBob1), {0, 1});
  expect_state(t.wire(StageLabel::BobToAlice2), {-kI, 0});
  expect_state(t.wire(StageLabel::AliceToBob3), {0, -kI});
  expect_state(t.recovered, {-1, 0});
  EXPECT_TRUE(verify_recovery(t));
  EXPECT_EQ(t.measured.index, 0u);
}

TEST(RunThreeStage, HadamardBoth) {
  const auto h = hadamard_family();
  RandomStream rng(3);
  const auto t = run_three_stage(basis_state(1, 1), h.member("L"), h.member("L"), ChannelContext::clean(), rng);
  expect_state(t.wire(StageLabel::AliceToBob1), {kH, -kH});
  expect_state(t.wire(StageLabel::BobToAlice2), {0, 1});
  expect_state(t.wire(StageLabel::AliceToBob3), {kH, -kH});
  expect_state(t.recovered, {0, 1});
  EXPECT_EQ(t.measured.index, 1u);
}

TEST(RunThreeStage, WireStageOneIsAliceImage) {
  RandomStream rng(4);
  for (const auto& f : family_catalog()) {
    for (const auto& a : f.members()) {
      const auto secret = basis_state(f.dim() - 1, f.num_qubits());
      const auto t = run_three_stage(secret, a, f[0], ChannelContext::clean(), rng);
      EXPECT_LT(max_abs_difference(t.wire(StageLabel::AliceToBob1).amplitudes(), apply(a, secret).amplitudes()), 1e-9);
    }
  }
}

TEST(RunThreeStage, RefusesNonCommutingPair) {
  RandomStream rng(5);
  EXPECT_THROW(run_three_stage(basis_state(0, 1), pauli_family().member("X"), hadamard_family().member("L"),
                               ChannelContext::clean(), rng),
               NonCommutingPairError);
  EXPECT_THROW(run_three_stage(basis_state(0, 2), pauli_family().member("X"), pauli_family().member("X"),
                               ChannelContext::clean(), rng),
               DomainError);
}

TEST(VerifyRecovery, DetectsReplacedState) {
  const auto p = pauli_family();
  RandomStream rng(6);
  auto t = run_three_stage(basis_state(0, 1), p.member("Z"), p.member("X"), ChannelContext::clean(), rng);
  EXPECT_TRUE(verify_recovery(t));
  t.recovered = basis_state(1, 1);
  EXPECT_FALSE(verify_recovery(t));
}

TEST(Recovery, ExhaustiveOverFamiliesPairsAndSecrets) {
  RandomStream rng(7);
  std::size_t cases = 0;
  for (const auto& f : family_catalog()) {
    for (const auto& a : f.members()) {
      for (const auto& b : f.members()) {
        for (std::size_t s = 0; s < f.dim(); ++s) {
          const auto t = run_three_stage(basis_state(s, f.num_qubits()), a, b, ChannelContext::clean(), rng);
          EXPECT_TRUE(verify_recovery(t, 1e-9)) << f.name() << " " << a.label() << " " << b.label() << " " << s;
          EXPECT_EQ(t.measured.index, s);
          ++cases;
        }
      }
    }
  }
  EXPECT_EQ(cases, 32u + 8u + 64u + 64u + 64u);
}

TEST(Recovery, PhaseIdentityProperty) {
  // B^dagger A^dagger B A = conj(c) I where A B = c B A.
  for (const auto& f : family_catalog()) {
    for (const auto& a : f.members()) {
      for (const auto& b : f.members()) {
        const auto c = commutation_phase(a, b);
        ASSERT_TRUE(c);
        const auto loop = compose(adjoint(b), compose(adjoint(a), compose(b, a)));
        for (std::size_t r = 0; r < f.dim(); ++r) {
          for (std::size_t col = 0; col < f.dim(); ++col) {
            const Complex expected = r == col ? std::conj(*c) : Complex(0.0);
            EXPECT_LT(std::abs(loop(r, col) - expected), 1e-9);
          }
        }
      }
    }
  }
}
