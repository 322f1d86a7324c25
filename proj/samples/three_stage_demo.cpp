// Walks one exchange per family and prints what crosses the channel.

#include <cstdio>

#include "threestage/threestage.hpp"

using namespace threestage;

static void print_state(const char* tag, const StateVector& psi) {
  std::printf("  %-10s", tag);
  for (const auto& a : psi.amplitudes()) std::printf(" (%+.3f%+.3fi)", a.real(), a.imag());
  std::printf("\n");
}

int main() {
  RandomStream rng(2024);
  for (const auto& family : family_catalog()) {
    const auto& alice = family[rng.below(family.size())];
    const auto& bob = family[rng.below(family.size())];
    const auto secret = basis_state(rng.below(family.dim()), family.num_qubits());
    const auto t = run_three_stage(secret, alice, bob, ChannelContext::clean(), rng);

    std::printf("%s: Alice %s, Bob %s\n", family.name().c_str(), alice.label().c_str(), bob.label().c_str());
    print_state("secret", t.secret);
    for (auto s : kStages) print_state(to_string(s), t.wire(s));
    print_state("recovered", t.recovered);
    std::printf("  recovered == secret up to phase: %s\n", verify_recovery(t) ? "yes" : "no");
  }

  const auto& hadamard = family_by_name("hadamard");
  const EveStrategy eve({StageLabel::AliceToBob1});
  const auto exact = exact_analysis(hadamard, eve, basis_state(0, 1));
  std::printf("hadamard, Eve on stage 1: bit error rate %.4f, Eve guesses right %.4f\n", exact.bit_error_rate,
              *exact.eve_guess_success_rate);
  return 0;
}
