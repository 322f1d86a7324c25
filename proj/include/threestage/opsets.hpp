#pragma once

// The commuting operator families the two parties draw their secret
// transformations from, and the algebraic checks the exchange relies on.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "threestage/errors.hpp"
#include "threestage/qcore.hpp"

namespace threestage {

// Named set of same-dimension unitaries. Construction checks only shape;
// commutation and closure are reported by verify_family so that ad hoc
// (possibly invalid) families can be examined.
class OperatorFamily {
 public:
  OperatorFamily(std::string name, std::vector<UnitaryOperator> members)
      : name_(std::move(name)), members_(std::move(members)) {
    if (members_.empty()) throw DomainError("operator family '" + name_ + "' is empty");
    for (const auto& m : members_) {
      if (m.dim() != members_.front().dim()) {
        throw DomainError("operator family '" + name_ + "' mixes dimensions");
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return members_.front().dim(); }
  int num_qubits() const noexcept { return members_.front().num_qubits(); }
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<UnitaryOperator>& members() const noexcept { return members_; }
  const UnitaryOperator& operator[](std::size_t i) const { return members_.at(i); }

  const UnitaryOperator& member(std::string_view label) const {
    for (const auto& m : members_) {
      if (m.label() == label) return m;
    }
    throw DomainError("family '" + name_ + "' has no member '" + std::string(label) + "'");
  }

 private:
  std::string name_;
  std::vector<UnitaryOperator> members_;
};

namespace detail {
inline const Complex kI{0.0, 1.0};
inline const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
}  // namespace detail

inline OperatorFamily pauli_family() {
  using detail::kI;
  return OperatorFamily("pauli", {
                                     UnitaryOperator("I", {{1, 0}, {0, 1}}),
                                     UnitaryOperator("X", {{0, 1}, {1, 0}}),
                                     UnitaryOperator("Y", {{0, -kI}, {kI, 0}}),
                                     UnitaryOperator("Z", {{1, 0}, {0, -1}}),
                                 });
}

// Do-nothing K and Hadamard L.
inline OperatorFamily hadamard_family() {
  const double h = detail::kInvSqrt2;
  return OperatorFamily("hadamard", {
                                        UnitaryOperator("K", {{1, 0}, {0, 1}}),
                                        UnitaryOperator("L", {{h, h}, {h, -h}}),
                                    });
}

// The two controlled-NOT style permutations, completed with the identity and
// their product so that each party holds a secret choice.
inline OperatorFamily controlled_pair_family() {
  const UnitaryOperator ua("UA", {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
  const UnitaryOperator ub("UB", {{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  return OperatorFamily("controlled-pair", {UnitaryOperator::identity(4, "I4"), ua, ub, compose(ua, ub)});
}

// Four-point DFT and its powers. {I4, F} alone is not closed: F^2 is the
// index-negation permutation.
inline OperatorFamily dft_family() {
  using detail::kI;
  const UnitaryOperator f("F", {{0.5, 0.5, 0.5, 0.5},
                                {0.5, 0.5 * kI, -0.5, -0.5 * kI},
                                {0.5, -0.5, 0.5, -0.5},
                                {0.5, -0.5 * kI, -0.5, 0.5 * kI}});
  const UnitaryOperator f2 = compose(f, f);
  const UnitaryOperator f3 = compose(f2, f);
  return OperatorFamily("dft", {UnitaryOperator::identity(4, "I4"), f,
                                UnitaryOperator(4, f2.entries(), "F2"), UnitaryOperator(4, f3.entries(), "F3")});
}

inline OperatorFamily quaternion_family() {
  return OperatorFamily("quaternion", {
                                          UnitaryOperator("Qi", {{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}}),
                                          UnitaryOperator("Qj", {{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}}),
                                          UnitaryOperator("Qk", {{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}}),
                                          UnitaryOperator::identity(4, "Q1"),
                                      });
}

inline const std::vector<OperatorFamily>& family_catalog() {
  static const std::vector<OperatorFamily> catalog = {pauli_family(), hadamard_family(), controlled_pair_family(),
                                                      dft_family(), quaternion_family()};
  return catalog;
}

inline const OperatorFamily& family_by_name(std::string_view name) {
  for (const auto& f : family_catalog()) {
    if (f.name() == name) return f;
  }
  throw ConfigError("unknown operator family '" + std::string(name) + "'");
}

// First catalog member with this label and dimension.
inline const UnitaryOperator& catalog_operator(std::string_view label, std::size_t dim) {
  for (const auto& f : family_catalog()) {
    if (f.dim() != dim) continue;
    for (const auto& m : f.members()) {
      if (m.label() == label) return m;
    }
  }
  throw ConfigError("no " + std::to_string(dim) + "-dim operator labelled '" + std::string(label) + "'");
}

// Unit scalar c with U V = c (V U), extracted at the largest entry of V U.
inline std::optional<Complex> commutation_phase(const UnitaryOperator& u, const UnitaryOperator& v,
                                                double tol = kDerivedTolerance) {
  if (u.dim() != v.dim()) throw DomainError("commutation_phase: dimension mismatch");
  return operator_phase(compose(u, v), compose(v, u), tol);
}

struct ClosureWitness {
  std::size_t member = 0;
  Complex phase;
};

struct PairCheck {
  std::size_t left = 0;
  std::size_t right = 0;
  std::optional<Complex> commutation;
  std::optional<ClosureWitness> closure;
};

struct FamilyReport {
  std::string family;
  std::vector<PairCheck> pairs;  // every ordered pair, row-major
  bool contains_identity = false;
  bool passed = false;
};

inline FamilyReport verify_family(const OperatorFamily& family, double tol = kDerivedTolerance) {
  FamilyReport report{family.name(), {}, false, true};
  const auto identity = UnitaryOperator::identity(family.dim());
  for (const auto& m : family.members()) {
    if (operator_phase(m, identity, tol)) report.contains_identity = true;
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = 0; j < family.size(); ++j) {
      PairCheck check{i, j, commutation_phase(family[i], family[j], tol), std::nullopt};
      const auto product = compose(family[i], family[j]);
      for (std::size_t k = 0; k < family.size() && !check.closure; ++k) {
        if (auto c = operator_phase(product, family[k], tol)) check.closure = ClosureWitness{k, *c};
      }
      if (!check.commutation || !check.closure) report.passed = false;
      report.pairs.push_back(check);
    }
  }
  report.passed = report.passed && report.contains_identity;
  return report;
}

// Outcome distribution when a uniformly random member is applied to input.
inline std::vector<double> aggregate_outcome_distribution(const OperatorFamily& family, const StateVector& input) {
  if (family.dim() != input.dim()) throw DomainError("aggregate_outcome_distribution: dimension mismatch");
  std::vector<double> total(input.dim(), 0.0);
  for (const auto& u : family.members()) {
    const auto p = outcome_distribution(apply(u, input));
    for (std::size_t k = 0; k < p.size(); ++k) total[k] += p[k];
  }
  for (auto& p : total) p /= static_cast<double>(family.size());
  return total;
}

// True when a uniformly random member maps input to every outcome with equal
// probability.
inline bool is_equiprobable(const OperatorFamily& family, const StateVector& input, double tol = kDerivedTolerance) {
  const auto p = aggregate_outcome_distribution(family, input);
  const double target = 1.0 / static_cast<double>(p.size());
  return std::all_of(p.begin(), p.end(), [&](double x) { return std::abs(x - target) <= tol; });
}

// Fraction of members that put a basis-state input into a superposition.
inline double superposition_probability(const OperatorFamily& family, const StateVector& input,
                                        double tol = kDerivedTolerance) {
  if (family.dim() != input.dim()) throw DomainError("superposition_probability: dimension mismatch");
  if (!basis_index(input, tol)) throw DomainError("superposition_probability: input is not a basis state");
  std::size_t count = 0;
  for (const auto& u : family.members()) {
    const auto out = apply(u, input);
    const auto support = std::count_if(out.amplitudes().begin(), out.amplitudes().end(),
                                       [&](const Complex& a) { return std::abs(a) > tol; });
    if (support >= 2) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(family.size());
}

// True if every member sends every basis state to a basis state up to phase.
inline bool is_basis_transparent(const OperatorFamily& family, double tol = kDerivedTolerance) {
  for (const auto& u : family.members()) {
    for (std::size_t k = 0; k < family.dim(); ++k) {
      if (!basis_index(apply(u, basis_state(k, family.num_qubits())), tol)) return false;
    }
  }
  return true;
}

enum class PauliLabel { I, X, Y, Z };

inline constexpr std::array<PauliLabel, 4> kPauliScanOrder = {PauliLabel::I, PauliLabel::X, PauliLabel::Y,
                                                               PauliLabel::Z};

inline const char* to_string(PauliLabel p) {
  switch (p) {
    case PauliLabel::I: return "I";
    case PauliLabel::X: return "X";
    case PauliLabel::Y: return "Y";
    case PauliLabel::Z: return "Z";
  }
  return "?";
}

inline const UnitaryOperator& pauli(PauliLabel p) {
  static const OperatorFamily family = pauli_family();
  return family[static_cast<std::size_t>(p)];
}

struct PhaseDecomposition {
  PauliLabel left = PauliLabel::I;
  PauliLabel right = PauliLabel::I;
  Complex phase{1.0, 0.0};

  UnitaryOperator reconstruct() const {
    return scaled(tensor(pauli(left), pauli(right)), phase, std::string(to_string(left)) + to_string(right));
  }
};

// Scans left in I,X,Y,Z, then right in I,X,Y,Z, then phase in 1,-1,i,-i;
// the first candidate c (P (x) Q) equal to u within tol wins.
inline std::optional<PhaseDecomposition> pauli_tensor_decompose(const UnitaryOperator& u,
                                                                double tol = kDerivedTolerance) {
  if (u.dim() != 4) throw DomainError("pauli_tensor_decompose needs a 4x4 operator");
  const std::array<Complex, 4> phases = {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)};
  for (auto left : kPauliScanOrder) {
    for (auto right : kPauliScanOrder) {
      const auto product = tensor(pauli(left), pauli(right));
      for (const auto& c : phases) {
        bool match = true;
        for (std::size_t i = 0; i < 16 && match; ++i) {
          match = std::abs(u.entries()[i] - c * product.entries()[i]) <= tol;
        }
        if (match) return PhaseDecomposition{left, right, c};
      }
    }
  }
  return std::nullopt;
}

}  // namespace threestage
