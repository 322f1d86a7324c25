#pragma once

// Dense complex linear algebra for one- and two-qubit systems:
// state vectors, unitary operators, computational-basis measurement and
// global-phase-equivalent comparison.
//
// Qubit ordering: in amplitude index k, qubit 0 is the most significant bit,
// so a two-qubit basis reads |00>, |01>, |10>, |11>.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "threestage/errors.hpp"
#include "threestage/random.hpp"

namespace threestage {

using Complex = std::complex<double>;
using BitString = std::vector<std::uint8_t>;

// Tolerance for quantities computed through products of operators.
inline constexpr double kDerivedTolerance = 1e-9;
// Tolerance for directly constructed matrices.
inline constexpr double kExactTolerance = 1e-12;

inline constexpr int kMaxQubits = 2;
inline constexpr std::size_t kMaxDim = std::size_t{1} << kMaxQubits;

namespace detail {

inline bool is_finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline int qubits_for_dim(std::size_t dim) {
  if (dim == 2) return 1;
  if (dim == 4) return 2;
  throw DomainError("unsupported dimension " + std::to_string(dim) + " (expected 2 or 4)");
}

}  // namespace detail

class StateVector {
 public:
  // |0>
  StateVector() : num_qubits_(1) { amps_[0] = 1.0; }

  explicit StateVector(std::span<const Complex> amplitudes)
      : num_qubits_(detail::qubits_for_dim(amplitudes.size())) {
    std::copy(amplitudes.begin(), amplitudes.end(), amps_.begin());
    validate();
  }

  StateVector(std::initializer_list<Complex> amplitudes)
      : StateVector(std::span<const Complex>(amplitudes.begin(), amplitudes.size())) {}

  int num_qubits() const noexcept { return num_qubits_; }
  std::size_t dim() const noexcept { return std::size_t{1} << num_qubits_; }

  std::span<const Complex> amplitudes() const noexcept { return {amps_.data(), dim()}; }
  const Complex& operator[](std::size_t k) const { return amps_.at(k); }

  double norm() const {
    double sum = 0.0;
    for (const auto& a : amplitudes()) sum += std::norm(a);
    return std::sqrt(sum);
  }

 private:
  void validate() const {
    for (const auto& a : amplitudes()) {
      if (!detail::is_finite(a)) throw DomainError("state amplitude is not finite");
    }
    if (std::abs(norm() - 1.0) > kDerivedTolerance) {
      throw DomainError("state is not normalized (norm " + std::to_string(norm()) + ")");
    }
  }

  int num_qubits_;
  std::array<Complex, kMaxDim> amps_{};
};

// Square complex matrix, row-major, verified unitary on construction.
class UnitaryOperator {
 public:
  UnitaryOperator(std::size_t dim, std::span<const Complex> row_major, std::string label,
                  double tol = kDerivedTolerance)
      : dim_(dim), label_(std::move(label)) {
    detail::qubits_for_dim(dim);
    if (row_major.size() != dim * dim) {
      throw DomainError("operator '" + label_ + "' needs " + std::to_string(dim * dim) + " entries");
    }
    std::copy(row_major.begin(), row_major.end(), m_.begin());
    for (std::size_t i = 0; i < dim * dim; ++i) {
      if (!detail::is_finite(m_[i])) throw DomainError("operator '" + label_ + "' has a non-finite entry");
    }
    const double dev = unitarity_deviation();
    if (dev > tol) {
      throw DomainError("operator '" + label_ + "' is not unitary (deviation " + std::to_string(dev) + ")");
    }
  }

  UnitaryOperator(std::string label, std::initializer_list<std::initializer_list<Complex>> rows)
      : UnitaryOperator(rows.size(), flatten(rows), std::move(label)) {}

  static UnitaryOperator identity(std::size_t dim, std::string label = "I") {
    std::array<Complex, kMaxDim * kMaxDim> m{};
    for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = 1.0;
    return UnitaryOperator(dim, std::span<const Complex>(m.data(), dim * dim), std::move(label));
  }

  std::size_t dim() const noexcept { return dim_; }
  int num_qubits() const noexcept { return detail::qubits_for_dim(dim_); }
  const std::string& label() const noexcept { return label_; }

  const Complex& operator()(std::size_t row, std::size_t col) const { return m_[row * dim_ + col]; }
  std::span<const Complex> entries() const noexcept { return {m_.data(), dim_ * dim_}; }

  // max |(U^dagger U - I)_ij|
  double unitarity_deviation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) s += std::conj(m_[k * dim_ + i]) * m_[k * dim_ + j];
        worst = std::max(worst, std::abs(s - (i == j ? Complex(1.0) : Complex(0.0))));
      }
    }
    return worst;
  }

 private:
  static std::vector<Complex> flatten(std::initializer_list<std::initializer_list<Complex>> rows) {
    std::vector<Complex> out;
    for (const auto& row : rows) {
      if (row.size() != rows.size()) throw DomainError("operator rows must form a square matrix");
      out.insert(out.end(), row.begin(), row.end());
    }
    return out;
  }

  std::size_t dim_;
  std::array<Complex, kMaxDim * kMaxDim> m_{};
  std::string label_;
};

// Measurement result. bits lists qubit 0 (most significant) first.
struct Outcome {
  std::size_t index = 0;
  BitString bits;

  Outcome() = default;
  Outcome(std::size_t idx, int num_qubits) : index(idx), bits(static_cast<std::size_t>(num_qubits)) {
    for (int q = 0; q < num_qubits; ++q) {
      bits[static_cast<std::size_t>(q)] = static_cast<std::uint8_t>((idx >> (num_qubits - 1 - q)) & 1U);
    }
  }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

inline StateVector basis_state(std::size_t index, int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw DomainError("num_qubits must be 1 or 2, got " + std::to_string(num_qubits));
  }
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) {
    throw DomainError("basis index " + std::to_string(index) + " out of range for " +
                      std::to_string(num_qubits) + " qubit(s)");
  }
  std::array<Complex, kMaxDim> amps{};
  amps[index] = 1.0;
  return StateVector(std::span<const Complex>(amps.data(), dim));
}

inline StateVector apply(const UnitaryOperator& u, const StateVector& psi) {
  if (u.dim() != psi.dim()) {
    throw DomainError("cannot apply " + std::to_string(u.dim()) + "-dim operator '" + u.label() +
                      "' to a " + std::to_string(psi.dim()) + "-dim state");
  }
  std::array<Complex, kMaxDim> out{};
  for (std::size_t i = 0; i < u.dim(); ++i) {
    for (std::size_t j = 0; j < u.dim(); ++j) out[i] += u(i, j) * psi[j];
  }
  return StateVector(std::span<const Complex>(out.data(), u.dim()));
}

// Matrix product u * v (v acts first).
inline UnitaryOperator compose(const UnitaryOperator& u, const UnitaryOperator& v) {
  if (u.dim() != v.dim()) {
    throw DomainError("cannot compose '" + u.label() + "' and '" + v.label() + "': dimension mismatch");
  }
  const std::size_t n = u.dim();
  std::array<Complex, kMaxDim * kMaxDim> m{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) m[i * n + j] += u(i, k) * v(k, j);
    }
  }
  return UnitaryOperator(n, std::span<const Complex>(m.data(), n * n), u.label() + v.label());
}

inline UnitaryOperator adjoint(const UnitaryOperator& u) {
  const std::size_t n = u.dim();
  std::array<Complex, kMaxDim * kMaxDim> m{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = std::conj(u(j, i));
  }
  return UnitaryOperator(n, std::span<const Complex>(m.data(), n * n), u.label() + "†");
}

// Kronecker product u (x) v of two single-qubit operators; u acts on qubit 0.
inline UnitaryOperator tensor(const UnitaryOperator& u, const UnitaryOperator& v) {
  if (u.dim() != 2 || v.dim() != 2) {
    throw DomainError("tensor supports only 2x2 factors");
  }
  std::array<Complex, 16> m{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) m[i * 4 + j] = u(i / 2, j / 2) * v(i % 2, j % 2);
  }
  return UnitaryOperator(4, m, u.label() + "⊗" + v.label());
}

// c * u for a unit-modulus c.
inline UnitaryOperator scaled(const UnitaryOperator& u, Complex c, std::string label) {
  if (std::abs(std::abs(c) - 1.0) > kDerivedTolerance) throw DomainError("scale factor must have unit modulus");
  const std::size_t n = u.dim();
  std::array<Complex, kMaxDim * kMaxDim> m{};
  for (std::size_t i = 0; i < n * n; ++i) m[i] = c * u.entries()[i];
  return UnitaryOperator(n, std::span<const Complex>(m.data(), n * n), std::move(label));
}

inline double max_abs_difference(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw DomainError("size mismatch in comparison");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

namespace detail {

// Finds unit-modulus c with a = c * b entrywise within tol, pivoting on the
// largest-modulus entry of b.
inline std::optional<Complex> proportionality_phase(std::span<const Complex> a, std::span<const Complex> b,
                                                    double tol) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch in phase comparison");
  std::size_t pivot = 0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (std::abs(b[i]) > std::abs(b[pivot])) pivot = i;
  }
  if (std::abs(b[pivot]) <= tol) return std::nullopt;
  const Complex c = a[pivot] / b[pivot];
  if (std::abs(std::abs(c) - 1.0) > tol) return std::nullopt;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - c * b[i]) > tol) return std::nullopt;
  }
  return c;
}

}  // namespace detail

inline bool equal_up_to_global_phase(const StateVector& a, const StateVector& b, double tol = kDerivedTolerance) {
  if (a.dim() != b.dim()) throw DomainError("cannot compare states of different dimension");
  return detail::proportionality_phase(a.amplitudes(), b.amplitudes(), tol).has_value();
}

// Unit scalar c with a = c * b, if one exists.
inline std::optional<Complex> operator_phase(const UnitaryOperator& a, const UnitaryOperator& b,
                                             double tol = kDerivedTolerance) {
  if (a.dim() != b.dim()) throw DomainError("cannot compare operators of different dimension");
  return detail::proportionality_phase(a.entries(), b.entries(), tol);
}

inline std::vector<double> outcome_distribution(const StateVector& psi) {
  std::vector<double> p;
  p.reserve(psi.dim());
  for (const auto& a : psi.amplitudes()) p.push_back(std::norm(a));
  return p;
}

// Full computational-basis measurement; the state collapses to basis_state(k).
inline std::pair<Outcome, StateVector> measure(const StateVector& psi, RandomStream& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t chosen = psi.dim();
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < psi.dim(); ++k) {
    const double p = std::norm(psi[k]);
    if (p > 0.0) last_nonzero = k;
    cumulative += p;
    if (chosen == psi.dim() && u < cumulative && p > 0.0) chosen = k;
  }
  // Rounding can leave the cumulative sum a hair below u.
  if (chosen == psi.dim()) chosen = last_nonzero;
  return {Outcome(chosen, psi.num_qubits()), basis_state(chosen, psi.num_qubits())};
}

// Projective measurement of one qubit of a (possibly multi-qubit) state.
// Returns the bit and the renormalized conditional state.
inline std::pair<std::uint8_t, StateVector> measure_qubit(const StateVector& psi, int qubit, RandomStream& rng) {
  if (qubit < 0 || qubit >= psi.num_qubits()) throw DomainError("qubit index out of range");
  const std::size_t mask = std::size_t{1} << (psi.num_qubits() - 1 - qubit);
  double p_one = 0.0;
  for (std::size_t k = 0; k < psi.dim(); ++k) {
    if (k & mask) p_one += std::norm(psi[k]);
  }
  std::uint8_t bit = rng.uniform() < p_one ? 1 : 0;
  if (bit == 1 && p_one <= 0.0) bit = 0;
  if (bit == 0 && p_one >= 1.0) bit = 1;
  const double p = bit ? p_one : 1.0 - p_one;
  const double scale = 1.0 / std::sqrt(p);
  std::array<Complex, kMaxDim> out{};
  for (std::size_t k = 0; k < psi.dim(); ++k) {
    if (static_cast<bool>(k & mask) == static_cast<bool>(bit)) out[k] = psi[k] * scale;
  }
  return {bit, StateVector(std::span<const Complex>(out.data(), psi.dim()))};
}

// Index of the basis state psi equals up to phase, if it is one.
inline std::optional<std::size_t> basis_index(const StateVector& psi, double tol = kDerivedTolerance) {
  for (std::size_t k = 0; k < psi.dim(); ++k) {
    if (std::abs(std::abs(psi[k]) - 1.0) <= tol) return k;
  }
  return std::nullopt;
}

}  // namespace threestage
