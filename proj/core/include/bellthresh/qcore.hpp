// Dense complex linear algebra for small bipartite quantum systems.
//
// Everything here works on dimensions of at most a few tens (two qutrits
// give 9), so all storage is dense and row-major. Values are immutable once
// constructed; every free function is pure.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace bellthresh::qcore {

using Complex = std::complex<double>;

/// Tolerances used by the structural checks on operators and states.
inline constexpr double kStructureTol = 1e-12;
inline constexpr double kEigenFloor = -1e-10;
/// Probabilities within this distance outside [0,1] are clamped; anything
/// further out is reported as an internal-consistency error.
inline constexpr double kClampTol = 1e-9;

/// Normalized pure state. Construction normalizes the supplied amplitudes.
class StateVector {
 public:
  explicit StateVector(std::vector<Complex> amps);

  /// Computational basis vector |index> (0-based) of the given dimension.
  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const Complex> amps() const noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

 private:
  std::vector<Complex> amps_;
};

enum class OperatorKind { generic, unitary, projector, density };

const char* to_string(OperatorKind kind) noexcept;

/// Square matrix with a structural tag. Tagged kinds are validated on
/// construction: unitaries satisfy U^dag U = I, projectors P^2 = P = P^dag,
/// density operators are Hermitian, unit-trace and positive semidefinite.
class Operator {
 public:
  Operator(std::size_t dim, std::vector<Complex> entries,
           OperatorKind kind = OperatorKind::generic);

  static Operator identity(std::size_t dim);
  /// |v><v| for a normalized vector, tagged as a projector.
  static Operator projector_onto(const StateVector& v);
  /// |psi><psi| tagged as a density operator.
  static Operator pure_density(const StateVector& psi);

  std::size_t dim() const noexcept { return dim_; }
  OperatorKind kind() const noexcept { return kind_; }
  std::span<const Complex> entries() const noexcept { return entries_; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }

  Operator adjoint() const;
  Complex trace() const;
  /// Same matrix with a different tag; the tag's invariants are re-checked.
  Operator retagged(OperatorKind kind) const;

 private:
  std::size_t dim_;
  std::vector<Complex> entries_;
  OperatorKind kind_;
};

/// A bipartite state, pure or mixed.
using QuantumState = std::variant<StateVector, Operator>;

/// Matrix product. The result is tagged generic unless both factors are
/// unitary.
Operator operator*(const Operator& lhs, const Operator& rhs);
std::vector<Complex> apply(const Operator& op, const StateVector& v);

/// Affine combination w*A + (1-w)*B of two density operators.
Operator mix(const Operator& a, const Operator& b, double weight_a);

// Kronecker product, left factor is the slow index. Tags are preserved when
// both factors share one.
Operator tensor(const Operator& a, const Operator& b);
StateVector tensor(const StateVector& a, const StateVector& b);

/// Dynamically-typed tensor product; mixing a vector with an operator is an
/// invalid-argument error.
using Tensorable = std::variant<StateVector, Operator>;
Tensorable tensor(const Tensorable& a, const Tensorable& b);

/// <psi|P|psi> or Tr(rho P), clamped to [0,1].
double probability(const QuantumState& state, const Operator& proj);

enum class Party { A, B };

/// Marginal probability of a local projector acting on one party.
double partial_projection_probability(const QuantumState& state, Party party,
                                      const Operator& local_proj);

std::size_t dim(const QuantumState& state);

/// True when the Hermitian matrix has no eigenvalue below `floor`.
bool is_positive_semidefinite(const Operator& hermitian, double floor = kEigenFloor);

/// Clamp a computed probability into [0,1]; throws std::logic_error when
/// the excursion is larger than kClampTol.
double clamp_probability(double p);

}  // namespace bellthresh::qcore
