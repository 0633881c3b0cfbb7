// Physical realizations of the two-party, two-setting experiments: qutrits
// prepared through a tritter, qutrits encoded in degenerate biphoton
// polarization, and the polarization-qubit baseline.
//
// Index conventions used throughout the library: settings, outcomes and
// basis states are 0-based here. The physics notation |1>,|2>,|3> maps to
// 0,1,2, and setting "1"/"2" maps to 0/1.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bellthresh/qcore.hpp"

namespace bellthresh::scenarios {

using qcore::Complex;
using qcore::Operator;
using qcore::Party;
using qcore::QuantumState;
using qcore::StateVector;

enum class Kind { tritter, biphoton, qubit };

/// Which two biphoton projectors play the outcome roles 1 and 2 of the
/// functional. The remaining projector takes role 3.
enum class OutcomePair { none, p1p2, p1p3, p2p3 };

const char* to_string(Kind kind) noexcept;
const char* to_string(OutcomePair pair) noexcept;
Kind parse_kind(const std::string& text);
OutcomePair parse_outcome_pair(const std::string& text);

/// Real Schmidt-coefficient ratios of |11> + a|22> + b|33>; `b` is ignored
/// for qubits.
struct EntanglementParams {
  double a = 1.0;
  double b = 1.0;

  friend bool operator==(const EntanglementParams&, const EntanglementParams&) = default;
};

/// Box bounds of one optimization coordinate.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

class Scenario {
 public:
  static Scenario tritter();
  static Scenario biphoton(OutcomePair outcomes);
  static Scenario qubit();

  Kind kind() const noexcept { return kind_; }
  OutcomePair outcomes() const noexcept { return outcomes_; }
  /// Local Hilbert-space dimension (3 for qutrits, 2 for qubits).
  std::size_t local_dim() const noexcept;
  std::size_t outcome_count() const noexcept { return local_dim(); }
  /// Free coordinates per party and setting: two tritter phases
  /// (phi_1 is gauged to zero) or one polarizer angle.
  std::size_t coords_per_setting() const noexcept;
  std::size_t setting_coords() const noexcept { return 4 * coords_per_setting(); }
  /// Number of free entanglement parameters: (a, b) for qutrits, a for qubits.
  std::size_t entanglement_coords() const noexcept;
  /// Period of each setting coordinate: 2 pi for phases, pi for polarizer angles.
  double setting_period() const noexcept;
  /// Default search box for the entanglement parameters.
  std::vector<Interval> entanglement_bounds() const;
  bool is_qutrit() const noexcept { return kind_ != Kind::qubit; }
  std::string name() const;

 private:
  Scenario(Kind kind, OutcomePair outcomes) : kind_(kind), outcomes_(outcomes) {}

  Kind kind_;
  OutcomePair outcomes_;
};

/// Setting coordinates laid out as [A setting 0, A setting 1, B setting 0,
/// B setting 1], each block `coords_per_setting` long. Values are reduced
/// into [0, period).
class SettingParams {
 public:
  SettingParams(const Scenario& sc, std::vector<double> coords);

  std::span<const double> local(Party party, std::size_t setting) const;
  std::span<const double> coords() const noexcept { return coords_; }
  std::size_t coords_per_setting() const noexcept { return per_setting_; }

 private:
  std::size_t per_setting_;
  std::vector<double> coords_;
};

// --- tritter qutrits --------------------------------------------------------

/// U_kl = exp(i 2pi/3 k l) exp(i phi_l) / sqrt(3) with 0-based k,l.
Operator tritter_unitary(const std::array<double, 3>& phases);

/// (|11> + a|22> + b|33>) / sqrt(1 + a^2 + b^2), dimension 9. Used both for
/// the tritter and the biphoton encoding.
StateVector tritter_state(const EntanglementParams& p);

// --- qubits -----------------------------------------------------------------

/// (|00> + a|11>) / sqrt(1 + a^2).
StateVector qubit_state(double a);

/// Polarizer at angle theta: pass projects on cos|0> + sin|1>.
std::pair<Operator, Operator> qubit_projectors(double theta);

// --- biphoton qutrits -------------------------------------------------------

/// Rotated two-photon basis vectors in the ordered basis (|HH>, |HV>, |VV>):
/// both photons along theta, both along theta + pi/2, one of each.
std::array<std::array<double, 3>, 3> biphoton_basis(double theta);

/// (P1, P2, P3) for a polarization analysis at angle theta.
std::array<Operator, 3> biphoton_projectors(double theta);

// --- common -----------------------------------------------------------------

/// Pure entangled state of the scenario.
StateVector entangled_state(const Scenario& sc, const EntanglementParams& p);

/// Rank-1 measurement of one party in one setting. Row r of `rows` is the
/// bra <v_r| of the outcome with role r, so the outcome amplitude on a local
/// vector x is (rows * x)_r.
struct LocalMeasurement {
  std::size_t dim = 0;
  std::array<Complex, 9> rows{};  // dim x dim, row-major

  Operator projector(std::size_t outcome) const;
};

LocalMeasurement local_measurement(const Scenario& sc, const SettingParams& settings,
                                   Party party, std::size_t setting);

/// P^{ij}(k,l) through the general projector path (qcore::probability on
/// the tensor product of local projectors). All indices 0-based.
double joint_probability(const Scenario& sc, const QuantumState& state,
                         const SettingParams& settings, std::size_t i, std::size_t j,
                         std::size_t k, std::size_t l);

/// P^i_n(k) through qcore::partial_projection_probability.
double single_probability(const Scenario& sc, const QuantumState& state,
                          const SettingParams& settings, Party party, std::size_t i,
                          std::size_t k);

/// (1-F)|psi><psi| + F I/d.
Operator mix_with_noise(const StateVector& state, double noise);

/// Every joint and single probability the two-setting functionals can ask
/// for, computed in one pass by contracting the rank-1 measurements with the
/// state. This is the hot path of the optimizer.
class ProbabilityTable {
 public:
  ProbabilityTable(const Scenario& sc, const QuantumState& state, const SettingParams& settings);

  std::size_t outcomes() const noexcept { return d_; }
  double joint(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return joint_[((i * 2 + j) * 3 + k) * 3 + l];
  }
  double single(Party party, std::size_t i, std::size_t k) const {
    return single_[((party == Party::A ? 0 : 1) * 2 + i) * 3 + k];
  }

 private:
  std::size_t d_;
  // Sized for the largest local dimension (3); qubits leave the tail at 0.
  std::array<double, 36> joint_{};
  std::array<double, 12> single_{};
};

}  // namespace bellthresh::scenarios
