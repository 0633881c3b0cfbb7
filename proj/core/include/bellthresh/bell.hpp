// Clauser-Horne-type Bell functionals as signed term tables.
//
// A functional is a list of joint terms sign * P^{ij}(k,l) and single terms
// sign * P^i_n(k); its local-hidden-variable bound is the maximum over all
// deterministic local strategies. Indices are 0-based in memory and 1-based
// in the text table format.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bellthresh/qcore.hpp"
#include "bellthresh/scenarios.hpp"

namespace bellthresh::bell {

using qcore::Party;
using scenarios::ProbabilityTable;
using scenarios::Scenario;
using scenarios::SettingParams;

struct JointTerm {
  std::size_t i = 0;  // Alice setting
  std::size_t j = 0;  // Bob setting
  std::size_t k = 0;  // Alice outcome role
  std::size_t l = 0;  // Bob outcome role
  int sign = 1;

  friend bool operator==(const JointTerm&, const JointTerm&) = default;
};

struct SingleTerm {
  Party party = Party::A;
  std::size_t i = 0;
  std::size_t k = 0;
  int sign = 1;

  friend bool operator==(const SingleTerm&, const SingleTerm&) = default;
};

class BellFunctional {
 public:
  static constexpr std::size_t kSettings = 2;

  /// Throws std::invalid_argument on empty tables, signs other than +-1 or
  /// indices outside the setting/outcome ranges.
  BellFunctional(std::string name, std::vector<JointTerm> joint, std::vector<SingleTerm> single,
                 std::size_t outcomes, double lhv_bound = 0.0);

  const std::string& name() const noexcept { return name_; }
  const std::vector<JointTerm>& joint_terms() const noexcept { return joint_; }
  const std::vector<SingleTerm>& single_terms() const noexcept { return single_; }
  std::size_t outcomes() const noexcept { return outcomes_; }
  double lhv_bound() const noexcept { return lhv_bound_; }

  bool compatible_with(const Scenario& sc) const noexcept;

 private:
  std::string name_;
  std::vector<JointTerm> joint_;
  std::vector<SingleTerm> single_;
  std::size_t outcomes_;
  double lhv_bound_;
};

/// Value of a functional split into its joint part J and single part S.
struct BellValue {
  double total = 0.0;
  double joint = 0.0;
  double single = 0.0;

  /// |S| / J, the singles-to-joint diagnostic; NaN unless J > 0.
  double ratio() const noexcept;
};

/// Qutrit CH functional (12 joint, 4 single terms). The third line of the
/// commonly printed form repeats +P^{22}(2,1); this preset uses +P^{22}(2,2)
/// there, which is the unique single-term change giving LHV bound 0.
BellFunctional ch_qutrit_functional();
/// The table exactly as usually printed, with the repeated term. Its LHV
/// maximum is 1, so it is not a valid Bell inequality; kept for comparison.
BellFunctional ch_qutrit_printed_functional();
/// Qubit CH sum: p(1,1) - p(1,2) + p(2,1) + p(2,2) - p_A(2) - p_B(1) on the
/// (pass, pass) outcome.
BellFunctional ch_qubit_functional();

/// Preset lookup: "ch-qutrit", "ch-qutrit-printed", "ch-qubit".
BellFunctional preset(std::string_view name);

/// Parses the text table format: one term per line,
///   joint  i j k l sign
///   single party i k sign      (party is A/B or 1/2)
/// with 1-based indices, optional `outcomes N` and `bound X` lines, and `#`
/// comments. `default_outcomes` applies when no `outcomes` line is present.
BellFunctional parse_functional(std::string_view text, std::string name,
                                std::size_t default_outcomes);
BellFunctional load_functional(const std::string& path, std::size_t default_outcomes);
/// Inverse of parse_functional.
std::string format_functional(const BellFunctional& f);

BellValue evaluate(const BellFunctional& f, const ProbabilityTable& probs);
BellValue evaluate(const BellFunctional& f, const Scenario& sc, const qcore::QuantumState& state,
                   const SettingParams& settings);

/// Joint probabilities scale with eta^2 and singles with eta: returns the
/// decomposition of eta^2 J + eta S.
BellValue at_efficiency(const BellValue& v, double eta);
double value_at_efficiency(const BellValue& v, double eta);

/// Functional evaluated on (1-F)|psi><psi| + F I/d.
double value_at_noise(const BellFunctional& f, const Scenario& sc, const qcore::StateVector& psi,
                      const SettingParams& settings, double noise);

/// Maximum over deterministic local strategies (each party fixes one outcome
/// per setting).
double lhv_max(const BellFunctional& f);

}  // namespace bellthresh::bell
