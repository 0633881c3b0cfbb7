#include "bellthresh/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellthresh::scenarios {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce_angle(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  // fmod can return `period` itself after the sign fix-up for tiny negatives.
  return r >= period ? 0.0 : r;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

// Outcome-role order of the three biphoton projectors for a given pair.
std::array<std::size_t, 3> biphoton_roles(OutcomePair pair) {
  switch (pair) {
    case OutcomePair::p1p2: return {0, 1, 2};
    case OutcomePair::p1p3: return {0, 2, 1};
    case OutcomePair::p2p3: return {1, 2, 0};
    case OutcomePair::none: break;
  }
  throw std::invalid_argument("biphoton scenario needs an outcome pair");
}

}  // namespace

const char* to_string(Kind kind) noexcept {
  switch (kind) {
    case Kind::tritter: return "tritter";
    case Kind::biphoton: return "biphoton";
    case Kind::qubit: return "qubit";
  }
  return "unknown";
}

const char* to_string(OutcomePair pair) noexcept {
  switch (pair) {
    case OutcomePair::none: return "none";
    case OutcomePair::p1p2: return "P1P2";
    case OutcomePair::p1p3: return "P1P3";
    case OutcomePair::p2p3: return "P2P3";
  }
  return "unknown";
}

Kind parse_kind(const std::string& text) {
  if (text == "tritter") return Kind::tritter;
  if (text == "biphoton") return Kind::biphoton;
  if (text == "qubit") return Kind::qubit;
  throw std::invalid_argument("unknown scenario '" + text + "'");
}

OutcomePair parse_outcome_pair(const std::string& text) {
  if (text == "P1P2") return OutcomePair::p1p2;
  if (text == "P1P3") return OutcomePair::p1p3;
  if (text == "P2P3") return OutcomePair::p2p3;
  if (text == "none") return OutcomePair::none;
  throw std::invalid_argument("unknown outcome pair '" + text + "'");
}

// ---------------------------------------------------------------------------
// Scenario

Scenario Scenario::tritter() { return Scenario(Kind::tritter, OutcomePair::none); }

Scenario Scenario::biphoton(OutcomePair outcomes) {
  if (outcomes == OutcomePair::none) {
    throw std::invalid_argument("biphoton scenario needs an outcome pair");
  }
  return Scenario(Kind::biphoton, outcomes);
}

Scenario Scenario::qubit() { return Scenario(Kind::qubit, OutcomePair::none); }

std::size_t Scenario::local_dim() const noexcept { return kind_ == Kind::qubit ? 2 : 3; }

std::size_t Scenario::coords_per_setting() const noexcept {
  return kind_ == Kind::tritter ? 2 : 1;
}

std::size_t Scenario::entanglement_coords() const noexcept {
  return kind_ == Kind::qubit ? 1 : 2;
}

double Scenario::setting_period() const noexcept {
  return kind_ == Kind::tritter ? kTwoPi : std::numbers::pi;
}

std::vector<Interval> Scenario::entanglement_bounds() const {
  if (kind_ == Kind::qubit) return {{0.0, 1.5}};
  return {{-3.0, 3.0}, {-3.0, 3.0}};
}

std::string Scenario::name() const {
  std::string n = to_string(kind_);
  if (kind_ == Kind::biphoton) n += std::string("/") + to_string(outcomes_);
  return n;
}

// ---------------------------------------------------------------------------
// SettingParams

SettingParams::SettingParams(const Scenario& sc, std::vector<double> coords)
    : per_setting_(sc.coords_per_setting()), coords_(std::move(coords)) {
  if (coords_.size() != sc.setting_coords()) {
    throw std::invalid_argument("scenario " + sc.name() + " expects " +
                                std::to_string(sc.setting_coords()) + " setting coordinates, got " +
                                std::to_string(coords_.size()));
  }
  for (auto& x : coords_) {
    require_finite(x, "setting coordinate");
    x = reduce_angle(x, sc.setting_period());
  }
}

std::span<const double> SettingParams::local(Party party, std::size_t setting) const {
  if (setting > 1) throw std::invalid_argument("setting index must be 0 or 1");
  const std::size_t block = (party == Party::A ? 0 : 2) + setting;
  return std::span<const double>(coords_).subspan(block * per_setting_, per_setting_);
}

// ---------------------------------------------------------------------------
// state and measurement constructors

Operator tritter_unitary(const std::array<double, 3>& phases) {
  for (double p : phases) require_finite(p, "tritter phase");
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  std::vector<Complex> e(9);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t l = 0; l < 3; ++l) {
      const double arg = kTwoPi / 3.0 * static_cast<double>(k * l) + phases[l];
      e[k * 3 + l] = std::polar(inv_sqrt3, arg);
    }
  }
  return Operator(3, std::move(e), qcore::OperatorKind::unitary);
}

StateVector tritter_state(const EntanglementParams& p) {
  require_finite(p.a, "entanglement parameter a");
  require_finite(p.b, "entanglement parameter b");
  std::vector<Complex> amps(9);
  amps[0] = 1.0;
  amps[4] = p.a;
  amps[8] = p.b;
  return StateVector(std::move(amps));
}

StateVector qubit_state(double a) {
  require_finite(a, "entanglement parameter a");
  return StateVector({1.0, 0.0, 0.0, a});
}

std::pair<Operator, Operator> qubit_projectors(double theta) {
  require_finite(theta, "polarizer angle");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {Operator::projector_onto(StateVector({c, s})),
          Operator::projector_onto(StateVector({-s, c}))};
}

std::array<std::array<double, 3>, 3> biphoton_basis(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double r = std::numbers::sqrt2 * c * s;
  return {{{c * c, r, s * s}, {s * s, -r, c * c}, {-r, std::cos(2.0 * theta), r}}};
}

std::array<Operator, 3> biphoton_projectors(double theta) {
  require_finite(theta, "polarizer angle");
  const auto basis = biphoton_basis(theta);
  auto proj = [](const std::array<double, 3>& v) {
    return Operator::projector_onto(StateVector({v[0], v[1], v[2]}));
  };
  return {proj(basis[0]), proj(basis[1]), proj(basis[2])};
}

StateVector entangled_state(const Scenario& sc, const EntanglementParams& p) {
  return sc.kind() == Kind::qubit ? qubit_state(p.a) : tritter_state(p);
}

Operator LocalMeasurement::projector(std::size_t outcome) const {
  if (outcome >= dim) throw std::invalid_argument("outcome index out of range");
  std::vector<Complex> ket(dim);
  for (std::size_t m = 0; m < dim; ++m) ket[m] = std::conj(rows[outcome * dim + m]);
  return Operator::projector_onto(StateVector(std::move(ket)));
}

LocalMeasurement local_measurement(const Scenario& sc, const SettingParams& settings,
                                   Party party, std::size_t setting) {
  const auto x = settings.local(party, setting);
  LocalMeasurement m;
  m.dim = sc.local_dim();
  switch (sc.kind()) {
    case Kind::tritter: {
      // <k| U : the rows of the tritter unitary with phi_1 = 0.
      const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
      const std::array<double, 3> phases{0.0, x[0], x[1]};
      for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t l = 0; l < 3; ++l) {
          const double arg = kTwoPi / 3.0 * static_cast<double>(k * l) + phases[l];
          m.rows[k * 3 + l] = std::polar(inv_sqrt3, arg);
        }
      }
      break;
    }
    case Kind::biphoton: {
      const auto basis = biphoton_basis(x[0]);
      const auto roles = biphoton_roles(sc.outcomes());
      for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) m.rows[r * 3 + c] = basis[roles[r]][c];
      }
      break;
    }
    case Kind::qubit: {
      const double c = std::cos(x[0]);
      const double s = std::sin(x[0]);
      m.rows[0] = c;
      m.rows[1] = s;
      m.rows[2] = -s;
      m.rows[3] = c;
      break;
    }
  }
  return m;
}

namespace {

void check_indices(const Scenario& sc, std::size_t setting, std::size_t outcome) {
  if (setting > 1) throw std::invalid_argument("setting index must be 0 or 1");
  if (outcome >= sc.outcome_count()) {
    throw std::invalid_argument("outcome index " + std::to_string(outcome) +
                                " out of range for scenario " + sc.name());
  }
}

void check_state_dim(const Scenario& sc, const QuantumState& state) {
  const std::size_t d = sc.local_dim();
  if (qcore::dim(state) != d * d) {
    throw std::invalid_argument("state dimension does not match scenario " + sc.name());
  }
}

}  // namespace

double joint_probability(const Scenario& sc, const QuantumState& state,
                         const SettingParams& settings, std::size_t i, std::size_t j,
                         std::size_t k, std::size_t l) {
  check_indices(sc, i, k);
  check_indices(sc, j, l);
  check_state_dim(sc, state);
  const Operator pa = local_measurement(sc, settings, Party::A, i).projector(k);
  const Operator pb = local_measurement(sc, settings, Party::B, j).projector(l);
  return qcore::probability(state, qcore::tensor(pa, pb));
}

double single_probability(const Scenario& sc, const QuantumState& state,
                          const SettingParams& settings, Party party, std::size_t i,
                          std::size_t k) {
  check_indices(sc, i, k);
  check_state_dim(sc, state);
  const Operator p = local_measurement(sc, settings, party, i).projector(k);
  return qcore::partial_projection_probability(state, party, p);
}

Operator mix_with_noise(const StateVector& state, double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) {
    throw std::invalid_argument("noise fraction must lie in [0,1]");
  }
  const std::size_t n = state.dim();
  std::vector<Complex> e(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      e[r * n + c] = (1.0 - noise) * state[r] * std::conj(state[c]);
    }
    e[r * n + r] += noise / static_cast<double>(n);
  }
  return Operator(n, std::move(e), qcore::OperatorKind::density);
}

// ---------------------------------------------------------------------------
// ProbabilityTable

ProbabilityTable::ProbabilityTable(const Scenario& sc, const QuantumState& state,
                                   const SettingParams& settings)
    : d_(sc.local_dim()) {
  check_state_dim(sc, state);
  const std::size_t d = d_;
  std::array<LocalMeasurement, 2> ma{local_measurement(sc, settings, Party::A, 0),
                                     local_measurement(sc, settings, Party::A, 1)};
  std::array<LocalMeasurement, 2> mb{local_measurement(sc, settings, Party::B, 0),
                                     local_measurement(sc, settings, Party::B, 1)};

  if (const auto* psi = std::get_if<StateVector>(&state)) {
    const auto amps = psi->amps();
    // xa[i] = R_A,i * Psi, xb[j] = Psi * R_B,j^T with Psi the d x d amplitude matrix.
    std::array<std::array<Complex, 9>, 2> xa{};
    std::array<std::array<Complex, 9>, 2> xb{};
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t n = 0; n < d; ++n) {
          Complex acc_a{};
          Complex acc_b{};
          for (std::size_t m = 0; m < d; ++m) {
            acc_a += ma[s].rows[k * d + m] * amps[m * d + n];
            acc_b += amps[n * d + m] * mb[s].rows[k * d + m];
          }
          xa[s][k * d + n] = acc_a;
          xb[s][n * d + k] = acc_b;
        }
      }
    }
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t k = 0; k < d; ++k) {
        double pa = 0.0;
        double pb = 0.0;
        for (std::size_t n = 0; n < d; ++n) {
          pa += std::norm(xa[s][k * d + n]);
          pb += std::norm(xb[s][n * d + k]);
        }
        single_[(0 * 2 + s) * 3 + k] = qcore::clamp_probability(pa);
        single_[(1 * 2 + s) * 3 + k] = qcore::clamp_probability(pb);
      }
    }
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
          for (std::size_t l = 0; l < d; ++l) {
            Complex amp{};
            for (std::size_t n = 0; n < d; ++n) amp += xa[i][k * d + n] * mb[j].rows[l * d + n];
            joint_[((i * 2 + j) * 3 + k) * 3 + l] = qcore::clamp_probability(std::norm(amp));
          }
        }
      }
    }
    return;
  }

  const auto& rho = std::get<Operator>(state);
  if (rho.kind() != qcore::OperatorKind::density) {
    throw std::invalid_argument("mixed state must be a density-kind operator");
  }
  const std::size_t big = d * d;
  // Reduced states.
  std::array<Complex, 9> rho_a{};
  std::array<Complex, 9> rho_b{};
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t mp = 0; mp < d; ++mp) {
      for (std::size_t n = 0; n < d; ++n) {
        rho_a[m * d + mp] += rho(m * d + n, mp * d + n);
        rho_b[m * d + mp] += rho(n * d + m, n * d + mp);
      }
    }
  }
  auto quad = [d](const Complex* row, const std::array<Complex, 9>& r) {
    Complex acc{};
    for (std::size_t m = 0; m < d; ++m) {
      for (std::size_t mp = 0; mp < d; ++mp) acc += row[m] * r[m * d + mp] * std::conj(row[mp]);
    }
    return acc.real();
  };
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t k = 0; k < d; ++k) {
      single_[(0 * 2 + s) * 3 + k] = qcore::clamp_probability(quad(&ma[s].rows[k * d], rho_a));
      single_[(1 * 2 + s) * 3 + k] = qcore::clamp_probability(quad(&mb[s].rows[k * d], rho_b));
    }
  }
  std::array<Complex, 9> row{};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
          for (std::size_t m = 0; m < d; ++m) {
            for (std::size_t n = 0; n < d; ++n) {
              row[m * d + n] = ma[i].rows[k * d + m] * mb[j].rows[l * d + n];
            }
          }
          Complex acc{};
          for (std::size_t x = 0; x < big; ++x) {
            Complex inner{};
            for (std::size_t y = 0; y < big; ++y) inner += rho(x, y) * std::conj(row[y]);
            acc += row[x] * inner;
          }
          joint_[((i * 2 + j) * 3 + k) * 3 + l] = qcore::clamp_probability(acc.real());
        }
      }
    }
  }
}

}  // namespace bellthresh::scenarios
