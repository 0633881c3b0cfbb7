#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "bellthresh/scenarios.hpp"
#include "support.hpp"

using namespace bellthresh::scenarios;
using bellthresh::qcore::Operator;
using bellthresh::qcore::OperatorKind;
using bellthresh::qcore::probability;
using testsupport::angle;
using testsupport::to_eigen;

namespace {

constexpr double kPi = std::numbers::pi;

// Two-mode Fock oracle: expands (c aH + s aV)^n1 (-s aH + c aV)^n2 / sqrt(n1! n2!)
// acting on vacuum, returning amplitudes on |HH>, |HV>, |VV> (= |2,0>, |1,1>, |0,2>).
std::array<double, 3> fock_state(double theta, int n1, int n2) {
  const double c = std::cos(theta), s = std::sin(theta);
  std::map<int, double> poly{{0, 1.0}};  // power of aH -> coefficient, aV power = total - key
  auto multiply = [&](double h, double v) {
    std::map<int, double> next;
    for (const auto& [p, coef] : poly) {
      next[p + 1] += coef * h;
      next[p] += coef * v;
    }
    poly = next;
  };
  for (int i = 0; i < n1; ++i) multiply(c, s);
  for (int i = 0; i < n2; ++i) multiply(-s, c);
  auto fact = [](int n) { double f = 1; for (int i = 2; i <= n; ++i) f *= i; return f; };
  const double norm = std::sqrt(fact(n1) * fact(n2));
  // a^p b^q |0> = sqrt(p! q!) |p, q>
  std::array<double, 3> out{};
  for (const auto& [p, coef] : poly) {
    const int q = 2 - p;
    out[2 - p] = coef * std::sqrt(fact(p) * fact(q)) / norm;
  }
  return out;
}

Eigen::Matrix3cd tritter_oracle(double phi2, double phi3) {
  const std::complex<double> w = std::polar(1.0, 2.0 * kPi / 3.0);
  const std::array<double, 3> ph{0.0, phi2, phi3};
  Eigen::Matrix3cd u;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) u(k, l) = std::pow(w, k * l) * std::polar(1.0, ph[l]) / std::sqrt(3.0);
  return u;
}

}  // namespace

TEST(ScenarioShape, DimensionsAndCoordinates) {
  const auto t = Scenario::tritter();
  const auto b = Scenario::biphoton(OutcomePair::p1p3);
  const auto q = Scenario::qubit();
  EXPECT_EQ(t.local_dim(), 3u);
  EXPECT_EQ(b.local_dim(), 3u);
  EXPECT_EQ(q.local_dim(), 2u);
  EXPECT_EQ(t.setting_coords(), 8u);
  EXPECT_EQ(b.setting_coords(), 4u);
  EXPECT_EQ(q.setting_coords(), 4u);
  EXPECT_EQ(t.entanglement_coords(), 2u);
  EXPECT_EQ(q.entanglement_coords(), 1u);
  EXPECT_DOUBLE_EQ(t.setting_period(), 2 * kPi);
  EXPECT_DOUBLE_EQ(q.setting_period(), kPi);
  EXPECT_EQ(b.name(), "biphoton/P1P3");
  EXPECT_EQ(q.entanglement_bounds().size(), 1u);
  EXPECT_DOUBLE_EQ(t.entanglement_bounds()[0].lo, -3.0);
  EXPECT_DOUBLE_EQ(q.entanglement_bounds()[0].hi, 1.5);
  EXPECT_THROW(Scenario::biphoton(OutcomePair::none), std::invalid_argument);
}

TEST(ScenarioShape, ParsingRoundTrips) {
  for (auto k : {Kind::tritter, Kind::biphoton, Kind::qubit}) EXPECT_EQ(parse_kind(to_string(k)), k);
  for (auto p : {OutcomePair::p1p2, OutcomePair::p1p3, OutcomePair::p2p3}) {
    EXPECT_EQ(parse_outcome_pair(to_string(p)), p);
  }
  EXPECT_THROW(parse_kind("qutrit"), std::invalid_argument);
  EXPECT_THROW(parse_outcome_pair("P1P1"), std::invalid_argument);
}

TEST(SettingParams, ReducesModuloPeriodAndChecksSize) {
  const auto q = Scenario::qubit();
  const SettingParams s(q, {-0.5, kPi + 0.25, 3 * kPi, 0.1});
  EXPECT_NEAR(s.coords()[0], kPi - 0.5, 1e-15);
  EXPECT_NEAR(s.coords()[1], 0.25, 1e-15);
  EXPECT_NEAR(s.coords()[2], 0.0, 1e-15);
  EXPECT_EQ(s.local(bellthresh::qcore::Party::B, 1)[0], 0.1);
  EXPECT_THROW(SettingParams(q, {0.0, 0.0}), std::invalid_argument);
}

TEST(Tritter, UnbiasedModulusAndFirstRow) {
  const auto u = tritter_unitary({0.0, 0.0, 0.0});
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(std::abs(u(k, l)), 1.0 / std::sqrt(3.0), 1e-15);
  const double p2 = 0.7, p3 = -1.9;
  const auto v = tritter_unitary({0.0, p2, p3});
  EXPECT_NEAR(std::abs(v(0, 0) - 1.0 / std::sqrt(3.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v(0, 1) - std::polar(1.0, p2) / std::sqrt(3.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v(0, 2) - std::polar(1.0, p3) / std::sqrt(3.0)), 0.0, 1e-15);
}

TEST(Tritter, UnitaryForRandomPhases) {
  for (int n = 0; n < 100; ++n) {
    const auto u = to_eigen(tritter_unitary({angle(), angle(), angle()}));
    EXPECT_LT((u.adjoint() * u - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(tritter_unitary({0.0, NAN, 0.0}), std::invalid_argument);
}

TEST(States, TritterFamily) {
  const auto max = tritter_state({1.0, 1.0});
  for (std::size_t i : {0u, 4u, 8u}) EXPECT_NEAR(max[i].real(), 1.0 / std::sqrt(3.0), 1e-15);
  const auto prod = tritter_state({0.0, 0.0});
  EXPECT_EQ(prod[0], 1.0);
  const auto two = tritter_state({1.0, 0.0});
  EXPECT_NEAR(two[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(two[4].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(two[8], 0.0);
}

TEST(States, QubitFamily) {
  const auto max = qubit_state(1.0);
  EXPECT_NEAR(max[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(max[3].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(qubit_state(0.0)[3], 0.0);
  EXPECT_LE(0.608, Scenario::qubit().entanglement_bounds()[0].hi);
}

TEST(QubitProjectors, AxisAndDiagonalCases) {
  auto [p0, f0] = qubit_projectors(0.0);
  EXPECT_NEAR(p0(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(f0(1, 1).real(), 1.0, 1e-15);
  auto [p90, f90] = qubit_projectors(kPi / 2);
  EXPECT_NEAR(p90(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(f90(0, 0).real(), 1.0, 1e-15);
  auto [p45, f45] = qubit_projectors(kPi / 4);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(p45.entries()[k].real(), 0.5, 1e-15);
  for (int n = 0; n < 50; ++n) {
    auto [p, f] = qubit_projectors(angle());
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(std::abs(p.entries()[k] + f.entries()[k] - (k % 3 == 0 ? 1.0 : 0.0)), 0.0, 1e-12);
    }
  }
}

TEST(Biphoton, AxisAlignedProjectors) {
  const auto p = biphoton_projectors(0.0);
  EXPECT_NEAR(p[0](0, 0).real(), 1.0, 1e-15);  // HH
  EXPECT_NEAR(p[1](2, 2).real(), 1.0, 1e-15);  // VV
  EXPECT_NEAR(p[2](1, 1).real(), 1.0, 1e-15);  // HV
}

TEST(Biphoton, BasisMatchesFockSpaceOracle) {
  for (int n = 0; n < 100; ++n) {
    const double th = angle();
    const auto basis = biphoton_basis(th);
    const std::array<std::array<double, 3>, 3> oracle{fock_state(th, 2, 0), fock_state(th, 0, 2),
                                                      fock_state(th, 1, 1)};
    for (int v = 0; v < 3; ++v) {
      // Equal up to a global sign.
      double dot = 0.0;
      for (int i = 0; i < 3; ++i) dot += basis[v][i] * oracle[v][i];
      EXPECT_NEAR(std::abs(dot), 1.0, 1e-12);
      double norm = 0.0;
      for (int i = 0; i < 3; ++i) norm += basis[v][i] * basis[v][i];
      EXPECT_NEAR(norm, 1.0, 1e-12);
    }
  }
}

TEST(Biphoton, ProjectorsOrthogonalAndComplete) {
  for (int n = 0; n < 100; ++n) {
    const auto p = biphoton_projectors(angle());
    Eigen::Matrix3cd sum = Eigen::Matrix3cd::Zero();
    for (int a = 0; a < 3; ++a) {
      sum += to_eigen(p[a]);
      for (int b = 0; b < 3; ++b) {
        const double tr = (to_eigen(p[a]) * to_eigen(p[b])).trace().real();
        EXPECT_NEAR(tr, a == b ? 1.0 : 0.0, 1e-12);
      }
    }
    EXPECT_LT((sum - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(JointProbability, TritterCompletenessAtZeroPhases) {
  const auto sc = Scenario::tritter();
  const SettingParams s(sc, std::vector<double>(8, 0.0));
  const auto psi = tritter_state({1.0, 1.0});
  double sum = 0.0;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t l = 0; l < 3; ++l) sum += joint_probability(sc, psi, s, 0, 0, k, l);
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(JointProbability, TritterMatchesMatrixOracle) {
  const auto sc = Scenario::tritter();
  for (int n = 0; n < 30; ++n) {
    const auto x = testsupport::random_settings(sc);
    const SettingParams s(sc, x);
    const EntanglementParams p{testsupport::uniform(-3, 3), testsupport::uniform(-3, 3)};
    const auto psi = tritter_state(p);
    const Eigen::VectorXcd v = to_eigen(psi);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        const Eigen::Matrix3cd ua = tritter_oracle(x[2 * i], x[2 * i + 1]);
        const Eigen::Matrix3cd ub = tritter_oracle(x[4 + 2 * j], x[4 + 2 * j + 1]);
        Eigen::Matrix<std::complex<double>, 9, 9> kron;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) kron.block<3, 3>(3 * a, 3 * b) = ua(a, b) * ub;
        const Eigen::VectorXcd amp = kron * v;
        for (std::size_t k = 0; k < 3; ++k)
          for (std::size_t l = 0; l < 3; ++l) {
            EXPECT_NEAR(joint_probability(sc, psi, s, i, j, k, l), std::norm(amp(3 * k + l)), 1e-12);
          }
      }
  }
}

TEST(JointProbability, BiphotonAxisAlignedMaximalState) {
  const auto sc = Scenario::biphoton(OutcomePair::p1p2);
  const SettingParams s(sc, {0.0, 0.0, 0.0, 0.0});
  const auto psi = tritter_state({1.0, 1.0});
  EXPECT_NEAR(joint_probability(sc, psi, s, 0, 0, 0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(single_probability(sc, psi, s, bellthresh::qcore::Party::A, 0, 0), 1.0 / 3.0, 1e-15);
}

TEST(JointProbability, QubitMalusLaw) {
  const auto sc = Scenario::qubit();
  const auto psi = qubit_state(1.0);
  for (int n = 0; n < 50; ++n) {
    const double ta = testsupport::uniform(0, kPi), tb = testsupport::uniform(0, kPi);
    const SettingParams s(sc, {ta, 0.0, tb, 0.0});
    EXPECT_NEAR(joint_probability(sc, psi, s, 0, 0, 0, 0), 0.5 * std::pow(std::cos(ta - tb), 2), 1e-12);
  }
  const SettingParams same(sc, {0.3, 0.0, 0.3, 0.0});
  EXPECT_NEAR(joint_probability(sc, psi, same, 0, 0, 0, 0), 0.5, 1e-12);
}

TEST(JointProbability, RejectsBadIndicesAndStates) {
  const auto sc = Scenario::qubit();
  const SettingParams s(sc, {0, 0, 0, 0});
  const auto psi = qubit_state(1.0);
  EXPECT_THROW(joint_probability(sc, psi, s, 0, 0, 2, 0), std::invalid_argument);
  EXPECT_THROW(joint_probability(sc, psi, s, 2, 0, 0, 0), std::invalid_argument);
  EXPECT_THROW(joint_probability(sc, tritter_state({1, 1}), s, 0, 0, 0, 0), std::invalid_argument);
}

TEST(SingleProbability, TritterMarginalsAreOneThirdForAllParameters) {
  const auto sc = Scenario::tritter();
  for (int n = 0; n < 50; ++n) {
    const SettingParams s(sc, testsupport::random_settings(sc));
    const auto psi = tritter_state({testsupport::uniform(-3, 3), testsupport::uniform(-3, 3)});
    for (auto party : {bellthresh::qcore::Party::A, bellthresh::qcore::Party::B})
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(single_probability(sc, psi, s, party, i, k), 1.0 / 3.0, 1e-10);
  }
}

TEST(SingleProbability, QubitMaximalMarginalIsHalf) {
  const auto sc = Scenario::qubit();
  for (int n = 0; n < 20; ++n) {
    const SettingParams s(sc, testsupport::random_settings(sc));
    EXPECT_NEAR(single_probability(sc, qubit_state(1.0), s, bellthresh::qcore::Party::B, 1, 0), 0.5, 1e-12);
  }
}

TEST(ProductStates, JointFactorizes) {
  for (auto sc : {Scenario::tritter(), Scenario::biphoton(OutcomePair::p2p3), Scenario::qubit()}) {
    const std::size_t d = sc.local_dim();
    for (int n = 0; n < 10; ++n) {
      const auto psi = bellthresh::qcore::tensor(testsupport::random_state(d), testsupport::random_state(d));
      const SettingParams s(sc, testsupport::random_settings(sc));
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) {
          const double pa = single_probability(sc, psi, s, bellthresh::qcore::Party::A, 1, k);
          const double pb = single_probability(sc, psi, s, bellthresh::qcore::Party::B, 0, l);
          EXPECT_NEAR(joint_probability(sc, psi, s, 1, 0, k, l), pa * pb, 1e-12);
        }
    }
  }
}

TEST(Noise, EndpointsAndPositivity) {
  const auto psi = tritter_state({0.4, -1.3});
  const auto pure = mix_with_noise(psi, 0.0);
  const auto ref = Operator::pure_density(psi);
  for (std::size_t k = 0; k < 81; ++k) EXPECT_NEAR(std::abs(pure.entries()[k] - ref.entries()[k]), 0.0, 1e-15);
  const auto white = mix_with_noise(psi, 1.0);
  for (std::size_t r = 0; r < 9; ++r)
    for (std::size_t c = 0; c < 9; ++c) EXPECT_NEAR(std::abs(white(r, c) - (r == c ? 1.0 / 9.0 : 0.0)), 0.0, 1e-15);
  for (int n = 0; n < 30; ++n) {
    const auto rho = mix_with_noise(tritter_state({testsupport::uniform(-3, 3), testsupport::uniform(-3, 3)}),
                                    testsupport::uniform(0, 1));
    EXPECT_EQ(rho.kind(), OperatorKind::density);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    EXPECT_GE(testsupport::min_eigenvalue(rho), -1e-12);
  }
  EXPECT_THROW(mix_with_noise(psi, -0.1), std::invalid_argument);
  EXPECT_THROW(mix_with_noise(psi, 1.1), std::invalid_argument);
}

TEST(ProbabilityTable, MatchesGeneralPathForEveryScenario) {
  const std::vector<Scenario> all{Scenario::tritter(), Scenario::biphoton(OutcomePair::p1p2),
                                  Scenario::biphoton(OutcomePair::p1p3), Scenario::biphoton(OutcomePair::p2p3),
                                  Scenario::qubit()};
  for (const auto& sc : all) {
    for (int n = 0; n < 10; ++n) {
      const SettingParams s(sc, testsupport::random_settings(sc));
      const auto psi = entangled_state(sc, {testsupport::uniform(-3, 3), testsupport::uniform(-3, 3)});
      std::vector<bellthresh::qcore::QuantumState> states{psi};
      if (sc.is_qutrit()) states.emplace_back(mix_with_noise(psi, testsupport::uniform(0, 1)));
      for (const auto& st : states) {
        const ProbabilityTable t(sc, st, s);
        const std::size_t d = sc.local_dim();
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < d; ++k)
              for (std::size_t l = 0; l < d; ++l)
                EXPECT_NEAR(t.joint(i, j, k, l), joint_probability(sc, st, s, i, j, k, l), 1e-13);
        for (auto party : {bellthresh::qcore::Party::A, bellthresh::qcore::Party::B})
          for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t k = 0; k < d; ++k)
              EXPECT_NEAR(t.single(party, i, k), single_probability(sc, st, s, party, i, k), 1e-13);
      }
    }
  }
}

TEST(LocalMeasurement, BiphotonRolesFollowOutcomePair) {
  const double th = 0.37;
  const auto basis = biphoton_basis(th);
  const std::map<OutcomePair, std::array<int, 3>> roles{
      {OutcomePair::p1p2, {0, 1, 2}}, {OutcomePair::p1p3, {0, 2, 1}}, {OutcomePair::p2p3, {1, 2, 0}}};
  for (const auto& [pair, order] : roles) {
    const auto sc = Scenario::biphoton(pair);
    const SettingParams s(sc, {th, 0.0, 0.0, 0.0});
    const auto m = local_measurement(sc, s, bellthresh::qcore::Party::A, 0);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(m.rows[r * 3 + c].real(), basis[order[r]][c], 1e-15);
  }
}
