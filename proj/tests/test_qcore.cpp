#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "bellthresh/qcore.hpp"
#include "support.hpp"

using namespace bellthresh::qcore;
using testsupport::from_eigen;
using testsupport::random_state;
using testsupport::random_unitary;
using testsupport::to_eigen;

TEST(StateVector, NormalizesOnConstruction) {
  const StateVector v({{3.0, 0.0}, {0.0, 4.0}});
  double norm = 0.0;
  for (const auto& a : v.amps()) norm += std::norm(a);
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_NEAR(v[0].real(), 0.6, 1e-15);
  EXPECT_NEAR(v[1].imag(), 0.8, 1e-15);
}

TEST(StateVector, RejectsDegenerateInput) {
  EXPECT_THROW(StateVector(std::vector<Complex>{}), std::invalid_argument);
  EXPECT_THROW(StateVector(std::vector<Complex>{{0.0, 0.0}, {0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(StateVector(std::vector<Complex>{{std::nan(""), 0.0}}), std::invalid_argument);
  EXPECT_THROW(StateVector(std::vector<Complex>{{INFINITY, 0.0}, {1.0, 0.0}}), std::invalid_argument);
}

TEST(StateVector, RandomStatesHaveUnitNorm) {
  for (int n = 0; n < 100; ++n) {
    const auto v = random_state(9);
    EXPECT_NEAR(to_eigen(v).norm(), 1.0, 1e-12);
  }
}

TEST(Operator, KindInvariantsAreEnforced) {
  EXPECT_THROW(Operator(2, {1, 1, 0, 1}, OperatorKind::unitary), std::invalid_argument);
  EXPECT_THROW(Operator(2, {1, 0, 0, 0.5}, OperatorKind::projector), std::invalid_argument);
  EXPECT_THROW(Operator(2, {0.7, 0, 0, 0.7}, OperatorKind::density), std::invalid_argument);
  EXPECT_THROW(Operator(2, {1.5, 0, 0, -0.5}, OperatorKind::density), std::invalid_argument);
  EXPECT_THROW(Operator(2, {1, 0, 0}, OperatorKind::generic), std::invalid_argument);
  EXPECT_NO_THROW(Operator(2, {0.5, 0.5, 0.5, 0.5}, OperatorKind::projector));
  EXPECT_NO_THROW(from_eigen(random_unitary(3), OperatorKind::unitary));
}

TEST(Tensor, IdentityTimesIdentity) {
  const auto i4 = tensor(Operator::identity(2), Operator::identity(2));
  const auto ref = Operator::identity(4);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(i4.entries()[k], ref.entries()[k]);
}

TEST(Tensor, BasisOrderingLeftFactorIsSlow) {
  const auto v = tensor(StateVector::basis(2, 0), StateVector::basis(2, 1));
  ASSERT_EQ(v.dim(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(v[i], Complex(i == 1 ? 1.0 : 0.0));
}

TEST(Tensor, MixedKindsAreRejected) {
  const Tensorable s = StateVector::basis(2, 0);
  const Tensorable o = Operator::identity(2);
  EXPECT_THROW(tensor(s, o), std::invalid_argument);
  EXPECT_NO_THROW(tensor(s, s));
}

TEST(Tensor, AgreesWithKroneckerOracleOnRandomUnitaries) {
  for (int n = 0; n < 20; ++n) {
    const auto u = random_unitary(3);
    const auto v = random_unitary(3);
    const auto psi = random_state(3);
    const auto phi = random_state(3);
    const auto lhs = apply(tensor(from_eigen(u), from_eigen(v)), tensor(psi, phi));
    const Eigen::VectorXcd up = u * to_eigen(psi);
    const Eigen::VectorXcd vp = v * to_eigen(phi);
    for (Eigen::Index a = 0; a < 3; ++a)
      for (Eigen::Index b = 0; b < 3; ++b) {
        EXPECT_NEAR(std::abs(lhs[a * 3 + b] - up(a) * vp(b)), 0.0, 1e-12);
      }
  }
}

TEST(Tensor, AssociativeToRoundoff) {
  const auto a = from_eigen(random_unitary(2));
  const auto b = from_eigen(random_unitary(3));
  const auto c = from_eigen(random_unitary(2));
  const auto left = tensor(tensor(a, b), c);
  const auto right = tensor(a, tensor(b, c));
  ASSERT_EQ(left.dim(), right.dim());
  for (std::size_t k = 0; k < left.entries().size(); ++k) EXPECT_LE(std::abs(left.entries()[k] - right.entries()[k]), 1e-15);
}

TEST(Probability, BasisCases) {
  const auto zero = StateVector::basis(2, 0);
  EXPECT_EQ(probability(zero, Operator::projector_onto(StateVector::basis(2, 0))), 1.0);
  EXPECT_EQ(probability(zero, Operator::projector_onto(StateVector::basis(2, 1))), 0.0);
}

TEST(Probability, MaximallyMixedGivesOneOverDimension) {
  const Operator rho = Operator::identity(9);
  const Operator mixed(9, [&] {
    std::vector<Complex> e(rho.entries().begin(), rho.entries().end());
    for (auto& x : e) x /= 9.0;
    return e;
  }(), OperatorKind::density);
  for (int n = 0; n < 10; ++n) {
    EXPECT_NEAR(probability(mixed, Operator::projector_onto(random_state(9))), 1.0 / 9.0, 1e-14);
  }
}

TEST(Probability, RequiresProjectorOfMatchingDimension) {
  const auto psi = StateVector::basis(2, 0);
  EXPECT_THROW(probability(psi, Operator::identity(2)), std::invalid_argument);
  EXPECT_THROW(probability(psi, Operator::projector_onto(StateVector::basis(3, 0))), std::invalid_argument);
}

TEST(Probability, PureAndDensityPathsAgree) {
  for (int n = 0; n < 50; ++n) {
    const auto psi = random_state(9);
    const auto proj = Operator::projector_onto(random_state(9));
    EXPECT_NEAR(probability(psi, proj), probability(Operator::pure_density(psi), proj), 1e-13);
  }
}

TEST(Probability, LinearInTheDensityOperator) {
  for (int n = 0; n < 50; ++n) {
    const auto r1 = Operator::pure_density(random_state(4));
    const auto r2 = Operator::pure_density(random_state(4));
    const auto proj = Operator::projector_onto(random_state(4));
    const double w = testsupport::uniform(0.0, 1.0);
    EXPECT_NEAR(probability(mix(r1, r2, w), proj),
                w * probability(r1, proj) + (1 - w) * probability(r2, proj), 1e-12);
  }
}

TEST(Probability, ResolutionOfIdentitySumsToOne) {
  for (int n = 0; n < 50; ++n) {
    const auto u = random_unitary(9);
    const auto psi = random_state(9);
    double sum = 0.0;
    for (Eigen::Index c = 0; c < 9; ++c) {
      std::vector<Complex> col(9);
      for (Eigen::Index r = 0; r < 9; ++r) col[r] = u(r, c);
      sum += probability(psi, Operator::projector_onto(StateVector(col)));
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
  }
}

TEST(PartialProjection, MaximallyEntangledMarginalIsOneThird) {
  std::vector<Complex> amps(9, 0.0);
  amps[0] = amps[4] = amps[8] = 1.0;
  const StateVector psi(amps);
  EXPECT_NEAR(partial_projection_probability(psi, Party::A, Operator::projector_onto(StateVector::basis(3, 0))),
              1.0 / 3.0, 1e-15);
  EXPECT_NEAR(partial_projection_probability(psi, Party::A, Operator::identity(3).retagged(OperatorKind::projector)),
              1.0, 1e-15);
}

TEST(PartialProjection, TwoTermStateMarginal) {
  std::vector<Complex> amps(9, 0.0);
  amps[0] = amps[4] = 1.0;  // (a,b) = (1,0)
  const StateVector psi(amps);
  EXPECT_NEAR(partial_projection_probability(psi, Party::B, Operator::projector_onto(StateVector::basis(3, 1))),
              0.5, 1e-15);
}

TEST(PartialProjection, EqualsFullProjectionWithIdentity) {
  const auto id = Operator::identity(3);
  for (int n = 0; n < 30; ++n) {
    const auto psi = random_state(9);
    const auto rho = Operator::pure_density(random_state(9));
    const auto p = Operator::projector_onto(random_state(3));
    EXPECT_NEAR(partial_projection_probability(psi, Party::A, p),
                probability(psi, tensor(p, id).retagged(OperatorKind::projector)), 1e-13);
    EXPECT_NEAR(partial_projection_probability(rho, Party::B, p),
                probability(rho, tensor(id, p).retagged(OperatorKind::projector)), 1e-13);
  }
}

TEST(PartialProjection, RejectsIncompatibleDimension) {
  EXPECT_THROW(partial_projection_probability(random_state(9), Party::A,
                                              Operator::projector_onto(StateVector::basis(2, 0))),
               std::invalid_argument);
}

TEST(Positivity, AgreesWithEigenvalueOracle) {
  for (int n = 0; n < 30; ++n) {
    const auto u = random_unitary(4);
    Eigen::VectorXd ev(4);
    for (int i = 0; i < 4; ++i) ev(i) = testsupport::uniform(-0.2, 1.0);
    const Eigen::MatrixXcd h = u * ev.cast<Complex>().asDiagonal() * u.adjoint();
    EXPECT_EQ(is_positive_semidefinite(from_eigen(h)), ev.minCoeff() >= 0.0) << ev.transpose();
  }
}

TEST(ClampProbability, ToleratesRoundoffOnly) {
  EXPECT_EQ(clamp_probability(-1e-12), 0.0);
  EXPECT_EQ(clamp_probability(1.0 + 1e-12), 1.0);
  EXPECT_EQ(clamp_probability(0.25), 0.25);
  EXPECT_THROW(clamp_probability(1.0 + 1e-6), std::logic_error);
  EXPECT_THROW(clamp_probability(-1e-6), std::logic_error);
}
