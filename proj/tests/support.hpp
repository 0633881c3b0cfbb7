// Shared helpers for the unit tests: seeded random inputs and Eigen
// conversions used as an independent linear-algebra oracle.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bellthresh/qcore.hpp"
#include "bellthresh/scenarios.hpp"

namespace testsupport {

using bellthresh::qcore::Complex;
using bellthresh::qcore::Operator;
using bellthresh::qcore::StateVector;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(0x5eed);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline double angle() { return uniform(0.0, 2.0 * std::numbers::pi); }

inline Eigen::MatrixXcd to_eigen(const Operator& op) {
  Eigen::MatrixXcd m(op.dim(), op.dim());
  for (std::size_t r = 0; r < op.dim(); ++r)
    for (std::size_t c = 0; c < op.dim(); ++c) m(r, c) = op(r, c);
  return m;
}

inline Eigen::VectorXcd to_eigen(const StateVector& v) {
  Eigen::VectorXcd out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out(i) = v[i];
  return out;
}

inline Operator from_eigen(const Eigen::MatrixXcd& m,
                           bellthresh::qcore::OperatorKind kind = bellthresh::qcore::OperatorKind::generic) {
  std::vector<Complex> e;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) e.push_back(m(r, c));
  return Operator(static_cast<std::size_t>(m.rows()), e, kind);
}

inline StateVector random_state(std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<Complex> a(dim);
  for (auto& x : a) x = {g(rng()), g(rng())};
  return StateVector(a);
}

// Haar-ish unitary from the QR decomposition of a Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(std::size_t dim) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = Complex(g(rng()), g(rng()));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
}

inline std::vector<double> random_settings(const bellthresh::scenarios::Scenario& sc) {
  std::vector<double> x(sc.setting_coords());
  for (auto& v : x) v = uniform(0.0, sc.setting_period());
  return x;
}

inline double min_eigenvalue(const Operator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(op));
  return es.eigenvalues().minCoeff();
}

}  // namespace testsupport
