#pragma once

#include <random>

#include <Eigen/Dense>

#include "kicktop/random.hpp"
#include "kicktop/reduction.hpp"
#include "kicktop/spin.hpp"

namespace kicktop::fixtures {

inline SymmetricState random_symmetric_state(SpinQuantumNumber spin, Rng& rng) {
  std::normal_distribution<double> g;
  CVector v(spin.dim());
  for (int i = 0; i < spin.dim(); ++i) v(i) = Complex(g(rng), g(rng));
  return SymmetricState::normalized(spin, v);
}

// Random full-rank two-qubit state from a Ginibre matrix.
inline TwoQubitDensityMatrix random_two_qubit_state(Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix4cd a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a(r, c) = Complex(g(rng), g(rng));
  Eigen::Matrix4cd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline Eigen::Matrix2cd random_qubit_unitary(Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd a;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) a(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(a);
  return qr.householderQ();
}

inline Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace kicktop::fixtures
