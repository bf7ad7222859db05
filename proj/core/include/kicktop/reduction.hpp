#pragma once

#include <array>

#include <Eigen/Dense>

#include "kicktop/spin.hpp"

namespace kicktop {

// Single-qubit marginal in the basis |up>, |down>.
using OneQubitDensityMatrix = Eigen::Matrix2cd;
// Two-qubit marginal in the product basis |uu>, |ud>, |du>, |dd>.
using TwoQubitDensityMatrix = Eigen::Matrix4cd;

// Weights of the bipartition |D_N^e> = sum_q sqrt(w_q) |D_2^q> (x) |D_{N-2}^{e-q}>,
// indexed by the number q of up spins on the two retained qubits:
// w_q = C(2,q) C(N-2,e-q) / C(N,e).
std::array<double, 3> dicke_split_coefficients(int qubits, int excitations);

// Exact two-qubit marginal of N = 2j >= 2 identical qubits.
TwoQubitDensityMatrix two_qubit_rdm(const SymmetricState& state);

// Single-qubit marginal, (I + <sigma>.sigma) / 2 with <sigma_z> = <S_z>/j and
// <sigma_-> = <S_->/N.
OneQubitDensityMatrix one_qubit_rdm(const SymmetricState& state);

struct ExpandedMarginals {
  OneQubitDensityMatrix one;
  TwoQubitDensityMatrix two;
};

// Independent reference path: expands the state over all 2^N bitstrings and
// traces out qubits 2..N-1 literally. Limited to N <= 14.
ExpandedMarginals brute_force_rdm_oracle(const SymmetricState& state);

// Tr_B and Tr_A of a two-qubit matrix.
OneQubitDensityMatrix trace_out_second(const TwoQubitDensityMatrix& rho);
OneQubitDensityMatrix trace_out_first(const TwoQubitDensityMatrix& rho);

// Population of the singlet (|ud> - |du>)/sqrt(2).
double singlet_population(const TwoQubitDensityMatrix& rho);

// Spectrum after symmetrizing rho, clipping eigenvalues in [-1e-10, 0) to 0
// and rescaling to unit trace. Throws NumericalError for eigenvalues below
// -1e-10.
Eigen::VectorXd clipped_spectrum(const Eigen::MatrixXcd& rho);

// Same clipping policy, returning the repaired matrix.
Eigen::MatrixXcd clip_to_state(const Eigen::MatrixXcd& rho);

}  // namespace kicktop
