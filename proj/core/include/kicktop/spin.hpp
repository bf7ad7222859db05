#pragma once

#include <complex>
#include <compare>

#include <Eigen/Dense>

namespace kicktop {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Total spin j, stored as the integer 2j so half-integers index exactly.
class SpinQuantumNumber {
 public:
  static SpinQuantumNumber from_twice(int twice_j);
  // Accepts only values within 1e-9 of a positive half-integer.
  static SpinQuantumNumber from_j(double j);

  int twice_j() const noexcept { return twice_j_; }
  double j() const noexcept { return 0.5 * twice_j_; }
  // Number of spin-1/2 constituents, N = 2j.
  int qubits() const noexcept { return twice_j_; }
  // Hilbert-space dimension 2j + 1.
  int dim() const noexcept { return twice_j_ + 1; }
  // Magnetic quantum number of basis index i; the basis runs m = j, j-1, ..., -j.
  double m_at(int index) const noexcept { return j() - index; }
  // Number of up spins in the Dicke state at basis index i.
  int excitations_at(int index) const noexcept { return twice_j_ - index; }

  auto operator<=>(const SpinQuantumNumber&) const = default;

 private:
  explicit SpinQuantumNumber(int twice_j) : twice_j_(twice_j) {}
  int twice_j_;
};

// Normalized pure state of the top in the |j,m> basis (m descending).
class SymmetricState {
 public:
  // Throws DomainError unless amplitudes have dimension 2j+1 and unit norm
  // within 1e-12.
  SymmetricState(SpinQuantumNumber spin, CVector amplitudes);

  static SymmetricState normalized(SpinQuantumNumber spin, CVector amplitudes);
  // Dicke basis vector |j, j - index>.
  static SymmetricState basis(SpinQuantumNumber spin, int index);

  SpinQuantumNumber spin() const noexcept { return spin_; }
  const CVector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](int index) const { return amplitudes_(index); }

  // Replaces the amplitudes; rescales if the norm drifted by more than 1e-12,
  // rejects drifts above 1e-6.
  void assign(CVector amplitudes);

 private:
  SpinQuantumNumber spin_;
  CVector amplitudes_;
};

// Eigendecomposition of J_y, from which every y-rotation exp(-i a J_y) is
// built exactly. Eigenvalues are snapped to the exact half-integer spectrum.
class JyEigensystem {
 public:
  explicit JyEigensystem(SpinQuantumNumber spin);

  SpinQuantumNumber spin() const noexcept { return spin_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const CMatrix& eigenvectors() const noexcept { return eigenvectors_; }

  CMatrix rotation(double angle) const;

 private:
  SpinQuantumNumber spin_;
  Eigen::VectorXd eigenvalues_;
  CMatrix eigenvectors_;
};

// Dense angular-momentum matrices together with the two unitary factors of
// the kicked-top Floquet operator.
struct OperatorSet {
  SpinQuantumNumber spin;
  double p = 0.0;
  double k = 0.0;
  CMatrix jz;
  CMatrix jplus;
  CMatrix jminus;
  CMatrix jx;
  CMatrix jy;
  CMatrix rotation;  // exp(-i p J_y)
  CVector torsion;   // diagonal of exp(-i (k / 2j) J_z^2)
};

CMatrix jz_matrix(SpinQuantumNumber spin);
CMatrix jplus_matrix(SpinQuantumNumber spin);

// Diagonal of exp(-i (k / 2j) J_z^2).
CVector torsion_diagonal(SpinQuantumNumber spin, double k);

// Rejects non-finite p or k.
OperatorSet build_operators(SpinQuantumNumber spin, double p, double k);
OperatorSet build_operators(const JyEigensystem& jy, double p, double k);

// exp(i theta (J_x sin phi - J_y cos phi)) |j, j>, pointing along (theta, phi).
SymmetricState coherent_state(const JyEigensystem& jy, double theta, double phi);
SymmetricState coherent_state(SpinQuantumNumber spin, double theta, double phi);

// <phi|O|phi> for collective operators, by dense matrix-vector contraction.
struct CollectiveExpectations {
  Complex sz;
  Complex sz2;
  Complex splus;
  Complex sminus;
  Complex splus2;
  Complex sminus2;
  Complex splus_sz;
  Complex sminus_sz;
  Complex sz_splus;
  Complex sz_sminus;
};

CollectiveExpectations collective_expectations(const SymmetricState& state,
                                               const OperatorSet& ops);

// <S_z> and <S_-> in O(2j+1) without forming matrices.
struct FirstMoments {
  double sz = 0.0;
  Complex sminus;
};
FirstMoments first_moments(const SymmetricState& state);

}  // namespace kicktop
