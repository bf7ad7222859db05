#include "kicktop/spin.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kicktop/error.hpp"

namespace kicktop {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kDriftLimit = 1e-6;

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

}  // namespace

SpinQuantumNumber SpinQuantumNumber::from_twice(int twice_j) {
  if (twice_j < 1) {
    throw DomainError("2j must be a positive integer, got " + std::to_string(twice_j));
  }
  return SpinQuantumNumber(twice_j);
}

SpinQuantumNumber SpinQuantumNumber::from_j(double j) {
  if (!std::isfinite(j)) throw DomainError("j must be finite");
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (std::abs(twice - rounded) > 1e-9) {
    throw DomainError("j must be a half-integer, got " + std::to_string(j));
  }
  return from_twice(static_cast<int>(rounded));
}

SymmetricState::SymmetricState(SpinQuantumNumber spin, CVector amplitudes)
    : spin_(spin), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != spin_.dim()) {
    throw DomainError("state dimension " + std::to_string(amplitudes_.size()) +
                      " does not match 2j+1 = " + std::to_string(spin_.dim()));
  }
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTolerance) {
    throw DomainError("state is not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
  }
}

SymmetricState SymmetricState::normalized(SpinQuantumNumber spin, CVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("cannot normalize a zero or non-finite vector");
  }
  amplitudes /= norm;
  return SymmetricState(spin, std::move(amplitudes));
}

SymmetricState SymmetricState::basis(SpinQuantumNumber spin, int index) {
  if (index < 0 || index >= spin.dim()) {
    throw DomainError("basis index out of range");
  }
  CVector amps = CVector::Zero(spin.dim());
  amps(index) = 1.0;
  return SymmetricState(spin, std::move(amps));
}

void SymmetricState::assign(CVector amplitudes) {
  if (amplitudes.size() != spin_.dim()) {
    throw DomainError("state dimension mismatch on assign");
  }
  const double norm2 = amplitudes.squaredNorm();
  const double drift = std::abs(norm2 - 1.0);
  if (!(drift <= kDriftLimit)) {
    throw NumericalError("state norm drifted to " + std::to_string(norm2));
  }
  if (drift > kNormTolerance) amplitudes /= std::sqrt(norm2);
  amplitudes_ = std::move(amplitudes);
}

CMatrix jz_matrix(SpinQuantumNumber spin) {
  const int d = spin.dim();
  CMatrix jz = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) jz(i, i) = spin.m_at(i);
  return jz;
}

CMatrix jplus_matrix(SpinQuantumNumber spin) {
  const int d = spin.dim();
  const double j = spin.j();
  CMatrix jp = CMatrix::Zero(d, d);
  // J+ |j,m> = sqrt((j-m)(j+m+1)) |j,m+1>, and m+1 sits one index earlier.
  for (int i = 1; i < d; ++i) {
    const double m = spin.m_at(i);
    jp(i - 1, i) = std::sqrt((j - m) * (j + m + 1.0));
  }
  return jp;
}

CVector torsion_diagonal(SpinQuantumNumber spin, double k) {
  require_finite(k, "k");
  const int d = spin.dim();
  const double scale = k / (2.0 * spin.j());
  CVector diag(d);
  for (int i = 0; i < d; ++i) {
    const double m = spin.m_at(i);
    diag(i) = std::polar(1.0, -scale * m * m);
  }
  return diag;
}

JyEigensystem::JyEigensystem(SpinQuantumNumber spin) : spin_(spin) {
  const CMatrix jp = jplus_matrix(spin);
  const CMatrix jy = (jp - jp.adjoint()) / Complex(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(jy);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("J_y eigendecomposition failed");
  }
  eigenvalues_ = solver.eigenvalues();
  // The spectrum is exactly {-j, ..., j}; remove roundoff so phases such as
  // exp(-i pi m) come out exact.
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    const double snapped = std::round(2.0 * eigenvalues_(i)) / 2.0;
    if (std::abs(snapped - eigenvalues_(i)) > 1e-8) {
      throw NumericalError("J_y eigenvalue not on the half-integer lattice");
    }
    eigenvalues_(i) = snapped;
  }
  eigenvectors_ = solver.eigenvectors();
}

CMatrix JyEigensystem::rotation(double angle) const {
  require_finite(angle, "rotation angle");
  CVector phases(eigenvalues_.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::polar(1.0, -angle * eigenvalues_(i));
  }
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

OperatorSet build_operators(const JyEigensystem& jy, double p, double k) {
  require_finite(p, "p");
  require_finite(k, "k");
  const SpinQuantumNumber spin = jy.spin();
  const CMatrix jplus = jplus_matrix(spin);
  const CMatrix jminus = jplus.adjoint();
  return OperatorSet{spin,
                     p,
                     k,
                     jz_matrix(spin),
                     jplus,
                     jminus,
                     (jplus + jminus) / 2.0,
                     (jplus - jminus) / Complex(0.0, 2.0),
                     jy.rotation(p),
                     torsion_diagonal(spin, k)};
}

OperatorSet build_operators(SpinQuantumNumber spin, double p, double k) {
  require_finite(p, "p");
  require_finite(k, "k");
  return build_operators(JyEigensystem(spin), p, k);
}

SymmetricState coherent_state(const JyEigensystem& jy, double theta, double phi) {
  require_finite(theta, "theta0");
  require_finite(phi, "phi0");
  if (theta < -1e-12 || theta > std::numbers::pi + 1e-12) {
    throw DomainError("theta0 must lie in [0, pi]");
  }
  // exp(i theta (Jx sin phi - Jy cos phi)) = e^{-i phi Jz} e^{-i theta Jy} e^{i phi Jz};
  // on |j,j> the outer z-rotations reduce to the phases e^{i phi (j - m)}.
  const CMatrix& v = jy.eigenvectors();
  CVector weights(v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    weights(c) = std::polar(1.0, -theta * jy.eigenvalues()(c)) * std::conj(v(0, c));
  }
  CVector amps = v * weights;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    amps(i) *= std::polar(1.0, phi * static_cast<double>(i));
  }
  return SymmetricState::normalized(jy.spin(), std::move(amps));
}

SymmetricState coherent_state(SpinQuantumNumber spin, double theta, double phi) {
  return coherent_state(JyEigensystem(spin), theta, phi);
}

CollectiveExpectations collective_expectations(const SymmetricState& state,
                                               const OperatorSet& ops) {
  if (state.spin() != ops.spin) {
    throw DomainError("state and operator set have different j");
  }
  const CVector& psi = state.amplitudes();
  auto expect = [&psi](const CMatrix& op) -> Complex { return psi.dot(op * psi); };
  const CMatrix& z = ops.jz;
  const CMatrix& sp = ops.jplus;
  const CMatrix& sm = ops.jminus;
  CollectiveExpectations out;
  out.sz = expect(z);
  out.sz2 = expect(z * z);
  out.splus = expect(sp);
  out.sminus = expect(sm);
  out.splus2 = expect(sp * sp);
  out.sminus2 = expect(sm * sm);
  out.splus_sz = expect(sp * z);
  out.sminus_sz = expect(sm * z);
  out.sz_splus = expect(z * sp);
  out.sz_sminus = expect(z * sm);
  return out;
}

FirstMoments first_moments(const SymmetricState& state) {
  const SpinQuantumNumber spin = state.spin();
  const CVector& a = state.amplitudes();
  const double j = spin.j();
  FirstMoments out;
  for (int i = 0; i < spin.dim(); ++i) {
    out.sz += spin.m_at(i) * std::norm(a(i));
  }
  // <S_-> = sum_m conj(a_{m-1}) a_m sqrt((j+m)(j-m+1)); m-1 sits at index i+1.
  for (int i = 0; i + 1 < spin.dim(); ++i) {
    const double m = spin.m_at(i);
    out.sminus += std::conj(a(i + 1)) * a(i) * std::sqrt((j + m) * (j - m + 1.0));
  }
  return out;
}

}  // namespace kicktop
