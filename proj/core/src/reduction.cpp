#include "kicktop/reduction.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kicktop/error.hpp"

namespace kicktop {

namespace {

constexpr double kClipTolerance = 1e-10;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace

std::array<double, 3> dicke_split_coefficients(int qubits, int excitations) {
  if (qubits < 2) throw DomainError("Dicke split needs N >= 2");
  if (excitations < 0 || excitations > qubits) {
    throw DomainError("excitations must lie in [0, N], got " + std::to_string(excitations));
  }
  // Closed forms of C(2,q) C(N-2,e-q) / C(N,e); exact in floating point for any N.
  const double n = qubits;
  const double e = excitations;
  const double pairs = n * (n - 1.0);
  return {(n - e) * (n - e - 1.0) / pairs, 2.0 * e * (n - e) / pairs, e * (e - 1.0) / pairs};
}

TwoQubitDensityMatrix two_qubit_rdm(const SymmetricState& state) {
  const SpinQuantumNumber spin = state.spin();
  const int n = spin.qubits();
  if (n < 2) throw DomainError("two-qubit marginal needs N = 2j >= 2");

  // c(q, r): amplitude of |D_2^q> (x) |D_{N-2}^r>.
  const int env = n - 2;
  Eigen::Matrix<Complex, 3, Eigen::Dynamic> c =
      Eigen::Matrix<Complex, 3, Eigen::Dynamic>::Zero(3, env + 1);
  for (int index = 0; index < spin.dim(); ++index) {
    const int e = spin.excitations_at(index);
    const auto w = dicke_split_coefficients(n, e);
    for (int q = 0; q <= 2; ++q) {
      const int r = e - q;
      if (r < 0 || r > env || w[q] == 0.0) continue;
      c(q, r) = state[index] * std::sqrt(w[q]);
    }
  }
  const Eigen::Matrix3cd gram = c * c.adjoint();

  // |D_2^2> = |uu>, |D_2^1> = (|ud> + |du>)/sqrt(2), |D_2^0> = |dd>.
  Eigen::Matrix<Complex, 4, 3> embed = Eigen::Matrix<Complex, 4, 3>::Zero();
  embed(0, 2) = 1.0;
  embed(1, 1) = embed(2, 1) = 1.0 / std::sqrt(2.0);
  embed(3, 0) = 1.0;
  TwoQubitDensityMatrix rho = embed * gram * embed.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

OneQubitDensityMatrix one_qubit_rdm(const SymmetricState& state) {
  const SpinQuantumNumber spin = state.spin();
  const FirstMoments mom = first_moments(state);
  const double sz = mom.sz / spin.j();
  const Complex lowering = mom.sminus / static_cast<double>(spin.qubits());
  OneQubitDensityMatrix rho;
  rho << 0.5 * (1.0 + sz), lowering, std::conj(lowering), 0.5 * (1.0 - sz);
  return rho;
}

ExpandedMarginals brute_force_rdm_oracle(const SymmetricState& state) {
  const SpinQuantumNumber spin = state.spin();
  const int n = spin.qubits();
  if (n > 14) throw DomainError("brute-force oracle limited to N <= 14");

  // Bit b of a configuration is 1 when qubit b points up. Qubits 0 and 1 are
  // retained; the remaining N-2 form the environment.
  const std::uint32_t configs = 1u << n;
  std::vector<Complex> psi(configs);
  for (std::uint32_t b = 0; b < configs; ++b) {
    const int ups = std::popcount(b);
    const int index = n - ups;
    psi[b] = state[index] / std::sqrt(binomial(n, ups));
  }

  ExpandedMarginals out;
  out.one.setZero();
  out.two.setZero();
  auto single_row = [](std::uint32_t b) { return (b & 1u) ? 0 : 1; };
  auto pair_row = [](std::uint32_t b) {
    const int a_down = (b & 1u) ? 0 : 1;
    const int b_down = (b & 2u) ? 0 : 1;
    return 2 * a_down + b_down;
  };

  if (n >= 2) {
    const std::uint32_t env_configs = configs >> 2;
    for (std::uint32_t e = 0; e < env_configs; ++e) {
      for (std::uint32_t s1 = 0; s1 < 4; ++s1) {
        for (std::uint32_t s2 = 0; s2 < 4; ++s2) {
          const std::uint32_t b1 = (e << 2) | s1;
          const std::uint32_t b2 = (e << 2) | s2;
          out.two(pair_row(b1), pair_row(b2)) += psi[b1] * std::conj(psi[b2]);
        }
      }
    }
  }
  const std::uint32_t rest = configs >> 1;
  for (std::uint32_t e = 0; e < rest; ++e) {
    for (std::uint32_t s1 = 0; s1 < 2; ++s1) {
      for (std::uint32_t s2 = 0; s2 < 2; ++s2) {
        const std::uint32_t b1 = (e << 1) | s1;
        const std::uint32_t b2 = (e << 1) | s2;
        out.one(single_row(b1), single_row(b2)) += psi[b1] * std::conj(psi[b2]);
      }
    }
  }
  return out;
}

OneQubitDensityMatrix trace_out_second(const TwoQubitDensityMatrix& rho) {
  OneQubitDensityMatrix out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) out(a, b) = rho(2 * a, 2 * b) + rho(2 * a + 1, 2 * b + 1);
  }
  return out;
}

OneQubitDensityMatrix trace_out_first(const TwoQubitDensityMatrix& rho) {
  OneQubitDensityMatrix out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) out(a, b) = rho(a, b) + rho(2 + a, 2 + b);
  }
  return out;
}

double singlet_population(const TwoQubitDensityMatrix& rho) {
  Eigen::Vector4cd singlet(0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0);
  return singlet.dot(rho * singlet).real();
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> clipped_solver(const Eigen::MatrixXcd& rho,
                                                               Eigen::VectorXd& spectrum) {
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
  if (solver.info() != Eigen::Success) throw NumericalError("density matrix diagonalization failed");
  spectrum = solver.eigenvalues();
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (spectrum(i) < -kClipTolerance) {
      throw NumericalError("density matrix has eigenvalue " + std::to_string(spectrum(i)) +
                           " below -1e-10");
    }
    if (spectrum(i) < 0.0) spectrum(i) = 0.0;
  }
  const double total = spectrum.sum();
  if (!(total > 0.0)) throw NumericalError("density matrix has vanishing trace");
  spectrum /= total;
  return solver;
}

}  // namespace

Eigen::VectorXd clipped_spectrum(const Eigen::MatrixXcd& rho) {
  Eigen::VectorXd spectrum;
  clipped_solver(rho, spectrum);
  return spectrum;
}

Eigen::MatrixXcd clip_to_state(const Eigen::MatrixXcd& rho) {
  Eigen::VectorXd spectrum;
  const auto solver = clipped_solver(rho, spectrum);
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  return v * spectrum.cast<Complex>().asDiagonal() * v.adjoint();
}

}  // namespace kicktop
