#pragma once

#include <Eigen/Dense>

#include "kicktop/reduction.hpp"
#include "kicktop/spin.hpp"

namespace kicktop {

// rho = (I(x)I + x.sigma(x)I + I(x)y.sigma + sum T_ij sigma_i(x)sigma_j) / 4.
struct BlochForm {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  Eigen::Vector3d y = Eigen::Vector3d::Zero();
  Eigen::Matrix3d t = Eigen::Matrix3d::Zero();

  TwoQubitDensityMatrix reconstruct() const;
};

BlochForm bloch_decompose(const TwoQubitDensityMatrix& rho);

// Entropy in bits. Throws DomainError if rho is not Hermitian or not of unit
// trace within 1e-8; small negative eigenvalues are clipped (see
// clipped_spectrum).
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

// H(A) + H(B) - H(AB).
double mutual_information(const TwoQubitDensityMatrix& rho);

// Axis of a projective measurement {(I + n.sigma)/2, (I - n.sigma)/2} on qubit A.
struct MeasurementSetting {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();

  static MeasurementSetting from_angles(double theta, double phi);
};

// sum_i p_i H(rho_{B|i}) for the measurement `n` on A, built from the
// projectors directly.
double conditional_entropy_after_measurement(const TwoQubitDensityMatrix& rho,
                                             const MeasurementSetting& n);

// Same quantity from the Bloch form: p_+- = (1 +- n.x)/2 and the conditioned
// Bloch vector of B is (y +- T^T n) / (1 +- n.x).
double conditional_entropy_after_measurement(const BlochForm& bloch, const Eigen::Vector3d& n);

enum class EntropyUnit { bits, nats };

struct DiscordResult {
  double discord = 0.0;
  double min_conditional_entropy = 0.0;
  MeasurementSetting optimal;
};

// H(A) - H(AB) + min_n S(B|n), minimized over projective measurements of
// qubit A: a 32 x 64 (theta_n, phi_n) grid followed by Nelder-Mead from the
// three best grid nodes. Deterministic for a given input. Entropies in the
// result are reported in `unit`.
DiscordResult minimize_discord(const TwoQubitDensityMatrix& rho,
                               EntropyUnit unit = EntropyUnit::bits);
double quantum_discord(const TwoQubitDensityMatrix& rho, EntropyUnit unit = EntropyUnit::bits);

// (|x|^2 + |T|_F^2 - eta_max) / 4 with eta_max the top eigenvalue of
// x x^T + T T^T.
double geometric_discord(const BlochForm& bloch);
double geometric_discord(const TwoQubitDensityMatrix& rho);

// Meyer-Wallach Q = 2 (1 - Tr rho_1^2); every qubit of a symmetric state has
// the same marginal.
double q_measure(const SymmetricState& state);

enum class QNormalization {
  paper_2jplus1,  // 1 - 4 (<S_z>^2 + <S_+><S_->) / (2j+1)^2
  qubit_2j,       // same with (2j)^2; identical to q_measure
};

double q_measure_collective(const SymmetricState& state, QNormalization normalization);
double q_measure_collective(const SymmetricState& state, const OperatorSet& ops,
                            QNormalization normalization);

struct CorrelationValues {
  double discord = 0.0;
  double geometric_discord = 0.0;
  double q_measure = 0.0;
};

// All three measures of one state, with qubits 0 and 1 as the pair for the
// two discords.
CorrelationValues evaluate_correlations(const SymmetricState& state,
                                        QNormalization normalization = QNormalization::qubit_2j,
                                        EntropyUnit unit = EntropyUnit::bits);

// D^G >= D^2 / 2 with the given slack.
inline bool satisfies_discord_bound(const CorrelationValues& v, double slack = 1e-9) {
  return v.geometric_discord + slack >= 0.5 * v.discord * v.discord;
}

}  // namespace kicktop
