#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kicktop/correlations.hpp"
#include "kicktop/error.hpp"
#include "test_helpers.hpp"

namespace {

using namespace kicktop;

constexpr double kLn2 = std::numbers::ln2;

TwoQubitDensityMatrix bell_singlet() {
  Eigen::Vector4cd v(0.0, 1.0, -1.0, 0.0);
  v /= std::sqrt(2.0);
  return v * v.adjoint();
}

TwoQubitDensityMatrix werner(double p) {
  return p * bell_singlet() + (1.0 - p) * TwoQubitDensityMatrix::Identity() / 4.0;
}

// Discord of a Werner state in bits.
double werner_discord(double p) {
  auto xlogx = [](double x) { return x > 0 ? x * std::log2(x) : 0.0; };
  return 0.25 * (xlogx(1 - p) - 2 * xlogx(1 + p) + xlogx(1 + 3 * p));
}

TEST(Entropy, KnownSpectra) {
  EXPECT_NEAR(von_neumann_entropy(Eigen::Matrix4cd::Identity() / 4.0), 2.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(bell_singlet()), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(trace_out_first(bell_singlet())), 1.0, 1e-12);
  EXPECT_NEAR(mutual_information(bell_singlet()), 2.0, 1e-12);
}

TEST(Entropy, RejectsNonStates) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  EXPECT_THROW(von_neumann_entropy(m), DomainError);
  m = Eigen::Matrix2cd::Identity() / 2.0;
  m(0, 1) = 0.3;
  EXPECT_THROW(von_neumann_entropy(m), DomainError);
}

TEST(BlochForm, RoundTrip) {
  Rng rng = make_stream(21, 0);
  for (int i = 0; i < 20; ++i) {
    const auto rho = fixtures::random_two_qubit_state(rng);
    EXPECT_LT((bloch_decompose(rho).reconstruct() - rho).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(ConditionalEntropy, ProjectorAndBlochFormsAgree) {
  Rng rng = make_stream(22, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto rho = fixtures::random_two_qubit_state(rng);
    const auto n = MeasurementSetting::from_angles(std::acos(2 * u(rng) - 1), 2 * M_PI * u(rng));
    EXPECT_NEAR(conditional_entropy_after_measurement(rho, n),
                conditional_entropy_after_measurement(bloch_decompose(rho), n.axis), 1e-10);
  }
}

TEST(Discord, ProductAndClassicalStatesVanish) {
  Eigen::Matrix2cd a;
  a << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
  Eigen::Matrix2cd b;
  b << 0.4, 0.1, 0.1, 0.6;
  EXPECT_NEAR(quantum_discord(fixtures::kron(a, b)), 0.0, 1e-9);
  EXPECT_NEAR(geometric_discord(TwoQubitDensityMatrix(fixtures::kron(a, b))), 0.0, 1e-12);

  Eigen::Matrix2cd up = Eigen::Matrix2cd::Zero(), down = Eigen::Matrix2cd::Zero();
  up(0, 0) = 1.0;
  down(1, 1) = 1.0;
  const TwoQubitDensityMatrix cq = 0.3 * fixtures::kron(up, a) + 0.7 * fixtures::kron(down, b);
  EXPECT_NEAR(quantum_discord(cq), 0.0, 1e-9);
  EXPECT_NEAR(geometric_discord(cq), 0.0, 1e-12);
}

TEST(Discord, BellState) {
  EXPECT_NEAR(quantum_discord(bell_singlet()), 1.0, 1e-9);
  EXPECT_NEAR(quantum_discord(bell_singlet(), EntropyUnit::nats), kLn2, 1e-9);
  EXPECT_NEAR(geometric_discord(bell_singlet()), 0.5, 1e-12);
}

TEST(Discord, WernerFamily) {
  for (double p : {0.1, 0.35, 0.6, 0.9}) {
    EXPECT_NEAR(quantum_discord(werner(p)), werner_discord(p), 1e-8) << p;
    EXPECT_NEAR(geometric_discord(werner(p)), p * p / 2, 1e-12) << p;
  }
}

TEST(Discord, LocalUnitaryInvariance) {
  Rng rng = make_stream(23, 0);
  for (int i = 0; i < 10; ++i) {
    const auto rho = fixtures::random_two_qubit_state(rng);
    const Eigen::Matrix4cd u =
        fixtures::kron(fixtures::random_qubit_unitary(rng), fixtures::random_qubit_unitary(rng));
    const TwoQubitDensityMatrix rotated = u * rho * u.adjoint();
    EXPECT_NEAR(quantum_discord(rho), quantum_discord(rotated), 1e-7);
    EXPECT_NEAR(geometric_discord(rho), geometric_discord(rotated), 1e-12);
  }
}

TEST(Discord, UnitsDifferByLnTwo) {
  Rng rng = make_stream(24, 0);
  const auto rho = fixtures::random_two_qubit_state(rng);
  EXPECT_NEAR(quantum_discord(rho, EntropyUnit::nats), kLn2 * quantum_discord(rho), 1e-12);
}

TEST(Discord, BoundOnSymmetricStates) {
  Rng rng = make_stream(25, 0);
  for (int n : {2, 3, 6, 20, 80}) {
    for (int i = 0; i < 10; ++i) {
      const auto psi = fixtures::random_symmetric_state(SpinQuantumNumber::from_twice(n), rng);
      for (auto unit : {EntropyUnit::bits, EntropyUnit::nats}) {
        const auto v = evaluate_correlations(psi, QNormalization::qubit_2j, unit);
        EXPECT_TRUE(satisfies_discord_bound(v)) << n << " " << v.discord << " "
                                                << v.geometric_discord;
      }
    }
  }
}

TEST(QMeasure, CoherentStatesAreUnentangled) {
  for (int n : {2, 5, 40, 200}) {
    for (const auto& [theta, phi] : {std::pair{0.3, 1.0}, std::pair{M_PI / 2, -M_PI / 2}}) {
      const auto psi = coherent_state(SpinQuantumNumber::from_twice(n), theta, phi);
      EXPECT_NEAR(q_measure(psi), 0.0, 1e-10);
      EXPECT_NEAR(q_measure_collective(psi, QNormalization::qubit_2j), 0.0, 1e-10);
    }
  }
}

TEST(QMeasure, NormalizationsAndDickeValues) {
  const auto spin = SpinQuantumNumber::from_j(1);
  const auto dicke = SymmetricState::basis(spin, 1);
  EXPECT_NEAR(q_measure(dicke), 1.0, 1e-14);
  EXPECT_NEAR(q_measure_collective(dicke, QNormalization::paper_2jplus1), 1.0, 1e-14);

  Rng rng = make_stream(26, 0);
  const auto big = SpinQuantumNumber::from_j(7.5);
  const auto ops = build_operators(big, 0.0, 0.0);
  const auto psi = fixtures::random_symmetric_state(big, rng);
  EXPECT_NEAR(q_measure(psi), q_measure_collective(psi, QNormalization::qubit_2j), 1e-12);
  EXPECT_NEAR(q_measure_collective(psi, ops, QNormalization::paper_2jplus1),
              q_measure_collective(psi, QNormalization::paper_2jplus1), 1e-12);
  const double m2 = (1.0 - q_measure(psi)) * 15.0 * 15.0;
  EXPECT_NEAR(q_measure_collective(psi, QNormalization::paper_2jplus1), 1.0 - m2 / 256.0, 1e-12);
}

}  // namespace
