#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "kicktop/error.hpp"
#include "kicktop/rmt.hpp"

namespace {

using namespace kicktop;

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

TEST(Parity, BlockDimensions) {
  const auto half = parity_basis(SpinQuantumNumber::from_j(0.5));
  EXPECT_EQ(half.d_plus(), 1);
  EXPECT_EQ(half.d_minus(), 1);
  for (int twice = 1; twice <= 40; ++twice) {
    const auto spin = SpinQuantumNumber::from_twice(twice);
    const auto b = parity_basis(spin);
    EXPECT_EQ(b.d_plus() + b.d_minus(), spin.dim());
    EXPECT_LE(std::abs(b.d_plus() - b.d_minus()), 1);
    const CMatrix id = CMatrix::Identity(spin.dim(), spin.dim());
    EXPECT_LT(max_abs(b.parity * b.parity - id), 1e-10) << twice;
    EXPECT_LT(max_abs(b.parity * b.plus - b.plus), 1e-10) << twice;
    EXPECT_LT(max_abs(b.parity * b.minus + b.minus), 1e-10) << twice;
    EXPECT_LT(max_abs(b.plus.adjoint() * b.minus), 1e-10) << twice;
  }
}

TEST(Parity, IntegerSpinIsRealReflection) {
  const auto b = parity_basis(SpinQuantumNumber::from_j(3));
  EXPECT_LT(b.parity.imag().cwiseAbs().maxCoeff(), 1e-12);
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(std::abs(b.parity(i, 6 - i)), 1.0, 1e-12);
}

TEST(Parity, CommutesWithFloquet) {
  const auto spin = SpinQuantumNumber::from_j(50);
  const auto b = parity_basis(spin);
  const CMatrix u = build_floquet(spin, 10.0, 1.7).matrix();
  EXPECT_LT(max_abs(b.parity * u - u * b.parity), 1e-10);
}

TEST(Cue, UnitaryAndHaarTraceMoment) {
  Rng rng = make_stream(41, 0);
  const CMatrix u = sample_cue(64, rng);
  EXPECT_LT(max_abs(u.adjoint() * u - CMatrix::Identity(64, 64)), 1e-12);
  double sum = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) sum += std::norm(sample_cue(64, rng).trace());
  // E|Tr U|^2 = 1 with variance 1 for dim >= 2.
  EXPECT_NEAR(sum / n, 1.0, 3.0 / std::sqrt(n) * 1.5);
}

TEST(Coe, SymmetricUnitary) {
  Rng rng = make_stream(42, 0);
  const CMatrix w = sample_coe(30, rng);
  EXPECT_LT(max_abs(w - w.transpose()), 1e-12);
  EXPECT_LT(max_abs(w.adjoint() * w - CMatrix::Identity(30, 30)), 1e-12);
}

TEST(BlockCoe, ParitySymmetricAndReproducible) {
  const auto spin = SpinQuantumNumber::from_j(20);
  const auto basis = parity_basis(spin);
  const EnsembleSpec spec{spin, 3, 99};
  const CMatrix w = sample_block_coe(spec, basis, 1);
  EXPECT_LT(max_abs(w.adjoint() * w - CMatrix::Identity(41, 41)), 1e-12);
  EXPECT_LT(max_abs(basis.parity * w - w * basis.parity), 1e-10);
  EXPECT_LT(max_abs(w - w.transpose()), 1e-10);
  EXPECT_EQ(max_abs(w - sample_block_coe(spec, basis, 1)), 0.0);
  EXPECT_GT(max_abs(w - sample_block_coe(spec, basis, 2)), 1e-3);
  const CMatrix full = sample_full_coe(spec, 0);
  EXPECT_LT(max_abs(full - full.transpose()), 1e-12);
}

TEST(BlockCoe, SpacingRatioOfOrthogonalEnsemble) {
  const auto spin = SpinQuantumNumber::from_j(120);
  const auto r = block_coe_spacing_ratio({spin, 45, 7}, parity_basis(spin));
  EXPECT_GE(r.count, 10000);
  EXPECT_NEAR(r.mean, 0.5359, 0.01);
}

TEST(SpacingRatio, EquallySpacedSpectrum) {
  std::vector<double> phases;
  for (int i = 0; i < 10; ++i) phases.push_back(-3.0 + 0.2 * std::numbers::pi * i);
  const auto r = spacing_ratio(phases);
  EXPECT_NEAR(r.mean, 1.0, 1e-12);
  EXPECT_EQ(r.count, 10);
}

TEST(Rational, ReducedArithmetic) {
  const Rational a(6, -8);
  EXPECT_EQ(a.num, -3);
  EXPECT_EQ(a.den, 4);
  EXPECT_EQ(a + Rational(3, 4), Rational(0));
  EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
  EXPECT_EQ(Rational(1, 3) / Rational(1, 6), Rational(2));
  EXPECT_THROW(Rational(1, 0), DomainError);
}

TEST(AnalyticQ, ExactValues) {
  EXPECT_EQ(analytic_q_average_exact(SpinQuantumNumber::from_j(1)), Rational(103, 135));
  EXPECT_NEAR(analytic_q_average(SpinQuantumNumber::from_j(120)), 0.99449, 1e-4);
  EXPECT_NEAR(analytic_q_average(SpinQuantumNumber::from_j(0.5)), 0.75, 1e-15);
  for (double j : {50.0, 100.0, 400.0}) {
    const double q = analytic_q_average(SpinQuantumNumber::from_j(j));
    EXPECT_LT(std::abs(q - (1.0 - 2.0 / (3.0 * j))), 2.0 / (j * j));
  }
}

TEST(AnalyticQ, QubitNormalizationRescales) {
  for (int twice : {1, 4, 9}) {
    const auto spin = SpinQuantumNumber::from_twice(twice);
    const double s = twice + 1.0;
    const double wide = analytic_q_average(spin, QNormalization::paper_2jplus1);
    const double qubit = analytic_q_average(spin, QNormalization::qubit_2j);
    EXPECT_NEAR(1.0 - qubit, (1.0 - wide) * s * s / (twice * twice), 1e-14);
  }
  EXPECT_NEAR(analytic_q_average(SpinQuantumNumber::from_j(0.5), QNormalization::qubit_2j), 0.0,
              1e-15);
}

TEST(AnalyticQ, SummationIdentities) {
  for (int twice = 1; twice <= 200; ++twice) {
    EXPECT_TRUE(summation_identity(SpinQuantumNumber::from_twice(twice)).holds()) << twice;
  }
}

TEST(Moments, RealUnitVectors) {
  for (double j : {1.0, 10.0}) {
    const auto m = component_moment_check(SpinQuantumNumber::from_j(j), 100000, 5);
    EXPECT_LT(m.max_norm_deviation, 1e-12);
    EXPECT_NEAR(m.fourth.mean, m.expected_fourth, 3 * m.fourth.stderr_mean + 1e-12);
    EXPECT_NEAR(m.cross.mean, m.expected_cross, 3 * m.cross.stderr_mean + 1e-12);
    EXPECT_NEAR(m.sz_squared.mean, m.expected_collective, 3 * m.sz_squared.stderr_mean);
    EXPECT_NEAR(m.splus_sminus.mean, m.expected_collective, 3 * m.splus_sminus.stderr_mean);
    EXPECT_NEAR(m.q_measure.mean, analytic_q_average(SpinQuantumNumber::from_j(j)),
                3 * m.q_measure.stderr_mean);
  }
}

TEST(EigenvectorQ, SpinHalfDependsOnNormalization) {
  EigenvectorQSpec spec{SpinQuantumNumber::from_j(0.5), EigenvectorSource::floquet_k_range, 5};
  EXPECT_NEAR(eigenvector_q_statistics(spec).mean, 0.75, 1e-12);
  spec.normalization = QNormalization::qubit_2j;
  EXPECT_NEAR(eigenvector_q_statistics(spec).mean, 0.0, 1e-12);
}

TEST(EigenvectorQ, CoeSamplesMatchAnalytic) {
  EigenvectorQSpec spec{SpinQuantumNumber::from_j(10), EigenvectorSource::coe_samples, 200, 3};
  const auto stats = eigenvector_q_statistics(spec);
  EXPECT_EQ(stats.n_vectors, 200 * 21);
  EXPECT_NEAR(stats.mean, stats.analytic, 3 * stats.stderr_mean);
}

TEST(EigenvectorQ, BlockCoeEigenvectorsCarryNoMeanSpin) {
  // Real parity eigenstates have <J> = 0 for integer j.
  EigenvectorQSpec spec{SpinQuantumNumber::from_j(10), EigenvectorSource::coe_samples, 20, 3};
  spec.parity_resolved = true;
  EXPECT_NEAR(eigenvector_q_statistics(spec).mean, 1.0, 1e-8);
}

TEST(EigenvectorQ, FloquetMatchesAnalytic) {
  EigenvectorQSpec spec{SpinQuantumNumber::from_j(10), EigenvectorSource::floquet_k_range, 50};
  const auto stats = eigenvector_q_statistics(spec);
  EXPECT_NEAR(stats.mean, stats.analytic, 0.01);
  spec.parity_resolved = true;
  EXPECT_NEAR(eigenvector_q_statistics(spec).mean, stats.analytic, 0.01);
}

TEST(HaarReference, QubitStates) {
  const auto r = haar_q_reference(8, 2000, 4);
  EXPECT_NEAR(r.q.mean, r.exact, 3 * r.q.stderr_mean);
  EXPECT_NEAR(r.asymptotic, 1.0 - 3.0 / 256.0, 1e-15);
  EXPECT_GT(r.q.mean, analytic_q_average(SpinQuantumNumber::from_j(4)));
  Eigen::VectorXcd product = Eigen::VectorXcd::Zero(16);
  product(0) = 1.0;
  EXPECT_NEAR(q_measure_qubits(product, 4), 0.0, 1e-15);
  EXPECT_THROW(haar_q_reference(13, 1, 0), DomainError);
}

TEST(CoeTimeAverage, DeterministicAndConsistent) {
  const EnsembleSpec spec{SpinQuantumNumber::from_j(5), 3, 11};
  const auto a = coe_time_average(spec, M_PI / 2, -M_PI / 2, 40, 1);
  const auto b = coe_time_average(spec, M_PI / 2, -M_PI / 2, 40, 2);
  ASSERT_EQ(a.samples.size(), 3u);
  EXPECT_EQ(a.pooled.discord.mean, b.pooled.discord.mean);
  EXPECT_GT(a.stderr_mean.q_measure, 0.0);
  double mean = 0.0;
  for (const auto& s : a.samples) mean += s.q_measure.mean / 3.0;
  EXPECT_NEAR(a.pooled.q_measure.mean, mean, 1e-12);
}

TEST(EnsembleCsv, Header) {
  std::ostringstream out;
  write_ensemble_csv(out, {EnsembleRow{}});
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "j,ensemble,n_samples,seed,D_mean,DG_mean,Q_mean,Q_analytic,stderr_D,stderr_DG,stderr_Q");
  EXPECT_EQ(ensemble_from_string(to_string(Ensemble::full_coe)), Ensemble::full_coe);
  EXPECT_THROW(ensemble_from_string("gue"), DomainError);
}

}  // namespace
