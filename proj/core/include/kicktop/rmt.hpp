#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kicktop/dynamics.hpp"
#include "kicktop/random.hpp"
#include "kicktop/spin.hpp"

namespace kicktop {

// Eigenspaces of the y-parity P = e^{i pi j} exp(-i pi J_y). The phase makes
// P an involution for half-integer j as well; for integer j it is exactly
// exp(-i pi J_y).
struct ParityBasis {
  SpinQuantumNumber spin;
  CMatrix parity;  // P in the |j,m> basis
  CMatrix plus;    // d x d_+ orthonormal columns, P = +1
  CMatrix minus;   // d x d_- orthonormal columns, P = -1

  int d_plus() const noexcept { return static_cast<int>(plus.cols()); }
  int d_minus() const noexcept { return static_cast<int>(minus.cols()); }
};

// Throws NumericalError if an eigenvalue of P is further than 1e-6 from +-1.
ParityBasis parity_basis(SpinQuantumNumber spin);

enum class Ensemble { block_coe, full_coe, haar_sphere_real };

std::string to_string(Ensemble e);
Ensemble ensemble_from_string(const std::string& name);

struct EnsembleSpec {
  SpinQuantumNumber spin;
  int n_samples = 1;
  std::uint64_t rng_seed = 0;
  Ensemble ensemble = Ensemble::block_coe;
};

// Haar unitary: QR of a complex Ginibre matrix with R's diagonal made
// positive.
CMatrix sample_cue(int dim, Rng& rng);
// U^T U with U from sample_cue.
CMatrix sample_coe(int dim, Rng& rng);

// Independent COE blocks on the two parity sectors, expressed in the |j,m>
// basis. Sample `index` always uses RNG stream `index` of spec.rng_seed.
CMatrix sample_block_coe(const EnsembleSpec& spec, const ParityBasis& basis, int index);
CMatrix sample_full_coe(const EnsembleSpec& spec, int index);

struct EnsembleAverage {
  std::vector<TimeAverage> samples;
  TimeAverage pooled;            // means over all samples and steps
  CorrelationValues stderr_mean; // spread of per-sample means / sqrt(n); 0 for one sample
};

// Coherent state at (theta0, phi0) evolved for T steps under each of the
// spec.n_samples COE matrices.
EnsembleAverage coe_time_average(const EnsembleSpec& spec, double theta0, double phi0, int steps,
                                 unsigned threads = 1,
                                 QNormalization normalization = QNormalization::qubit_2j,
                                 EntropyUnit unit = EntropyUnit::nats);

// Exact rational with 64-bit parts, always reduced, positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend bool operator==(const Rational&, const Rational&) = default;
};

// 1 - 16 j (j+1) / (3 (2j+3) (2j+1)^2), the mean Q (2j+1 normalization) of
// uniformly random real unit vectors.
Rational analytic_q_average_exact(SpinQuantumNumber spin);
double analytic_q_average(SpinQuantumNumber spin);
// Same ensemble mean under either normalization of Q.
Rational analytic_q_average_exact(SpinQuantumNumber spin, QNormalization normalization);
double analytic_q_average(SpinQuantumNumber spin, QNormalization normalization);

enum class EigenvectorSource { coe_samples, floquet_k_range };

struct EigenvectorQSpec {
  SpinQuantumNumber spin;
  EigenvectorSource source = EigenvectorSource::coe_samples;
  int n_matrices = 100;  // COE samples, or k values for the Floquet source
  std::uint64_t rng_seed = 0;
  // COE: block (parity-resolved) instead of full-dimension COE samples.
  // Floquet: diagonalize each parity block separately.
  bool parity_resolved = false;
  double k_lo = 10.0;
  double k_hi = 1000.0;
  double p = 1.7;
  QNormalization normalization = QNormalization::paper_2jplus1;
};

struct EigenvectorQStats {
  double mean = 0.0;
  double stderr_mean = 0.0;  // over per-matrix means
  int n_matrices = 0;
  int n_vectors = 0;
  double analytic = 0.0;
};

// Mean Q (2j+1 normalization) over all eigenvectors of each matrix. Floquet
// k values are evenly spaced on [k_lo, k_hi].
EigenvectorQStats eigenvector_q_statistics(const EigenvectorQSpec& spec, unsigned threads = 1);

// Uniform point on the unit sphere in R^dim.
Eigen::VectorXd random_real_unit_vector(int dim, Rng& rng);
Eigen::VectorXcd random_complex_unit_vector(int dim, Rng& rng);

struct Estimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

struct MomentCheck {
  Estimate fourth;        // <|a_m|^4>, averaged over m
  Estimate cross;         // <|a_m|^2 |a_n|^2>, averaged over m != n
  Estimate sz_squared;    // <<S_z>^2>
  Estimate splus_sminus;  // <<S_+><S_->>
  Estimate q_measure;     // Q with 2j+1 normalization
  double expected_fourth = 0.0;      // 3 / ((2j+1)(2j+3))
  double expected_cross = 0.0;       // 1 / ((2j+1)(2j+3))
  double expected_collective = 0.0;  // 2 j (j+1) / (3 (2j+3))
  double max_norm_deviation = 0.0;   // max |sum_m a_m^2 - 1|
};

MomentCheck component_moment_check(SpinQuantumNumber spin, int n_samples, std::uint64_t seed);

// Both finite sums from the derivation of the mean Q, in exact arithmetic.
struct SummationIdentity {
  Rational sum_m_squared;       // sum_{m=-j}^{j} m^2
  Rational closed_m_squared;    // j (j+1) (2j+1) / 3
  Rational sum_ladder;          // sum_{m=-j}^{j-1} (j-m)(j+m+1)
  Rational closed_ladder;       // 2j (j^2+j) + j + j^2 - j (j+1) (2j+1) / 3
  bool holds() const noexcept {
    return sum_m_squared == closed_m_squared && sum_ladder == closed_ladder;
  }
};

SummationIdentity summation_identity(SpinQuantumNumber spin);

// Meyer-Wallach Q of an arbitrary N-qubit pure state (bit b of the index is
// qubit b, 0 = up).
double q_measure_qubits(const Eigen::VectorXcd& psi, int qubits);

struct HaarQReference {
  Estimate q;
  double asymptotic = 0.0;  // 1 - 3 / 2^N
  double exact = 0.0;       // 1 - 3 / (2^N + 1)
};

// Monte Carlo mean Q over Haar-random states of N <= 12 qubits.
HaarQReference haar_q_reference(int qubits, int n_samples, std::uint64_t seed);

// Mean of min(s_i, s_{i+1}) / max(s_i, s_{i+1}) over consecutive
// nearest-neighbour spacings of eigenphases on the unit circle.
struct SpacingRatio {
  double mean = 0.0;
  int count = 0;
};

SpacingRatio spacing_ratio(std::vector<double> phases);
// Eigenphases of a unitary, in (-pi, pi].
std::vector<double> eigenphases(const CMatrix& u);

// Spacing ratios of block-COE samples, pooled over samples and evaluated per
// parity block.
SpacingRatio block_coe_spacing_ratio(const EnsembleSpec& spec, const ParityBasis& basis);

struct EnsembleRow {
  double j = 0.0;
  Ensemble ensemble = Ensemble::block_coe;
  int n_samples = 0;
  std::uint64_t seed = 0;
  double d_mean = 0.0;
  double dg_mean = 0.0;
  double q_mean = 0.0;
  double q_analytic = 0.0;
  double stderr_d = 0.0;
  double stderr_dg = 0.0;
  double stderr_q = 0.0;
};

// "j,ensemble,n_samples,seed,D_mean,DG_mean,Q_mean,Q_analytic,stderr_D,stderr_DG,stderr_Q".
void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleRow>& rows);

}  // namespace kicktop
