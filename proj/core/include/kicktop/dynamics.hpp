#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "kicktop/correlations.hpp"
#include "kicktop/spin.hpp"

namespace kicktop {

// One-period unitary acting on states of a fixed spin.
class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual SpinQuantumNumber spin() const = 0;
  // out = U in; `out` never aliases `in`.
  virtual void apply(const CVector& in, CVector& out) const = 0;
};

// U = exp(-i (k/2j) J_z^2) exp(-i p J_y), kept factored: the rotation is
// dense, the torsion diagonal.
class FloquetOperator final : public Propagator {
 public:
  FloquetOperator(const JyEigensystem& jy, double k, double p);
  // Reuses a precomputed exp(-i p J_y).
  FloquetOperator(SpinQuantumNumber spin, CMatrix rotation, double k, double p);

  SpinQuantumNumber spin() const override { return spin_; }
  double k() const noexcept { return k_; }
  double p() const noexcept { return p_; }
  const CMatrix& rotation() const noexcept { return rotation_; }
  const CVector& torsion() const noexcept { return torsion_; }

  // Assembled d x d matrix.
  CMatrix matrix() const;
  void apply(const CVector& in, CVector& out) const override;

 private:
  SpinQuantumNumber spin_;
  double k_;
  double p_;
  CMatrix rotation_;
  CVector torsion_;
};

FloquetOperator build_floquet(SpinQuantumNumber spin, double k, double p);

// Arbitrary dense unitary, e.g. an ensemble sample.
class DenseUnitary final : public Propagator {
 public:
  DenseUnitary(SpinQuantumNumber spin, CMatrix matrix);
  SpinQuantumNumber spin() const override { return spin_; }
  const CMatrix& matrix() const noexcept { return matrix_; }
  void apply(const CVector& in, CVector& out) const override;

 private:
  SpinQuantumNumber spin_;
  CMatrix matrix_;
};

// Applies `u` n_steps times, calling on_step(t, psi(t)) for t = 1..n_steps.
// Renormalizes whenever the norm drifts by more than 1e-12.
void evolve(SymmetricState& state, const Propagator& u, int n_steps,
            const std::function<void(int, const SymmetricState&)>& on_step);

struct CorrelationRecord {
  int t = 0;
  CorrelationValues values;
};

struct TrajectoryMetadata {
  double j = 0.0;
  double k = 0.0;
  double p = 0.0;
  double theta0 = 0.0;
  double phi0 = 0.0;
  int n_steps = 0;
  QNormalization normalization = QNormalization::qubit_2j;
  EntropyUnit unit = EntropyUnit::nats;
};

struct CorrelationTimeSeries {
  TrajectoryMetadata meta;
  std::vector<CorrelationRecord> records;  // t = 1..n_steps
  int bound_violations = 0;                // records with D^G < D^2/2 - 1e-9
  double max_exchange_asymmetry = 0.0;     // max |x - y| over all Bloch forms
  double max_norm_drift = 0.0;             // max ||psi(t)|^2 - 1| before renormalization
};

// Evolves `initial` under `u` for n_steps and evaluates D, D^G and Q at
// every step (the t = 0 state is not recorded).
CorrelationTimeSeries correlation_time_series(const SymmetricState& initial, const Propagator& u,
                                              int n_steps, TrajectoryMetadata meta);

struct MeasureStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation over steps
};

struct TimeAverage {
  MeasureStats discord;
  MeasureStats geometric_discord;
  MeasureStats q_measure;
  int steps = 0;
  int bound_violations = 0;
};

TimeAverage summarize(const CorrelationTimeSeries& series);

struct TrajectorySpec {
  SpinQuantumNumber spin;
  double k = 0.0;
  double p = 0.0;
  double theta0 = 0.0;
  double phi0 = 0.0;
  int steps = 1000;
  QNormalization normalization = QNormalization::qubit_2j;
  EntropyUnit unit = EntropyUnit::nats;
};

// Coherent state at (theta0, phi0) evolved by the kicked top; means over
// steps 1..T.
TimeAverage time_averaged_correlations(const TrajectorySpec& spec);
TimeAverage time_averaged_correlations(const TrajectorySpec& spec, const JyEigensystem& jy);

enum class SweepAxis { k, j };

struct SweepPoint {
  double axis_value = 0.0;
  double j = 0.0;
  double k = 0.0;
  TimeAverage average;
};

struct SweepRecord {
  SweepAxis axis = SweepAxis::k;
  double p = 0.0;
  double theta0 = 0.0;
  double phi0 = 0.0;
  int window = 0;
  std::vector<SweepPoint> points;  // ordered by axis value as given
};

// Grid points run on up to `threads` workers; output does not depend on it.
SweepRecord sweep_k(SpinQuantumNumber spin, double p, double theta0, double phi0,
                    const std::vector<double>& k_grid, int window, unsigned threads = 1,
                    QNormalization normalization = QNormalization::qubit_2j,
                    EntropyUnit unit = EntropyUnit::nats);

SweepRecord sweep_j(double k, double p, double theta0, double phi0,
                    const std::vector<SpinQuantumNumber>& j_list, int window, unsigned threads = 1,
                    QNormalization normalization = QNormalization::qubit_2j,
                    EntropyUnit unit = EntropyUnit::nats);

// n values of 2j, log-spaced on [j_lo, j_hi], deduplicated, ascending.
std::vector<SpinQuantumNumber> log_spaced_spins(double j_lo, double j_hi, int n);

// "axis_value,D_mean,D_std,DG_mean,DG_std,Q_mean,Q_std,T,j,k,p,theta0,phi0".
void write_sweep_csv(std::ostream& out, const SweepRecord& sweep);

struct PowerLawFit {
  double mu = 0.0;      // value ~ j^{-mu}
  double stderr_mu = 0.0;
  double log_prefactor = 0.0;
  int points = 0;
};

// Least squares of log(value) on log(j); needs >= 5 points, all positive.
PowerLawFit power_law_fit(const std::vector<double>& j, const std::vector<double>& values);

struct PowerLawFits {
  PowerLawFit discord;
  PowerLawFit geometric_discord;
  PowerLawFit q_measure;
};

// Fits the three time-averaged measures over sweep points with j >= j_min.
PowerLawFits power_law_fit(const SweepRecord& sweep, double j_min);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double stderr_intercept = 0.0;
  int points = 0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// D^G against D over every record of every series.
LinearFit pooled_discord_relation(const std::vector<CorrelationTimeSeries>& runs);

// Midpoint of the window, at least `width` wide on the axis, over which
// d log(mean discord) / d log(axis) is largest; windows span whole grid
// intervals. Empty if fewer than two grid points or any mean is not
// positive. Throws DomainError unless the axis is positive and increasing.
std::optional<double> locate_jump(const SweepRecord& sweep, double width = 0.3);

}  // namespace kicktop
