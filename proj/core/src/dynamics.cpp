#include "kicktop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "kicktop/csv.hpp"
#include "kicktop/error.hpp"
#include "kicktop/parallel.hpp"
#include "kicktop/reduction.hpp"

namespace kicktop {

FloquetOperator::FloquetOperator(const JyEigensystem& jy, double k, double p)
    : FloquetOperator(jy.spin(), jy.rotation(p), k, p) {}

FloquetOperator::FloquetOperator(SpinQuantumNumber spin, CMatrix rotation, double k, double p)
    : spin_(spin), k_(k), p_(p), rotation_(std::move(rotation)), torsion_(torsion_diagonal(spin, k)) {
  if (!std::isfinite(p)) throw DomainError("p must be finite");
  if (rotation_.rows() != spin.dim() || rotation_.cols() != spin.dim()) {
    throw DomainError("rotation factor has the wrong dimension");
  }
}

CMatrix FloquetOperator::matrix() const { return torsion_.asDiagonal() * rotation_; }

void FloquetOperator::apply(const CVector& in, CVector& out) const {
  out.noalias() = rotation_ * in;
  out.array() *= torsion_.array();
}

FloquetOperator build_floquet(SpinQuantumNumber spin, double k, double p) {
  return FloquetOperator(JyEigensystem(spin), k, p);
}

DenseUnitary::DenseUnitary(SpinQuantumNumber spin, CMatrix matrix)
    : spin_(spin), matrix_(std::move(matrix)) {
  if (matrix_.rows() != spin.dim() || matrix_.cols() != spin.dim()) {
    throw DomainError("unitary has the wrong dimension");
  }
}

void DenseUnitary::apply(const CVector& in, CVector& out) const { out.noalias() = matrix_ * in; }

namespace {

// Shared loop for evolve() and correlation_time_series(); returns the largest
// pre-renormalization norm drift.
double run_evolution(SymmetricState& state, const Propagator& u, int n_steps,
                     const std::function<void(int, const SymmetricState&)>& on_step) {
  if (state.spin() != u.spin()) throw DomainError("state and propagator have different j");
  if (n_steps < 0) throw DomainError("n_steps must be non-negative");
  CVector current = state.amplitudes();
  CVector next(current.size());
  double max_drift = 0.0;
  for (int t = 1; t <= n_steps; ++t) {
    u.apply(current, next);
    max_drift = std::max(max_drift, std::abs(next.squaredNorm() - 1.0));
    state.assign(next);
    current = state.amplitudes();
    if (on_step) on_step(t, state);
  }
  return max_drift;
}

}  // namespace

void evolve(SymmetricState& state, const Propagator& u, int n_steps,
            const std::function<void(int, const SymmetricState&)>& on_step) {
  run_evolution(state, u, n_steps, on_step);
}

CorrelationTimeSeries correlation_time_series(const SymmetricState& initial, const Propagator& u,
                                              int n_steps, TrajectoryMetadata meta) {
  if (n_steps < 1) throw DomainError("time series needs at least one step");
  CorrelationTimeSeries series;
  meta.n_steps = n_steps;
  series.meta = meta;
  series.records.reserve(n_steps);
  SymmetricState state = initial;
  const bool pairs = state.spin().qubits() >= 2;
  series.max_norm_drift = run_evolution(state, u, n_steps, [&](int t, const SymmetricState& psi) {
    CorrelationRecord rec;
    rec.t = t;
    if (pairs) {
      const TwoQubitDensityMatrix rho = two_qubit_rdm(psi);
      const BlochForm bloch = bloch_decompose(rho);
      series.max_exchange_asymmetry =
          std::max(series.max_exchange_asymmetry, (bloch.x - bloch.y).cwiseAbs().maxCoeff());
      rec.values.discord = quantum_discord(rho, meta.unit);
      rec.values.geometric_discord = geometric_discord(bloch);
    }
    rec.values.q_measure = meta.normalization == QNormalization::qubit_2j
                               ? q_measure(psi)
                               : q_measure_collective(psi, meta.normalization);
    if (!satisfies_discord_bound(rec.values)) ++series.bound_violations;
    series.records.push_back(rec);
  });
  return series;
}

TimeAverage summarize(const CorrelationTimeSeries& series) {
  TimeAverage avg;
  const auto n = static_cast<double>(series.records.size());
  avg.steps = static_cast<int>(series.records.size());
  avg.bound_violations = series.bound_violations;
  if (series.records.empty()) return avg;
  auto stats = [&](auto field) {
    double sum = 0.0;
    for (const auto& r : series.records) sum += field(r.values);
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& r : series.records) sq += std::pow(field(r.values) - mean, 2);
    return MeasureStats{mean, std::sqrt(sq / n)};
  };
  avg.discord = stats([](const CorrelationValues& v) { return v.discord; });
  avg.geometric_discord = stats([](const CorrelationValues& v) { return v.geometric_discord; });
  avg.q_measure = stats([](const CorrelationValues& v) { return v.q_measure; });
  return avg;
}

namespace {

TrajectoryMetadata metadata_of(const TrajectorySpec& spec) {
  return {spec.spin.j(), spec.k, spec.p, spec.theta0, spec.phi0,
          spec.steps, spec.normalization, spec.unit};
}

TimeAverage averaged_run(const TrajectorySpec& spec, const JyEigensystem& jy,
                         const CMatrix& rotation, const SymmetricState& initial) {
  if (spec.steps < 1) throw DomainError("averaging window T must be >= 1");
  const FloquetOperator u(jy.spin(), rotation, spec.k, spec.p);
  return summarize(correlation_time_series(initial, u, spec.steps, metadata_of(spec)));
}

}  // namespace

TimeAverage time_averaged_correlations(const TrajectorySpec& spec, const JyEigensystem& jy) {
  if (jy.spin() != spec.spin) throw DomainError("J_y eigensystem built for a different j");
  return averaged_run(spec, jy, jy.rotation(spec.p), coherent_state(jy, spec.theta0, spec.phi0));
}

TimeAverage time_averaged_correlations(const TrajectorySpec& spec) {
  return time_averaged_correlations(spec, JyEigensystem(spec.spin));
}

SweepRecord sweep_k(SpinQuantumNumber spin, double p, double theta0, double phi0,
                    const std::vector<double>& k_grid, int window, unsigned threads,
                    QNormalization normalization, EntropyUnit unit) {
  if (k_grid.empty()) throw DomainError("k grid is empty");
  if (window < 1) throw DomainError("averaging window T must be >= 1");
  const JyEigensystem jy(spin);
  const CMatrix rotation = jy.rotation(p);
  const SymmetricState initial = coherent_state(jy, theta0, phi0);

  SweepRecord sweep{SweepAxis::k, p, theta0, phi0, window, {}};
  sweep.points.resize(k_grid.size());
  parallel_for(k_grid.size(), threads, [&](std::size_t i) {
    const TrajectorySpec spec{spin, k_grid[i], p, theta0, phi0, window, normalization, unit};
    sweep.points[i] = {k_grid[i], spin.j(), k_grid[i], averaged_run(spec, jy, rotation, initial)};
  });
  return sweep;
}

SweepRecord sweep_j(double k, double p, double theta0, double phi0,
                    const std::vector<SpinQuantumNumber>& j_list, int window, unsigned threads,
                    QNormalization normalization, EntropyUnit unit) {
  if (j_list.empty()) throw DomainError("j list is empty");
  if (window < 1) throw DomainError("averaging window T must be >= 1");
  SweepRecord sweep{SweepAxis::j, p, theta0, phi0, window, {}};
  sweep.points.resize(j_list.size());
  parallel_for(j_list.size(), threads, [&](std::size_t i) {
    const TrajectorySpec spec{j_list[i], k, p, theta0, phi0, window, normalization, unit};
    sweep.points[i] = {j_list[i].j(), j_list[i].j(), k, time_averaged_correlations(spec)};
  });
  return sweep;
}

std::vector<SpinQuantumNumber> log_spaced_spins(double j_lo, double j_hi, int n) {
  if (!(j_lo >= 0.5) || !(j_hi >= j_lo) || n < 1) {
    throw DomainError("log-spaced j grid needs 0.5 <= j_lo <= j_hi and n >= 1");
  }
  std::vector<int> twice;
  for (int i = 0; i < n; ++i) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    const double j = j_lo * std::pow(j_hi / j_lo, frac);
    // Integer j keeps every grid point in the same (integer-spin) symmetry class.
    twice.push_back(2 * std::max(1, static_cast<int>(std::lround(j))));
  }
  std::sort(twice.begin(), twice.end());
  twice.erase(std::unique(twice.begin(), twice.end()), twice.end());
  std::vector<SpinQuantumNumber> out;
  for (int t : twice) out.push_back(SpinQuantumNumber::from_twice(t));
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepRecord& sweep) {
  using csv::format_number;
  out << "axis_value,D_mean,D_std,DG_mean,DG_std,Q_mean,Q_std,T,j,k,p,theta0,phi0\n";
  for (const auto& pt : sweep.points) {
    const TimeAverage& a = pt.average;
    out << format_number(pt.axis_value) << ',' << format_number(a.discord.mean) << ','
        << format_number(a.discord.std) << ',' << format_number(a.geometric_discord.mean) << ','
        << format_number(a.geometric_discord.std) << ',' << format_number(a.q_measure.mean) << ','
        << format_number(a.q_measure.std) << ',' << sweep.window << ',' << format_number(pt.j)
        << ',' << format_number(pt.k) << ',' << format_number(sweep.p) << ','
        << format_number(sweep.theta0) << ',' << format_number(sweep.phi0) << '\n';
  }
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("linear fit needs equally many x and y values");
  const auto n = static_cast<int>(x.size());
  if (n < 3) throw DomainError("linear fit needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("linear fit needs at least two distinct x values");
  LinearFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (int i = 0; i < n; ++i) ssr += std::pow(y[i] - fit.intercept - fit.slope * x[i], 2);
  const double sigma2 = ssr / (n - 2);
  fit.stderr_slope = std::sqrt(sigma2 / sxx);
  double sum_x2 = 0.0;
  for (double v : x) sum_x2 += v * v;
  fit.stderr_intercept = std::sqrt(sigma2 * sum_x2 / (n * sxx));
  return fit;
}

LinearFit pooled_discord_relation(const std::vector<CorrelationTimeSeries>& runs) {
  std::vector<double> d, dg;
  for (const auto& run : runs) {
    for (const auto& r : run.records) {
      d.push_back(r.values.discord);
      dg.push_back(r.values.geometric_discord);
    }
  }
  return linear_fit(d, dg);
}

PowerLawFit power_law_fit(const std::vector<double>& j, const std::vector<double>& values) {
  if (j.size() != values.size()) throw DomainError("power-law fit needs matching j and values");
  if (j.size() < 5) throw DomainError("power-law fit needs at least 5 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!(values[i] > 0.0) || !(j[i] > 0.0)) {
      throw DomainError("power-law fit window contains a non-positive value");
    }
    lx.push_back(std::log(j[i]));
    ly.push_back(std::log(values[i]));
  }
  const LinearFit line = linear_fit(lx, ly);
  return {-line.slope, line.stderr_slope, line.intercept, line.points};
}

PowerLawFits power_law_fit(const SweepRecord& sweep, double j_min) {
  std::vector<double> js, d, dg, q;
  for (const auto& pt : sweep.points) {
    if (pt.j < j_min) continue;
    js.push_back(pt.j);
    d.push_back(pt.average.discord.mean);
    dg.push_back(pt.average.geometric_discord.mean);
    q.push_back(pt.average.q_measure.mean);
  }
  return {power_law_fit(js, d), power_law_fit(js, dg), power_law_fit(js, q)};
}

std::optional<double> locate_jump(const SweepRecord& sweep, double width) {
  const auto& pts = sweep.points;
  if (pts.size() < 2) return std::nullopt;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].average.discord.mean > 0.0)) return std::nullopt;
    if (!(pts[i].axis_value > 0.0)) throw DomainError("sweep axis must be positive");
    if (i && !(pts[i].axis_value > pts[i - 1].axis_value)) {
      throw DomainError("sweep axis must be strictly increasing");
    }
  }
  if (pts.back().axis_value - pts.front().axis_value < width) width = 0.0;
  std::optional<double> best_at;
  double best_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, l = 1; i + 1 < pts.size(); ++i) {
    l = std::max(l, i + 1);
    while (l < pts.size() && pts[l].axis_value - pts[i].axis_value < width - 1e-9) ++l;
    if (l == pts.size()) break;
    const double slope =
        (std::log(pts[l].average.discord.mean) - std::log(pts[i].average.discord.mean)) /
        (std::log(pts[l].axis_value) - std::log(pts[i].axis_value));
    if (slope > best_slope) {
      best_slope = slope;
      best_at = 0.5 * (pts[i].axis_value + pts[l].axis_value);
    }
  }
  return best_at;
}

}  // namespace kicktop
