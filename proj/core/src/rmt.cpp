#include "kicktop/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "kicktop/csv.hpp"
#include "kicktop/error.hpp"
#include "kicktop/parallel.hpp"

namespace kicktop {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw DomainError("rational arithmetic overflow");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw DomainError("rational arithmetic overflow");
  return out;
}

class Accumulator {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / n_;
    m2_ += delta * (x - mean_);
  }
  Estimate estimate() const {
    if (n_ < 2) return {mean_, 0.0};
    return {mean_, std::sqrt(m2_ / (n_ - 1) / n_)};
  }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace

ParityBasis parity_basis(SpinQuantumNumber spin) {
  const JyEigensystem jy(spin);
  const Complex phase = std::polar(1.0, kPi * spin.j());
  CMatrix parity = phase * jy.rotation(kPi);
  if ((parity - parity.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericalError("parity operator is not Hermitian");
  }
  parity = 0.5 * (parity + parity.adjoint());

  Eigen::VectorXd values;
  CMatrix vectors;
  if (spin.twice_j() % 2 == 0) {
    if (parity.imag().cwiseAbs().maxCoeff() > 1e-10) {
      throw NumericalError("integer-j parity operator is not real");
    }
    parity = parity.real().cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(parity.real());
    values = solver.eigenvalues();
    vectors = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(parity);
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i) - 1.0) < 1e-6) {
      plus.push_back(i);
    } else if (std::abs(values(i) + 1.0) < 1e-6) {
      minus.push_back(i);
    } else {
      throw NumericalError("parity eigenvalue " + std::to_string(values(i)) + " is not +-1");
    }
  }
  ParityBasis out{spin, parity, CMatrix(spin.dim(), plus.size()), CMatrix(spin.dim(), minus.size())};
  for (std::size_t c = 0; c < plus.size(); ++c) out.plus.col(c) = vectors.col(plus[c]);
  for (std::size_t c = 0; c < minus.size(); ++c) out.minus.col(c) = vectors.col(minus[c]);
  return out;
}

std::string to_string(Ensemble e) {
  switch (e) {
    case Ensemble::block_coe:
      return "block_coe";
    case Ensemble::full_coe:
      return "full_coe";
    case Ensemble::haar_sphere_real:
      return "haar_sphere_real";
  }
  return "unknown";
}

Ensemble ensemble_from_string(const std::string& name) {
  for (Ensemble e : {Ensemble::block_coe, Ensemble::full_coe, Ensemble::haar_sphere_real}) {
    if (to_string(e) == name) return e;
  }
  throw DomainError("unknown ensemble '" + name + "'");
}

CMatrix sample_cue(int dim, Rng& rng) {
  if (dim < 1) throw DomainError("unitary dimension must be >= 1");
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CMatrix z(dim, dim);
  for (int c = 0; c < dim; ++c) {
    for (int r = 0; r < dim; ++r) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z(r, c) = Complex(re, im);
    }
  }
  const Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int c = 0; c < dim; ++c) {
    const double mag = std::abs(r(c, c));
    if (mag > 0.0) q.col(c) *= r(c, c) / mag;
  }
  return q;
}

CMatrix sample_coe(int dim, Rng& rng) {
  const CMatrix u = sample_cue(dim, rng);
  return u.transpose() * u;
}

namespace {

struct BlockFactors {
  CMatrix plus;
  CMatrix minus;
};

BlockFactors block_factors(const EnsembleSpec& spec, const ParityBasis& basis, int index) {
  if (basis.spin != spec.spin) throw DomainError("parity basis built for a different j");
  if (index < 0) throw DomainError("sample index must be non-negative");
  Rng rng = make_stream(spec.rng_seed, static_cast<std::uint64_t>(index));
  BlockFactors f;
  if (basis.d_plus() > 0) f.plus = sample_coe(basis.d_plus(), rng);
  if (basis.d_minus() > 0) f.minus = sample_coe(basis.d_minus(), rng);
  return f;
}

CMatrix assemble(const ParityBasis& basis, const BlockFactors& f) {
  CMatrix w = CMatrix::Zero(basis.spin.dim(), basis.spin.dim());
  if (basis.d_plus() > 0) w += basis.plus * f.plus * basis.plus.adjoint();
  if (basis.d_minus() > 0) w += basis.minus * f.minus * basis.minus.adjoint();
  return w;
}

}  // namespace

CMatrix sample_block_coe(const EnsembleSpec& spec, const ParityBasis& basis, int index) {
  return assemble(basis, block_factors(spec, basis, index));
}

CMatrix sample_full_coe(const EnsembleSpec& spec, int index) {
  if (index < 0) throw DomainError("sample index must be non-negative");
  Rng rng = make_stream(spec.rng_seed, static_cast<std::uint64_t>(index));
  return sample_coe(spec.spin.dim(), rng);
}

EnsembleAverage coe_time_average(const EnsembleSpec& spec, double theta0, double phi0, int steps,
                                 unsigned threads, QNormalization normalization,
                                 EntropyUnit unit) {
  if (spec.n_samples < 1) throw DomainError("n_samples must be >= 1");
  if (steps < 1) throw DomainError("averaging window T must be >= 1");
  if (spec.ensemble == Ensemble::haar_sphere_real) {
    throw DomainError("time averages need a unitary ensemble");
  }
  const JyEigensystem jy(spec.spin);
  const SymmetricState initial = coherent_state(jy, theta0, phi0);
  const ParityBasis basis = spec.ensemble == Ensemble::block_coe ? parity_basis(spec.spin)
                                                               : ParityBasis{spec.spin, {}, {}, {}};
  TrajectoryMetadata meta{spec.spin.j(), 0.0, 0.0, theta0, phi0, steps, normalization, unit};

  EnsembleAverage out;
  out.samples.resize(spec.n_samples);
  parallel_for(spec.n_samples, threads, [&](std::size_t i) {
    const int index = static_cast<int>(i);
    CMatrix w = spec.ensemble == Ensemble::block_coe ? sample_block_coe(spec, basis, index)
                                                     : sample_full_coe(spec, index);
    const DenseUnitary u(spec.spin, std::move(w));
    out.samples[i] = summarize(correlation_time_series(initial, u, steps, meta));
  });

  const double n = spec.n_samples;
  auto pool = [&](auto field, double& stderr_out) {
    double mean = 0.0, second = 0.0;
    for (const TimeAverage& s : out.samples) {
      const MeasureStats& m = field(s);
      mean += m.mean / n;
      second += (m.std * m.std + m.mean * m.mean) / n;
    }
    double spread = 0.0;
    for (const TimeAverage& s : out.samples) spread += std::pow(field(s).mean - mean, 2);
    stderr_out = spec.n_samples > 1 ? std::sqrt(spread / (n - 1) / n) : 0.0;
    return MeasureStats{mean, std::sqrt(std::max(second - mean * mean, 0.0))};
  };
  out.pooled.discord = pool([](const TimeAverage& a) -> const MeasureStats& { return a.discord; },
                            out.stderr_mean.discord);
  out.pooled.geometric_discord =
      pool([](const TimeAverage& a) -> const MeasureStats& { return a.geometric_discord; },
           out.stderr_mean.geometric_discord);
  out.pooled.q_measure = pool([](const TimeAverage& a) -> const MeasureStats& { return a.q_measure; },
                              out.stderr_mean.q_measure);
  for (const TimeAverage& s : out.samples) {
    out.pooled.steps += s.steps;
    out.pooled.bound_violations += s.bound_violations;
  }
  return out;
}

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (d == 0) throw DomainError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational operator+(Rational a, Rational b) {
  const std::int64_t g = std::gcd(a.den, b.den);
  const std::int64_t l = checked_mul(a.den / g, b.den);
  return {checked_add(checked_mul(a.num, l / a.den), checked_mul(b.num, l / b.den)), l};
}

Rational operator-(Rational a, Rational b) { return a + Rational(-b.num, b.den); }

Rational operator*(Rational a, Rational b) {
  const std::int64_t g1 = std::gcd(a.num, b.den);
  const std::int64_t g2 = std::gcd(b.num, a.den);
  const std::int64_t s1 = g1 == 0 ? 1 : g1;
  const std::int64_t s2 = g2 == 0 ? 1 : g2;
  return {checked_mul(a.num / s1, b.num / s2), checked_mul(a.den / s2, b.den / s1)};
}

Rational operator/(Rational a, Rational b) {
  if (b.num == 0) throw DomainError("rational division by zero");
  return a * Rational(b.den, b.num);
}

Rational analytic_q_average_exact(SpinQuantumNumber spin, QNormalization normalization) {
  const std::int64_t n = spin.qubits();
  if (n > 20000) throw DomainError("exact mean Q limited to 2j <= 20000");
  const std::int64_t s = normalization == QNormalization::paper_2jplus1 ? n + 1 : n;
  // 1 - 4 n (n+2) / (3 (n+3) s^2), with n = 2j.
  return Rational(1) - Rational(4 * n * (n + 2), 3 * (n + 3) * s * s);
}

Rational analytic_q_average_exact(SpinQuantumNumber spin) {
  return analytic_q_average_exact(spin, QNormalization::paper_2jplus1);
}

double analytic_q_average(SpinQuantumNumber spin, QNormalization normalization) {
  return analytic_q_average_exact(spin, normalization).value();
}

double analytic_q_average(SpinQuantumNumber spin) {
  return analytic_q_average(spin, QNormalization::paper_2jplus1);
}

namespace {

double eigenvector_mean_q(SpinQuantumNumber spin, const CMatrix& vectors,
                          QNormalization normalization) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const SymmetricState psi = SymmetricState::normalized(spin, vectors.col(c));
    sum += q_measure_collective(psi, normalization);
  }
  return sum / static_cast<double>(vectors.cols());
}

CMatrix eigenvectors_of(const CMatrix& u) {
  Eigen::ComplexEigenSolver<CMatrix> solver(u);
  if (solver.info() != Eigen::Success) throw NumericalError("unitary diagonalization failed");
  return solver.eigenvectors();
}

CMatrix blockwise_eigenvectors(const ParityBasis& basis, const CMatrix& plus_block,
                               const CMatrix& minus_block) {
  CMatrix out(basis.spin.dim(), basis.spin.dim());
  if (basis.d_plus() > 0) out.leftCols(basis.d_plus()) = basis.plus * eigenvectors_of(plus_block);
  if (basis.d_minus() > 0) {
    out.rightCols(basis.d_minus()) = basis.minus * eigenvectors_of(minus_block);
  }
  return out;
}

}  // namespace

EigenvectorQStats eigenvector_q_statistics(const EigenvectorQSpec& spec, unsigned threads) {
  if (spec.n_matrices < 1) throw DomainError("n_matrices must be >= 1");
  const bool floquet = spec.source == EigenvectorSource::floquet_k_range;
  if (floquet && !(spec.k_hi >= spec.k_lo)) throw DomainError("k range must satisfy k_lo <= k_hi");

  const bool need_basis = spec.parity_resolved;
  const ParityBasis basis = need_basis ? parity_basis(spec.spin) : ParityBasis{spec.spin, {}, {}, {}};
  const EnsembleSpec ensemble{spec.spin, spec.n_matrices, spec.rng_seed,
                              spec.parity_resolved ? Ensemble::block_coe : Ensemble::full_coe};
  const JyEigensystem jy(spec.spin);
  const CMatrix rotation = floquet ? jy.rotation(spec.p) : CMatrix();

  std::vector<double> per_matrix(spec.n_matrices);
  parallel_for(spec.n_matrices, threads, [&](std::size_t i) {
    const int index = static_cast<int>(i);
    CMatrix vectors;
    if (floquet) {
      const double k = spec.n_matrices == 1
                           ? spec.k_lo
                           : spec.k_lo + (spec.k_hi - spec.k_lo) * index / (spec.n_matrices - 1);
      const CMatrix u = FloquetOperator(spec.spin, rotation, k, spec.p).matrix();
      vectors = spec.parity_resolved
                    ? blockwise_eigenvectors(basis, basis.plus.adjoint() * u * basis.plus,
                                             basis.minus.adjoint() * u * basis.minus)
                    : eigenvectors_of(u);
    } else if (spec.parity_resolved) {
      const BlockFactors f = block_factors(ensemble, basis, index);
      vectors = blockwise_eigenvectors(basis, f.plus, f.minus);
    } else {
      vectors = eigenvectors_of(sample_full_coe(ensemble, index));
    }
    per_matrix[i] = eigenvector_mean_q(spec.spin, vectors, spec.normalization);
  });

  Accumulator acc;
  for (double q : per_matrix) acc.add(q);
  const Estimate e = acc.estimate();
  return {e.mean, e.stderr_mean, spec.n_matrices, spec.n_matrices * spec.spin.dim(),
          analytic_q_average(spec.spin, spec.normalization)};
}

Eigen::VectorXd random_real_unit_vector(int dim, Rng& rng) {
  if (dim < 1) throw DomainError("dimension must be >= 1");
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(dim);
  do {
    for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
  } while (v.squaredNorm() == 0.0);
  return v.normalized();
}

Eigen::VectorXcd random_complex_unit_vector(int dim, Rng& rng) {
  if (dim < 1) throw DomainError("dimension must be >= 1");
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(dim);
  do {
    for (int i = 0; i < dim; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      v(i) = Complex(re, im);
    }
  } while (v.squaredNorm() == 0.0);
  return v.normalized();
}

MomentCheck component_moment_check(SpinQuantumNumber spin, int n_samples, std::uint64_t seed) {
  if (n_samples < 1000) throw DomainError("moment check needs at least 1000 samples");
  const int d = spin.dim();
  if (d < 2) throw DomainError("moment check needs 2j + 1 >= 2");
  Rng rng = make_stream(seed, 0);
  Accumulator fourth, cross, sz2, spsm, q;
  double max_dev = 0.0;
  const double scale = 4.0 / (static_cast<double>(d) * d);
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd a = random_real_unit_vector(d, rng);
    const Eigen::ArrayXd sq = a.array().square();
    const double total = sq.sum();
    const double quartic = sq.square().sum();
    max_dev = std::max(max_dev, std::abs(total - 1.0));
    fourth.add(quartic / d);
    cross.add((total * total - quartic) / (static_cast<double>(d) * (d - 1)));
    const FirstMoments m = first_moments(SymmetricState::normalized(spin, a.cast<Complex>()));
    sz2.add(m.sz * m.sz);
    spsm.add(std::norm(m.sminus));
    q.add(1.0 - scale * (m.sz * m.sz + std::norm(m.sminus)));
  }
  const double j = spin.j();
  const double denom = static_cast<double>(d) * (d + 2);
  MomentCheck out;
  out.fourth = fourth.estimate();
  out.cross = cross.estimate();
  out.sz_squared = sz2.estimate();
  out.splus_sminus = spsm.estimate();
  out.q_measure = q.estimate();
  out.expected_fourth = 3.0 / denom;
  out.expected_cross = 1.0 / denom;
  out.expected_collective = 2.0 * j * (j + 1.0) / (3.0 * (2.0 * j + 3.0));
  out.max_norm_deviation = max_dev;
  return out;
}

SummationIdentity summation_identity(SpinQuantumNumber spin) {
  const std::int64_t n = spin.qubits();
  const Rational j(n, 2);
  SummationIdentity out;
  for (std::int64_t i = 0; i <= n; ++i) {
    const Rational m(n - 2 * i, 2);
    out.sum_m_squared = out.sum_m_squared + m * m;
    if (i >= 1) out.sum_ladder = out.sum_ladder + (j - m) * (j + m + Rational(1));
  }
  const Rational third = j * (j + Rational(1)) * (Rational(2) * j + Rational(1)) / Rational(3);
  out.closed_m_squared = third;
  out.closed_ladder = Rational(2) * j * (j * j + j) + j + j * j - third;
  return out;
}

double q_measure_qubits(const Eigen::VectorXcd& psi, int qubits) {
  if (qubits < 1 || qubits > 24) throw DomainError("qubit count must lie in [1, 24]");
  const Eigen::Index size = Eigen::Index{1} << qubits;
  if (psi.size() != size) throw DomainError("state vector must have 2^N entries");
  double purity_sum = 0.0;
  for (int b = 0; b < qubits; ++b) {
    const Eigen::Index mask = Eigen::Index{1} << b;
    double p0 = 0.0, p1 = 0.0;
    Complex coherence = 0.0;
    for (Eigen::Index idx = 0; idx < size; ++idx) {
      if (idx & mask) continue;
      p0 += std::norm(psi(idx));
      p1 += std::norm(psi(idx | mask));
      coherence += psi(idx) * std::conj(psi(idx | mask));
    }
    const double norm = p0 + p1;
    purity_sum += (p0 * p0 + p1 * p1 + 2.0 * std::norm(coherence)) / (norm * norm);
  }
  return std::clamp(2.0 * (1.0 - purity_sum / qubits), 0.0, 1.0);
}

HaarQReference haar_q_reference(int qubits, int n_samples, std::uint64_t seed) {
  if (qubits < 1 || qubits > 12) throw DomainError("Haar reference limited to 1 <= N <= 12");
  if (n_samples < 1) throw DomainError("n_samples must be >= 1");
  const int dim = 1 << qubits;
  Accumulator acc;
  for (int s = 0; s < n_samples; ++s) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(s));
    acc.add(q_measure_qubits(random_complex_unit_vector(dim, rng), qubits));
  }
  return {acc.estimate(), 1.0 - 3.0 / dim, 1.0 - 3.0 / (dim + 1.0)};
}

SpacingRatio spacing_ratio(std::vector<double> phases) {
  SpacingRatio out;
  const std::size_t n = phases.size();
  if (n < 3) return out;
  std::sort(phases.begin(), phases.end());
  std::vector<double> gaps(n);
  for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = phases[i + 1] - phases[i];
  gaps[n - 1] = phases[0] + 2.0 * kPi - phases[n - 1];
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = gaps[i];
    const double b = gaps[(i + 1) % n];
    const double hi = std::max(a, b);
    if (!(hi > 0.0)) continue;
    sum += std::min(a, b) / hi;
    ++out.count;
  }
  if (out.count > 0) out.mean = sum / out.count;
  return out;
}

std::vector<double> eigenphases(const CMatrix& u) {
  Eigen::ComplexEigenSolver<CMatrix> solver(u, false);
  if (solver.info() != Eigen::Success) throw NumericalError("unitary diagonalization failed");
  std::vector<double> out;
  out.reserve(u.rows());
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    out.push_back(std::arg(solver.eigenvalues()(i)));
  }
  return out;
}

SpacingRatio block_coe_spacing_ratio(const EnsembleSpec& spec, const ParityBasis& basis) {
  if (spec.n_samples < 1) throw DomainError("n_samples must be >= 1");
  double weighted = 0.0;
  int count = 0;
  for (int s = 0; s < spec.n_samples; ++s) {
    const BlockFactors f = block_factors(spec, basis, s);
    for (const CMatrix* block : {&f.plus, &f.minus}) {
      if (block->size() == 0) continue;
      const SpacingRatio r = spacing_ratio(eigenphases(*block));
      weighted += r.mean * r.count;
      count += r.count;
    }
  }
  return {count > 0 ? weighted / count : 0.0, count};
}

void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleRow>& rows) {
  using csv::format_number;
  out << "j,ensemble,n_samples,seed,D_mean,DG_mean,Q_mean,Q_analytic,stderr_D,stderr_DG,stderr_Q\n";
  for (const EnsembleRow& r : rows) {
    out << format_number(r.j) << ',' << to_string(r.ensemble) << ',' << r.n_samples << ','
        << r.seed << ',' << format_number(r.d_mean) << ',' << format_number(r.dg_mean) << ','
        << format_number(r.q_mean) << ',' << format_number(r.q_analytic) << ','
        << format_number(r.stderr_d) << ',' << format_number(r.stderr_dg) << ','
        << format_number(r.stderr_q) << '\n';
  }
}

}  // namespace kicktop
