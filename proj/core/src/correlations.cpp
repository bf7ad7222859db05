#include "kicktop/correlations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "kicktop/error.hpp"

namespace kicktop {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEigenFloor = 1e-14;
constexpr double kValidityTolerance = 1e-8;

constexpr int kGridTheta = 32;
constexpr int kGridPhi = 64;
constexpr int kRefineStarts = 3;
constexpr double kObjectiveTolerance = 1e-9;

std::array<Eigen::Matrix2cd, 3> pauli() {
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  return {sx, sy, sz};
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return out;
}

// Entropy in bits of a qubit with Bloch vector length r.
double qubit_entropy(double r) {
  r = std::clamp(r, 0.0, 1.0);
  const double lp = 0.5 * (1.0 + r);
  const double lm = 0.5 * (1.0 - r);
  double h = 0.0;
  if (lp > kEigenFloor) h -= lp * std::log2(lp);
  if (lm > kEigenFloor) h -= lm * std::log2(lm);
  return h;
}

Eigen::Vector3d axis_of(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

template <typename Objective>
std::pair<Eigen::Vector2d, double> nelder_mead(Objective&& f, Eigen::Vector2d start, double scale) {
  std::array<Eigen::Vector2d, 3> simplex = {start, start + Eigen::Vector2d(scale, 0.0),
                                            start + Eigen::Vector2d(0.0, scale)};
  std::array<double, 3> values = {f(simplex[0]), f(simplex[1]), f(simplex[2])};
  auto order = [&] {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
    simplex = {simplex[idx[0]], simplex[idx[1]], simplex[idx[2]]};
    values = {values[idx[0]], values[idx[1]], values[idx[2]]};
  };
  order();
  for (int iter = 0; iter < 400; ++iter) {
    if (values[2] - values[0] < 0.1 * kObjectiveTolerance &&
        (simplex[2] - simplex[0]).norm() < 1e-6) {
      break;
    }
    const Eigen::Vector2d centroid = 0.5 * (simplex[0] + simplex[1]);
    const Eigen::Vector2d reflected = centroid + (centroid - simplex[2]);
    const double fr = f(reflected);
    if (fr < values[0]) {
      const Eigen::Vector2d expanded = centroid + 2.0 * (centroid - simplex[2]);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[2] = expanded;
        values[2] = fe;
      } else {
        simplex[2] = reflected;
        values[2] = fr;
      }
    } else if (fr < values[1]) {
      simplex[2] = reflected;
      values[2] = fr;
    } else {
      const bool outside = fr < values[2];
      const Eigen::Vector2d contracted =
          outside ? centroid + 0.5 * (reflected - centroid) : centroid + 0.5 * (simplex[2] - centroid);
      const double fc = f(contracted);
      if (fc < (outside ? fr : values[2])) {
        simplex[2] = contracted;
        values[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          values[i] = f(simplex[i]);
        }
      }
    }
    order();
  }
  return {simplex[0], values[0]};
}

void require_valid_state(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols()) throw DomainError("density matrix must be square");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kValidityTolerance) {
    throw DomainError("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > kValidityTolerance) {
    throw DomainError("density matrix does not have unit trace");
  }
}

}  // namespace

TwoQubitDensityMatrix BlochForm::reconstruct() const {
  const auto s = pauli();
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  TwoQubitDensityMatrix rho = kron(id, id);
  for (int i = 0; i < 3; ++i) {
    rho += x(i) * kron(s[i], id) + y(i) * kron(id, s[i]);
    for (int j = 0; j < 3; ++j) rho += t(i, j) * kron(s[i], s[j]);
  }
  return rho / 4.0;
}

BlochForm bloch_decompose(const TwoQubitDensityMatrix& rho) {
  const auto s = pauli();
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  BlochForm b;
  for (int i = 0; i < 3; ++i) {
    b.x(i) = (rho * kron(s[i], id)).trace().real();
    b.y(i) = (rho * kron(id, s[i])).trace().real();
    for (int j = 0; j < 3; ++j) b.t(i, j) = (rho * kron(s[i], s[j])).trace().real();
  }
  return b;
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  require_valid_state(rho);
  const Eigen::VectorXd spectrum = clipped_spectrum(rho);
  double h = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const double l = spectrum(i);
    if (l > kEigenFloor) h -= l * std::log2(l);
  }
  return std::max(h, 0.0);
}

double mutual_information(const TwoQubitDensityMatrix& rho) {
  return von_neumann_entropy(trace_out_second(rho)) + von_neumann_entropy(trace_out_first(rho)) -
         von_neumann_entropy(rho);
}

MeasurementSetting MeasurementSetting::from_angles(double theta, double phi) {
  return {axis_of(theta, phi)};
}

double conditional_entropy_after_measurement(const TwoQubitDensityMatrix& rho,
                                             const MeasurementSetting& n) {
  require_valid_state(rho);
  const auto s = pauli();
  const Eigen::Vector3d axis = n.axis.normalized();
  const Eigen::Matrix2cd ndots = axis(0) * s[0] + axis(1) * s[1] + axis(2) * s[2];
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  double total = 0.0;
  for (double sign : {1.0, -1.0}) {
    const Eigen::Matrix4cd proj = kron(0.5 * (id + sign * ndots), id);
    const Eigen::Matrix4cd post = proj * rho * proj;
    const double prob = post.trace().real();
    if (prob < kEigenFloor) continue;
    const Eigen::Matrix2cd cond = trace_out_first(post) / prob;
    total += prob * von_neumann_entropy(cond);
  }
  return total;
}

double conditional_entropy_after_measurement(const BlochForm& bloch, const Eigen::Vector3d& n) {
  const double nx = n.dot(bloch.x);
  const Eigen::Vector3d tn = bloch.t.transpose() * n;
  double total = 0.0;
  for (double sign : {1.0, -1.0}) {
    const double weight = 1.0 + sign * nx;  // 2 p
    const double prob = 0.5 * weight;
    if (prob < kEigenFloor) continue;
    const double r = (bloch.y + sign * tn).norm() / weight;
    total += prob * qubit_entropy(r);
  }
  return total;
}

DiscordResult minimize_discord(const TwoQubitDensityMatrix& rho, EntropyUnit unit) {
  require_valid_state(rho);
  const BlochForm bloch = bloch_decompose(rho);
  auto objective = [&bloch](const Eigen::Vector2d& a) {
    return conditional_entropy_after_measurement(bloch, axis_of(a(0), a(1)));
  };

  struct Node {
    double value;
    Eigen::Vector2d at;
  };
  std::array<Node, kRefineStarts> best;
  best.fill({std::numeric_limits<double>::infinity(), Eigen::Vector2d::Zero()});
  const double dtheta = kPi / kGridTheta;
  const double dphi = 2.0 * kPi / kGridPhi;
  for (int it = 0; it < kGridTheta; ++it) {
    for (int ip = 0; ip < kGridPhi; ++ip) {
      const Eigen::Vector2d at((it + 0.5) * dtheta, ip * dphi);
      const double v = objective(at);
      if (v < best.back().value) {
        best.back() = {v, at};
        std::sort(best.begin(), best.end(),
                  [](const Node& a, const Node& b) { return a.value < b.value; });
      }
    }
  }

  Node winner = best.front();
  for (const Node& start : best) {
    if (!std::isfinite(start.value)) continue;
    const auto [at, value] = nelder_mead(objective, start.at, 0.5 * dtheta);
    if (value < winner.value) winner = {value, at};
  }

  const double h_a = qubit_entropy(bloch.x.norm());
  const double h_ab = von_neumann_entropy(rho);
  const double scale = unit == EntropyUnit::nats ? std::numbers::ln2 : 1.0;
  DiscordResult out;
  out.min_conditional_entropy = scale * winner.value;
  out.optimal = MeasurementSetting::from_angles(winner.at(0), winner.at(1));
  const double d = h_a - h_ab + winner.value;
  // Negative values down to -1e-9 are minimizer noise.
  if (d < -1e-9) {
    throw NumericalError("discord minimization produced a negative value");
  }
  out.discord = scale * std::max(d, 0.0);
  return out;
}

double quantum_discord(const TwoQubitDensityMatrix& rho, EntropyUnit unit) {
  return minimize_discord(rho, unit).discord;
}

double geometric_discord(const BlochForm& bloch) {
  const Eigen::Matrix3d k = bloch.x * bloch.x.transpose() + bloch.t * bloch.t.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(k, Eigen::EigenvaluesOnly);
  const double eta_max = solver.eigenvalues().maxCoeff();
  const double dg = 0.25 * (bloch.x.squaredNorm() + bloch.t.squaredNorm() - eta_max);
  return std::max(dg, 0.0);
}

double geometric_discord(const TwoQubitDensityMatrix& rho) {
  require_valid_state(rho);
  return geometric_discord(bloch_decompose(rho));
}

double q_measure(const SymmetricState& state) {
  const OneQubitDensityMatrix rho = one_qubit_rdm(state);
  const double purity = (rho * rho).trace().real();
  return std::clamp(2.0 * (1.0 - purity), 0.0, 1.0);
}

namespace {

double collective_q(double sz, Complex splus_sminus, SpinQuantumNumber spin,
                    QNormalization normalization) {
  const double scale = normalization == QNormalization::paper_2jplus1 ? spin.dim() : spin.qubits();
  return 1.0 - 4.0 / (scale * scale) * (sz * sz + splus_sminus.real());
}

}  // namespace

double q_measure_collective(const SymmetricState& state, QNormalization normalization) {
  const FirstMoments m = first_moments(state);
  return collective_q(m.sz, std::norm(m.sminus), state.spin(), normalization);
}

double q_measure_collective(const SymmetricState& state, const OperatorSet& ops,
                            QNormalization normalization) {
  const CollectiveExpectations e = collective_expectations(state, ops);
  return collective_q(e.sz.real(), e.splus * e.sminus, state.spin(), normalization);
}

CorrelationValues evaluate_correlations(const SymmetricState& state, QNormalization normalization,
                                        EntropyUnit unit) {
  CorrelationValues v;
  const TwoQubitDensityMatrix rho = two_qubit_rdm(state);
  v.discord = quantum_discord(rho, unit);
  v.geometric_discord = geometric_discord(bloch_decompose(rho));
  v.q_measure = normalization == QNormalization::qubit_2j
                    ? q_measure(state)
                    : q_measure_collective(state, normalization);
  return v;
}

}  // namespace kicktop
