#include <numbers>

#include <benchmark/benchmark.h>

#include "kicktop/correlations.hpp"
#include "kicktop/dynamics.hpp"
#include "kicktop/reduction.hpp"

namespace {

using kicktop::SpinQuantumNumber;

constexpr double kHalfPi = std::numbers::pi / 2;

void BM_FloquetStep(benchmark::State& state) {
  const auto spin = SpinQuantumNumber::from_twice(static_cast<int>(state.range(0)));
  const auto u = kicktop::build_floquet(spin, 10.0, 1.7);
  kicktop::CVector psi = kicktop::coherent_state(spin, kHalfPi, -kHalfPi).amplitudes();
  kicktop::CVector next(psi.size());
  for (auto _ : state) {
    u.apply(psi, next);
    psi.swap(next);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_FloquetStep)->Arg(100)->Arg(240)->Arg(800);

void BM_BuildFloquet(benchmark::State& state) {
  const auto spin = SpinQuantumNumber::from_twice(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kicktop::build_floquet(spin, 10.0, 1.7));
}
BENCHMARK(BM_BuildFloquet)->Arg(100)->Arg(240)->Unit(benchmark::kMillisecond);

kicktop::SymmetricState evolved_state(int twice_j) {
  const auto spin = SpinQuantumNumber::from_twice(twice_j);
  auto psi = kicktop::coherent_state(spin, kHalfPi, -kHalfPi);
  kicktop::evolve(psi, kicktop::build_floquet(spin, 10.0, 1.7), 25, {});
  return psi;
}

void BM_TwoQubitRdm(benchmark::State& state) {
  const auto psi = evolved_state(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kicktop::two_qubit_rdm(psi));
}
BENCHMARK(BM_TwoQubitRdm)->Arg(100)->Arg(240)->Arg(800);

void BM_Discord(benchmark::State& state) {
  const auto rho = kicktop::two_qubit_rdm(evolved_state(240));
  for (auto _ : state) benchmark::DoNotOptimize(kicktop::quantum_discord(rho));
}
BENCHMARK(BM_Discord)->Unit(benchmark::kMicrosecond);

void BM_GeometricDiscord(benchmark::State& state) {
  const auto rho = kicktop::two_qubit_rdm(evolved_state(240));
  for (auto _ : state) benchmark::DoNotOptimize(kicktop::geometric_discord(rho));
}
BENCHMARK(BM_GeometricDiscord);

}  // namespace

BENCHMARK_MAIN();
