// Serial reference kernels against their OpenMP versions, plus one whole
// continuum flow step in each dispatch mode.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fputlab/continuum.hpp"
#include "fputlab/kernels.hpp"

using namespace fputlab;

namespace {

std::vector<double> randomVector(std::size_t n, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

const Potential kPoly = Potential::polynomial(1, 0.5, -0.25);
const Potential kToda = Potential::toda(1);

template <bool Parallel>
void multiply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = randomVector(n, 1), b = randomVector(n, 2);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::multiply(a.data(), b.data(), out.data(), n);
    else kernels::serial::multiply(a.data(), b.data(), out.data(), n);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <bool Parallel>
void maxAbs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = randomVector(n, 3);
  for (auto _ : state) {
    double m = Parallel ? kernels::omp::maxAbs(a.data(), n) : kernels::serial::maxAbs(a.data(), n);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

void nonlinearForce(benchmark::State& state, const Potential& w, bool parallel) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto z = randomVector(n, 4);
  std::vector<double> out(n);
  for (auto _ : state) {
    if (parallel) kernels::omp::nonlinearForce(w, 0.01, z.data(), out.data(), n);
    else kernels::serial::nonlinearForce(w, 0.01, z.data(), out.data(), n);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

void latticeForce(benchmark::State& state, const Potential& w, bool parallel) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto q = randomVector(n, 5, 0.1);
  std::vector<double> dp(n);
  for (auto _ : state) {
    if (parallel) kernels::omp::latticeForce(w, q.data(), dp.data(), n);
    else kernels::serial::latticeForce(w, q.data(), dp.data(), n);
    benchmark::DoNotOptimize(dp.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

// Ten exact two-wave flow steps through the dispatchers.
void exactFlow(benchmark::State& state, kernels::Mode mode) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto U = randomBandLimited(n, 6, 4, 1.0, 0.2), V = randomBandLimited(n, 7, 4, 1.0, -0.1);
  continuum::FlowSpec spec;
  spec.field = continuum::FieldKind::exact;
  spec.potential = kPoly;
  spec.dt = 1e-4;
  const auto previous = kernels::mode();
  kernels::setMode(mode);
  for (auto _ : state) {
    auto r = continuum::integrateFlow(U, V, spec, 10 * spec.dt);
    benchmark::DoNotOptimize(r.U.data());
  }
  kernels::setMode(previous);
}

}  // namespace

#define SIZES ->RangeMultiplier(8)->Range(1 << 10, 1 << 22)
BENCHMARK_TEMPLATE(multiply, false) SIZES;
BENCHMARK_TEMPLATE(multiply, true) SIZES;
BENCHMARK_TEMPLATE(maxAbs, false) SIZES;
BENCHMARK_TEMPLATE(maxAbs, true) SIZES;
BENCHMARK_CAPTURE(nonlinearForce, poly_serial, kPoly, false) SIZES;
BENCHMARK_CAPTURE(nonlinearForce, poly_omp, kPoly, true) SIZES;
BENCHMARK_CAPTURE(nonlinearForce, toda_serial, kToda, false) SIZES;
BENCHMARK_CAPTURE(nonlinearForce, toda_omp, kToda, true) SIZES;
BENCHMARK_CAPTURE(latticeForce, toda_serial, kToda, false) SIZES;
BENCHMARK_CAPTURE(latticeForce, toda_omp, kToda, true) SIZES;
BENCHMARK_CAPTURE(exactFlow, serial, kernels::Mode::serial)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(exactFlow, parallel, kernels::Mode::parallel)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
