#include <benchmark/benchmark.h>

#include "fvps/entangled.hpp"
#include "fvps/fv_matrix.hpp"
#include "fvps/moyal.hpp"
#include "fvps/rotator.hpp"
#include "fvps/wigner.hpp"

using namespace fvps;

namespace {

PhaseSpaceGrid square_grid(std::size_t n) {
  return PhaseSpaceGrid::conjugate_to(MomentumGrid(n, 0.3125 * static_cast<double>(n) / 2), UnitSystem{});
}

void BM_WignerEven(benchmark::State& state) {
  const auto g = square_grid(static_cast<std::size_t>(state.range(0)));
  const auto st = gaussian_state({0.5}, g.momentum());
  for (auto _ : state) benchmark::DoNotOptimize(wigner_even(st, Branch::plus, g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WignerEven)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond)->Complexity();

void BM_EvolveEven(benchmark::State& state) {
  const auto g = square_grid(static_cast<std::size_t>(state.range(0)));
  const RealField w = wigner_even(gaussian_state({0.5, 0.4}, g.momentum()), Branch::plus, g);
  const auto e = relativistic_energy(UnitSystem{});
  for (auto _ : state) benchmark::DoNotOptimize(evolve_even(w, g, e, 5.0));
}
BENCHMARK(BM_EvolveEven)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond);

void BM_MoyalBracket(benchmark::State& state) {
  const auto g = square_grid(static_cast<std::size_t>(state.range(0)));
  const auto e = relativistic_energy(UnitSystem{});
  const auto es = Symbol::momentum(g, [e](double p) { return cplx(e(p)); });
  const auto w = Symbol::from_real(g, wigner_even(gaussian_state({0.5}, g.momentum()), Branch::plus, g));
  for (auto _ : state) benchmark::DoNotOptimize(moyal_bracket(es, w));
}
BENCHMARK(BM_MoyalBracket)->RangeMultiplier(2)->Range(128, 256)->Unit(benchmark::kMillisecond);

void BM_SignOperator(benchmark::State& state) {
  const MomentumGrid g(static_cast<std::size_t>(state.range(0)), 5.0);
  const auto h = build_hamiltonian(EnergyModel::free_particle(), MomentumBasis{g});
  for (auto _ : state) benchmark::DoNotOptimize(sign_operator(OperatorMatrix(h.matrix(), h.basis())));
}
BENCHMARK(BM_SignOperator)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

void BM_OrbitSeries(benchmark::State& state) {
  const RotatorModel m{0.5, 64};
  const auto st = rotator_coherent_state(3.0, m.energy_model(), 64);
  const auto jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(orbit_series(st, m, 20000.0, 0.1, Spectrum::relativistic, jobs));
}
BENCHMARK(BM_OrbitSeries)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PenaltyCurve(benchmark::State& state) {
  const std::vector<double> sigmas{0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50};
  for (auto _ : state) benchmark::DoNotOptimize(penalty_curve(sigmas, {}, 1));
}
BENCHMARK(BM_PenaltyCurve)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
