#include <benchmark/benchmark.h>

#include <random>

#include "cavsol/dynamics.hpp"
#include "cavsol/initcond.hpp"
#include "cavsol/model.hpp"
#include "cavsol/oracle.hpp"

namespace {

using namespace cavsol;

ModelParams lattice(int sites, int order) {
  ModelParams p;
  p.sites = sites;
  p.hopping = 1.0;
  p.coupling = 10.0;
  p.atoms = 10;
  p.hp_order = order;
  return p;
}

void BM_Rhs(benchmark::State& st) {
  const auto p = lattice(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const LatticeModel model(p);
  const auto s = sech_packet(0.3, 0.07, 8.0, p.sites / 4.0, p);
  for (auto _ : st) benchmark::DoNotOptimize(model.rhs(s));
  st.SetItemsProcessed(st.iterations() * p.sites);
}
BENCHMARK(BM_Rhs)->Args({256, 1})->Args({256, 4})->Args({4096, 1})->Args({4096, 12});

void BM_Rk4Run(benchmark::State& st) {
  const auto p = lattice(static_cast<int>(st.range(0)), 1);
  const LatticeModel model(p);
  const auto s = sech_packet(0.3, 0.07, 8.0, p.sites / 4.0, p);
  IntegratorConfig c;
  c.method = Method::rk4_fixed;
  c.dt = stable_step(model, c.hp_guard);
  c.t_end = 100 * c.dt;
  c.sample_stride = 100;
  for (auto _ : st) benchmark::DoNotOptimize(integrate(s, model, c));
  st.SetItemsProcessed(st.iterations() * 100);
}
BENCHMARK(BM_Rk4Run)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Hamiltonian(benchmark::State& st) {
  const int cutoff = static_cast<int>(st.range(0));
  const QuantumBasis basis(2, cutoff, 4);
  auto p = lattice(2, 12);
  p.atoms = 4;
  for (auto _ : st) benchmark::DoNotOptimize(build_hamiltonian(p, basis));
}
BENCHMARK(BM_Hamiltonian)->Arg(6)->Arg(20);

void BM_Propagate(benchmark::State& st) {
  const int cutoff = static_cast<int>(st.range(0));
  const QuantumBasis basis(2, cutoff, 4);
  auto p = lattice(2, 12);
  p.coupling = 1.0;
  p.atoms = 4;
  const QuantumPropagator prop(build_hamiltonian(p, basis));
  const std::vector<Complex> alpha{0.5, 0.0}, beta{0.0, 0.0};
  const auto psi = coherent_spin_coherent_state(alpha, beta, basis);
  for (auto _ : st) benchmark::DoNotOptimize(prop.evolve(psi, 0.5));
}
BENCHMARK(BM_Propagate)->Arg(6)->Arg(20)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
