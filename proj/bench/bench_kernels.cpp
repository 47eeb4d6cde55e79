// Serial reference kernels against their OpenMP counterparts on synthetic pockets.
#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "poseval/geometry.hpp"
#include "poseval/metrics.hpp"

using namespace poseval;

namespace {

Points cloud(std::size_t n, double box, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, box);
  Points p(n);
  for (auto& x : p) x = Vec3(u(rng), u(rng), u(rng));
  return p;
}

Points jitter(const Points& p, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.7);
  Points out = p;
  for (auto& x : out) x += Vec3(n(rng), n(rng), n(rng));
  return out;
}

// Roughly protein density: about one heavy atom per 11 cubic angstroms.
double box_for(std::size_t n) { return std::cbrt(static_cast<double>(n) * 11.0); }

void BM_NeighborPairs(benchmark::State& state) {
  const auto pts = cloud(state.range(0), box_for(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(neighbor_pairs(pts, 6.0));
}

void BM_NeighborPairsSerial(benchmark::State& state) {
  const auto pts = cloud(state.range(0), box_for(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(serial::neighbor_pairs(pts, 6.0));
}

void BM_Lddt(benchmark::State& state) {
  const auto ref = cloud(state.range(0), box_for(state.range(0)), 2);
  const auto pred = jitter(ref, 3);
  std::vector<int> residue(ref.size());
  for (std::size_t i = 0; i < residue.size(); ++i) residue[i] = static_cast<int>(i / 8);
  const LddtParams params;
  for (auto _ : state) benchmark::DoNotOptimize(lddt(ref, pred, residue, params));
}

void BM_LddtSerial(benchmark::State& state) {
  const auto ref = cloud(state.range(0), box_for(state.range(0)), 2);
  const auto pred = jitter(ref, 3);
  std::vector<int> residue(ref.size());
  for (std::size_t i = 0; i < residue.size(); ++i) residue[i] = static_cast<int>(i / 8);
  const LddtParams params;
  for (auto _ : state) benchmark::DoNotOptimize(serial::lddt(ref, pred, residue, params));
}

void BM_LddtCross(benchmark::State& state) {
  const auto prot = cloud(state.range(0), box_for(state.range(0)), 4);
  const auto lig = cloud(40, 8.0, 5);
  const auto prot_p = jitter(prot, 6), lig_p = jitter(lig, 7);
  const auto params = lddt_pli_defaults();
  for (auto _ : state) benchmark::DoNotOptimize(lddt_cross(lig, lig_p, prot, prot_p, params));
}

void BM_LddtCrossSerial(benchmark::State& state) {
  const auto prot = cloud(state.range(0), box_for(state.range(0)), 4);
  const auto lig = cloud(40, 8.0, 5);
  const auto prot_p = jitter(prot, 6), lig_p = jitter(lig, 7);
  const auto params = lddt_pli_defaults();
  for (auto _ : state) benchmark::DoNotOptimize(serial::lddt_cross(lig, lig_p, prot, prot_p, params));
}

void BM_MinScaledDistance(benchmark::State& state) {
  const auto prot = cloud(state.range(0), box_for(state.range(0)), 8);
  const auto lig = cloud(40, 8.0, 9);
  const std::vector<double> rp(prot.size(), 1.7), rl(lig.size(), 1.6);
  for (auto _ : state) benchmark::DoNotOptimize(min_scaled_distance(lig, rl, prot, rp));
}

void BM_MinScaledDistanceSerial(benchmark::State& state) {
  const auto prot = cloud(state.range(0), box_for(state.range(0)), 8);
  const auto lig = cloud(40, 8.0, 9);
  const std::vector<double> rp(prot.size(), 1.7), rl(lig.size(), 1.6);
  for (auto _ : state) benchmark::DoNotOptimize(serial::min_scaled_distance(lig, rl, prot, rp));
}

}  // namespace

BENCHMARK(BM_NeighborPairs)->Arg(1000)->Arg(5000)->Arg(20000);
BENCHMARK(BM_NeighborPairsSerial)->Arg(1000)->Arg(5000)->Arg(20000);
BENCHMARK(BM_Lddt)->Arg(1000)->Arg(5000)->Arg(20000);
BENCHMARK(BM_LddtSerial)->Arg(1000)->Arg(5000)->Arg(20000);
BENCHMARK(BM_LddtCross)->Arg(5000)->Arg(20000);
BENCHMARK(BM_LddtCrossSerial)->Arg(5000)->Arg(20000);
BENCHMARK(BM_MinScaledDistance)->Arg(5000)->Arg(20000);
BENCHMARK(BM_MinScaledDistanceSerial)->Arg(5000)->Arg(20000);

BENCHMARK_MAIN();
