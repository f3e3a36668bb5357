#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "nvnmr/core/types.hpp"
#include "nvnmr/model/contrast.hpp"
#include "nvnmr/model/kernel.hpp"
#include "nvnmr/oracle/bath.hpp"
#include "nvnmr/pipeline/fit.hpp"

using namespace nvnmr;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLarmor197G = kProtonGammaDefault * 0.0197;

NuclearSample water(std::optional<double> t2 = std::nullopt) {
  NuclearSample::Params p;
  p.rho = 68e27;
  if (t2) p.t2n_star = DephasingTime::finite(*t2);
  return NuclearSample(p);
}

std::vector<double> dip_grid(long n, std::size_t points) {
  const double dip = kPi / kLarmor197G;
  const double half = 6.0 * dip / static_cast<double>(n);
  std::vector<double> tau(points);
  for (std::size_t i = 0; i < points; ++i) {
    tau[i] = dip - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return tau;
}

void BM_ContrastCurve(benchmark::State& state) {
  const long n = state.range(0);
  const model::ContrastModelParams p{NvCenter::from_nm(10.0), water(), PulseFamily::XY8, n, kLarmor197G};
  const auto tau = dip_grid(n, 200);
  for (auto _ : state) benchmark::DoNotOptimize(model::contrast_curve(p, tau));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tau.size()));
}
BENCHMARK(BM_ContrastCurve)->Arg(16)->Arg(64)->Arg(256);

void BM_KFinite(benchmark::State& state) {
  const long n = state.range(0);
  const auto tau = dip_grid(n, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    const double t = tau[i++ & 255];
    benchmark::DoNotOptimize(model::k_finite(n, t, kLarmor197G, 20.0 * static_cast<double>(n) * t));
  }
}
BENCHMARK(BM_KFinite)->Arg(32)->Arg(1024);

void BM_GeometricSum(benchmark::State& state) {
  const auto nv = NvCenter::from_nm(static_cast<double>(state.range(0)));
  NuclearSample::Params p;
  p.rho = 2e27;
  const oracle::BathSampler sampler(NuclearSample(p), nv, 10.0 * nv.depth(), 7);
  std::size_t spins = 0;
  for (auto _ : state) {
    const auto gs = oracle::geometric_sum(sampler);
    spins = gs.count;
    benchmark::DoNotOptimize(gs.sum);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(spins));
}
BENCHMARK(BM_GeometricSum)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_FitDepth(benchmark::State& state) {
  const long n = 32;
  const model::ContrastModelParams p{NvCenter::from_nm(10.4), water(), PulseFamily::XY8, n, kLarmor197G};
  pipeline::ContrastTrace t;
  t.stage = pipeline::TraceStage::Normalized;
  t.meta.n_pulses = n;
  t.meta.b0 = 0.0197;
  t.tau = dip_grid(n, 60);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (double tau : t.tau) {
    t.value.push_back(model::contrast(p, tau) + noise(rng));
    t.sigma.push_back(0.01);
  }
  pipeline::FitConfig cfg;
  cfg.t2n_mode = state.range(0) ? pipeline::T2nMode::Auto : pipeline::T2nMode::Infinite;
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::fit_depth(t, cfg).depth);
}
BENCHMARK(BM_FitDepth)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
