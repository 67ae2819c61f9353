// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "subratio/csi_sim.hpp"
#include "subratio/gass.hpp"
#include "subratio/kernels.hpp"

using namespace subratio;

namespace {

const CsiTrace& window() {
  static const CsiTrace w = [] {
    ScenarioConfig sc;
    sc.sample_rate_hz = 10.0;
    sc.duration_s = 10.0;
    ImpairmentConfig imp;
    imp.gaussian_noise_std = 0.05;
    imp.seed = 1;
    return simulate(sc, imp, std::make_shared<const SubcarrierGrid>(SubcarrierGrid::combined_40mhz()));
  }();
  return w;
}

std::vector<GassGenome> genomes(std::size_t count) {
  std::mt19937_64 rng(3);
  const std::size_t m = window().subcarrier_count();
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::uniform_real_distribution<double> mag(0.0, 1.0), phase(0.0, kTwoPi);
  std::vector<GassGenome> out;
  while (out.size() < count) {
    GassGenome g;
    g.denominator = pick(rng);
    for (int i = 0; i < 3; ++i) {
      std::size_t n = pick(rng);
      if (n == g.denominator) n = (n + 1) % m;
      g.numerator.push_back(n);
      g.weights.push_back(std::polar(mag(rng), phase(rng)));
    }
    out.push_back(g);
  }
  return out;
}

std::vector<CscrStream> streams() { return build_streams(single_pair_genome(0, 113), window()); }

std::vector<double> angles(std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
  return a;
}

template <auto Kernel>
void bm_fitness(benchmark::State& state) {
  const auto g = genomes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(window(), g, SsnrOptions{}, DenominatorGuard{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void bm_stream_ssnr(benchmark::State& state) {
  const auto s = streams();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(s, SsnrOptions{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}

template <auto Kernel>
void bm_projection(benchmark::State& state) {
  const auto s = streams();
  const auto a = angles(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(s.front().values, 10.0, a, SsnrOptions{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(bm_fitness<kernels::serial::genome_fitness>)->Name("genome_fitness/serial")->Arg(64);
BENCHMARK(bm_fitness<kernels::parallel::genome_fitness>)->Name("genome_fitness/parallel")->Arg(64);
BENCHMARK(bm_stream_ssnr<kernels::serial::stream_ssnr>)->Name("stream_ssnr/serial");
BENCHMARK(bm_stream_ssnr<kernels::parallel::stream_ssnr>)->Name("stream_ssnr/parallel");
BENCHMARK(bm_projection<kernels::serial::projection_scan>)->Name("projection_scan/serial")->Arg(360);
BENCHMARK(bm_projection<kernels::parallel::projection_scan>)->Name("projection_scan/parallel")->Arg(360);

BENCHMARK_MAIN();
