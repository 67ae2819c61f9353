#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "subratio/cscr.hpp"
#include "subratio/error.hpp"
#include "subratio/gass.hpp"
#include "subratio/kernels.hpp"
#include "test_util.hpp"

using namespace subratio;
using testutil::grid_of;

namespace {

// 10 s window at 10 Hz: breathing scenario with mild noise on the full grid.
CsiTrace breathing_window(std::uint64_t seed, double noise = 0.01) {
  auto grid = testutil::full_grid();
  ScenarioConfig sc = testutil::small_scenario(10.0);
  ImpairmentConfig imp;
  imp.gaussian_noise_std = noise;
  imp.seed = seed;
  return simulate(sc, imp, grid);
}

GassParams quick_params(std::uint64_t seed = 3) {
  GassParams p;
  p.population = 24;
  p.generations = 15;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("single-term genome fitness equals the pair SSNR") {
  const CsiTrace w = breathing_window(1);
  const GassGenome g = single_pair_genome(4, 150);
  const double direct = ssnr(std::span<const cplx>(cscr(w, 4, 150).values), w.sample_rate_hz()).value;
  CHECK(fitness(g, w) == doctest::Approx(direct).epsilon(1e-12));
  // unused slots with zero weight do not change anything
  CHECK(fitness(single_pair_genome(4, 150, 8), w) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("all-zero weights have zero fitness") {
  const CsiTrace w = breathing_window(1);
  GassGenome g = single_pair_genome(4, 150, 3);
  g.weights.assign(3, cplx{});
  CHECK(fitness(g, w) == 0.0);
}

TEST_CASE("guard failures are infeasible, not errors") {
  CsiTrace w = breathing_window(1);
  for (auto& v : w.subcarrier(150)) v = 0.0;
  CHECK(fitness(single_pair_genome(4, 150), w) == 0.0);
}

TEST_CASE("strong pair beats the nulled pair of the worked example geometry") {
  auto grid = testutil::full_grid();
  ScenarioConfig sc = testutil::small_scenario(10.0);
  sc.static_paths = {{1.0, 2.0}};
  sc.dynamic_amplitude = 0.1;
  sc.dynamic_base_length_m = 6.0;  // d0 - dS = 4 m
  ImpairmentConfig imp;
  imp.gaussian_noise_std = 0.01;
  imp.seed = 8;
  const CsiTrace w = simulate(sc, imp, grid);
  const double nulled = fitness(single_pair_genome(0, 1), w);
  const double strong = fitness(single_pair_genome(0, 113), w);
  const double ratio_oracle =
      dynamic_amplitude_low_noise(1, 0.1, 1, 0.1, 4.0, (*grid)[0].wavelength_m(), (*grid)[113].wavelength_m()) /
      dynamic_amplitude_low_noise(1, 0.1, 1, 0.1, 4.0, (*grid)[0].wavelength_m(), (*grid)[1].wavelength_m());
  CHECK(ratio_oracle > 70.0);
  CHECK(strong > 50.0 * nulled);
}

TEST_CASE("degenerate search returns its seed") {
  const CsiTrace w = breathing_window(2);
  GassParams p;
  p.population = 1;
  p.generations = 0;
  p.elite = 1;
  p.seed_pairs = 0;
  const GassGenome g = single_pair_genome(7, 30);
  const GassSolution s = optimize(w, p, std::span<const GassGenome>(&g, 1));
  CHECK(s.genome == g);
  CHECK(s.fitness == doctest::Approx(fitness(g, w)).epsilon(1e-15));
  CHECK(s.history.size() == 1);
}

TEST_CASE("two-subcarrier grid matches exhaustive search") {
  auto grid = grid_of({-58, 58});
  ScenarioConfig sc = testutil::small_scenario(10.0);
  ImpairmentConfig imp;
  imp.gaussian_noise_std = 0.02;
  imp.seed = 4;
  const CsiTrace w = simulate(sc, imp, grid);
  double best = 0;
  for (std::size_t md = 0; md < 2; ++md) {
    for (int a = 1; a <= 10; ++a) {
      GassGenome g = single_pair_genome(1 - md, md);
      g.weights[0] = 0.1 * a;
      best = std::max(best, fitness(g, w));
    }
  }
  GassParams p = quick_params();
  p.numerator_count = 1;
  const GassSolution s = optimize(w, p);
  CHECK(s.fitness == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("search guarantees on a full-grid window") {
  const CsiTrace w = breathing_window(5, 0.05);
  const GassSolution s = optimize(w, quick_params());

  // elitism: best fitness never decreases
  for (std::size_t g = 1; g < s.history.size(); ++g) CHECK(s.history[g] >= s.history[g - 1]);
  CHECK(s.history.back() >= s.history.front());
  // never worse than the seeded single pairs
  REQUIRE(!s.seeded_fitness.empty());
  CHECK(s.fitness >= *std::max_element(s.seeded_fitness.begin(), s.seeded_fitness.end()));
  // recomputable fitness and a feasible genome
  s.genome.validate(w.subcarrier_count());
  CHECK(fitness(s.genome, w) == doctest::Approx(s.fitness).epsilon(1e-12));
  for (const auto& g : s.seeded_pairs) g.validate(w.subcarrier_count());

  // better than a random single-pair baseline
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> pick(0, w.subcarrier_count() - 1);
  double baseline = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a != b) baseline = std::max(baseline, fitness(single_pair_genome(a, b), w));
  }
  CHECK(s.fitness >= baseline);
}

TEST_CASE("search is deterministic and independent of the evaluation kernel") {
  const CsiTrace w = breathing_window(6, 0.05);
  GassParams p = quick_params(42);
  const GassSolution a = optimize(w, p);
  const GassSolution b = optimize(w, p);
  p.parallel = false;
  const GassSolution c = optimize(w, p);
  CHECK(a.genome == b.genome);
  CHECK(a.history == b.history);
  CHECK(a.genome == c.genome);
  CHECK(a.fitness == c.fitness);
}

TEST_CASE("invalid parameters are configuration errors") {
  GassParams p;
  p.population = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.elite = 65;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.crossover_prob = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("window with no usable signal is rejected") {
  CsiTrace w(grid_of({1, 2, 3}), 10.0, 100);
  for (std::size_t m = 0; m < 3; ++m) {
    for (auto& v : w.subcarrier(m)) v = 1.0;
  }
  CHECK_THROWS_AS(optimize(w, quick_params()), NumericError);
}

TEST_CASE("single-term streams reduce to plain ratios") {
  const CsiTrace w = testutil::random_trace(grid_of({-5, 0, 5}), 10.0, 40, 3);
  const GassGenome g = single_pair_genome(1, 0);
  const auto streams = build_streams(g, w);
  REQUIRE(streams.size() == 2);
  CHECK(streams[0].denominator == 0);
  CHECK(streams[1].denominator == 2);
  for (const auto& s : streams) {
    const auto direct = cscr(w, 1, s.denominator).values;
    for (std::size_t k = 0; k < direct.size(); ++k) CHECK(s.values[k] == direct[k]);
  }
  StreamOptions all;
  all.include_numerator_subcarriers = true;
  CHECK(build_streams(g, w, all).size() == 3);
}

TEST_CASE("identical subcarriers give identical streams") {
  CsiTrace w = testutil::random_trace(grid_of({-5, 0, 5, 9}), 10.0, 40, 4);
  for (std::size_t k = 0; k < 40; ++k) w.at(k, 3) = w.at(k, 2);
  const auto streams = build_streams(single_pair_genome(0, 1), w);
  REQUIRE(streams.size() == 3);
  CHECK(streams[1].values == streams[2].values);
}

TEST_CASE("stream count excludes numerator overlap and guard failures") {
  CsiTrace w = breathing_window(7);
  for (std::size_t k = 0; k < w.frame_count(); k += 2) w.at(k, 20) = 0.0;  // half the samples dead
  GassGenome g = single_pair_genome(3, 100, 3);
  g.weights = {1.0, cplx(0.0, 0.5), 0.0};
  g.numerator = {3, 9, 11};  // slot 3 has zero weight and does not count as a numerator
  std::vector<StreamOmission> omitted;
  const auto streams = build_streams(g, w, {}, &omitted);
  REQUIRE(omitted.size() == 1);
  CHECK(omitted[0].subcarrier == 20);
  CHECK(streams.size() == w.subcarrier_count() - 2 - 1);
  for (const auto& s : streams) {
    CHECK(s.denominator != 3);
    CHECK(s.denominator != 9);
  }
}

TEST_CASE("serial and parallel fitness kernels agree exactly") {
  const CsiTrace w = breathing_window(9, 0.05);
  std::vector<GassGenome> genomes;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, w.subcarrier_count() - 1);
  for (int i = 0; i < 40; ++i) {
    const std::size_t d = pick(rng);
    GassGenome g = single_pair_genome(d == 0 ? 1 : d - 1, d, 2);
    g.weights[1] = cplx(0.3, -0.4);
    g.numerator[1] = d == 5 ? 6 : 5;
    genomes.push_back(g);
  }
  const auto serial = kernels::serial::genome_fitness(w, genomes, {}, {});
  const auto parallel = kernels::parallel::genome_fitness(w, genomes, {}, {});
  CHECK(serial == parallel);
}
