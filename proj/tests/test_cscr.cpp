#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "subratio/cscr.hpp"
#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"
#include "test_util.hpp"

using namespace subratio;
using testutil::grid_of;

TEST_CASE("block size one is the identity") {
  const CsiTrace t = testutil::random_trace(grid_of({-3, 4, 9}), 120.0, 50, 1);
  CHECK(average_phase_blocks(t, 1) == t);
  CHECK_THROWS_AS(average_phase_blocks(t, 0), std::invalid_argument);
  CHECK_THROWS_AS(average_phase_blocks(t, 51), std::invalid_argument);
}

TEST_CASE("block averaging keeps complete blocks and divides the rate") {
  const CsiTrace t = testutil::random_trace(grid_of({-3, 4}), 120.0, 250, 2);
  const CsiTrace a = average_phase_blocks(t, 12);
  CHECK(a.frame_count() == 20);
  CHECK(a.sample_rate_hz() == doctest::Approx(10.0));
  CHECK(default_phase_block(120.0) == 12);
  CHECK(default_phase_block(50.0) == 5);
}

TEST_CASE("block-mean phase jitter shrinks by the square root of the block") {
  const double sigma = 0.2;
  const std::size_t block = 100, blocks = 1000;
  CsiTrace t(grid_of({7}), 1000.0, block * blocks);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> jitter(0.0, sigma);
  for (auto& v : t.subcarrier(0)) v = std::polar(2.0, 0.4 + jitter(rng));
  const CsiTrace a = average_phase_blocks(t, block);
  double s = 0, s2 = 0;
  for (auto v : a.subcarrier(0)) {
    s += std::arg(v);
    s2 += std::arg(v) * std::arg(v);
  }
  const double n = static_cast<double>(blocks);
  const double sd = std::sqrt(s2 / n - (s / n) * (s / n));
  CHECK(sd == doctest::Approx(sigma / 10.0).epsilon(0.2));
  for (auto v : a.subcarrier(0)) CHECK(std::abs(v) == doctest::Approx(2.0));
}

TEST_CASE("block mean of a linear phase offset is linear in the tone index") {
  const std::vector<int> idx{-40, 3, 25};
  CsiTrace t(grid_of(idx), 100.0, 40);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> eta(0.0, 0.01);
  RealSeries draws(40);
  for (auto& d : draws) d = eta(rng);
  for (std::size_t m = 0; m < idx.size(); ++m) {
    for (std::size_t k = 0; k < 40; ++k) t.at(k, m) = std::polar(1.0, idx[m] * draws[k]);
  }
  const CsiTrace a = average_phase_blocks(t, 10);
  for (std::size_t m = 0; m < idx.size(); ++m) {
    for (std::size_t b = 0; b < 4; ++b) {
      double mean_eta = 0;
      for (std::size_t i = 0; i < 10; ++i) mean_eta += draws[b * 10 + i];
      mean_eta /= 10.0;
      CHECK(std::arg(a.at(b, m)) == doctest::Approx(idx[m] * mean_eta).epsilon(1e-12));
    }
  }
}

TEST_CASE("ratio cancels common amplitude and phase corruption") {
  auto grid = grid_of({-50, -10, 30});
  const CsiTrace clean = testutil::random_trace(grid, 10.0, 200, 4);
  CsiTrace dirty = clean;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 3.0), ph(-kPi, kPi);
  for (std::size_t k = 0; k < clean.frame_count(); ++k) {
    const cplx common = std::polar(u(rng), ph(rng));
    for (std::size_t m = 0; m < 3; ++m) dirty.at(k, m) *= common;
  }
  const auto a = cscr(clean, 0, 2).values;
  const auto b = cscr(dirty, 0, 2).values;
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12 * std::abs(a[k]));
}

TEST_CASE("linear phase ramp leaves a constant pair offset") {
  const std::vector<int> idx{-20, 13};
  CsiTrace t(grid_of(idx), 10.0, 64);
  const double eta = 0.031;
  for (std::size_t k = 0; k < 64; ++k) {
    for (std::size_t m = 0; m < 2; ++m) t.at(k, m) = std::polar(1.0, idx[m] * eta);
  }
  for (auto v : cscr(t, 0, 1).values) {
    CHECK(std::abs(wrap_to_pi(std::arg(v) - (idx[0] - idx[1]) * eta)) < 1e-12);
  }
}

TEST_CASE("cscr preconditions and the denominator guard") {
  CsiTrace t = testutil::random_trace(grid_of({1, 2, 3}), 10.0, 100, 6);
  CHECK_THROWS_AS(cscr(t, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(cscr(t, 0, 3), std::invalid_argument);

  // a few zero denominators are filled by interpolation between neighbors
  t.at(10, 1) = 0.0;
  t.at(11, 1) = 0.0;
  const CscrStream s = cscr(t, 0, 1);
  CHECK(s.repaired_samples == 2);
  const cplx left = t.at(9, 0) / t.at(9, 1), right = t.at(12, 0) / t.at(12, 1);
  CHECK(std::abs(s.values[10] - (left + (right - left) / 3.0)) < 1e-12);
  CHECK(std::abs(s.values[11] - (left + 2.0 * (right - left) / 3.0)) < 1e-12);

  // more than 10% flagged fails the stream
  for (std::size_t k = 20; k < 35; ++k) t.at(k, 1) = 0.0;
  CHECK_THROWS_AS(cscr(t, 0, 1), NumericError);
}

TEST_CASE("Mobius decomposition reconstructs the ratio") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  for (int trial = 0; trial < 200; ++trial) {
    MobiusCoefficients c{{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}};
    if (std::abs(c.d) <= 1.05 * std::abs(c.c)) c.d *= 1.5 * std::abs(c.c) / std::abs(c.d);
    ComplexSeries z(16);
    for (auto& v : z) v = std::polar(1.0, ph(rng));
    const auto dec = mobius_decompose(c, z, NoiseRegime::low_noise);
    for (std::size_t k = 0; k < z.size(); ++k) {
      const cplx direct = (c.a * z[k] + c.b) / (c.c * z[k] + c.d);
      CHECK(std::abs(dec.static_component + dec.dynamic_component[k] - direct) <= 1e-12 * std::abs(direct));
      CHECK(std::abs(mobius_apply(c, z[k]) - direct) <= 1e-14 * std::abs(direct));
    }
  }
}

TEST_CASE("Mobius decomposition with a zero leading numerator coefficient") {
  const MobiusCoefficients c{0.0, {0.3, -0.2}, {0.5, 0.1}, {1.2, 0.7}};
  ComplexSeries z{std::polar(1.0, 0.3), std::polar(1.0, 2.0)};
  const auto dec = mobius_decompose(c, z, NoiseRegime::low_noise);
  CHECK(std::abs(dec.static_component) == 0.0);
  for (std::size_t k = 0; k < z.size(); ++k) {
    const cplx expected = (c.b * c.c) / (c.c * c.c * (z[k] + c.d / c.c));
    CHECK(std::abs(dec.dynamic_component[k] - expected) < 1e-14);
    CHECK(std::abs(dec.static_component + dec.dynamic_component[k] - mobius_apply(c, z[k])) < 1e-14);
  }
}

TEST_CASE("high-noise dynamic component is a circle of radius |A|/|D|") {
  const MobiusCoefficients c{{0.08, 0.03}, {1.0, 0.2}, {0.05, -0.02}, {0.9, -0.4}};
  ComplexSeries z;
  for (int k = 0; k < 90; ++k) z.push_back(std::polar(1.0, 0.05 * k));
  const auto dec = mobius_decompose(c, z, NoiseRegime::high_noise);
  CHECK(std::abs(dec.static_component - c.b / c.d) < 1e-15);
  const auto [center, radius] = oracle::fit_circle(dec.dynamic_component);
  CHECK(std::abs(center) < 1e-9);
  CHECK(radius == doctest::Approx(std::abs(c.a) / std::abs(c.d)).epsilon(1e-9));
}

TEST_CASE("a pole on the trajectory names the offending sample") {
  const MobiusCoefficients c{{1, 0}, {0, 1}, {1, 0}, {-1, 0}};  // pole at Z = 1
  ComplexSeries z{std::polar(1.0, 0.5), {1.0, 0.0}};
  try {
    mobius_decompose(c, z, NoiseRegime::low_noise);
    FAIL("expected a NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("k = 1") != std::string::npos);
  }
  ComplexSeries off_circle{{0.5, 0.0}};
  CHECK_THROWS_AS(mobius_decompose(c, off_circle, NoiseRegime::high_noise), std::invalid_argument);
}

TEST_CASE("low-noise dynamic amplitude: worked example") {
  const auto grid = SubcarrierGrid::combined_40mhz();
  const double l1 = grid[0].wavelength_m(), l2 = grid[1].wavelength_m(), l114 = grid[113].wavelength_m();
  const double near = dynamic_amplitude_low_noise(1.0, 0.1, 1.0, 0.1, 4.0, l1, l2);
  const double far = dynamic_amplitude_low_noise(1.0, 0.1, 1.0, 0.1, 4.0, l1, l114);
  CHECK(std::abs(near - 0.00265) <= 5e-5);
  CHECK(std::abs(far - 0.2017) <= 5e-4);
  CHECK(far / near >= 70.0);
  CHECK(dynamic_amplitude_low_noise(1.0, 0.1, 1.0, 0.1, 4.0, l1, l1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(dynamic_amplitude_low_noise(1.0, 0.1, 0.1, 0.1, 4.0, l1, l2), NumericError);
}

TEST_CASE("Mobius coefficients describe the simulated ratio") {
  auto grid = testutil::full_grid();
  ScenarioConfig sc = testutil::small_scenario(8.0);
  const ChannelScenario s = build_scenario(sc, *grid);
  const CsiTrace ideal = generate_ideal_csi(s, grid);
  const std::size_t m1 = 0, m2 = 113;
  const MobiusCoefficients c = mobius_coefficients(s, *grid, m1, m2);
  const ComplexSeries z = mobius_trajectory(s, *grid, m1);
  const auto ratio = cscr(ideal, m1, m2).values;
  // exact up to the displacement term dropped from the m2 exponent: about A_D/A_S times
  // 2 pi * max path change * (1/lambda2 - 1/lambda1)
  const double dropped = kTwoPi * sc.geometric_factor * 0.5 * sc.respiration.depth_m *
                         std::abs(1.0 / (*grid)[m2].wavelength_m() - 1.0 / (*grid)[m1].wavelength_m());
  for (std::size_t k = 0; k < z.size(); ++k) {
    CHECK(std::abs(mobius_apply(c, z[k]) - ratio[k]) <= 2.0 * sc.dynamic_amplitude * dropped * std::abs(ratio[k]));
  }
}
