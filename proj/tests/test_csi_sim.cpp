#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "subratio/csi_sim.hpp"
#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"
#include "test_util.hpp"

using namespace subratio;
using testutil::grid_of;

namespace {

ChannelScenario flat_scenario(const SubcarrierGrid& grid, double a_s, double d_s, double a_d, double d0,
                              std::size_t frames, double fs) {
  ChannelScenario s;
  s.static_paths = {StaticPath{std::vector<double>(grid.size(), a_s), d_s}};
  s.dynamic_amplitude.assign(grid.size(), a_d);
  s.base_dynamic_length_m = d0;
  s.displacement_m.assign(frames, 0.0);
  s.sample_rate_hz = fs;
  return s;
}

}  // namespace

TEST_CASE("zero dynamic amplitude gives constant frames") {
  auto grid = testutil::full_grid();
  ScenarioConfig sc = testutil::small_scenario(5.0);
  sc.dynamic_amplitude = 0.0;
  const CsiTrace t = generate_ideal_csi(build_scenario(sc, *grid), grid);
  for (std::size_t m = 0; m < t.subcarrier_count(); ++m) {
    for (std::size_t k = 1; k < t.frame_count(); ++k) REQUIRE(t.at(k, m) == t.at(0, m));
  }
}

TEST_CASE("static path of one wavelength has phase zero") {
  auto grid = grid_of({10});
  const double lambda = (*grid)[0].wavelength_m();
  const ChannelScenario s = flat_scenario(*grid, 0.7, lambda, 0.1, 3.0, 4, 10.0);
  const cplx hs = static_component(s, *grid, 0);
  CHECK(std::abs(hs - cplx(0.7, 0.0)) < 1e-12);
}

TEST_CASE("fresnel phase of orthogonal and aligned components") {
  auto grid = grid_of({10});
  const double lambda = (*grid)[0].wavelength_m();
  // H_S = 1, H_D = exp(-j 2 pi 0.75) = j
  ChannelScenario s = flat_scenario(*grid, 1.0, lambda, 1.0, 0.75 * lambda, 3, 10.0);
  for (double v : fresnel_phase(s, *grid, 0)) CHECK(v == doctest::Approx(-kPi / 2).epsilon(1e-9));
  s.base_dynamic_length_m = 2.0 * lambda;
  for (double v : fresnel_phase(s, *grid, 0)) CHECK(std::abs(wrap_to_pi(v)) < 1e-9);
  s.dynamic_amplitude[0] = 0.0;
  CHECK_THROWS_AS(fresnel_phase(s, *grid, 0), NumericError);
}

TEST_CASE("6 mm breathing excursion of the Fresnel phase") {
  // Geometric factor calibrated so 6 mm of chest depth sweeps about pi/3 at 2.452 GHz.
  auto grid = grid_of({0});
  ScenarioConfig sc;
  sc.sample_rate_hz = 50.0;
  sc.duration_s = 4.0;  // one 15 bpm cycle
  sc.geometric_factor = 3.4;
  const ChannelScenario s = build_scenario(sc, *grid);
  const RealSeries rho = fresnel_phase(s, *grid, 0);
  const double excursion = peak_to_peak(rho);
  CHECK(excursion >= 0.9);
  CHECK(excursion <= 1.2);
  const double expected = kTwoPi * 3.4 * sc.respiration.depth_m / (*grid)[0].wavelength_m();
  CHECK(excursion == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("ideal amplitude matches the two-phasor closed form") {
  auto grid = testutil::full_grid();
  ScenarioConfig sc = testutil::small_scenario(8.0);
  sc.dynamic_amplitude = 0.4;
  const ChannelScenario s = build_scenario(sc, *grid);
  const CsiTrace t = generate_ideal_csi(s, grid);
  for (std::size_t m : {std::size_t{0}, std::size_t{57}, grid->size() - 1}) {
    const RealSeries rho = fresnel_phase(s, *grid, m);
    const double as = std::abs(static_component(s, *grid, m));
    for (std::size_t k = 0; k < t.frame_count(); ++k) {
      const double ad = s.dynamic_amplitude[m];
      const double closed = std::sqrt(as * as + ad * ad + 2 * as * ad * std::cos(rho[k]));
      CHECK(std::abs(std::abs(t.at(k, m)) - closed) <= 1e-10 * closed);
    }
  }
}

TEST_CASE("all-zero impairments are the identity, bitwise") {
  auto grid = testutil::full_grid();
  const CsiTrace ideal = generate_ideal_csi(build_scenario(testutil::small_scenario(5.0), *grid), grid);
  ImpairmentConfig cfg;
  cfg.seed = 99;
  CHECK(apply_impairments(ideal, cfg) == ideal);
}

TEST_CASE("linear phase slope shifts the pair phase difference exactly") {
  auto grid = testutil::full_grid();
  const CsiTrace ideal = generate_ideal_csi(build_scenario(testutil::small_scenario(5.0), *grid), grid);
  ImpairmentConfig cfg;
  cfg.sfo_slope = 0.013;
  const CsiTrace out = apply_impairments(ideal, cfg);
  const std::size_t m1 = 3, m2 = 200;
  const double dn = (*grid)[m1].physical_index - (*grid)[m2].physical_index;
  for (std::size_t k = 0; k < out.frame_count(); ++k) {
    const double measured = std::arg(out.at(k, m1)) - std::arg(out.at(k, m2));
    const double channel = std::arg(ideal.at(k, m1)) - std::arg(ideal.at(k, m2));
    CHECK(std::abs(wrap_to_pi(measured - channel + dn * cfg.sfo_slope)) < 1e-12);
  }
}

TEST_CASE("perfectly correlated impulse levels leave amplitude ratios unchanged") {
  auto grid = testutil::full_grid();
  const CsiTrace ideal = generate_ideal_csi(build_scenario(testutil::small_scenario(20.0), *grid), grid);
  ImpairmentConfig cfg;
  cfg.impulse = {2.0, 0.5, 1.0};
  cfg.seed = 5;
  const CsiTrace out = apply_impairments(ideal, cfg);
  bool any_change = false;
  for (std::size_t k = 0; k < out.frame_count(); ++k) {
    const double level_a = std::abs(out.at(k, 0)) / std::abs(ideal.at(k, 0));
    const double level_b = std::abs(out.at(k, 150)) / std::abs(ideal.at(k, 150));
    CHECK(level_a == doctest::Approx(level_b).epsilon(1e-12));
    any_change |= std::abs(level_a - 1.0) > 1e-3;
  }
  CHECK(any_change);
}

TEST_CASE("simulation is reproducible for a fixed seed") {
  auto grid = testutil::full_grid();
  ScenarioConfig sc = testutil::small_scenario(6.0);
  ImpairmentConfig cfg;
  cfg.pbd_noise_std = 0.01;
  cfg.cfo.step_std_rad = 0.05;
  cfg.impulse = {1.0, 0.3, 0.8};
  cfg.gaussian_noise_std = 0.05;
  cfg.seed = 1234;
  CHECK(simulate(sc, cfg, grid) == simulate(sc, cfg, grid));
  ImpairmentConfig other = cfg;
  other.seed = 1235;
  CHECK_FALSE(simulate(sc, cfg, grid) == simulate(sc, other, grid));
}

TEST_CASE("invalid scenarios are configuration errors") {
  auto grid = testutil::full_grid();
  ScenarioConfig sc = testutil::small_scenario(5.0);
  sc.static_paths[0].length_m = 0.0;
  CHECK_THROWS_AS(build_scenario(sc, *grid), ConfigError);
  sc = testutil::small_scenario(5.0);
  sc.sample_rate_hz = 0.0;
  CHECK_THROWS_AS(build_scenario(sc, *grid), ConfigError);
  CHECK_THROWS_AS(generate_ideal_csi(ChannelScenario{}, std::make_shared<const SubcarrierGrid>()), ConfigError);
}
