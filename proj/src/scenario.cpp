#include "subratio/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"

namespace subratio {

namespace {

constexpr double kMaxChestDisplacementM = 0.012;

double breathing_phase(const RespirationConfig& c, double t, double duration_s) {
  const double f0 = c.rate_bpm / 60.0;
  const double f1 = c.end_rate_bpm / 60.0;
  double cycles = 0.0;
  switch (c.pattern) {
    case BreathingPattern::sinusoid:
      cycles = f0 * t;
      break;
    case BreathingPattern::chirp: {
      const double T = duration_s > 0 ? duration_s : 1.0;
      cycles = f0 * t + (f1 - f0) * t * t / (2.0 * T);
      break;
    }
    case BreathingPattern::step: {
      const double ts = c.step_time_s;
      cycles = f0 * std::min(t, ts) + f1 * std::max(0.0, t - ts);
      break;
    }
  }
  return kTwoPi * cycles + c.phase_rad;
}

// Smooth random gain profile over physical tone index, mean 1.
std::vector<double> ripple_profile(const SubcarrierGrid& grid, double depth, std::uint64_t seed) {
  std::vector<double> gain(grid.size(), 1.0);
  if (depth == 0.0) return gain;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(3.0));
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  double weight[3];
  double phase[3];
  for (int q = 0; q < 3; ++q) {
    weight[q] = normal(rng);
    phase[q] = uniform(rng);
  }
  const double span = std::max(1, grid.physical_span());
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double x = grid[m].physical_index / span;
    double s = 0.0;
    for (int q = 0; q < 3; ++q) s += weight[q] * std::cos(kPi * (q + 1) * x + phase[q]);
    gain[m] = std::max(0.05, 1.0 + depth * s);
  }
  return gain;
}

}  // namespace

RealSeries breathing_displacement(const RespirationConfig& config, double sample_rate_hz,
                                  std::size_t frames) {
  RealSeries d(frames);
  const double duration = frames / sample_rate_hz;
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = k / sample_rate_hz;
    d[k] = 0.5 * config.depth_m * std::sin(breathing_phase(config, t, duration));
  }
  return d;
}

double instantaneous_rate_bpm(const RespirationConfig& c, double t_s, double duration_s) {
  switch (c.pattern) {
    case BreathingPattern::sinusoid:
      return c.rate_bpm;
    case BreathingPattern::chirp:
      return c.rate_bpm + (c.end_rate_bpm - c.rate_bpm) * t_s / (duration_s > 0 ? duration_s : 1.0);
    case BreathingPattern::step:
      return t_s < c.step_time_s ? c.rate_bpm : c.end_rate_bpm;
  }
  return c.rate_bpm;
}

double mean_rate_bpm(const RespirationConfig& c, double t0_s, double t1_s, double duration_s) {
  if (t1_s <= t0_s) return instantaneous_rate_bpm(c, t0_s, duration_s);
  // cycles elapsed over the interval, converted back to a rate
  const double cycles = (breathing_phase(c, t1_s, duration_s) - breathing_phase(c, t0_s, duration_s)) / kTwoPi;
  return 60.0 * cycles / (t1_s - t0_s);
}

ChannelScenario build_scenario(const ScenarioConfig& config, const SubcarrierGrid& grid) {
  if (grid.empty()) throw ConfigError("scenario requires a non-empty grid");
  if (!(config.sample_rate_hz > 0)) throw ConfigError("sample_rate_hz must be positive");
  if (!(config.duration_s > 0)) throw ConfigError("duration_s must be positive");
  if (config.frequency_ripple < 0) throw ConfigError("frequency_ripple must be non-negative");

  ChannelScenario s;
  s.sample_rate_hz = config.sample_rate_hz;
  s.base_dynamic_length_m = config.dynamic_base_length_m;
  s.geometric_factor = config.geometric_factor;

  const auto static_gain = ripple_profile(grid, config.frequency_ripple, config.ripple_seed);
  const auto dynamic_gain = ripple_profile(grid, config.frequency_ripple, config.ripple_seed + 1);

  for (const auto& p : config.static_paths) {
    StaticPath path;
    path.length_m = p.length_m;
    path.amplitude.resize(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) path.amplitude[m] = p.amplitude * static_gain[m];
    s.static_paths.push_back(std::move(path));
  }
  s.dynamic_amplitude.resize(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) {
    s.dynamic_amplitude[m] = config.dynamic_amplitude * dynamic_gain[m];
  }

  const auto frames = static_cast<std::size_t>(std::llround(config.duration_s * config.sample_rate_hz));
  s.displacement_m = breathing_displacement(config.respiration, config.sample_rate_hz, frames);
  s.validate(grid);
  return s;
}

void ChannelScenario::validate(const SubcarrierGrid& grid) const {
  if (grid.empty()) throw ConfigError("scenario grid is empty");
  if (!(sample_rate_hz > 0)) throw ConfigError("scenario sample rate must be positive");
  if (dynamic_amplitude.size() != grid.size()) {
    throw ConfigError("dynamic amplitude profile does not match the grid");
  }
  for (const auto& p : static_paths) {
    if (!(p.length_m > 0)) throw ConfigError("static path length must be positive");
    if (p.amplitude.size() != grid.size()) {
      throw ConfigError("static amplitude profile does not match the grid");
    }
    if (std::any_of(p.amplitude.begin(), p.amplitude.end(), [](double a) { return !(a >= 0); })) {
      throw ConfigError("static path amplitudes must be non-negative");
    }
  }
  if (std::any_of(dynamic_amplitude.begin(), dynamic_amplitude.end(),
                  [](double a) { return !(a >= 0); })) {
    throw ConfigError("dynamic amplitudes must be non-negative");
  }
  for (std::size_t k = 0; k < displacement_m.size(); ++k) {
    if (std::abs(displacement_m[k]) > kMaxChestDisplacementM + 1e-15) {
      throw ConfigError("chest displacement exceeds 12 mm");
    }
    if (!(dynamic_length(k) > 0)) throw ConfigError("dynamic path length must stay positive");
  }
}

void ImpairmentConfig::validate() const {
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite and >= 0");
  };
  non_negative(pbd_noise_std, "pbd_noise_std");
  non_negative(cfo.step_std_rad, "cfo.step_std_rad");
  non_negative(cfo.bound_rad, "cfo.bound_rad");
  non_negative(impulse.jump_rate_hz, "impulse.jump_rate_hz");
  non_negative(impulse.level_log_std, "impulse.level_log_std");
  non_negative(gaussian_noise_std, "gaussian_noise_std");
  if (!std::isfinite(sfo_slope)) throw ConfigError("sfo_slope must be finite");
  if (!(impulse.correlation >= 0.0 && impulse.correlation <= 1.0)) {
    throw ConfigError("impulse.correlation must lie in [0, 1]");
  }
  for (const auto& a : artifacts) {
    if (!(a.duration_s > 0)) throw ConfigError("artifact duration must be positive");
  }
}

}  // namespace subratio
