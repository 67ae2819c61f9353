#include "subratio/csi_sim.hpp"

#include <cmath>
#include <random>

#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"

namespace subratio {

namespace {

// Random-process identifiers for derive_seed(); each impairment draws from its own stream.
enum Stream : std::uint64_t { kPbd = 1, kCfo = 2, kImpulseTimes = 3, kImpulseLevels = 4, kNoise = 5 };

cplx path_phasor(double amplitude, double length_m, double wavelength_m) {
  return std::polar(amplitude, -kTwoPi * length_m / wavelength_m);
}

RealSeries cfo_walk(const CfoConfig& cfg, std::size_t frames, std::uint64_t seed) {
  RealSeries phi(frames, cfg.initial_rad);
  if (frames == 0 || cfg.step_std_rad == 0.0) return phi;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> step(0.0, cfg.step_std_rad);
  const double bound = cfg.bound_rad;
  double x = cfg.initial_rad;
  for (std::size_t k = 1; k < frames; ++k) {
    x += step(rng);
    if (bound > 0) {
      // reflect at the walls; repeat for steps larger than the interval
      while (x > bound || x < -bound) {
        if (x > bound) x = 2 * bound - x;
        if (x < -bound) x = -2 * bound - x;
      }
    } else {
      x = 0.0;
    }
    phi[k] = x;
  }
  return phi;
}

// log A_n(m,k) = c * g(k) + sqrt(1 - c^2) * g_m(k); all levels jump together.
std::vector<RealSeries> impulse_log_levels(const ImpulseConfig& cfg, std::size_t frames,
                                           std::size_t subcarriers, double fs, std::uint64_t seed) {
  std::vector<RealSeries> levels;
  if (cfg.jump_rate_hz == 0.0 || cfg.level_log_std == 0.0) return levels;

  std::mt19937_64 time_rng(derive_seed(seed, kImpulseTimes));
  std::mt19937_64 level_rng(derive_seed(seed, kImpulseLevels));
  std::exponential_distribution<double> gap(cfg.jump_rate_hz);
  std::normal_distribution<double> level(0.0, cfg.level_log_std);

  const double c = cfg.correlation;
  const double c_private = std::sqrt(std::max(0.0, 1.0 - c * c));
  const bool independent_part = c_private > 0.0;

  levels.assign(subcarriers, RealSeries(frames, 0.0));
  double common = 0.0;
  std::vector<double> own(subcarriers, 0.0);
  double next_jump = gap(time_rng);
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = k / fs;
    while (t >= next_jump) {
      common = level(level_rng);
      if (independent_part) {
        for (auto& o : own) o = level(level_rng);
      }
      next_jump += gap(time_rng);
    }
    for (std::size_t m = 0; m < subcarriers; ++m) {
      levels[m][k] = c * common + (independent_part ? c_private * own[m] : 0.0);
    }
  }
  return levels;
}

double artifact_profile(const MotionArtifact& a, double t) {
  if (t < a.start_s || t > a.start_s + a.duration_s) return 0.0;
  return 0.5 * (1.0 - std::cos(kTwoPi * (t - a.start_s) / a.duration_s));
}

}  // namespace

cplx static_component(const ChannelScenario& s, const SubcarrierGrid& grid, std::size_t m) {
  cplx h{};
  const double lambda = grid[m].wavelength_m();
  for (const auto& p : s.static_paths) h += path_phasor(p.amplitude[m], p.length_m, lambda);
  return h;
}

cplx dynamic_component(const ChannelScenario& s, const SubcarrierGrid& grid, std::size_t m,
                       std::size_t k) {
  return path_phasor(s.dynamic_amplitude[m], s.dynamic_length(k), grid[m].wavelength_m());
}

CsiTrace generate_ideal_csi(const ChannelScenario& scenario,
                            std::shared_ptr<const SubcarrierGrid> grid) {
  if (!grid || grid->empty()) throw ConfigError("ideal CSI requires a non-empty grid");
  scenario.validate(*grid);
  const std::size_t frames = scenario.frame_count();
  CsiTrace trace(grid, scenario.sample_rate_hz, frames);
  for (std::size_t m = 0; m < grid->size(); ++m) {
    const cplx hs = static_component(scenario, *grid, m);
    auto col = trace.subcarrier(m);
    for (std::size_t k = 0; k < frames; ++k) col[k] = hs + dynamic_component(scenario, *grid, m, k);
  }
  return trace;
}

CsiTrace apply_impairments(const CsiTrace& ideal, const ImpairmentConfig& cfg) {
  cfg.validate();
  const std::size_t frames = ideal.frame_count();
  const std::size_t subs = ideal.subcarrier_count();
  const double fs = ideal.sample_rate_hz();
  const auto& grid = ideal.grid();

  RealSeries pbd(frames, 0.0);
  {
    std::mt19937_64 rng(derive_seed(cfg.seed, kPbd));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : pbd) v = cfg.pbd_noise_std * normal(rng);
  }
  const RealSeries cfo = cfo_walk(cfg.cfo, frames, derive_seed(cfg.seed, kCfo));
  const auto log_levels = impulse_log_levels(cfg.impulse, frames, subs, fs, cfg.seed);

  RealSeries artifact(frames, 0.0);
  for (const auto& a : cfg.artifacts) {
    for (std::size_t k = 0; k < frames; ++k) artifact[k] += a.phase_jump_rad * artifact_profile(a, k / fs);
  }
  const double span = std::max(1, grid.physical_span());

  CsiTrace out = ideal;
  std::mt19937_64 noise_rng(derive_seed(cfg.seed, kNoise));
  std::normal_distribution<double> noise(0.0, cfg.gaussian_noise_std / std::sqrt(2.0));
  for (std::size_t m = 0; m < subs; ++m) {
    const double n = grid[m].physical_index;
    auto col = out.subcarrier(m);
    for (std::size_t k = 0; k < frames; ++k) {
      const double theta = n * (pbd[k] + cfg.sfo_slope) + cfo[k] + artifact[k] * n / span;
      const double amp = log_levels.empty() ? 1.0 : std::exp(log_levels[m][k]);
      col[k] = amp * std::polar(1.0, -theta) * col[k];
    }
  }
  // noise drawn in frame-major order so the sequence does not depend on storage layout
  if (cfg.gaussian_noise_std > 0.0) {
    for (std::size_t k = 0; k < frames; ++k) {
      for (std::size_t m = 0; m < subs; ++m) {
        const double re = noise(noise_rng);
        const double im = noise(noise_rng);
        out.at(k, m) += cplx(re, im);
      }
    }
  }
  return out;
}

RealSeries fresnel_phase(const ChannelScenario& scenario, const SubcarrierGrid& grid, std::size_t m) {
  const cplx hs = static_component(scenario, grid, m);
  if (std::abs(hs) == 0.0) throw NumericError("static component is zero; Fresnel phase undefined");
  RealSeries rho(scenario.frame_count());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const cplx hd = dynamic_component(scenario, grid, m, k);
    if (std::abs(hd) == 0.0) throw NumericError("dynamic component is zero; Fresnel phase undefined");
    rho[k] = std::arg(hs) - std::arg(hd);
  }
  return unwrap(rho);
}

CsiTrace simulate(const ScenarioConfig& scenario, const ImpairmentConfig& impairments,
                  std::shared_ptr<const SubcarrierGrid> grid) {
  const ChannelScenario resolved = build_scenario(scenario, *grid);
  return apply_impairments(generate_ideal_csi(resolved, grid), impairments);
}

}  // namespace subratio
