#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "subratio/grid.hpp"
#include "subratio/types.hpp"

namespace subratio {

enum class BreathingPattern { sinusoid, chirp, step };

/// Chest displacement generator. depth_m is peak-to-peak chest excursion.
struct RespirationConfig {
  BreathingPattern pattern = BreathingPattern::sinusoid;
  double rate_bpm = 15.0;
  double depth_m = 0.006;
  double phase_rad = 0.0;
  double end_rate_bpm = 15.0;  // chirp: rate at the end of the run; step: rate after step_time_s
  double step_time_s = 0.0;
};

struct StaticPathConfig {
  double amplitude = 1.0;
  double length_m = 2.0;
};

/// User-facing description of a propagation scenario; resolved per grid by build_scenario().
struct ScenarioConfig {
  double sample_rate_hz = 120.0;
  double duration_s = 60.0;
  std::vector<StaticPathConfig> static_paths{StaticPathConfig{}};
  double dynamic_amplitude = 0.1;
  double dynamic_base_length_m = 6.0;  // d_0, total TX -> chest -> RX length
  double geometric_factor = 2.0;       // path-length change per unit chest displacement
  RespirationConfig respiration;
  double frequency_ripple = 0.0;  // relative depth of a smooth per-subcarrier gain ripple
  std::uint64_t ripple_seed = 7;
};

struct StaticPath {
  std::vector<double> amplitude;  // A_S,p(m)
  double length_m = 0;            // d_S,p
};

/// Fully resolved propagation environment for one grid.
struct ChannelScenario {
  std::vector<StaticPath> static_paths;
  std::vector<double> dynamic_amplitude;  // A_D(m)
  double base_dynamic_length_m = 0;       // d_0
  double geometric_factor = 2.0;
  std::vector<double> displacement_m;  // chest displacement, one sample per frame
  double sample_rate_hz = 0;

  std::size_t frame_count() const { return displacement_m.size(); }
  /// d_D(k) = d_0 + geometric_factor * displacement(k)
  double dynamic_length(std::size_t k) const {
    return base_dynamic_length_m + geometric_factor * displacement_m[k];
  }

  /// Throws ConfigError when an invariant does not hold for `grid`.
  void validate(const SubcarrierGrid& grid) const;
};

ChannelScenario build_scenario(const ScenarioConfig& config, const SubcarrierGrid& grid);

RealSeries breathing_displacement(const RespirationConfig& config, double sample_rate_hz,
                                  std::size_t frames);
double instantaneous_rate_bpm(const RespirationConfig& config, double t_s, double duration_s);
/// Average breathing rate over [t0, t1), the ground truth for a window.
double mean_rate_bpm(const RespirationConfig& config, double t0_s, double t1_s, double duration_s);

// ---------------------------------------------------------------------------
// Hardware impairments

/// Common phase error as a reflecting random walk inside [-bound, bound].
struct CfoConfig {
  double step_std_rad = 0.0;
  double bound_rad = kPi;
  double initial_rad = 0.0;
};

/// Multiplicative impulse level: piecewise constant, log-normal levels,
/// Poisson jump times shared by every subcarrier.
struct ImpulseConfig {
  double jump_rate_hz = 0.0;
  double level_log_std = 0.0;
  double correlation = 1.0;  // cross-subcarrier correlation of log level
};

/// Gross body motion: a transient group-delay excursion (raised-cosine
/// profile) producing a phase_jump_rad swing between the extreme tones.
struct MotionArtifact {
  double start_s = 0.0;
  double duration_s = 0.5;
  double phase_jump_rad = kPi;
};

struct ImpairmentConfig {
  double pbd_noise_std = 0.0;  // per-packet timing jitter std, rad per physical tone index
  double sfo_slope = 0.0;      // sampling-offset slope, rad per physical tone index
  CfoConfig cfo;
  ImpulseConfig impulse;
  double gaussian_noise_std = 0.0;  // epsilon ~ CN(0, std^2)
  std::vector<MotionArtifact> artifacts;
  std::uint64_t seed = 0;

  void validate() const;
};

}  // namespace subratio
