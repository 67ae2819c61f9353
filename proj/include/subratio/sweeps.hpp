#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string_view>
#include <vector>

#include "subratio/pipeline.hpp"
#include "subratio/scenario.hpp"

namespace subratio {

enum class Estimator { amplitude_only = 0, phase_only = 1, full = 2 };
inline constexpr std::array<Estimator, 3> kEstimators{Estimator::amplitude_only,
                                                      Estimator::phase_only, Estimator::full};
std::string_view to_string(Estimator e);

struct EstimatorTally {
  std::size_t windows = 0;
  std::size_t detected = 0;  // |estimate - truth| < tolerance
  double sum_abs_error = 0;  // over windows with an estimate
  std::size_t estimated = 0;

  double rate_percent() const {
    return windows ? 100.0 * static_cast<double>(detected) / static_cast<double>(windows) : 0.0;
  }
  /// Majority of the windows detected.
  bool detectable() const { return windows > 0 && 2 * detected > windows; }
  double mean_abs_error() const {
    return estimated ? sum_abs_error / static_cast<double>(estimated)
                     : std::numeric_limits<double>::quiet_NaN();
  }
};

struct PositionResult {
  std::size_t index = 0;
  double offset_m = 0;           // added to the base dynamic path length
  double dynamic_length_m = 0;   // d_0 at this position
  std::array<EstimatorTally, 3> tally{};
};

struct NoiseLevelResult {
  double noise_std = 0;
  std::array<EstimatorTally, 3> tally{};
};

struct EvaluationReport {
  std::vector<PositionResult> positions;
  std::array<double, 3> detectability_percent{};  // blind-spot sweep, per estimator
  std::vector<NoiseLevelResult> levels;           // noise sweep
};

struct BlindSpotConfig {
  ScenarioConfig scenario;
  ImpairmentConfig impairments;
  PipelineConfig pipeline;
  std::size_t positions = 32;
  double span_m = 0;  // path-length span covered by the sweep; 0 selects one center wavelength
  double tolerance_bpm = 1.0;
  bool parallel = true;
};

struct SnrSweepConfig {
  ScenarioConfig scenario;
  ImpairmentConfig impairments;
  PipelineConfig pipeline;
  std::vector<double> noise_levels;  // gaussian_noise_std values, non-decreasing
  std::size_t seeds = 10;
  double tolerance_bpm = 1.0;
  bool parallel = true;
  bool include_phase_only = false;
};

/// Tally every window of one simulated trace for the requested estimators.
std::array<EstimatorTally, 3> evaluate_trace(const CsiTrace& raw, const ScenarioConfig& scenario,
                                             const PipelineConfig& pipeline, double tolerance_bpm,
                                             const std::array<bool, 3>& enabled);

/**
 * Move the target across `positions` evenly spaced path-length offsets
 * spanning one wavelength and score the amplitude-only, phase-only and full
 * estimators at each. A position is detectable when most of its windows land
 * within the tolerance of the true rate.
 */
EvaluationReport blind_spot_sweep(const BlindSpotConfig& config, const SubcarrierGrid& grid);

/// Detection rate against noise level for the full pipeline and the amplitude-only baseline.
EvaluationReport snr_sweep(const SnrSweepConfig& config, const SubcarrierGrid& grid);

void write_blindspot_csv(std::ostream& os, const EvaluationReport& report);
void write_snr_csv(std::ostream& os, const EvaluationReport& report);

}  // namespace subratio
