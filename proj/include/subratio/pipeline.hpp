#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "subratio/combiner.hpp"
#include "subratio/cscr.hpp"
#include "subratio/gass.hpp"
#include "subratio/rate.hpp"
#include "subratio/trace.hpp"
#include "subratio/waveform.hpp"

namespace subratio {

/// Subcarrier pair whose ratio drives motion detection and the single-pair baselines.
struct ReferencePair {
  std::optional<std::size_t> numerator;    // default: lowest physical index on the grid
  std::optional<std::size_t> denominator;  // default: highest physical index on the grid
};

/// Resolved (numerator, denominator) array positions for a grid.
std::pair<std::size_t, std::size_t> resolve_reference_pair(const ReferencePair& pair,
                                                           const SubcarrierGrid& grid);

struct SegmentationOptions {
  double frame_s = 1.0;
  std::size_t window_frames = 10;
  std::size_t stride_frames = 1;
  double motion_threshold_rad = 2.0;
};

struct WindowPlan {
  std::size_t frame_length = 0;   // samples per 1 s frame
  std::size_t window_length = 0;  // samples per window
  double motion_threshold = 2.0;
  std::vector<bool> accepted;       // one per frame
  std::vector<double> frame_motion; // peak-to-peak reference phase per frame (rad)
  std::vector<std::size_t> window_starts;  // first frame of each window
};

/**
 * Mark frames whose reference-ratio phase swings more than the threshold as
 * motion and list the windows made of consecutive accepted frames. The swing
 * of frame f covers its samples plus the last sample of frame f - 1.
 */
WindowPlan segment(const CsiTrace& frames, const SegmentationOptions& options,
                   const ReferencePair& reference = {});

/// Starts of every run of `window_frames` consecutive accepted frames on a `stride` grid.
std::vector<std::size_t> assemble_windows(const std::vector<bool>& accepted,
                                          std::size_t window_frames, std::size_t stride);

struct PipelineConfig {
  std::size_t phase_block = 0;  // raw samples per averaging block; 0 selects 0.1 s
  SegmentationOptions segmentation;
  ReferencePair reference;
  bool gass_enabled = true;    // false: a fixed random single pair stands in for the search
  bool reuse_solution = false; // keep the previous window's genome when its fitness moved < tolerance
  double reuse_tolerance = 0.1;
  GassParams gass;
  StreamOptions streams;
  CombinerOptions combiner;
  ProjectionOptions projection;
  WaveformOptions waveform;
  RateOptions rate;
};

struct StageSsnr {
  double gass = 0;       // fitness of the selected genome
  double reference = 0;  // best single built stream
  double combined = 0;
  double smoothed = 0;
  double projected = 0;
  double filtered = 0;
};

struct WindowResult {
  std::int64_t window_id = 0;
  double t_start_s = 0;
  double t_end_s = 0;
  RespirationEstimate estimate;
  std::string reason;  // empty when an estimate was produced by every stage
  StageSsnr ssnr;
  std::optional<GassSolution> solution;
  bool reused_solution = false;
  double projection_angle = 0;
  std::size_t streams_built = 0;
  std::size_t streams_combined = 0;
  std::size_t hampel_replacements = 0;
  RealSeries waveform;
  double truth_bpm = std::numeric_limits<double>::quiet_NaN();

  bool has_estimate() const { return estimate.status == RateStatus::ok; }
};

struct PipelineResult {
  std::size_t phase_block = 1;
  double effective_rate_hz = 0;
  WindowPlan plan;
  std::vector<WindowResult> windows;
};

/// Ground truth rate over [t0, t1); used to annotate windows.
using TruthFn = std::function<double(double t0_s, double t1_s)>;

/**
 * Process one block-averaged window through selection, combination,
 * projection, filtering and rate estimation. With `genome` the search is
 * skipped and that genome is used (replaying a recorded solution).
 * Stage failures produce a result with a reason code instead of throwing.
 */
WindowResult process_window(const CsiTrace& window, const PipelineConfig& config,
                            const GassGenome* genome = nullptr);

/// Full flow on a raw trace: block averaging, segmentation, per-window processing.
PipelineResult run_pipeline(const CsiTrace& raw, const PipelineConfig& config,
                            const TruthFn& truth = {});

enum class ReferenceSignal { amplitude, phase };

/// Single-pair baseline: |ratio| or unwrapped angle of the reference pair,
/// smoothed, filtered and passed to the rate estimator.
RespirationEstimate estimate_reference_pair(const CsiTrace& window, ReferenceSignal signal,
                                            const PipelineConfig& config);

std::size_t resolve_phase_block(const PipelineConfig& config, double raw_rate_hz);

}  // namespace subratio
