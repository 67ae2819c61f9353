#include "subratio/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"
#include "subratio/ssnr.hpp"

namespace subratio {

std::pair<std::size_t, std::size_t> resolve_reference_pair(const ReferencePair& pair,
                                                           const SubcarrierGrid& grid) {
  if (grid.size() < 2) throw ConfigError("reference pair needs at least two subcarriers");
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t m = 1; m < grid.size(); ++m) {
    if (grid[m].physical_index < grid[lo].physical_index) lo = m;
    if (grid[m].physical_index > grid[hi].physical_index) hi = m;
  }
  const std::size_t num = pair.numerator.value_or(lo);
  const std::size_t den = pair.denominator.value_or(hi);
  if (num >= grid.size() || den >= grid.size()) throw ConfigError("reference pair index out of range");
  if (num == den) throw ConfigError("reference pair subcarriers must differ");
  return {num, den};
}

std::vector<std::size_t> assemble_windows(const std::vector<bool>& accepted,
                                          std::size_t window_frames, std::size_t stride) {
  if (window_frames == 0 || stride == 0) {
    throw std::invalid_argument("assemble_windows: window and stride must be >= 1");
  }
  std::vector<std::size_t> starts;
  // length of the accepted run ending at each frame
  std::vector<std::size_t> run(accepted.size(), 0);
  for (std::size_t f = 0; f < accepted.size(); ++f) {
    run[f] = accepted[f] ? (f > 0 ? run[f - 1] : 0) + 1 : 0;
  }
  for (std::size_t s = 0; s + window_frames <= accepted.size(); s += stride) {
    if (run[s + window_frames - 1] >= window_frames) starts.push_back(s);
  }
  return starts;
}

WindowPlan segment(const CsiTrace& frames, const SegmentationOptions& options,
                   const ReferencePair& reference) {
  if (!(options.frame_s > 0.0)) throw ConfigError("segmentation: frame length must be positive");
  WindowPlan plan;
  plan.motion_threshold = options.motion_threshold_rad;
  plan.frame_length = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(options.frame_s * frames.sample_rate_hz())));
  plan.window_length = plan.frame_length * options.window_frames;
  if (frames.empty()) return plan;

  const auto [num, den] = resolve_reference_pair(reference, frames.grid());
  const CscrStream ratio = cscr(frames, num, den);
  const RealSeries phase = unwrapped_angle(ratio.values);

  const std::size_t count = frames.frame_count() / plan.frame_length;
  plan.accepted.assign(count, false);
  plan.frame_motion.assign(count, 0.0);
  for (std::size_t f = 0; f < count; ++f) {
    const std::size_t lo = f == 0 ? 0 : f * plan.frame_length - 1;
    const std::size_t hi = (f + 1) * plan.frame_length;
    const auto span = std::span<const double>(phase).subspan(lo, hi - lo);
    plan.frame_motion[f] = peak_to_peak(span);
    plan.accepted[f] = plan.frame_motion[f] <= options.motion_threshold_rad;
  }
  plan.window_starts = assemble_windows(plan.accepted, options.window_frames, options.stride_frames);
  return plan;
}

std::size_t resolve_phase_block(const PipelineConfig& config, double raw_rate_hz) {
  return config.phase_block ? config.phase_block : default_phase_block(raw_rate_hz);
}

namespace {

GassGenome fixed_random_pair(std::size_t m, const GassParams& params) {
  std::mt19937_64 rng(derive_seed(params.seed, 0x5eed));
  std::uniform_int_distribution<std::size_t> any(0, m - 1);
  const std::size_t md = any(rng);
  std::uniform_int_distribution<std::size_t> other(0, m - 2);
  std::size_t m1 = other(rng);
  if (m1 >= md) ++m1;
  return single_pair_genome(m1, md, params.numerator_count);
}

double safe_ssnr(std::span<const cplx> x, double fs, const SsnrOptions& o) {
  return ssnr(x, fs, o).value;
}

double safe_ssnr(std::span<const double> x, double fs, const SsnrOptions& o) {
  return ssnr(x, fs, o).value;
}

RateOptions window_rate_options(const RateOptions& base, std::size_t n, double fs) {
  // The window is at least the configured duration by construction; smoothing
  // in block mode shortens the sample count, which must not trip the check.
  RateOptions r = base;
  r.min_duration_s = std::min(base.min_duration_s, static_cast<double>(n) / fs);
  return r;
}

}  // namespace

WindowResult process_window(const CsiTrace& window, const PipelineConfig& config,
                            const GassGenome* genome) {
  WindowResult out;
  const double fs = window.sample_rate_hz();
  const SsnrOptions& so = config.combiner.ssnr;
  try {
    if (genome) {
      genome->validate(window.subcarrier_count());
      GassSolution sol;
      sol.genome = *genome;
      sol.fitness = fitness(*genome, window, config.gass.ssnr, config.gass.guard);
      sol.history = {sol.fitness};
      out.solution = std::move(sol);
    } else if (config.gass_enabled) {
      out.solution = optimize(window, config.gass);
    } else {
      GassSolution sol;
      sol.genome = fixed_random_pair(window.subcarrier_count(), config.gass);
      sol.fitness = fitness(sol.genome, window, config.gass.ssnr, config.gass.guard);
      sol.history = {sol.fitness};
      out.solution = std::move(sol);
    }
    out.ssnr.gass = out.solution->fitness;
  } catch (const NumericError&) {
    out.reason = "gass_failed";
    return out;
  }

  try {
    std::vector<StreamOmission> omitted;
    const auto streams = build_streams(out.solution->genome, window, config.streams, &omitted);
    out.streams_built = streams.size();
    if (streams.empty()) {
      out.reason = "no_streams";
      return out;
    }
    const CombinedSignal combined = combine(streams, config.combiner);
    out.streams_combined = combined.contributing_streams;
    out.ssnr.reference = combined.streams[combined.reference].ssnr;
    out.ssnr.combined = safe_ssnr(combined.combined, fs, so);
    out.ssnr.smoothed = safe_ssnr(combined.smoothed, combined.sample_rate_hz, so);

    const ProjectedWaveform proj =
        project(combined.smoothed, combined.sample_rate_hz, config.projection);
    out.projection_angle = proj.angle;
    out.ssnr.projected = proj.ssnr;

    const FilteredWaveform filtered =
        filter_waveform(proj.values, combined.sample_rate_hz, config.waveform);
    out.hampel_replacements = filtered.hampel_replacements;
    out.ssnr.filtered = safe_ssnr(filtered.values, combined.sample_rate_hz, so);
    out.waveform = filtered.values;

    out.estimate = estimate_rate(
        filtered.values, combined.sample_rate_hz,
        window_rate_options(config.rate, filtered.values.size(), combined.sample_rate_hz));
    if (out.estimate.status != RateStatus::ok) out.reason = std::string(to_string(out.estimate.status));
  } catch (const Error& e) {
    out.reason = e.kind() == ErrorKind::numeric ? "numeric" : "stage_error";
  } catch (const std::invalid_argument&) {
    out.reason = "stage_error";
  }
  return out;
}

PipelineResult run_pipeline(const CsiTrace& raw, const PipelineConfig& config, const TruthFn& truth) {
  PipelineResult result;
  if (raw.empty()) return result;
  const std::size_t block = resolve_phase_block(config, raw.sample_rate_hz());
  result.phase_block = block;
  result.effective_rate_hz = raw.sample_rate_hz() / static_cast<double>(block);
  if (raw.frame_count() < block) return result;

  const CsiTrace averaged = average_phase_blocks(raw, block);
  result.plan = segment(averaged, config.segmentation, config.reference);

  const std::size_t flen = result.plan.frame_length;
  const GassSolution* previous = nullptr;
  result.windows.reserve(result.plan.window_starts.size());
  for (std::size_t start : result.plan.window_starts) {
    const CsiTrace window = averaged.slice(start * flen, result.plan.window_length);

    WindowResult w;
    bool reused = false;
    if (config.reuse_solution && previous && previous->fitness > 0) {
      const double f = fitness(previous->genome, window, config.gass.ssnr, config.gass.guard);
      if (std::abs(f - previous->fitness) < config.reuse_tolerance * previous->fitness) {
        w = process_window(window, config, &previous->genome);
        reused = true;
      }
    }
    if (!reused) w = process_window(window, config);
    w.reused_solution = reused;
    w.window_id = static_cast<std::int64_t>(start);
    w.t_start_s = window.timestamp(0);
    w.t_end_s = w.t_start_s + static_cast<double>(result.plan.window_length) / averaged.sample_rate_hz();
    w.estimate.window_id = w.window_id;
    w.estimate.t_start_s = w.t_start_s;
    if (truth) w.truth_bpm = truth(w.t_start_s, w.t_end_s);
    result.windows.push_back(std::move(w));
    previous = result.windows.back().solution ? &*result.windows.back().solution : nullptr;
  }
  return result;
}

RespirationEstimate estimate_reference_pair(const CsiTrace& window, ReferenceSignal signal,
                                            const PipelineConfig& config) {
  const auto [num, den] = resolve_reference_pair(config.reference, window.grid());
  const CscrStream ratio = cscr(window, num, den);
  RealSeries series = signal == ReferenceSignal::amplitude ? magnitude(ratio.values)
                                                           : unwrapped_angle(ratio.values);
  const double fs = window.sample_rate_hz();
  ComplexSeries as_complex(series.begin(), series.end());
  const std::size_t win = config.combiner.smoothing_window
                              ? config.combiner.smoothing_window
                              : default_smoothing_window(fs);
  const ComplexSeries smoothed = moving_average(as_complex, win, config.combiner.smoothing);
  const double fs_smoothed =
      config.combiner.smoothing == SmoothingMode::block ? fs / static_cast<double>(win) : fs;
  const RealSeries real = real_part(smoothed);
  const FilteredWaveform filtered = filter_waveform(real, fs_smoothed, config.waveform);
  return estimate_rate(filtered.values, fs_smoothed,
                       window_rate_options(config.rate, filtered.values.size(), fs_smoothed));
}

}  // namespace subratio
