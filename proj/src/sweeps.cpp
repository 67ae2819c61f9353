#include "subratio/sweeps.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <stdexcept>

#include "subratio/csi_sim.hpp"
#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"

namespace subratio {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::amplitude_only: return "amplitude_only";
    case Estimator::phase_only: return "phase_only";
    case Estimator::full: return "full";
  }
  return "unknown";
}

namespace {

void score(EstimatorTally& t, bool has_estimate, double estimate, double truth, double tol) {
  ++t.windows;
  if (!has_estimate || !std::isfinite(truth)) return;
  const double err = std::abs(estimate - truth);
  ++t.estimated;
  t.sum_abs_error += err;
  if (err < tol) ++t.detected;
}

// Run body(i) for i in [0, n), optionally across threads; the first exception is rethrown.
template <typename Body>
void for_each_index(std::size_t n, bool parallel, Body body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::array<EstimatorTally, 3> evaluate_trace(const CsiTrace& raw, const ScenarioConfig& scenario,
                                             const PipelineConfig& pipeline, double tol,
                                             const std::array<bool, 3>& enabled) {
  std::array<EstimatorTally, 3> tally{};
  const auto truth = [&](double t0, double t1) {
    return mean_rate_bpm(scenario.respiration, t0, t1, scenario.duration_s);
  };

  if (enabled[static_cast<std::size_t>(Estimator::full)]) {
    const PipelineResult r = run_pipeline(raw, pipeline, truth);
    for (const auto& w : r.windows) {
      score(tally[static_cast<std::size_t>(Estimator::full)], w.has_estimate(), w.estimate.f_bpm,
            w.truth_bpm, tol);
    }
  }

  const bool any_baseline = enabled[0] || enabled[1];
  if (!any_baseline || raw.empty()) return tally;
  const std::size_t block = resolve_phase_block(pipeline, raw.sample_rate_hz());
  if (raw.frame_count() < block) return tally;
  const CsiTrace averaged = average_phase_blocks(raw, block);
  const WindowPlan plan = segment(averaged, pipeline.segmentation, pipeline.reference);
  for (std::size_t start : plan.window_starts) {
    const CsiTrace window = averaged.slice(start * plan.frame_length, plan.window_length);
    const double t0 = window.timestamp(0);
    const double t1 = t0 + static_cast<double>(plan.window_length) / averaged.sample_rate_hz();
    const double expected = truth(t0, t1);
    for (Estimator e : {Estimator::amplitude_only, Estimator::phase_only}) {
      const auto idx = static_cast<std::size_t>(e);
      if (!enabled[idx]) continue;
      bool ok = false;
      double f = 0.0;
      try {
        const auto est = estimate_reference_pair(
            window, e == Estimator::amplitude_only ? ReferenceSignal::amplitude : ReferenceSignal::phase,
            pipeline);
        ok = est.status == RateStatus::ok;
        f = est.f_bpm;
      } catch (const Error&) {
      } catch (const std::invalid_argument&) {
      }
      score(tally[idx], ok, f, expected, tol);
    }
  }
  return tally;
}

EvaluationReport blind_spot_sweep(const BlindSpotConfig& config, const SubcarrierGrid& grid_in) {
  if (config.positions < 2) throw ConfigError("blind-spot sweep needs at least two positions");
  auto grid = std::make_shared<const SubcarrierGrid>(grid_in);
  double span = config.span_m;
  if (span <= 0.0) {
    double fmin = grid->subcarriers().front().frequency_hz;
    double fmax = fmin;
    for (const auto& s : grid->subcarriers()) {
      fmin = std::min(fmin, s.frequency_hz);
      fmax = std::max(fmax, s.frequency_hz);
    }
    span = kSpeedOfLight / (0.5 * (fmin + fmax));
  }

  EvaluationReport report;
  report.positions.resize(config.positions);
  for_each_index(config.positions, config.parallel, [&](std::size_t i) {
    PositionResult& p = report.positions[i];
    p.index = i;
    p.offset_m = span * static_cast<double>(i) / static_cast<double>(config.positions);
    ScenarioConfig sc = config.scenario;
    sc.dynamic_base_length_m += p.offset_m;
    p.dynamic_length_m = sc.dynamic_base_length_m;
    ImpairmentConfig imp = config.impairments;
    imp.seed = derive_seed(config.impairments.seed, i);
    PipelineConfig pc = config.pipeline;
    pc.gass.seed = derive_seed(config.pipeline.gass.seed, i);
    pc.gass.parallel = pc.gass.parallel && !config.parallel;
    const CsiTrace raw = simulate(sc, imp, grid);
    p.tally = evaluate_trace(raw, sc, pc, config.tolerance_bpm, {true, true, true});
  });

  for (Estimator e : kEstimators) {
    const auto idx = static_cast<std::size_t>(e);
    std::size_t ok = 0;
    for (const auto& p : report.positions) ok += p.tally[idx].detectable() ? 1 : 0;
    report.detectability_percent[idx] =
        100.0 * static_cast<double>(ok) / static_cast<double>(report.positions.size());
  }
  return report;
}

EvaluationReport snr_sweep(const SnrSweepConfig& config, const SubcarrierGrid& grid_in) {
  if (config.noise_levels.empty()) throw ConfigError("noise sweep needs at least one level");
  if (!std::is_sorted(config.noise_levels.begin(), config.noise_levels.end())) {
    throw ConfigError("noise levels must be non-decreasing");
  }
  if (config.seeds == 0) throw ConfigError("noise sweep needs at least one seed");
  auto grid = std::make_shared<const SubcarrierGrid>(grid_in);

  const std::size_t levels = config.noise_levels.size();
  const std::size_t jobs = levels * config.seeds;
  std::vector<std::array<EstimatorTally, 3>> results(jobs);
  const std::array<bool, 3> enabled{true, config.include_phase_only, true};
  for_each_index(jobs, config.parallel, [&](std::size_t j) {
    const std::size_t level = j / config.seeds;
    const std::size_t s = j % config.seeds;
    ImpairmentConfig imp = config.impairments;
    imp.gaussian_noise_std = config.noise_levels[level];
    // the same seeds at every level so the curve compares like with like
    imp.seed = derive_seed(config.impairments.seed, s);
    PipelineConfig pc = config.pipeline;
    pc.gass.seed = derive_seed(config.pipeline.gass.seed, s);
    pc.gass.parallel = pc.gass.parallel && !config.parallel;
    const CsiTrace raw = simulate(config.scenario, imp, grid);
    results[j] = evaluate_trace(raw, config.scenario, pc, config.tolerance_bpm, enabled);
  });

  EvaluationReport report;
  report.levels.resize(levels);
  for (std::size_t l = 0; l < levels; ++l) {
    report.levels[l].noise_std = config.noise_levels[l];
    for (std::size_t s = 0; s < config.seeds; ++s) {
      for (std::size_t e = 0; e < 3; ++e) {
        const auto& src = results[l * config.seeds + s][e];
        auto& dst = report.levels[l].tally[e];
        dst.windows += src.windows;
        dst.detected += src.detected;
        dst.estimated += src.estimated;
        dst.sum_abs_error += src.sum_abs_error;
      }
    }
  }
  return report;
}

namespace {

void put(std::ostream& os, const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  os << buf;
}

}  // namespace

void write_blindspot_csv(std::ostream& os, const EvaluationReport& report) {
  os << "position,offset_m,dynamic_length_m";
  for (Estimator e : kEstimators) {
    os << ',' << to_string(e) << "_windows," << to_string(e) << "_detected," << to_string(e)
       << "_detectable," << to_string(e) << "_mean_abs_error_bpm";
  }
  os << '\n';
  for (const auto& p : report.positions) {
    os << p.index << ',';
    put(os, "%.9g", p.offset_m);
    os << ',';
    put(os, "%.9g", p.dynamic_length_m);
    for (const auto& t : p.tally) {
      os << ',' << t.windows << ',' << t.detected << ',' << (t.detectable() ? 1 : 0) << ',';
      put(os, "%.6g", t.mean_abs_error());
    }
    os << '\n';
  }
}

void write_snr_csv(std::ostream& os, const EvaluationReport& report) {
  os << "noise_std";
  for (Estimator e : kEstimators) {
    os << ',' << to_string(e) << "_windows," << to_string(e) << "_detected," << to_string(e)
       << "_rate_percent";
  }
  os << '\n';
  for (const auto& l : report.levels) {
    put(os, "%.9g", l.noise_std);
    for (const auto& t : l.tally) {
      os << ',' << t.windows << ',' << t.detected << ',';
      put(os, "%.4f", t.rate_percent());
    }
    os << '\n';
  }
}

}  // namespace subratio
