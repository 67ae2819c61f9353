#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "subratio/types.hpp"

namespace subratio {

/// Biased autocorrelation of the mean-removed series, acf[0] = 1, lags 0..n-1.
/// Throws NumericError for zero variance, std::invalid_argument for n < 2.
RealSeries acf(std::span<const double> series);

struct Peak {
  std::size_t index = 0;
  double height = 0;
  double prominence = 0;
};

struct PeakOptions {
  std::size_t min_distance = 1;  // peaks closer than this to a higher peak are dropped
  double min_prominence = 0.0;
  bool include_first = false;    // treat sample 0 as a peak (the lag-0 maximum of an ACF)
};

/**
 * Local maxima (plateaus resolved to their middle sample), thinned by
 * distance with higher peaks taking priority, then filtered by topographic
 * prominence computed on the unfiltered series.
 */
std::vector<Peak> find_peaks(std::span<const double> series, const PeakOptions& options);

enum class RateStatus {
  ok,
  no_peak,      // no qualifying second ACF peak
  out_of_band,  // rate outside the respiratory band; value withheld
};

std::string_view to_string(RateStatus status);

struct RateOptions {
  double prominence_fraction = 0.2;   // of the largest ACF value after lag 0
  double min_spacing_fraction = 0.9;  // minimum peak lag as a fraction of fs / 0.5 Hz
  bool refine = true;                 // sub-sample lag refinement
  double band_tolerance_bpm = 0.5;    // slack on the [10.02, 30] bpm acceptance band
  double min_duration_s = 10.0;
};

struct RespirationEstimate {
  RateStatus status = RateStatus::no_peak;
  double f_bpm = 0;     // valid when status == ok
  double raw_bpm = 0;   // rate implied by the detected lag, also for out-of-band results
  double lag = 0;       // refined peak spacing in samples
  std::size_t k_p1 = 1; // one-based ACF indices of the two peaks
  std::size_t k_p2 = 0;
  RealSeries acf;
  double confidence = 0;  // prominence of the second peak relative to the ACF range, in [0, 1]
  std::int64_t window_id = -1;
  double t_start_s = 0;
};

/**
 * Breathing rate from the spacing between the lag-0 ACF peak and the first
 * later qualifying peak: f = 60 fs / lag. Requires min_duration_s of data.
 */
RespirationEstimate estimate_rate(std::span<const double> series, double fs,
                                  const RateOptions& options = {});

}  // namespace subratio
