#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "subratio/cscr.hpp"
#include "subratio/gass.hpp"
#include "subratio/ssnr.hpp"

namespace subratio {

enum class SmoothingMode {
  sliding,  // centered moving average, same length and rate (edges use truncated windows)
  block,    // non-overlapping block means: floor(n / window) samples at rate fs / window
};

struct CombinerOptions {
  std::size_t gain_window = 0;       // samples; 0 selects floor(0.5 fs)
  double threshold = 0.5;            // fraction of the best SSNR, in [0, 1]
  bool normalize_by_gain = true;     // V = Q / G; false multiplies (V = G Q)
  SmoothingMode smoothing = SmoothingMode::sliding;
  std::size_t smoothing_window = 0;  // samples; 0 selects floor(0.33 fs)
  bool parallel = true;
  SsnrOptions ssnr;
};

struct AlignedStream {
  std::size_t denominator = 0;
  ComplexSeries offset_removed;  // stream minus its mean
  double gain = 0;               // largest sliding-window mean magnitude of offset_removed
  ComplexSeries normalized;      // offset_removed / gain
  double rotation = 0;           // radians, applied as e^{j rotation}
  double ssnr = 0;               // SSNR of the raw stream
  double weight = 0;             // ssnr when above the threshold, else 0
};

struct CombinedSignal {
  ComplexSeries combined;  // sum of weight * normalized * e^{j rotation}
  ComplexSeries smoothed;  // after the I-sample moving average
  double sample_rate_hz = 0;           // rate of `smoothed`
  std::size_t window_samples = 0;      // smoothing window
  std::size_t contributing_streams = 0;
  std::size_t reference = 0;           // index into `streams` of the max-SSNR stream
  std::vector<AlignedStream> streams;  // every stream that survived gain/alignment checks
  std::vector<StreamOmission> dropped;
};

/// Q = x - mean(x).
ComplexSeries remove_offset(std::span<const cplx> stream);

/// max over k of |mean of q over the `window`-sample window starting at k|.
double stream_gain(std::span<const cplx> q, std::size_t window);

/// angle(sum_k ref(k) conj(v(k))): the rotation that best maps v onto ref.
/// Throws NumericError when the correlation sum is zero.
double align_rotation(std::span<const cplx> reference, std::span<const cplx> v);

ComplexSeries moving_average(std::span<const cplx> x, std::size_t window, SmoothingMode mode);

std::size_t default_gain_window(double sample_rate_hz);
std::size_t default_smoothing_window(double sample_rate_hz);

/**
 * Offset-remove, normalize, align to the highest-SSNR stream and sum with
 * thresholded SSNR weights (the best stream always keeps its full weight).
 * Streams with zero gain or undefined alignment are dropped and listed.
 * Throws std::invalid_argument on empty input and NumericError when nothing
 * survives.
 */
CombinedSignal combine(std::span<const CscrStream> streams, const CombinerOptions& options = {});

}  // namespace subratio
