#include "subratio/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "subratio/error.hpp"
#include "subratio/kernels.hpp"
#include "subratio/signal_util.hpp"

namespace subratio {

ComplexSeries remove_offset(std::span<const cplx> stream) {
  if (stream.empty()) return {};
  const cplx mu = mean(stream);
  ComplexSeries q(stream.begin(), stream.end());
  for (auto& v : q) v -= mu;
  return q;
}

double stream_gain(std::span<const cplx> q, std::size_t window) {
  if (window == 0 || window > q.size()) {
    throw std::invalid_argument("stream_gain: window must be in [1, length]");
  }
  cplx sum{};
  for (std::size_t k = 0; k < window; ++k) sum += q[k];
  double best = std::abs(sum);
  for (std::size_t k = window; k < q.size(); ++k) {
    sum += q[k] - q[k - window];
    best = std::max(best, std::abs(sum));
  }
  return best / static_cast<double>(window);
}

double align_rotation(std::span<const cplx> reference, std::span<const cplx> v) {
  if (reference.size() != v.size() || v.size() < 2) {
    throw std::invalid_argument("align_rotation: series must share a length >= 2");
  }
  cplx acc{};
  for (std::size_t k = 0; k < v.size(); ++k) acc += reference[k] * std::conj(v[k]);
  if (acc == cplx{}) throw NumericError("align_rotation: streams are orthogonal");
  return std::arg(acc);
}

ComplexSeries moving_average(std::span<const cplx> x, std::size_t window, SmoothingMode mode) {
  if (window == 0) throw std::invalid_argument("moving_average: window must be >= 1");
  if (window == 1) return ComplexSeries(x.begin(), x.end());
  const std::size_t n = x.size();
  ComplexSeries out;
  if (mode == SmoothingMode::block) {
    out.resize(n / window);
    for (std::size_t b = 0; b < out.size(); ++b) {
      cplx s{};
      for (std::size_t i = b * window; i < (b + 1) * window; ++i) s += x[i];
      out[b] = s / static_cast<double>(window);
    }
    return out;
  }
  // centered: window - 1 neighbors split as evenly as possible, truncated at the ends
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window - 1 - left;
  ComplexSeries prefix(n + 1, cplx{});
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n, i + right + 1);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

std::size_t default_gain_window(double fs) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.5 * fs)));
}

std::size_t default_smoothing_window(double fs) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.33 * fs)));
}

CombinedSignal combine(std::span<const CscrStream> streams, const CombinerOptions& options) {
  if (streams.empty()) throw std::invalid_argument("combine: no streams");
  if (options.threshold < 0.0 || options.threshold > 1.0) {
    throw std::invalid_argument("combine: threshold outside [0, 1]");
  }
  const double fs = streams.front().sample_rate_hz;
  const std::size_t length = streams.front().values.size();
  for (const auto& s : streams) {
    if (s.values.size() != length || s.sample_rate_hz != fs) {
      throw std::invalid_argument("combine: streams differ in length or rate");
    }
  }
  const std::size_t k3 = options.gain_window ? options.gain_window : default_gain_window(fs);
  const std::size_t win = options.smoothing_window ? options.smoothing_window
                                                   : default_smoothing_window(fs);

  const auto beta = options.parallel ? kernels::parallel::stream_ssnr(streams, options.ssnr)
                                     : kernels::serial::stream_ssnr(streams, options.ssnr);

  CombinedSignal out;
  out.window_samples = win;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    AlignedStream a;
    a.denominator = streams[i].denominator;
    a.offset_removed = remove_offset(streams[i].values);
    a.gain = stream_gain(a.offset_removed, std::min(k3, length));
    if (!(a.gain > 0.0) || beta[i].empty) {
      out.dropped.push_back({a.denominator, "zero gain"});
      continue;
    }
    a.normalized = a.offset_removed;
    const double scale = options.normalize_by_gain ? 1.0 / a.gain : a.gain;
    for (auto& v : a.normalized) v *= scale;
    a.ssnr = beta[i].value;
    out.streams.push_back(std::move(a));
  }
  if (out.streams.empty()) throw NumericError("combine: every stream has zero gain");

  // reference = highest SSNR, first one on ties
  std::size_t ref = 0;
  for (std::size_t i = 1; i < out.streams.size(); ++i) {
    if (out.streams[i].ssnr > out.streams[ref].ssnr) ref = i;
  }
  const ComplexSeries reference = out.streams[ref].normalized;
  std::vector<AlignedStream> kept;
  for (std::size_t i = 0; i < out.streams.size(); ++i) {
    auto& a = out.streams[i];
    if (i == ref) {
      a.rotation = 0.0;
      out.reference = kept.size();
    } else {
      try {
        a.rotation = align_rotation(reference, a.normalized);
      } catch (const NumericError&) {
        out.dropped.push_back({a.denominator, "alignment undefined"});
        continue;
      }
    }
    kept.push_back(std::move(a));
  }
  out.streams = std::move(kept);

  // With an infinite best SSNR only the infinite streams contribute, at unit weight.
  const double beta0 = out.streams[out.reference].ssnr;
  const bool infinite = std::isinf(beta0);
  out.combined.assign(length, cplx{});
  for (auto& a : out.streams) {
    if (infinite) {
      a.weight = std::isinf(a.ssnr) ? 1.0 : 0.0;
    } else {
      a.weight = a.ssnr >= options.threshold * beta0 ? a.ssnr : 0.0;
    }
    if (a.weight == 0.0) continue;
    ++out.contributing_streams;
    const cplx rot = std::polar(a.weight, a.rotation);
    for (std::size_t k = 0; k < length; ++k) out.combined[k] += rot * a.normalized[k];
  }
  out.smoothed = moving_average(out.combined, win, options.smoothing);
  out.sample_rate_hz = options.smoothing == SmoothingMode::block ? fs / static_cast<double>(win) : fs;
  return out;
}

}  // namespace subratio
