#include "subratio/rate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "subratio/error.hpp"
#include "subratio/spectrum.hpp"

namespace subratio {

RealSeries acf(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) throw std::invalid_argument("acf: need at least two samples");
  const double mu = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double spread = 0.0;
  for (double v : series) spread = std::max(spread, std::abs(v - mu));
  if (spread <= 1e-12 * std::max(1.0, std::abs(mu))) {
    throw NumericError("acf: zero-variance input");
  }

  const std::size_t nfft = next_pow2(2 * n);
  std::vector<cplx> buf(nfft, cplx{});
  for (std::size_t i = 0; i < n; ++i) buf[i] = series[i] - mu;
  fft_inplace(buf, FftDirection::forward);
  for (auto& v : buf) v = std::norm(v);
  fft_inplace(buf, FftDirection::inverse);
  RealSeries r(n);
  const double r0 = buf[0].real();
  for (std::size_t i = 0; i < n; ++i) r[i] = buf[i].real() / r0;
  r[0] = 1.0;
  return r;
}

std::vector<Peak> find_peaks(std::span<const double> x, const PeakOptions& options) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx;
  if (options.include_first && n > 0 && (n == 1 || x[0] > x[1])) idx.push_back(0);
  for (std::size_t i = 1; i + 1 < n;) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        idx.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }

  if (options.min_distance > 1 && idx.size() > 1) {
    std::vector<std::size_t> order(idx.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[idx[a]] > x[idx[b]]; });
    std::vector<bool> keep(idx.size(), true);
    for (std::size_t o : order) {
      if (!keep[o]) continue;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (j == o || !keep[j]) continue;
        const std::size_t d = idx[j] > idx[o] ? idx[j] - idx[o] : idx[o] - idx[j];
        if (d < options.min_distance) keep[j] = false;
      }
    }
    std::vector<std::size_t> thinned;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (keep[j]) thinned.push_back(idx[j]);
    }
    idx = std::move(thinned);
  }

  std::vector<Peak> peaks;
  for (std::size_t p : idx) {
    const double h = x[p];
    double left_min = h;
    for (std::size_t j = p; j-- > 0 && x[j] <= h;) left_min = std::min(left_min, x[j]);
    double right_min = h;
    for (std::size_t j = p + 1; j < n && x[j] <= h; ++j) right_min = std::min(right_min, x[j]);
    // a boundary peak has no valley on its open side; measure against the other side only
    const double base = p == 0 ? right_min : std::max(left_min, right_min);
    const Peak pk{p, h, h - base};
    if (p == 0 && options.include_first) {
      peaks.push_back(pk);
    } else if (pk.prominence >= options.min_prominence) {
      peaks.push_back(pk);
    }
  }
  return peaks;
}

std::string_view to_string(RateStatus status) {
  switch (status) {
    case RateStatus::ok: return "ok";
    case RateStatus::no_peak: return "no_peak";
    case RateStatus::out_of_band: return "out_of_band";
  }
  return "unknown";
}

namespace {

// Sub-sample location of the ACF maximum near `lag`, on the taper-corrected
// (unbiased) ACF so the triangular bias of the biased estimate does not pull
// the peak toward lag 0.
double refine_lag(const RealSeries& a, std::size_t lag) {
  const std::size_t n = a.size();
  const auto unbiased = [&](std::size_t t) {
    return a[t] * static_cast<double>(n) / static_cast<double>(n - t);
  };
  if (lag < 1 || lag + 2 >= n) return static_cast<double>(lag);
  std::size_t t = lag;
  for (int step = 0; step < 3; ++step) {
    if (t + 2 < n && unbiased(t + 1) > unbiased(t)) {
      ++t;
    } else if (t > 1 && unbiased(t - 1) > unbiased(t)) {
      --t;
    } else {
      break;
    }
  }
  const double ym = unbiased(t - 1);
  const double y0 = unbiased(t);
  const double yp = unbiased(t + 1);
  const double den = ym - 2.0 * y0 + yp;
  double delta = 0.0;
  if (den < 0.0) delta = std::clamp(0.5 * (ym - yp) / den, -0.5, 0.5);
  return static_cast<double>(t) + delta;
}

}  // namespace

RespirationEstimate estimate_rate(std::span<const double> series, double fs,
                                  const RateOptions& options) {
  if (!(fs > 0.0)) throw std::invalid_argument("estimate_rate: sample rate must be positive");
  if (static_cast<double>(series.size()) + 1e-9 < options.min_duration_s * fs) {
    throw std::invalid_argument("estimate_rate: window shorter than the minimum duration");
  }
  RespirationEstimate est;
  est.acf = acf(series);
  const auto& a = est.acf;

  const double tail_max = *std::max_element(a.begin() + 1, a.end());
  PeakOptions po;
  po.include_first = true;
  po.min_distance = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(options.min_spacing_fraction * fs / kRespBandHighHz)));
  po.min_prominence = options.prominence_fraction * std::max(0.0, tail_max);
  const auto peaks = find_peaks(a, po);

  const Peak* second = nullptr;
  for (const auto& p : peaks) {
    if (p.index > 0) {
      second = &p;
      break;
    }
  }
  if (!second) {
    est.status = RateStatus::no_peak;
    return est;
  }

  est.k_p1 = 1;
  est.k_p2 = second->index + 1;
  est.lag = options.refine ? refine_lag(a, second->index) : static_cast<double>(second->index);
  est.raw_bpm = 60.0 * fs / est.lag;
  const double range = 1.0 - *std::min_element(a.begin(), a.end());
  est.confidence = range > 0 ? std::clamp(second->prominence / range, 0.0, 1.0) : 0.0;

  const double lo = 60.0 * kRespBandLowHz - options.band_tolerance_bpm;
  const double hi = 60.0 * kRespBandHighHz + options.band_tolerance_bpm;
  if (est.raw_bpm < lo || est.raw_bpm > hi) {
    est.status = RateStatus::out_of_band;
    return est;
  }
  est.status = RateStatus::ok;
  est.f_bpm = est.raw_bpm;
  return est;
}

}  // namespace subratio
