#include "subratio/ssnr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "subratio/signal_util.hpp"
#include "subratio/spectrum.hpp"

namespace subratio {

namespace {

enum class BinClass : unsigned char { none, band, out };

void check_preconditions(std::size_t n, double fs) {
  if (!(fs > 1.0)) throw std::invalid_argument("ssnr: sample rate must exceed 1 Hz");
  if (static_cast<double>(n) < 2.0 * fs) {
    throw std::invalid_argument("ssnr: series must span at least 2 seconds");
  }
}

const std::vector<double>& window_coefficients(std::size_t n, SpectralWindow kind) {
  thread_local std::vector<double> w;
  thread_local std::size_t cached_n = 0;
  thread_local SpectralWindow cached_kind = SpectralWindow::rectangular;
  if (cached_n != n || cached_kind != kind || w.size() != n) {
    w.assign(n, 1.0);
    if (kind == SpectralWindow::hann && n > 1) {
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
      }
    }
    cached_n = n;
    cached_kind = kind;
  }
  return w;
}

BinClass classify(std::size_t i, std::size_t nfft, double fs, const SsnrOptions& o) {
  if (i == 0) return BinClass::none;
  const std::size_t folded = i <= nfft / 2 ? i : nfft - i;
  const double f = static_cast<double>(folded) * fs / static_cast<double>(nfft);
  if (f >= o.band_low_hz && f <= o.band_high_hz) return BinClass::band;
  if (f > o.band_high_hz) return BinClass::out;
  return BinClass::none;
}

SsnrEstimate finish(double band, double out, std::size_t nfft, double floor) {
  SsnrEstimate e;
  e.band_energy = band;
  e.out_of_band_energy = out;
  e.fft_length = nfft;
  const double total = band + out;
  if (total <= 0.0) {
    e.empty = true;
    e.value = 0.0;
  } else if (out <= floor * total) {
    e.infinite = true;
    e.value = std::numeric_limits<double>::infinity();
  } else {
    e.value = band / out;
  }
  return e;
}

// Mean-removed, windowed, zero-padded copy of `series` in `buf`. Returns false when the
// series is constant up to round-off (rms deviation <= 1e-12 of the mean magnitude).
template <typename T>
bool load_buffer(std::span<const T> series, std::size_t nfft, const SsnrOptions& o,
                 std::vector<cplx>& buf) {
  const std::size_t n = series.size();
  cplx mu{};
  for (const auto& v : series) mu += cplx(v);
  mu /= static_cast<double>(n);
  const auto& w = window_coefficients(n, o.window);
  buf.assign(nfft, cplx{});
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx d = cplx(series[i]) - mu;
    spread += std::norm(d);
    buf[i] = d * w[i];
  }
  const double tiny = 1e-12 * std::abs(mu);
  return spread > static_cast<double>(n) * tiny * tiny;
}

template <typename T>
SsnrEstimate ssnr_impl(std::span<const T> series, double fs, const SsnrOptions& o) {
  check_preconditions(series.size(), fs);
  const std::size_t nfft = ssnr_fft_length(series.size(), o);
  thread_local std::vector<cplx> buf;
  if (!load_buffer(series, nfft, o, buf)) return finish(0.0, 0.0, nfft, o.infinite_floor);
  fft_inplace(buf);
  double band = 0.0;
  double out = 0.0;
  for (std::size_t i = 1; i < nfft; ++i) {
    switch (classify(i, nfft, fs, o)) {
      case BinClass::band: band += std::norm(buf[i]); break;
      case BinClass::out: out += std::norm(buf[i]); break;
      case BinClass::none: break;
    }
  }
  return finish(band, out, nfft, o.infinite_floor);
}

}  // namespace

std::size_t ssnr_fft_length(std::size_t n, const SsnrOptions& o) {
  const std::size_t base = n * std::max<std::size_t>(1, o.min_pad_factor);
  return o.pow2_length ? next_pow2(base) : base;
}

SsnrEstimate ssnr(std::span<const cplx> series, double fs, const SsnrOptions& options) {
  return ssnr_impl(series, fs, options);
}

SsnrEstimate ssnr(std::span<const double> series, double fs, const SsnrOptions& options) {
  return ssnr_impl(series, fs, options);
}

SsnrEstimate ProjectionSpectrum::at(double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double band = c * c * band_rr + s * s * band_ii + 2.0 * c * s * band_ri;
  const double out = c * c * out_rr + s * s * out_ii + 2.0 * c * s * out_ri;
  return finish(std::max(0.0, band), std::max(0.0, out), fft_length, infinite_floor);
}

ProjectionSpectrum projection_spectrum(std::span<const cplx> series, double fs,
                                       const SsnrOptions& o) {
  check_preconditions(series.size(), fs);
  const std::size_t nfft = ssnr_fft_length(series.size(), o);
  const RealSeries re = real_part(series);
  const RealSeries im = imag_part(series);
  std::vector<cplx> fr;
  std::vector<cplx> fi;
  load_buffer(std::span<const double>(re), nfft, o, fr);
  load_buffer(std::span<const double>(im), nfft, o, fi);
  fft_inplace(fr);
  fft_inplace(fi);

  ProjectionSpectrum p;
  p.fft_length = nfft;
  p.infinite_floor = o.infinite_floor;
  for (std::size_t i = 1; i < nfft; ++i) {
    const double rr = std::norm(fr[i]);
    const double ii = std::norm(fi[i]);
    const double ri = (fr[i] * std::conj(fi[i])).real();
    switch (classify(i, nfft, fs, o)) {
      case BinClass::band:
        p.band_rr += rr;
        p.band_ii += ii;
        p.band_ri += ri;
        break;
      case BinClass::out:
        p.out_rr += rr;
        p.out_ii += ii;
        p.out_ri += ri;
        break;
      case BinClass::none:
        break;
    }
  }
  return p;
}

}  // namespace subratio
