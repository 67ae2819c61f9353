#pragma once

#include <cstddef>
#include <span>

#include "subratio/types.hpp"

namespace subratio {

enum class SpectralWindow { hann, rectangular };

struct SsnrOptions {
  SpectralWindow window = SpectralWindow::hann;
  std::size_t min_pad_factor = 4;  // FFT length >= min_pad_factor * series length
  bool pow2_length = true;         // round the FFT length up to a power of two
  double band_low_hz = kRespBandLowHz;
  double band_high_hz = kRespBandHighHz;
  // out-of-band energy at or below this fraction of the total counts as zero
  double infinite_floor = 1e-12;
};

/// Sensing signal-to-noise ratio: respiratory-band energy over energy above the band.
struct SsnrEstimate {
  double value = 0;
  double band_energy = 0;
  double out_of_band_energy = 0;
  std::size_t fft_length = 0;
  bool infinite = false;  // out-of-band energy vanished; value is +inf
  bool empty = false;     // no energy at all (zero signal after mean removal); value is 0
};

/**
 * Band-ratio SSNR of a series sampled at fs.
 *
 * The series is mean-removed, windowed and zero padded; bins are assigned by
 * |center frequency|, [band_low, band_high] to the band and (band_high, fs/2]
 * to the noise side. DC is excluded from both. Complex input uses its
 * two-sided spectrum directly. Requires length >= 2*fs and fs > 1 Hz.
 */
SsnrEstimate ssnr(std::span<const cplx> series, double fs, const SsnrOptions& options = {});
SsnrEstimate ssnr(std::span<const double> series, double fs, const SsnrOptions& options = {});

/// FFT length ssnr() uses for a series of n samples.
std::size_t ssnr_fft_length(std::size_t n, const SsnrOptions& options);

/**
 * Band/out-of-band energies of cos(t)*Re(z) + sin(t)*Im(z) as quadratic forms
 * in (cos t, sin t). Lets a projection-angle scan evaluate SSNR at any angle
 * from two FFTs.
 */
struct ProjectionSpectrum {
  double band_rr = 0, band_ii = 0, band_ri = 0;
  double out_rr = 0, out_ii = 0, out_ri = 0;
  std::size_t fft_length = 0;
  double infinite_floor = 1e-12;

  SsnrEstimate at(double angle) const;
};

ProjectionSpectrum projection_spectrum(std::span<const cplx> series, double fs,
                                       const SsnrOptions& options = {});

}  // namespace subratio
