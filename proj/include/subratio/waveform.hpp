#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subratio/ssnr.hpp"
#include "subratio/types.hpp"

namespace subratio {

struct ProjectionOptions {
  std::size_t grid_points = 360;  // angles over [0, 2 pi)
  bool refine = true;             // golden-section pass around the best grid angle
  SsnrOptions ssnr;
};

struct ProjectedWaveform {
  RealSeries values;  // cos(angle) Re(z) + sin(angle) Im(z)
  double angle = 0;   // in [0, pi); angle + pi gives the negated series with equal SSNR
  double ssnr = 0;
  bool infinite = false;
};

/**
 * Project a complex series onto the real axis that maximizes SSNR. Angles on
 * the grid are compared with a 1e-12 relative tolerance so that ties go to the
 * smaller angle. When the best SSNR is infinite, the angle with the largest
 * band energy among the infinite ones is returned.
 */
ProjectedWaveform project(std::span<const cplx> series, double fs,
                          const ProjectionOptions& options = {});

struct HampelResult {
  RealSeries values;
  std::size_t replacements = 0;
};

/// Replace x[i] by its window median when |x[i] - median| > threshold * 1.4826 * MAD.
/// Windows are [i - w, i + w] truncated at the ends; with MAD = 0 any deviation is replaced.
HampelResult hampel(std::span<const double> series, std::size_t half_width, double threshold);

/**
 * Least-squares polynomial smoother of odd length L and order p < L.
 * Interior samples use the center row of the fit; the first and last L/2
 * samples are evaluated on the polynomial fitted to the first/last L samples.
 */
class SavitzkyGolay {
 public:
  SavitzkyGolay(std::size_t length, std::size_t order);

  std::size_t length() const { return length_; }
  std::size_t order() const { return order_; }
  /// Convolution weights of the center sample (sum to 1).
  std::span<const double> coefficients() const;

  /// Requires series length >= L.
  RealSeries apply(std::span<const double> series) const;

 private:
  std::size_t length_;
  std::size_t order_;
  std::vector<double> hat_;  // L x L row-major projection onto the polynomial space
};

RealSeries savitzky_golay(std::span<const double> series, std::size_t length, std::size_t order);

struct WaveformOptions {
  std::size_t hampel_half_width = 0;  // 0 selects floor(0.5 fs)
  double hampel_threshold = 3.0;
  std::size_t sg_length = 0;  // 0 selects the smallest odd length >= fs
  std::size_t sg_order = 3;
};

struct FilteredWaveform {
  RealSeries values;
  std::size_t hampel_replacements = 0;
  std::size_t sg_length = 0;
  std::size_t sg_order = 0;
};

std::size_t default_hampel_half_width(double fs);
std::size_t default_sg_length(double fs);

/// Hampel then Savitzky-Golay. The SG length shrinks to the largest odd
/// length that fits a short series (order reduced to stay below it).
FilteredWaveform filter_waveform(std::span<const double> series, double fs,
                                 const WaveformOptions& options = {});

}  // namespace subratio
