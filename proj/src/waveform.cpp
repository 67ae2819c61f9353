#include "subratio/waveform.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"

namespace subratio {

namespace {

bool improves(double candidate, double best) {
  if (std::isinf(candidate)) return !std::isinf(best);
  return candidate > best * (1.0 + 1e-12) && candidate > best;
}

double golden_section_max(const ProjectionSpectrum& spec, double lo, double hi, int iterations) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = spec.at(c).value;
  double fd = spec.at(d).value;
  for (int i = 0; i < iterations; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = spec.at(c).value;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = spec.at(d).value;
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

ProjectedWaveform project(std::span<const cplx> series, double fs, const ProjectionOptions& options) {
  if (options.grid_points == 0) throw std::invalid_argument("project: grid_points must be >= 1");
  const ProjectionSpectrum spec = projection_spectrum(series, fs, options.ssnr);
  const double step = kTwoPi / static_cast<double>(options.grid_points);

  double best_angle = 0.0;
  SsnrEstimate best = spec.at(0.0);
  for (std::size_t i = 1; i < options.grid_points; ++i) {
    const double angle = step * static_cast<double>(i);
    const SsnrEstimate e = spec.at(angle);
    bool take = improves(e.value, best.value);
    if (best.infinite && e.infinite) take = e.band_energy > best.band_energy * (1.0 + 1e-12);
    if (take) {
      best = e;
      best_angle = angle;
    }
  }

  if (options.refine && !best.infinite && options.grid_points > 2) {
    const double refined = golden_section_max(spec, best_angle - step, best_angle + step, 60);
    const SsnrEstimate e = spec.at(refined);
    if (improves(e.value, best.value)) {
      best = e;
      best_angle = refined;
    }
  }

  // an angle and angle + pi give the same SSNR; report the representative in [0, pi).
  best_angle = std::fmod(best_angle, kPi);
  if (best_angle < 0) best_angle += kPi;
  if (best_angle >= kPi) best_angle -= kPi;

  ProjectedWaveform out;
  out.angle = best_angle;
  out.ssnr = best.value;
  out.infinite = best.infinite;
  const double c = std::cos(best_angle);
  const double s = std::sin(best_angle);
  out.values.resize(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    out.values[k] = c * series[k].real() + s * series[k].imag();
  }
  return out;
}

HampelResult hampel(std::span<const double> series, std::size_t half_width, double threshold) {
  if (half_width == 0) throw std::invalid_argument("hampel: half width must be >= 1");
  if (!(threshold > 0.0)) throw std::invalid_argument("hampel: threshold must be > 0");
  const std::size_t n = series.size();
  HampelResult r;
  r.values.assign(series.begin(), series.end());
  std::vector<double> win;
  std::vector<double> dev;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half_width ? i - half_width : 0;
    const std::size_t hi = std::min(n, i + half_width + 1);
    win.assign(series.begin() + static_cast<std::ptrdiff_t>(lo),
               series.begin() + static_cast<std::ptrdiff_t>(hi));
    const double med = median(win);
    dev.resize(win.size());
    for (std::size_t j = 0; j < win.size(); ++j) dev[j] = std::abs(win[j] - med);
    const double mad = median(dev);
    const double delta = std::abs(series[i] - med);
    if (delta > threshold * 1.4826 * mad) {
      r.values[i] = med;
      ++r.replacements;
    }
  }
  return r;
}

SavitzkyGolay::SavitzkyGolay(std::size_t length, std::size_t order) : length_(length), order_(order) {
  if (length == 0 || length % 2 == 0) throw ConfigError("Savitzky-Golay length must be odd");
  if (order >= length) throw ConfigError("Savitzky-Golay order must be below the length");
  const auto l = static_cast<Eigen::Index>(length);
  const auto p = static_cast<Eigen::Index>(order) + 1;
  const double half = static_cast<double>(length / 2);
  Eigen::MatrixXd vander(l, p);
  for (Eigen::Index i = 0; i < l; ++i) {
    // abscissa scaled to [-1, 1] for conditioning
    const double x = half > 0 ? (static_cast<double>(i) - half) / half : 0.0;
    double pw = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      vander(i, j) = pw;
      pw *= x;
    }
  }
  const Eigen::MatrixXd fit = vander.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(l, l));
  const Eigen::MatrixXd hat = vander * fit;
  hat_.resize(length * length);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) hat_[static_cast<std::size_t>(i * l + j)] = hat(i, j);
  }
}

std::span<const double> SavitzkyGolay::coefficients() const {
  const std::size_t center = length_ / 2;
  return {hat_.data() + center * length_, length_};
}

RealSeries SavitzkyGolay::apply(std::span<const double> x) const {
  const std::size_t n = x.size();
  if (n < length_) throw std::invalid_argument("Savitzky-Golay: series shorter than the window");
  const std::size_t half = length_ / 2;
  RealSeries y(n);
  const auto row = [&](std::size_t r) { return hat_.data() + r * length_; };
  const auto dot = [&](const double* w, std::size_t start) {
    double acc = 0.0;
    for (std::size_t j = 0; j < length_; ++j) acc += w[j] * x[start + j];
    return acc;
  };
  for (std::size_t i = half; i + half < n; ++i) y[i] = dot(row(half), i - half);
  for (std::size_t i = 0; i < half; ++i) {
    y[i] = dot(row(i), 0);
    y[n - half + i] = dot(row(half + 1 + i), n - length_);
  }
  return y;
}

RealSeries savitzky_golay(std::span<const double> series, std::size_t length, std::size_t order) {
  return SavitzkyGolay(length, order).apply(series);
}

std::size_t default_hampel_half_width(double fs) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.5 * fs)));
}

std::size_t default_sg_length(double fs) {
  auto l = static_cast<std::size_t>(std::ceil(fs));
  if (l % 2 == 0) ++l;
  return std::max<std::size_t>(1, l);
}

FilteredWaveform filter_waveform(std::span<const double> series, double fs,
                                 const WaveformOptions& options) {
  if (series.empty()) throw std::invalid_argument("filter_waveform: empty series");
  const std::size_t w = options.hampel_half_width ? options.hampel_half_width
                                                  : default_hampel_half_width(fs);
  HampelResult h = hampel(series, w, options.hampel_threshold);

  std::size_t len = options.sg_length ? options.sg_length : default_sg_length(fs);
  if (len > series.size()) len = series.size() % 2 ? series.size() : series.size() - 1;
  const std::size_t order = std::min(options.sg_order, len - 1);

  FilteredWaveform out;
  out.values = SavitzkyGolay(len, order).apply(h.values);
  out.hampel_replacements = h.replacements;
  out.sg_length = len;
  out.sg_order = order;
  return out;
}

}  // namespace subratio
