#include "subratio/signal_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace subratio {

RealSeries unwrap(std::span<const double> phase) {
  RealSeries out(phase.begin(), phase.end());
  double offset = 0.0;
  for (std::size_t k = 1; k < phase.size(); ++k) {
    const double d = phase[k] - phase[k - 1];
    if (d > kPi) {
      offset -= kTwoPi * std::floor((d + kPi) / kTwoPi);
    } else if (d < -kPi) {
      offset += kTwoPi * std::floor((-d + kPi) / kTwoPi);
    }
    out[k] = phase[k] + offset;
  }
  return out;
}

RealSeries unwrapped_angle(std::span<const cplx> z) {
  RealSeries a(z.size());
  std::transform(z.begin(), z.end(), a.begin(), [](cplx v) { return std::arg(v); });
  return unwrap(a);
}

double wrap_to_pi(double angle) {
  double a = std::remainder(angle, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

cplx mean(std::span<const cplx> x) {
  if (x.empty()) return {};
  return std::accumulate(x.begin(), x.end(), cplx{}) / static_cast<double>(x.size());
}

double median(std::span<const double> x) {
  if (x.empty()) return 0.0;
  std::vector<double> v(x.begin(), x.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

double peak_to_peak(std::span<const double> x) {
  if (x.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

RealSeries magnitude(std::span<const cplx> z) {
  RealSeries out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [](cplx v) { return std::abs(v); });
  return out;
}

RealSeries real_part(std::span<const cplx> z) {
  RealSeries out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [](cplx v) { return v.real(); });
  return out;
}

RealSeries imag_part(std::span<const cplx> z) {
  RealSeries out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [](cplx v) { return v.imag(); });
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace subratio
