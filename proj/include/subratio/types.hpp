#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace subratio {

using cplx = std::complex<double>;
using ComplexSeries = std::vector<cplx>;
using RealSeries = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;

// Respiratory band used by every SSNR computation (10.02 to 30 breaths/min).
inline constexpr double kRespBandLowHz = 0.167;
inline constexpr double kRespBandHighHz = 0.5;

}  // namespace subratio
