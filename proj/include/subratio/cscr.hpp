#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subratio/scenario.hpp"
#include "subratio/trace.hpp"
#include "subratio/types.hpp"

namespace subratio {

/**
 * Per-subcarrier block averaging over `block` frames: the output phase is the
 * mean of the time-unwrapped input phase, the output magnitude the mean
 * magnitude. Returns floor(K / block) frames at sample rate fs / block; a
 * trailing partial block is dropped. block == 1 returns the input unchanged.
 */
CsiTrace average_phase_blocks(const CsiTrace& frames, std::size_t block);

/// Default block size: 0.1 s of samples (at least 1).
std::size_t default_phase_block(double sample_rate_hz);

/// Near-zero denominator handling shared by every ratio builder.
struct DenominatorGuard {
  double relative = 1e-9;             // threshold = relative * median |denominator|
  double max_flagged_fraction = 0.1;  // more flagged samples than this fails the stream
};

struct GuardedRatio {
  ComplexSeries values;
  std::size_t repaired = 0;  // samples flagged and filled by linear interpolation
};

/// numerator / denominator sample-wise with the guard applied.
/// Throws NumericError when the flagged fraction exceeds the guard limit.
GuardedRatio guarded_ratio(std::span<const cplx> numerator, std::span<const cplx> denominator,
                           const DenominatorGuard& guard = {});

struct NumeratorTerm {
  cplx weight{1.0, 0.0};
  std::size_t subcarrier = 0;
};

/// Time series of (weighted) cross-subcarrier ratios with the pairing that produced it.
struct CscrStream {
  std::vector<NumeratorTerm> numerator;
  std::size_t denominator = 0;
  ComplexSeries values;
  double sample_rate_hz = 0;
  std::size_t repaired_samples = 0;
};

/// H~(m1,k) / H~(m2,k). Requires m1 != m2, both on the grid.
CscrStream cscr(const CsiTrace& frames, std::size_t m1, std::size_t m2,
                const DenominatorGuard& guard = {});

/// sum_i a_i H~(m_i,k) / H~(m_d,k). Requires every m_i != m_d.
CscrStream weighted_cscr(const CsiTrace& frames, std::span<const NumeratorTerm> numerator,
                         std::size_t denominator, const DenominatorGuard& guard = {});

/// sum_i a_i H~(m_i,k) without the division.
ComplexSeries weighted_numerator(const CsiTrace& frames, std::span<const NumeratorTerm> numerator);

// ---------------------------------------------------------------------------
// Fractional-linear (Moebius) view of a ratio: (A Z + B) / (C Z + D)

enum class NoiseRegime { low_noise, high_noise };

struct MobiusCoefficients {
  cplx a, b, c, d;
};

struct MobiusDecomposition {
  MobiusCoefficients coefficients;
  NoiseRegime regime = NoiseRegime::low_noise;
  cplx static_component;               // A/C (low noise) or B/D (high noise)
  ComplexSeries dynamic_component;     // per sample of Z
  RealSeries ratio_fresnel_phase;      // angle(static) - angle(dynamic), wrapped
};

cplx mobius_apply(const MobiusCoefficients& coefficients, cplx z);

/**
 * Split the ratio trajectory into a static offset and a dynamic part.
 *
 * low_noise:  A/C + (BC - AD) / (C^2 (Z + D/C))   (needs C != 0, D != 0)
 * high_noise: B/D + (A/D) Z                       (needs D != 0)
 *
 * Every Z must lie on the unit circle. Throws NumericError naming the sample
 * index when Z + D/C vanishes (pole on the trajectory).
 */
MobiusDecomposition mobius_decompose(const MobiusCoefficients& coefficients,
                                     std::span<const cplx> z, NoiseRegime regime);

/// Coefficients of the noise-free ratio of subcarriers (m1, m2) for a resolved scenario,
/// using the single-reference-wavelength approximation (Z measured at lambda_m1).
MobiusCoefficients mobius_coefficients(const ChannelScenario& scenario, const SubcarrierGrid& grid,
                                       std::size_t m1, std::size_t m2);

/// Z(k) = exp(-j 2 pi d_D(k) / lambda_m1).
ComplexSeries mobius_trajectory(const ChannelScenario& scenario, const SubcarrierGrid& grid,
                                std::size_t m1);

/**
 * Low-noise dynamic-component amplitude of the pair (m1, m2):
 *
 *   | A_S1 A_D2 exp(-j 2 pi (d0 - dS)(l1 - l2)/(l1 l2)) - A_D1 A_S2 |
 *   -----------------------------------------------------------------
 *                     | |A_S2|^2 - |A_D2|^2 |
 *
 * Throws NumericError when the denominator is zero.
 */
double dynamic_amplitude_low_noise(double static_amp_m1, double dynamic_amp_m1,
                                   double static_amp_m2, double dynamic_amp_m2,
                                   double d0_minus_ds_m, double wavelength_m1,
                                   double wavelength_m2);

}  // namespace subratio
