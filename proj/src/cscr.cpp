#include "subratio/cscr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "subratio/csi_sim.hpp"
#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"

namespace subratio {

CsiTrace average_phase_blocks(const CsiTrace& frames, std::size_t block) {
  if (block == 0) throw std::invalid_argument("average_phase_blocks: block size must be >= 1");
  if (frames.empty()) throw std::invalid_argument("average_phase_blocks: empty input");
  if (frames.frame_count() < block) {
    throw std::invalid_argument("average_phase_blocks: fewer frames than one block");
  }
  if (block == 1) return frames;

  const std::size_t out_frames = frames.frame_count() / block;
  CsiTrace out(frames.grid_ptr(), frames.sample_rate_hz() / static_cast<double>(block), out_frames,
               frames.first_index() / static_cast<std::int64_t>(block));
  for (std::size_t m = 0; m < frames.subcarrier_count(); ++m) {
    const auto col = frames.subcarrier(m);
    const RealSeries phase = unwrapped_angle(col.first(out_frames * block));
    auto dst = out.subcarrier(m);
    for (std::size_t b = 0; b < out_frames; ++b) {
      double mag = 0.0;
      double ph = 0.0;
      for (std::size_t i = b * block; i < (b + 1) * block; ++i) {
        mag += std::abs(col[i]);
        ph += phase[i];
      }
      dst[b] = std::polar(mag / static_cast<double>(block), ph / static_cast<double>(block));
    }
  }
  return out;
}

std::size_t default_phase_block(double sample_rate_hz) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(sample_rate_hz / 10.0)));
}

GuardedRatio guarded_ratio(std::span<const cplx> numerator, std::span<const cplx> denominator,
                           const DenominatorGuard& guard) {
  if (numerator.size() != denominator.size()) {
    throw std::invalid_argument("guarded_ratio: length mismatch");
  }
  const std::size_t n = denominator.size();
  GuardedRatio r;
  r.values.resize(n);
  if (n == 0) return r;

  const RealSeries mags = magnitude(denominator);
  const double threshold = guard.relative * median(mags);
  std::vector<bool> bad(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    // a median of zero means most of the stream is unusable; flag exact zeros
    if (mags[k] <= threshold || mags[k] == 0.0) {
      bad[k] = true;
      ++r.repaired;
    } else {
      r.values[k] = numerator[k] / denominator[k];
    }
  }
  if (r.repaired == 0) return r;
  if (static_cast<double>(r.repaired) > guard.max_flagged_fraction * static_cast<double>(n) ||
      r.repaired == n) {
    throw NumericError("denominator guard: " + std::to_string(r.repaired) + " of " +
                       std::to_string(n) + " samples near zero");
  }

  // Fill flagged runs linearly between the valid neighbors; hold the value at the ends.
  std::size_t k = 0;
  while (k < n) {
    if (!bad[k]) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < n && bad[end]) ++end;
    const bool has_left = k > 0;
    const bool has_right = end < n;
    for (std::size_t i = k; i < end; ++i) {
      if (has_left && has_right) {
        const double t = static_cast<double>(i - k + 1) / static_cast<double>(end - k + 1);
        r.values[i] = (1.0 - t) * r.values[k - 1] + t * r.values[end];
      } else {
        r.values[i] = has_left ? r.values[k - 1] : r.values[end];
      }
    }
    k = end;
  }
  return r;
}

ComplexSeries weighted_numerator(const CsiTrace& frames, std::span<const NumeratorTerm> numerator) {
  ComplexSeries sum(frames.frame_count(), cplx{});
  for (const auto& term : numerator) {
    if (term.subcarrier >= frames.subcarrier_count()) {
      throw std::invalid_argument("weighted_numerator: subcarrier index out of range");
    }
    if (term.weight == cplx{}) continue;
    const auto col = frames.subcarrier(term.subcarrier);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += term.weight * col[k];
  }
  return sum;
}

CscrStream weighted_cscr(const CsiTrace& frames, std::span<const NumeratorTerm> numerator,
                         std::size_t denominator, const DenominatorGuard& guard) {
  if (denominator >= frames.subcarrier_count()) {
    throw std::invalid_argument("weighted_cscr: denominator index out of range");
  }
  for (const auto& term : numerator) {
    if (term.subcarrier == denominator) {
      throw std::invalid_argument("weighted_cscr: numerator and denominator subcarriers coincide");
    }
  }
  const ComplexSeries num = weighted_numerator(frames, numerator);
  GuardedRatio ratio = guarded_ratio(num, frames.subcarrier(denominator), guard);

  CscrStream s;
  s.numerator.assign(numerator.begin(), numerator.end());
  s.denominator = denominator;
  s.values = std::move(ratio.values);
  s.sample_rate_hz = frames.sample_rate_hz();
  s.repaired_samples = ratio.repaired;
  return s;
}

CscrStream cscr(const CsiTrace& frames, std::size_t m1, std::size_t m2,
                const DenominatorGuard& guard) {
  if (m1 == m2) throw std::invalid_argument("cscr: m1 and m2 must differ");
  if (m1 >= frames.subcarrier_count() || m2 >= frames.subcarrier_count()) {
    throw std::invalid_argument("cscr: subcarrier index out of range");
  }
  const NumeratorTerm term{cplx{1.0, 0.0}, m1};
  return weighted_cscr(frames, std::span<const NumeratorTerm>(&term, 1), m2, guard);
}

cplx mobius_apply(const MobiusCoefficients& c, cplx z) { return (c.a * z + c.b) / (c.c * z + c.d); }

MobiusDecomposition mobius_decompose(const MobiusCoefficients& coefficients,
                                     std::span<const cplx> z, NoiseRegime regime) {
  const auto& [a, b, c, d] = coefficients;
  if (d == cplx{}) throw std::invalid_argument("mobius_decompose: D must be nonzero");
  if (regime == NoiseRegime::low_noise && c == cplx{}) {
    throw std::invalid_argument("mobius_decompose: C must be nonzero in the low-noise regime");
  }
  for (const cplx& v : z) {
    if (std::abs(std::abs(v) - 1.0) > 1e-9) {
      throw std::invalid_argument("mobius_decompose: Z must lie on the unit circle");
    }
  }

  MobiusDecomposition out;
  out.coefficients = coefficients;
  out.regime = regime;
  out.dynamic_component.resize(z.size());
  out.ratio_fresnel_phase.resize(z.size());

  if (regime == NoiseRegime::low_noise) {
    out.static_component = a / c;
    const cplx shift = d / c;
    const cplx scale = (b * c - a * d) / (c * c);
    const double pole_tol = 1e-12 * std::max(1.0, std::abs(shift));
    for (std::size_t k = 0; k < z.size(); ++k) {
      const cplx den = z[k] + shift;
      if (std::abs(den) <= pole_tol) {
        throw NumericError("mobius_decompose: pole on the trajectory at k = " + std::to_string(k));
      }
      out.dynamic_component[k] = scale / den;
    }
  } else {
    out.static_component = b / d;
    const cplx scale = a / d;
    for (std::size_t k = 0; k < z.size(); ++k) out.dynamic_component[k] = scale * z[k];
  }
  const double static_angle = std::arg(out.static_component);
  for (std::size_t k = 0; k < z.size(); ++k) {
    out.ratio_fresnel_phase[k] = wrap_to_pi(static_angle - std::arg(out.dynamic_component[k]));
  }
  return out;
}

MobiusCoefficients mobius_coefficients(const ChannelScenario& scenario, const SubcarrierGrid& grid,
                                       std::size_t m1, std::size_t m2) {
  const double l1 = grid[m1].wavelength_m();
  const double l2 = grid[m2].wavelength_m();
  const double d0 = scenario.base_dynamic_length_m;
  MobiusCoefficients c;
  c.a = scenario.dynamic_amplitude[m1];
  c.b = static_component(scenario, grid, m1);
  c.c = scenario.dynamic_amplitude[m2] * std::polar(1.0, kTwoPi * d0 / l1 * (l2 - l1) / l2);
  c.d = static_component(scenario, grid, m2);
  return c;
}

ComplexSeries mobius_trajectory(const ChannelScenario& scenario, const SubcarrierGrid& grid,
                                std::size_t m1) {
  const double l1 = grid[m1].wavelength_m();
  ComplexSeries z(scenario.frame_count());
  for (std::size_t k = 0; k < z.size(); ++k) {
    z[k] = std::polar(1.0, -kTwoPi * scenario.dynamic_length(k) / l1);
  }
  return z;
}

double dynamic_amplitude_low_noise(double static_amp_m1, double dynamic_amp_m1,
                                   double static_amp_m2, double dynamic_amp_m2,
                                   double d0_minus_ds_m, double wavelength_m1,
                                   double wavelength_m2) {
  const double den = static_amp_m2 * static_amp_m2 - dynamic_amp_m2 * dynamic_amp_m2;
  if (den == 0.0) throw NumericError("dynamic_amplitude_low_noise: |A_S(m2)| equals |A_D(m2)|");
  const double spread = (wavelength_m1 - wavelength_m2) / (wavelength_m1 * wavelength_m2);
  const cplx rotated = static_amp_m1 * dynamic_amp_m2 * std::polar(1.0, -kTwoPi * d0_minus_ds_m * spread);
  return std::abs(rotated - dynamic_amp_m1 * static_amp_m2) / std::abs(den);
}

}  // namespace subratio
