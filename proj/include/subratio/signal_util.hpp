#pragma once

#include <cstdint>
#include <span>

#include "subratio/types.hpp"

namespace subratio {

/// 1-D phase unwrap: removes 2*pi jumps between consecutive samples.
RealSeries unwrap(std::span<const double> phase);
RealSeries unwrapped_angle(std::span<const cplx> z);

double wrap_to_pi(double angle);

double mean(std::span<const double> x);
cplx mean(std::span<const cplx> x);
double median(std::span<const double> x);  // copies; even length -> midpoint average
double peak_to_peak(std::span<const double> x);

RealSeries magnitude(std::span<const cplx> z);
RealSeries real_part(std::span<const cplx> z);
RealSeries imag_part(std::span<const cplx> z);

/// Independent child seed for a named random process (SplitMix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace subratio
