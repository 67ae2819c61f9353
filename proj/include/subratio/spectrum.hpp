#pragma once

#include <cstddef>
#include <span>

#include "subratio/types.hpp"

namespace subratio {

enum class FftDirection { forward, inverse };

/// In-place unnormalized DFT of any length. Thread-safe; plans are cached per
/// (length, direction) and created with FFTW_ESTIMATE so results are repeatable.
void fft_inplace(std::span<cplx> data, FftDirection direction = FftDirection::forward);

std::size_t next_pow2(std::size_t n);

}  // namespace subratio
