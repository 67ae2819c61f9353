#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "subratio/grid.hpp"
#include "subratio/types.hpp"

namespace subratio {

/// One time instant of complex CSI across every subcarrier of a grid.
struct CsiFrame {
  std::int64_t index = 0;
  double timestamp_s = 0;
  ComplexSeries values;
  std::shared_ptr<const SubcarrierGrid> grid;
};

/**
 * Uniformly sampled CSI time series, K frames by M subcarriers.
 *
 * Storage is subcarrier-major so that per-subcarrier time series (the unit
 * every ratio and filter works on) are contiguous spans.
 */
class CsiTrace {
 public:
  CsiTrace() = default;
  CsiTrace(std::shared_ptr<const SubcarrierGrid> grid, double sample_rate_hz,
           std::size_t frame_count, std::int64_t first_index = 0);

  std::size_t frame_count() const { return frames_; }
  std::size_t subcarrier_count() const { return grid_ ? grid_->size() : 0; }
  bool empty() const { return frames_ == 0; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  std::int64_t first_index() const { return first_index_; }

  const SubcarrierGrid& grid() const { return *grid_; }
  const std::shared_ptr<const SubcarrierGrid>& grid_ptr() const { return grid_; }

  std::span<const cplx> subcarrier(std::size_t m) const {
    return {data_.data() + m * frames_, frames_};
  }
  std::span<cplx> subcarrier(std::size_t m) { return {data_.data() + m * frames_, frames_}; }

  cplx at(std::size_t k, std::size_t m) const { return data_[m * frames_ + k]; }
  cplx& at(std::size_t k, std::size_t m) { return data_[m * frames_ + k]; }

  std::int64_t frame_index(std::size_t k) const { return first_index_ + static_cast<std::int64_t>(k); }
  double timestamp(std::size_t k) const {
    return static_cast<double>(frame_index(k)) / sample_rate_hz_;
  }

  CsiFrame frame(std::size_t k) const;
  void set_frame(std::size_t k, std::span<const cplx> values);

  /// Copy of frames [k0, k0 + count).
  CsiTrace slice(std::size_t k0, std::size_t count) const;

  bool all_finite() const;

  friend bool operator==(const CsiTrace& a, const CsiTrace& b);

 private:
  std::shared_ptr<const SubcarrierGrid> grid_;
  double sample_rate_hz_ = 0;
  std::size_t frames_ = 0;
  std::int64_t first_index_ = 0;
  ComplexSeries data_;
};

}  // namespace subratio
