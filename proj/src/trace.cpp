#include "subratio/trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subratio/error.hpp"

namespace subratio {

CsiTrace::CsiTrace(std::shared_ptr<const SubcarrierGrid> grid, double sample_rate_hz,
                   std::size_t frame_count, std::int64_t first_index)
    : grid_(std::move(grid)),
      sample_rate_hz_(sample_rate_hz),
      frames_(frame_count),
      first_index_(first_index) {
  if (!grid_ || grid_->empty()) throw ConfigError("trace requires a non-empty subcarrier grid");
  if (!(sample_rate_hz_ > 0)) throw ConfigError("trace sample rate must be positive");
  data_.assign(grid_->size() * frames_, cplx{});
}

CsiFrame CsiTrace::frame(std::size_t k) const {
  CsiFrame f;
  f.index = frame_index(k);
  f.timestamp_s = timestamp(k);
  f.grid = grid_;
  f.values.resize(subcarrier_count());
  for (std::size_t m = 0; m < f.values.size(); ++m) f.values[m] = at(k, m);
  return f;
}

void CsiTrace::set_frame(std::size_t k, std::span<const cplx> values) {
  if (values.size() != subcarrier_count()) {
    throw std::invalid_argument("frame length does not match the grid");
  }
  for (std::size_t m = 0; m < values.size(); ++m) at(k, m) = values[m];
}

CsiTrace CsiTrace::slice(std::size_t k0, std::size_t count) const {
  if (k0 + count > frames_) throw std::out_of_range("trace slice out of range");
  CsiTrace out(grid_, sample_rate_hz_, count, frame_index(k0));
  for (std::size_t m = 0; m < subcarrier_count(); ++m) {
    auto src = subcarrier(m).subspan(k0, count);
    std::copy(src.begin(), src.end(), out.subcarrier(m).begin());
  }
  return out;
}

bool CsiTrace::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

bool operator==(const CsiTrace& a, const CsiTrace& b) {
  const bool same_grid = a.grid_ == b.grid_ || (a.grid_ && b.grid_ && *a.grid_ == *b.grid_);
  return same_grid && a.sample_rate_hz_ == b.sample_rate_hz_ && a.frames_ == b.frames_ &&
         a.first_index_ == b.first_index_ && a.data_ == b.data_;
}

}  // namespace subratio
