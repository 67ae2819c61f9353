#include "subratio/spectrum.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace subratio {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, FftDirection dir) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_pair(n, dir);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_complex* scratch = fftw_alloc_complex(n);
    const int sign = dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, FftDirection>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void fft_inplace(std::span<cplx> data, FftDirection direction) {
  if (data.size() <= 1) return;
  fftw_plan plan = plan_cache().get(data.size(), direction);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace subratio
