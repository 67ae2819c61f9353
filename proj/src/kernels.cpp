#include "subratio/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace subratio::kernels {

namespace {

double projected_ssnr(std::span<const cplx> series, double fs, double angle,
                      const SsnrOptions& ssnr_options) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  RealSeries x(series.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = c * series[k].real() + s * series[k].imag();
  return ssnr(std::span<const double>(x), fs, ssnr_options).value;
}

}  // namespace

namespace serial {

std::vector<double> genome_fitness(const CsiTrace& window, std::span<const GassGenome> genomes,
                                   const SsnrOptions& ssnr, const DenominatorGuard& guard) {
  std::vector<double> out(genomes.size());
  for (std::size_t i = 0; i < genomes.size(); ++i) out[i] = fitness(genomes[i], window, ssnr, guard);
  return out;
}

std::vector<SsnrEstimate> stream_ssnr(std::span<const CscrStream> streams,
                                      const SsnrOptions& options) {
  std::vector<SsnrEstimate> out(streams.size());
  for (std::size_t i = 0; i < streams.size(); ++i) {
    out[i] = ssnr(std::span<const cplx>(streams[i].values), streams[i].sample_rate_hz, options);
  }
  return out;
}

std::vector<double> projection_scan(std::span<const cplx> series, double fs,
                                    std::span<const double> angles, const SsnrOptions& options) {
  std::vector<double> out(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) out[i] = projected_ssnr(series, fs, angles[i], options);
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> genome_fitness(const CsiTrace& window, std::span<const GassGenome> genomes,
                                   const SsnrOptions& ssnr, const DenominatorGuard& guard) {
  std::vector<double> out(genomes.size());
  const auto n = static_cast<std::int64_t>(genomes.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) out[i] = fitness(genomes[i], window, ssnr, guard);
  return out;
}

std::vector<SsnrEstimate> stream_ssnr(std::span<const CscrStream> streams,
                                      const SsnrOptions& options) {
  std::vector<SsnrEstimate> out(streams.size());
  const auto n = static_cast<std::int64_t>(streams.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = ssnr(std::span<const cplx>(streams[i].values), streams[i].sample_rate_hz, options);
  }
  return out;
}

std::vector<double> projection_scan(std::span<const cplx> series, double fs,
                                    std::span<const double> angles, const SsnrOptions& options) {
  std::vector<double> out(angles.size());
  const auto n = static_cast<std::int64_t>(angles.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = projected_ssnr(series, fs, angles[i], options);
  return out;
}

}  // namespace parallel

}  // namespace subratio::kernels
