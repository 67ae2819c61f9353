#pragma once

#include <span>
#include <vector>

#include "subratio/gass.hpp"
#include "subratio/ssnr.hpp"
#include "subratio/trace.hpp"

// Batch kernels behind the hot loops. The serial versions are the reference;
// the OpenMP versions must return identical results (same per-item code,
// index-aligned output, no reductions across items).

namespace subratio::kernels {

namespace serial {

std::vector<double> genome_fitness(const CsiTrace& window, std::span<const GassGenome> genomes,
                                   const SsnrOptions& ssnr, const DenominatorGuard& guard);

std::vector<SsnrEstimate> stream_ssnr(std::span<const CscrStream> streams,
                                      const SsnrOptions& ssnr);

/// SSNR of cos(t) Re(z) + sin(t) Im(z) at each angle, one FFT per angle.
std::vector<double> projection_scan(std::span<const cplx> series, double fs,
                                    std::span<const double> angles, const SsnrOptions& ssnr);

}  // namespace serial

namespace parallel {

std::vector<double> genome_fitness(const CsiTrace& window, std::span<const GassGenome> genomes,
                                   const SsnrOptions& ssnr, const DenominatorGuard& guard);

std::vector<SsnrEstimate> stream_ssnr(std::span<const CscrStream> streams,
                                      const SsnrOptions& ssnr);

std::vector<double> projection_scan(std::span<const cplx> series, double fs,
                                    std::span<const double> angles, const SsnrOptions& ssnr);

}  // namespace parallel

}  // namespace subratio::kernels
