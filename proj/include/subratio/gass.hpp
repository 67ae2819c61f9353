#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subratio/cscr.hpp"
#include "subratio/ssnr.hpp"
#include "subratio/trace.hpp"

namespace subratio {

/// Candidate for the subcarrier-selection problem: N weighted numerator
/// subcarriers over one denominator subcarrier. Indices are 0-based.
struct GassGenome {
  std::vector<cplx> weights;          // |a_i| <= 1
  std::vector<std::size_t> numerator;  // m_i, each != denominator
  std::size_t denominator = 0;         // m_d

  std::size_t size() const { return weights.size(); }
  /// Throws std::invalid_argument when a structural invariant does not hold for M subcarriers.
  void validate(std::size_t subcarrier_count) const;
  /// Numerator terms with nonzero weight.
  std::vector<NumeratorTerm> active_terms() const;

  bool operator==(const GassGenome&) const = default;
};

/// N-slot genome that is the plain ratio (m1, md): a_1 = 1, remaining slots zero-weight.
GassGenome single_pair_genome(std::size_t m1, std::size_t md, std::size_t slots = 1);

/// Strict weak ordering on the exact genome contents (deterministic tie-breaking).
bool genome_less(const GassGenome& a, const GassGenome& b);

struct GassParams {
  std::size_t numerator_count = 8;
  std::size_t population = 64;
  std::size_t generations = 100;
  std::size_t tournament = 3;
  double crossover_prob = 0.8;
  double mutation_prob = 0.05;  // per gene
  double weight_sigma = 0.1;    // Gaussian perturbation of a weight gene, per component
  std::size_t elite = 2;
  std::size_t stagnation_limit = 20;
  std::size_t seed_pairs = 20;   // best single-pair genomes injected at initialization
  std::size_t pair_pool = 1024;  // single pairs ranked; all pairs when M(M-1) fits
  std::uint64_t seed = 1;
  bool parallel = true;          // evaluate each generation with the OpenMP kernel
  SsnrOptions ssnr;
  DenominatorGuard guard;

  void validate() const;
};

struct GassSolution {
  GassGenome genome;
  double fitness = 0;
  std::size_t generation_found = 0;
  RealSeries history;  // best fitness after initialization (entry 0) and each generation
  std::size_t evaluations = 0;
  std::vector<GassGenome> seeded_pairs;  // single-pair genomes injected at initialization
  RealSeries seeded_fitness;
};

/**
 * SSNR of sum_i a_i H~(m_i,k) / H~(m_d,k) over the window. Zero signal and
 * denominator-guard failures give 0 rather than an exception.
 */
double fitness(const GassGenome& genome, const CsiTrace& window, const SsnrOptions& ssnr = {},
               const DenominatorGuard& guard = {});

/**
 * Genetic search for the genome with the highest fitness.
 *
 * The initial population holds `seeds` (in order), then the best single-pair
 * genomes, then random genomes. Elitism keeps the best fitness non-decreasing;
 * a final pass replaces the winner by any single-pair component of it with a
 * higher fitness. Throws NumericError when no genome is feasible.
 */
GassSolution optimize(const CsiTrace& window, const GassParams& params,
                      std::span<const GassGenome> seeds = {});

struct StreamOptions {
  bool include_numerator_subcarriers = false;  // also build streams over denominators in {m_i}
  DenominatorGuard guard;
};

struct StreamOmission {
  std::size_t subcarrier = 0;
  std::string reason;
};

/**
 * One stream per grid subcarrier m: sum_i a_i H~(m_i,k) / H~(m,k). Subcarriers
 * carrying a nonzero-weight numerator term are skipped unless requested;
 * streams failing the denominator guard are omitted and logged.
 */
std::vector<CscrStream> build_streams(const GassGenome& genome, const CsiTrace& frames,
                                      const StreamOptions& options = {},
                                      std::vector<StreamOmission>* omitted = nullptr);

}  // namespace subratio
