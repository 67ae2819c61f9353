#include "subratio/gass.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "subratio/error.hpp"
#include "subratio/kernels.hpp"

namespace subratio {

void GassGenome::validate(std::size_t subcarrier_count) const {
  if (weights.empty()) throw std::invalid_argument("genome: no numerator slots");
  if (weights.size() != numerator.size()) {
    throw std::invalid_argument("genome: weight and index counts differ");
  }
  if (denominator >= subcarrier_count) throw std::invalid_argument("genome: denominator out of range");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(std::abs(weights[i]) <= 1.0 + 1e-12)) throw std::invalid_argument("genome: |a_i| > 1");
    if (numerator[i] >= subcarrier_count) throw std::invalid_argument("genome: numerator out of range");
    if (numerator[i] == denominator) {
      throw std::invalid_argument("genome: numerator subcarrier equals denominator");
    }
  }
}

std::vector<NumeratorTerm> GassGenome::active_terms() const {
  std::vector<NumeratorTerm> terms;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] != cplx{}) terms.push_back({weights[i], numerator[i]});
  }
  return terms;
}

GassGenome single_pair_genome(std::size_t m1, std::size_t md, std::size_t slots) {
  GassGenome g;
  g.weights.assign(std::max<std::size_t>(1, slots), cplx{});
  g.weights[0] = 1.0;
  g.numerator.assign(g.weights.size(), m1);
  g.denominator = md;
  return g;
}

bool genome_less(const GassGenome& a, const GassGenome& b) {
  if (a.denominator != b.denominator) return a.denominator < b.denominator;
  if (a.numerator != b.numerator) return a.numerator < b.numerator;
  const auto key = [](const std::vector<cplx>& w) {
    std::vector<std::pair<double, double>> v;
    v.reserve(w.size());
    for (const auto& c : w) v.emplace_back(c.real(), c.imag());
    return v;
  };
  return key(a.weights) < key(b.weights);
}

void GassParams::validate() const {
  if (numerator_count == 0) throw ConfigError("gass: numerator_count must be >= 1");
  if (population == 0) throw ConfigError("gass: population must be >= 1");
  if (tournament == 0) throw ConfigError("gass: tournament size must be >= 1");
  if (elite > population) throw ConfigError("gass: elite count exceeds population");
  if (crossover_prob < 0 || crossover_prob > 1) throw ConfigError("gass: crossover_prob outside [0,1]");
  if (mutation_prob < 0 || mutation_prob > 1) throw ConfigError("gass: mutation_prob outside [0,1]");
  if (weight_sigma < 0) throw ConfigError("gass: weight_sigma must be >= 0");
}

double fitness(const GassGenome& genome, const CsiTrace& window, const SsnrOptions& ssnr_options,
               const DenominatorGuard& guard) {
  const auto terms = genome.active_terms();
  if (terms.empty()) return 0.0;
  try {
    const CscrStream s = weighted_cscr(window, terms, genome.denominator, guard);
    const SsnrEstimate e = ssnr(std::span<const cplx>(s.values), window.sample_rate_hz(), ssnr_options);
    return e.empty ? 0.0 : e.value;
  } catch (const NumericError&) {
    return 0.0;
  }
}

namespace {

struct GenomeLess {
  bool operator()(const GassGenome& a, const GassGenome& b) const { return genome_less(a, b); }
};

class Search {
 public:
  Search(const CsiTrace& window, const GassParams& params)
      : window_(window), params_(params), m_(window.subcarrier_count()), rng_(params.seed) {}

  // Fitness of every genome, evaluating only those not seen before in this window.
  std::vector<double> evaluate(const std::vector<GassGenome>& genomes) {
    std::vector<GassGenome> fresh;
    std::set<GassGenome, GenomeLess> queued;
    for (const auto& g : genomes) {
      if (!cache_.count(g) && queued.insert(g).second) fresh.push_back(g);
    }
    if (!fresh.empty()) {
      const auto values =
          params_.parallel
              ? kernels::parallel::genome_fitness(window_, fresh, params_.ssnr, params_.guard)
              : kernels::serial::genome_fitness(window_, fresh, params_.ssnr, params_.guard);
      for (std::size_t i = 0; i < fresh.size(); ++i) cache_.emplace(fresh[i], values[i]);
      evaluations_ += fresh.size();
    }
    std::vector<double> out;
    out.reserve(genomes.size());
    for (const auto& g : genomes) out.push_back(cache_.at(g));
    return out;
  }

  std::size_t evaluations() const { return evaluations_; }
  std::mt19937_64& rng() { return rng_; }

  std::size_t random_index_except(std::size_t excluded) {
    std::uniform_int_distribution<std::size_t> pick(0, m_ - 2);
    std::size_t v = pick(rng_);
    return v >= excluded ? v + 1 : v;
  }

  GassGenome random_genome() {
    std::uniform_int_distribution<std::size_t> any(0, m_ - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    GassGenome g;
    g.denominator = any(rng_);
    for (std::size_t i = 0; i < params_.numerator_count; ++i) {
      g.weights.push_back(std::polar(unit(rng_), kTwoPi * unit(rng_)));
      g.numerator.push_back(random_index_except(g.denominator));
    }
    return g;
  }

  // Single-pair genomes ranked by fitness, best first.
  std::vector<std::pair<GassGenome, double>> ranked_pairs() {
    std::vector<GassGenome> pairs;
    const std::size_t all = m_ * (m_ - 1);
    if (all <= params_.pair_pool) {
      for (std::size_t md = 0; md < m_; ++md) {
        for (std::size_t m1 = 0; m1 < m_; ++m1) {
          if (m1 != md) pairs.push_back(single_pair_genome(m1, md, params_.numerator_count));
        }
      }
    } else {
      std::set<std::pair<std::size_t, std::size_t>> chosen;
      std::uniform_int_distribution<std::size_t> any(0, m_ - 1);
      while (chosen.size() < params_.pair_pool) {
        const std::size_t md = any(rng_);
        const std::size_t m1 = random_index_except(md);
        if (chosen.emplace(m1, md).second) {
          pairs.push_back(single_pair_genome(m1, md, params_.numerator_count));
        }
      }
    }
    const auto values = evaluate(pairs);
    std::vector<std::pair<GassGenome, double>> ranked;
    for (std::size_t i = 0; i < pairs.size(); ++i) ranked.emplace_back(pairs[i], values[i]);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return ranked;
  }

  std::size_t tournament(const std::vector<double>& fit) {
    std::uniform_int_distribution<std::size_t> pick(0, fit.size() - 1);
    std::size_t best = pick(rng_);
    for (std::size_t t = 1; t < params_.tournament; ++t) {
      const std::size_t c = pick(rng_);
      // population is sorted best-first, so the lower index wins ties
      if (fit[c] > fit[best] || (fit[c] == fit[best] && c < best)) best = c;
    }
    return best;
  }

  GassGenome crossover(const GassGenome& a, const GassGenome& b) {
    std::bernoulli_distribution coin(0.5);
    GassGenome child = a;
    for (std::size_t i = 0; i < child.size(); ++i) {
      if (coin(rng_)) {
        child.weights[i] = b.weights[i];
        child.numerator[i] = b.numerator[i];
      }
    }
    if (coin(rng_)) child.denominator = b.denominator;
    repair(child);
    return child;
  }

  void mutate(GassGenome& g) {
    std::bernoulli_distribution hit(params_.mutation_prob);
    std::normal_distribution<double> perturb(0.0, params_.weight_sigma);
    std::uniform_int_distribution<std::size_t> any(0, m_ - 1);
    if (hit(rng_)) g.denominator = any(rng_);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (hit(rng_)) {
        g.weights[i] += cplx(perturb(rng_), perturb(rng_));
        const double mag = std::abs(g.weights[i]);
        if (mag > 1.0) g.weights[i] /= mag;
      }
      if (hit(rng_)) g.numerator[i] = random_index_except(g.denominator);
    }
    repair(g);
  }

  // Numerator slots that collide with the denominator get a fresh index.
  void repair(GassGenome& g) {
    for (auto& m : g.numerator) {
      if (m == g.denominator) m = random_index_except(g.denominator);
    }
  }

 private:
  const CsiTrace& window_;
  const GassParams& params_;
  std::size_t m_;
  std::mt19937_64 rng_;
  std::map<GassGenome, double, GenomeLess> cache_;
  std::size_t evaluations_ = 0;
};

// Sort best-first; equal fitness ordered by genome contents.
void rank(std::vector<GassGenome>& pop, std::vector<double>& fit) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fit[a] != fit[b]) return fit[a] > fit[b];
    return genome_less(pop[a], pop[b]);
  });
  std::vector<GassGenome> p2;
  std::vector<double> f2;
  for (std::size_t i : order) {
    p2.push_back(std::move(pop[i]));
    f2.push_back(fit[i]);
  }
  pop = std::move(p2);
  fit = std::move(f2);
}

}  // namespace

GassSolution optimize(const CsiTrace& window, const GassParams& params,
                      std::span<const GassGenome> seeds) {
  params.validate();
  const std::size_t m = window.subcarrier_count();
  if (m < 2) throw std::invalid_argument("gass: need at least two subcarriers");
  for (const auto& s : seeds) s.validate(m);

  Search search(window, params);
  GassSolution sol;

  std::vector<GassGenome> pop(seeds.begin(), seeds.end());
  if (pop.size() > params.population) pop.resize(params.population);
  if (params.seed_pairs > 0 && pop.size() < params.population) {
    const auto ranked = search.ranked_pairs();
    const std::size_t take =
        std::min({params.seed_pairs, ranked.size(), params.population - pop.size()});
    for (std::size_t i = 0; i < take; ++i) {
      pop.push_back(ranked[i].first);
      sol.seeded_pairs.push_back(ranked[i].first);
      sol.seeded_fitness.push_back(ranked[i].second);
    }
  }
  while (pop.size() < params.population) pop.push_back(search.random_genome());

  std::vector<double> fit = search.evaluate(pop);
  rank(pop, fit);
  sol.history.push_back(fit.front());

  std::size_t stagnant = 0;
  std::bernoulli_distribution do_crossover(params.crossover_prob);
  for (std::size_t gen = 1; gen <= params.generations; ++gen) {
    const std::size_t elite = std::min(params.elite, pop.size());
    std::vector<GassGenome> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(elite));
    while (next.size() < params.population) {
      const GassGenome& a = pop[search.tournament(fit)];
      const GassGenome& b = pop[search.tournament(fit)];
      GassGenome child = do_crossover(search.rng()) ? search.crossover(a, b) : a;
      search.mutate(child);
      next.push_back(std::move(child));
    }
    const double previous_best = fit.front();
    pop = std::move(next);
    fit = search.evaluate(pop);
    rank(pop, fit);
    sol.history.push_back(fit.front());
    if (fit.front() > previous_best) {
      sol.generation_found = gen;
      stagnant = 0;
    } else if (++stagnant >= params.stagnation_limit && params.stagnation_limit > 0) {
      break;
    }
  }

  sol.genome = pop.front();
  sol.fitness = fit.front();

  // A combination should never lose to one of its own single-pair components.
  std::vector<GassGenome> components;
  for (const auto& t : sol.genome.active_terms()) {
    components.push_back(single_pair_genome(t.subcarrier, sol.genome.denominator,
                                            sol.genome.size()));
  }
  const auto component_fit = search.evaluate(components);
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (component_fit[i] > sol.fitness) {
      sol.genome = components[i];
      sol.fitness = component_fit[i];
    }
  }

  sol.evaluations = search.evaluations();
  if (!(sol.fitness > 0.0)) throw NumericError("gass: no feasible genome in this window");
  return sol;
}

std::vector<CscrStream> build_streams(const GassGenome& genome, const CsiTrace& frames,
                                      const StreamOptions& options,
                                      std::vector<StreamOmission>* omitted) {
  const auto terms = genome.active_terms();
  if (terms.empty()) throw std::invalid_argument("build_streams: genome has no active terms");
  std::set<std::size_t> numerator_set;
  for (const auto& t : terms) {
    if (t.subcarrier >= frames.subcarrier_count()) {
      throw std::invalid_argument("build_streams: numerator index out of range");
    }
    numerator_set.insert(t.subcarrier);
  }
  const ComplexSeries num = weighted_numerator(frames, terms);

  std::vector<CscrStream> streams;
  for (std::size_t m = 0; m < frames.subcarrier_count(); ++m) {
    if (numerator_set.count(m) && !options.include_numerator_subcarriers) continue;
    try {
      GuardedRatio r = guarded_ratio(num, frames.subcarrier(m), options.guard);
      CscrStream s;
      s.numerator = terms;
      s.denominator = m;
      s.values = std::move(r.values);
      s.sample_rate_hz = frames.sample_rate_hz();
      s.repaired_samples = r.repaired;
      streams.push_back(std::move(s));
    } catch (const NumericError& e) {
      if (omitted) omitted->push_back({m, e.what()});
    }
  }
  return streams;
}

}  // namespace subratio
