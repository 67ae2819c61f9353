#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "subratio/combiner.hpp"
#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"
#include "test_util.hpp"

using namespace subratio;

namespace {

ComplexSeries random_series(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  ComplexSeries z(n);
  for (auto& v : z) v = {d(rng), d(rng)};
  return z;
}

double energy(const ComplexSeries& z) {
  double e = 0;
  for (auto v : z) e += std::norm(v);
  return e;
}

double series_ssnr(const ComplexSeries& z, double fs) { return ssnr(std::span<const cplx>(z), fs).value; }

}  // namespace

TEST_CASE("offset removal") {
  ComplexSeries c(50, cplx(2.0, -7.0));
  for (auto v : remove_offset(c)) CHECK(std::abs(v) < 1e-12);

  ComplexSeries s(200);
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = cplx(-1.5, 4.0) + std::polar(1.0, kTwoPi * 0.25 * static_cast<double>(k) / 10.0);
  }
  const auto q = remove_offset(s);
  cplx mean{};
  for (auto v : q) mean += v;
  CHECK(std::abs(mean / 200.0) < 1e-12);
  for (std::size_t k = 0; k < q.size(); ++k) {
    CHECK(std::abs(q[k] - std::polar(1.0, kTwoPi * 0.25 * static_cast<double>(k) / 10.0)) < 1e-12);
  }

  const auto z = random_series(77, 3);
  cplx m{};
  for (auto v : z) m += v;
  m /= 77.0;
  const auto r = remove_offset(z);
  double rms = 0;
  cplx rm{};
  for (std::size_t k = 0; k < z.size(); ++k) {
    CHECK(r[k] == z[k] - m);
    rm += r[k];
    rms += std::norm(r[k]);
  }
  CHECK(std::abs(rm / 77.0) < 1e-9 * std::sqrt(rms / 77.0));
}

TEST_CASE("stream gain") {
  ComplexSeries zero(30, 0.0);
  CHECK(stream_gain(zero, 5) == 0.0);
  ComplexSeries c(30, cplx(3.0, 4.0));
  CHECK(stream_gain(c, 7) == doctest::Approx(5.0).epsilon(1e-14));

  // rotating unit phasor, window one quarter of its period
  const std::size_t period = 40;
  ComplexSeries p(200);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::polar(1.0, kTwoPi * static_cast<double>(k) / period);
  const double g = stream_gain(p, period / 4);
  CHECK(g == doctest::Approx(oracle::sliding_gain(p, period / 4)).epsilon(1e-12));
  const double half = kPi / static_cast<double>(period);  // half the per-sample step
  CHECK(g == doctest::Approx(std::abs(std::sin(10 * half) / (10 * std::sin(half)))).epsilon(1e-12));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto z = random_series(60, seed);
    CHECK(stream_gain(z, 9) == doctest::Approx(oracle::sliding_gain(z, 9)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(stream_gain(c, 0), std::invalid_argument);
  CHECK_THROWS_AS(stream_gain(c, 31), std::invalid_argument);
}

TEST_CASE("rotation alignment") {
  const auto ref = random_series(50, 1);
  CHECK(std::abs(align_rotation(ref, ref)) < 1e-15);

  ComplexSeries v(ref.size());
  for (double theta : {kPi / 3, -2.0, 0.7, 3.0}) {
    for (std::size_t k = 0; k < ref.size(); ++k) v[k] = ref[k] * std::polar(1.0, -theta);
    CHECK(std::abs(wrap_to_pi(align_rotation(ref, v) - theta)) < 1e-12);
  }

  const std::size_t grid = 100000;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto a = random_series(40, 100 + seed), b = random_series(40, 200 + seed);
    const double brute = oracle::grid_rotation(a, b, grid);
    CHECK(std::abs(wrap_to_pi(align_rotation(a, b) - brute)) <= kTwoPi / static_cast<double>(grid));
  }

  ComplexSeries x{1.0, 0.0}, y{0.0, 1.0};
  CHECK_THROWS_AS(align_rotation(x, y), NumericError);
}

TEST_CASE("moving average modes") {
  const auto z = random_series(101, 5);
  const auto block = moving_average(z, 3, SmoothingMode::block);
  CHECK(block.size() == 33);
  CHECK(std::abs(block[4] - (z[12] + z[13] + z[14]) / 3.0) < 1e-15);
  const auto sliding = moving_average(z, 3, SmoothingMode::sliding);
  CHECK(sliding.size() == z.size());
  CHECK(std::abs(sliding[10] - (z[9] + z[10] + z[11]) / 3.0) < 1e-15);
  CHECK(default_gain_window(10.0) == 5);
  CHECK(default_smoothing_window(10.0) == 3);
  CHECK(default_smoothing_window(120.0) == 39);
}

TEST_CASE("smoothing does not add energy to white noise") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto z = random_series(200, 300 + seed);
    const double e = energy(z);
    if (energy(moving_average(z, 3, SmoothingMode::sliding)) <= e) ++ok;
    CHECK(energy(moving_average(z, 3, SmoothingMode::block)) * 3.0 <= e);
  }
  CHECK(ok == 20);
}

TEST_CASE("single stream combines to its own weighted copy") {
  auto streams = testutil::breathing_ensemble(1, 100, 10.0, 0.2, 1);
  for (double mu : {0.0, 0.5, 1.0}) {
    CombinerOptions o;
    o.threshold = mu;
    const CombinedSignal out = combine(streams, o);
    REQUIRE(out.streams.size() == 1);
    const AlignedStream& s = out.streams[0];
    CHECK(s.rotation == 0.0);
    CHECK(s.weight == s.ssnr);
    CHECK(out.contributing_streams == 1);
    for (std::size_t k = 0; k < s.normalized.size(); ++k) {
      CHECK(std::abs(out.combined[k] - s.ssnr * s.normalized[k]) <= 1e-12 * std::abs(out.combined[k]) + 1e-15);
    }
  }
}

TEST_CASE("weights follow the threshold rule") {
  auto streams = testutil::breathing_ensemble(10, 100, 10.0, 0.5, 2);
  // make the ensemble uneven so the threshold matters
  for (std::size_t i = 0; i < streams.size(); ++i) {
    std::mt19937_64 rng(i);
    std::normal_distribution<double> extra(0.0, 0.15 * static_cast<double>(i));
    for (auto& v : streams[i].values) v += cplx(extra(rng), extra(rng));
  }
  std::size_t previous = streams.size() + 1;
  for (double mu = 0.0; mu <= 1.0 + 1e-12; mu += 0.1) {
    CombinerOptions o;
    o.threshold = std::min(mu, 1.0);
    const CombinedSignal out = combine(streams, o);
    double beta0 = 0;
    for (const auto& s : out.streams) beta0 = std::max(beta0, s.ssnr);
    std::size_t surviving = 0;
    for (const auto& s : out.streams) {
      CHECK((s.weight == 0.0 || (s.weight >= o.threshold * beta0 && s.weight <= beta0)));
      if (s.weight > 0) ++surviving;
      cplx m{};
      double rms = 0;
      for (auto v : s.offset_removed) {
        m += v;
        rms += std::norm(v);
      }
      const double n = static_cast<double>(s.offset_removed.size());
      CHECK(std::abs(m / n) < 1e-9 * std::sqrt(rms / n));
    }
    CHECK(surviving == out.contributing_streams);
    CHECK(surviving >= 1);
    CHECK(surviving <= previous);
    previous = surviving;
    CHECK(out.streams[out.reference].ssnr == beta0);
    if (o.threshold == 1.0) {
      for (const auto& s : out.streams) CHECK((s.weight > 0) == (s.ssnr == beta0));
    }
  }
}

TEST_CASE("combining equal-quality streams averages out noise") {
  const double fs = 10.0;
  double gain_db = 0;
  int beats_reference = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto streams = testutil::breathing_ensemble(10, 100, fs, 1.0, 1000 + static_cast<std::uint64_t>(seed));
    std::vector<double> single;
    for (const auto& s : streams) single.push_back(series_ssnr(s.values, fs));
    const CombinedSignal out = combine(streams);
    const double combined = series_ssnr(out.combined, fs);
    gain_db += 10.0 * std::log10(combined / oracle::median_of(single));
    if (combined >= out.streams[out.reference].ssnr) ++beats_reference;
  }
  CHECK(gain_db / seeds >= 6.0);
  CHECK(beats_reference >= 19);
}

TEST_CASE("block smoothing divides the rate") {
  const auto streams = testutil::breathing_ensemble(3, 100, 10.0, 0.3, 4);
  CombinerOptions o;
  o.smoothing = SmoothingMode::block;
  const CombinedSignal out = combine(streams, o);
  CHECK(out.window_samples == 3);
  CHECK(out.smoothed.size() == 33);
  CHECK(out.sample_rate_hz == doctest::Approx(10.0 / 3.0));
  const CombinedSignal sliding = combine(streams);
  CHECK(sliding.smoothed.size() == 100);
  CHECK(sliding.sample_rate_hz == 10.0);
}

TEST_CASE("degenerate streams are dropped, empty input is an error") {
  auto streams = testutil::breathing_ensemble(3, 100, 10.0, 0.3, 5);
  streams[1].values.assign(100, cplx(2.0, 1.0));  // zero gain after offset removal
  const CombinedSignal out = combine(streams);
  CHECK(out.streams.size() == 2);
  REQUIRE(out.dropped.size() == 1);
  CHECK(out.dropped[0].subcarrier == streams[1].denominator);

  CHECK_THROWS_AS(combine(std::span<const CscrStream>{}), std::invalid_argument);
  CombinerOptions bad;
  bad.threshold = 1.5;
  CHECK_THROWS_AS(combine(streams, bad), std::invalid_argument);
  std::vector<CscrStream> dead(2, streams[1]);
  CHECK_THROWS_AS(combine(dead), NumericError);
}
