#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "subratio/ssnr.hpp"

using namespace subratio;

namespace {

SsnrOptions plain_periodogram() {
  SsnrOptions o;
  o.window = SpectralWindow::rectangular;
  o.min_pad_factor = 1;
  o.pow2_length = false;
  return o;
}

}  // namespace

TEST_CASE("in-band pure tone is flagged infinite") {
  // 15 whole cycles in 60 s: with no taper and no padding every bin but the tone's is empty.
  const auto x = oracle::sine(3000, 50.0, 0.25);
  const SsnrEstimate e = ssnr(x, 50.0, plain_periodogram());
  CHECK(e.infinite);
  CHECK(std::isinf(e.value));
  CHECK(e.band_energy > 0);

  // The default Hann taper leaks about 1e-8 of the tone energy out of band: huge but finite.
  const SsnrEstimate hann = ssnr(x, 50.0);
  CHECK_FALSE(hann.infinite);
  CHECK(hann.value > 1e6);
}

TEST_CASE("out-of-band pure tone has negligible SSNR") {
  const auto x = oracle::sine(3000, 50.0, 2.0);
  CHECK(ssnr(x, 50.0).value < 1e-6);
  CHECK(ssnr(x, 50.0, plain_periodogram()).value < 1e-6);
}

TEST_CASE("noisy tone agrees with an independent periodogram") {
  const std::size_t n = 3000;
  const double fs = 50.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto x = oracle::sine(n, fs, 0.25);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.1);
    for (double& v : x) v += noise(rng);
    const double reference = oracle::periodogram_ssnr(x, fs);
    CHECK(ssnr(x, fs).value == doctest::Approx(reference).epsilon(0.3));
    CHECK(ssnr(x, fs, plain_periodogram()).value == doctest::Approx(reference).epsilon(1e-9));
  }
}

TEST_CASE("complex SSNR removes the mean and keeps negative frequencies") {
  const std::size_t n = 600;
  const double fs = 10.0;
  std::vector<cplx> z(n);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 0.2);
  for (std::size_t k = 0; k < n; ++k) {
    z[k] = cplx(5.0, -3.0) + std::polar(1.0, -2.0 * kPi * 0.3 * static_cast<double>(k) / fs) +
           cplx(noise(rng), noise(rng));
  }
  CHECK(ssnr(z, fs, plain_periodogram()).value ==
        doctest::Approx(oracle::periodogram_ssnr(z, fs)).epsilon(1e-9));
}

TEST_CASE("SSNR is invariant to scaling") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(200);
  for (double& v : x) v = n(rng);
  const double base = ssnr(x, 10.0).value;
  for (double c : {-3.0, 1e-4, 250.0}) {
    std::vector<double> y = x;
    for (double& v : y) v *= c;
    CHECK(ssnr(y, 10.0).value == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("zero signal is reported empty") {
  std::vector<double> x(100, 4.0);
  const SsnrEstimate e = ssnr(x, 10.0);
  CHECK(e.empty);
  CHECK(e.value == 0.0);
}

TEST_CASE("SSNR preconditions") {
  std::vector<double> short_series(19, 1.0);
  CHECK_THROWS_AS(ssnr(short_series, 10.0), std::invalid_argument);
  std::vector<double> ok(40, 1.0);
  CHECK_THROWS_AS(ssnr(ok, 1.0), std::invalid_argument);
  CHECK(ssnr_fft_length(100, {}) == 512);
  CHECK(ssnr_fft_length(100, plain_periodogram()) == 100);
}

TEST_CASE("projection spectrum matches the SSNR of each projection") {
  const std::size_t n = 100;
  const double fs = 10.0;
  std::vector<cplx> z(n);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sin(2.0 * kPi * 0.25 * static_cast<double>(k) / fs);
    z[k] = cplx(noise(rng), s + 0.1 * noise(rng));
  }
  const ProjectionSpectrum spec = projection_spectrum(z, fs);
  for (double angle = 0.0; angle < kTwoPi; angle += 0.37) {
    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = std::cos(angle) * z[k].real() + std::sin(angle) * z[k].imag();
    CHECK(spec.at(angle).value == doctest::Approx(ssnr(p, fs).value).epsilon(1e-9));
  }
}
