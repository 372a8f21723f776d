#include <doctest.h>

#include "pitchgram/acf.hpp"
#include "pitchgram/comb.hpp"
#include "test_util.hpp"

using namespace pitchgram;

namespace {

/// Independent oracle: the literal biased-estimator double loop.
std::vector<double> brute_force_acf(const std::vector<double>& y, int max_lag) {
  std::vector<double> r(max_lag, 0.0);
  const int n = static_cast<int>(y.size());
  for (int lag = 0; lag < max_lag; ++lag) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      if (i - lag >= 0) acc += y[i] * y[i - lag];
    r[lag] = acc / n;
  }
  return r;
}

}  // namespace

TEST_CASE("constant signal follows the biased closed form") {
  const double c = 0.5;
  const int n = 4096;
  std::vector<double> y(n, c);
  const AcfSeries r = autocorrelation(y, 256);
  for (int lag = 0; lag < 256; ++lag)
    CHECK(r.values[lag] ==
          doctest::Approx(c * c * (1.0 - static_cast<double>(lag) / n)).epsilon(1e-12));
}

TEST_CASE("zero lag is the mean signal power") {
  const auto y = testutil::sine(441.0, 0.8, 2048, 44100.0);
  const AcfSeries r = autocorrelation(y, 8);
  double power = 0.0;
  for (double v : y) power += v * v;
  power /= static_cast<double>(y.size());
  CHECK(r.values[0] == doctest::Approx(power).epsilon(1e-12));
}

TEST_CASE("sine frame matches brute force and the cosine closed form") {
  const int n = 1024;
  const int n0 = 64;  // exactly 16 periods in the frame
  const auto y = testutil::sine(44100.0 / n0, 0.9, n, 44100.0);

  const AcfSeries r = autocorrelation(y, 512);
  const auto oracle = brute_force_acf(y, 512);
  double peak = 0.0;
  for (double v : oracle) peak = std::max(peak, std::abs(v));
  for (int lag = 0; lag < 512; ++lag) {
    CHECK(r.values[lag] == doctest::Approx(oracle[lag]).epsilon(1e-12));
    const double closed = 0.9 * 0.9 / 2.0 *
                          std::cos(2.0 * std::numbers::pi * lag / n0) *
                          (1.0 - static_cast<double>(lag) / n);
    CHECK(std::abs(r.values[lag] - closed) < 0.02 * peak);
  }
}

TEST_CASE("autocorrelation coefficient pins lag zero to one") {
  const auto y = testutil::sine(300.0, 0.5, 1024, 44100.0);
  const auto rho = to_coefficient(autocorrelation(y, 128));
  REQUIRE(rho.has_value());
  CHECK(rho->values[0] == 1.0);
  CHECK(rho->normalized);

  // Scaling the signal leaves the coefficient untouched
  std::vector<double> y5(y);
  for (double& v : y5) v *= 5.0;
  const auto rho5 = to_coefficient(autocorrelation(y5, 128));
  for (int lag = 0; lag < 128; ++lag)
    CHECK(rho5->values[lag] == doctest::Approx(rho->values[lag]).epsilon(1e-12));
}

TEST_CASE("silent frame yields no coefficient") {
  std::vector<double> y(512, 0.0);
  CHECK_FALSE(to_coefficient(autocorrelation(y, 64)).has_value());
}

TEST_CASE("compression is the signed square root") {
  AcfSeries r;
  r.values = {4.0, -9.0, 0.0, 2.25};
  const AcfSeries c = compress(r);
  CHECK(c.values[0] == 2.0);
  CHECK(c.values[1] == -3.0);
  CHECK(c.values[2] == 0.0);
  CHECK(c.values[3] == 1.5);
  CHECK(c.compressed);
  CHECK_THROWS_AS(compress(c), std::invalid_argument);
}

TEST_CASE("compression preserves sign and the |r| argmax") {
  const auto y = testutil::sine(260.0, 0.7, 2048, 44100.0);
  const AcfSeries r = autocorrelation(y, 512);
  const AcfSeries c = compress(r);
  std::size_t argmax_r = 1, argmax_c = 1;
  for (std::size_t i = 1; i < r.values.size(); ++i) {
    if (std::abs(r.values[i]) > std::abs(r.values[argmax_r])) argmax_r = i;
    if (std::abs(c.values[i]) > std::abs(c.values[argmax_c])) argmax_c = i;
    CHECK((r.values[i] >= 0) == (c.values[i] >= 0));
  }
  CHECK(argmax_r == argmax_c);
}

TEST_CASE("quadratic scaling and the compression factorization") {
  const auto x = testutil::sine(196.0, 0.6, 1500, 44100.0);
  const double eta = 1.7;
  std::vector<double> weighted(x);
  for (double& v : weighted) v *= eta;

  const AcfSeries rx = autocorrelation(x, 300);
  const AcfSeries rw = autocorrelation(weighted, 300);
  for (int lag = 0; lag < 300; ++lag)
    CHECK(rw.values[lag] == doctest::Approx(eta * eta * rx.values[lag]).epsilon(1e-12));

  // compress(acf(eta x)) = eta * compress(acf(x)): the factorized per-channel
  // path used by the pitchgram is exact, not an approximation.
  const AcfSeries cw = compress(rw);
  const AcfSeries cx = compress(rx);
  for (int lag = 0; lag < 300; ++lag)
    CHECK(cw.values[lag] == doctest::Approx(eta * cx.values[lag]).epsilon(1e-12));
}

TEST_CASE("frame shorter than max_lag is rejected") {
  std::vector<double> y(100, 1.0);
  CHECK_THROWS_AS(autocorrelation(y, 101), std::invalid_argument);
  CHECK_THROWS_AS(autocorrelation(y, 0), std::invalid_argument);
}
