#include <doctest.h>

#include <cstring>
#include <numbers>

#include "pitchgram/acf.hpp"
#include "pitchgram/bident.hpp"
#include "pitchgram/comb.hpp"
#include "pitchgram/grid.hpp"
#include "pitchgram/synth.hpp"
#include "test_util.hpp"

using namespace pitchgram;

namespace {

/// Real frequency response of a kernel: the ACF it multiplies is even, so the
/// effective two-sided kernel is the even extension of the taps.
double kernel_response(const FilterKernel& k, double f, double fs) {
  double acc = k.taps[0];
  for (std::size_t n = 1; n < k.taps.size(); ++n)
    acc += 2.0 * k.taps[n] * std::cos(2.0 * std::numbers::pi * f * n / fs);
  return acc;
}

}  // namespace

TEST_CASE("prototype endpoints: g(0) = -beta, alpha = 0 flattens g") {
  const BidentParams def{};
  CHECK(prototype_g(0.0, 100, def) == doctest::Approx(-1.0));
  BidentParams flat{};
  flat.alpha = 1e-300;  // alpha must stay positive; the sin*tan term vanishes
  for (int n : {1, 7, 31, 500})
    CHECK(prototype_g(n, 100, flat) == doctest::Approx(-flat.beta));
}

TEST_CASE("tan poles: averaged prototype, analytic-limit kernel tap") {
  // Even N0 puts sample indices right on the tan poles (n = N0/2 + k N0).
  const int n0 = 8;
  const BidentParams params{};
  const FilterKernel k = build_kernel(n0, params, KernelKind::Bident);
  for (int n : {4, 12, 20, 92}) {
    constexpr double pi = std::numbers::pi;
    const double eps = 1e-6;  // in periods
    const double u = static_cast<double>(n) / n0;
    auto g_at = [&](double periods) {
      return params.alpha * std::sin(3.0 * pi * periods) * std::tan(pi * periods) -
             params.beta;
    };
    // The exposed prototype takes the two-sided average of g around the pole
    const double g_oracle = 0.5 * (g_at(u - eps) + g_at(u + eps));
    CHECK(std::isfinite(prototype_g(n, n0, params)));
    CHECK(prototype_g(n, n0, params) == doctest::Approx(g_oracle).epsilon(1e-9));
    // The kernel tap is the finite limit of g * cos: tan cancels against cos,
    // leaving alpha sin(3 pi u) sin(pi u). Oracle: approach along real n.
    const double h_oracle = 0.5 * (g_at(u - eps) * std::cos(pi * (u - eps)) +
                                   g_at(u + eps) * std::cos(pi * (u + eps)));
    CHECK(k.taps[n] == doctest::Approx(h_oracle).epsilon(1e-5));
    CHECK(std::abs(k.taps[n]) == doctest::Approx(params.alpha).epsilon(1e-9));
  }
}

TEST_CASE("bident tap 0 is -beta and all taps are finite") {
  const FilterKernel k = build_kernel(100, {}, KernelKind::Bident);
  CHECK(k.taps[0] == doctest::Approx(-1.0));
  CHECK(k.length() == 1200);
  for (double t : k.taps) CHECK(std::isfinite(t));
}

TEST_CASE("bident response: three equal-magnitude prongs at f0/2, f0, 2f0") {
  const int n0 = 100;
  const double fs = 44100.0;
  const double f0 = fs / n0;
  const FilterKernel k = build_kernel(n0, {2.0, 1.0, 12}, KernelKind::Bident);

  auto extremum_near = [&](double center, int sign) {
    double best = 0.0;
    for (double f = center - f0 / 30.0; f <= center + f0 / 30.0; f += f0 / 3000.0) {
      const double h = sign * kernel_response(k, f, fs);
      best = std::max(best, h);
    }
    return best;
  };
  const double low = extremum_near(f0 / 2.0, -1);   // negative prong
  const double mid = extremum_near(f0, +1);         // positive prong
  const double high = extremum_near(2.0 * f0, -1);  // negative prong
  CHECK(low > 0.0);
  CHECK(mid > 0.0);
  CHECK(high > 0.0);
  CHECK(std::abs(low - mid) / mid < 0.02);
  CHECK(std::abs(high - mid) / mid < 0.02);
}

TEST_CASE("sinc response: 12 zero crossings below f0, 24 above") {
  const int n0 = 100;
  const double fs = 44100.0;
  const double f0 = fs / n0;
  const FilterKernel k = build_kernel(n0, {}, KernelKind::Sinc);

  const double step = f0 / 240.0;
  auto crossings = [&](double begin, double end, std::vector<double>& where) {
    double prev = kernel_response(k, begin, fs);
    int count = 0;
    for (double f = begin + step; f <= end + step / 2; f += step) {
      const double cur = kernel_response(k, f, fs);
      if ((prev < 0 && cur >= 0) || (prev > 0 && cur <= 0)) {
        ++count;
        where.push_back(f - step / 2);
      }
      prev = cur;
    }
    return count;
  };

  // Lower octave inclusive of the f0/2 endpoint zero, upper inclusive of 2f0
  std::vector<double> low_at, high_at;
  const int low = crossings(f0 / 2.0 - step, f0 - f0 / 48.0, low_at);
  const int high = crossings(f0 + f0 / 96.0, 2.0 * f0 + step / 4, high_at);
  CHECK(low == 12);
  CHECK(high == 24);

  // Crossings sit within half a grid step of the ideal f0 (1 +- k/24) comb
  for (double f : low_at) {
    const double k_frac = (f0 - f) / (f0 / 24.0);
    CHECK(std::abs(k_frac - std::lround(k_frac)) * f0 / 24.0 <= step / 2 + 1e-9);
  }
  for (double f : high_at) {
    const double k_frac = (f - f0) / (f0 / 24.0);
    CHECK(std::abs(k_frac - std::lround(k_frac)) * f0 / 24.0 <= step / 2 + 1e-9);
  }
}

TEST_CASE("kernel build is deterministic") {
  const FilterKernel a = build_kernel(73, {2.0, 1.0, 12}, KernelKind::Bident);
  const FilterKernel b = build_kernel(73, {2.0, 1.0, 12}, KernelKind::Bident);
  REQUIRE(a.length() == b.length());
  CHECK(std::memcmp(a.taps.data(), b.taps.data(),
                    a.length() * sizeof(double)) == 0);

  const auto c1 = cached_kernel(73, {2.0, 1.0, 12}, KernelKind::Bident);
  const auto c2 = cached_kernel(73, {2.0, 1.0, 12}, KernelKind::Bident);
  CHECK(c1.get() == c2.get());  // memoized
}

TEST_CASE("score: zeros map to zero, linear in the series") {
  const FilterKernel k = build_kernel(20, {}, KernelKind::Bident);
  AcfSeries zero;
  zero.values.assign(240, 0.0);
  CHECK(kernel_score(zero, k) == 0.0);

  const auto y = testutil::sine(44100.0 / 20, 0.5, 2048, 44100.0);
  AcfSeries r = autocorrelation(y, 240);
  const double once = kernel_score(r, k);
  for (double& v : r.values) v *= 2.0;
  CHECK(kernel_score(r, k) == doctest::Approx(2.0 * once).epsilon(1e-12));

  AcfSeries barely;
  barely.values.assign(239, 0.0);
  CHECK_THROWS_AS(kernel_score(barely, k), std::invalid_argument);
}

TEST_CASE("decaying tone scores positive at pitch, negative an octave up") {
  const double fs = 44100.0;
  const double period = 1024.0 / fs;
  const ToneSpec t = testutil::tone(57, 0.0, 0.8, 0.6, 4, 0.0);
  const SynthResult fx = synthesize({t}, 44100, 0.8, period);

  const int n0 = static_cast<int>(std::lround(fs / midi_to_frequency(57)));
  const int n0_up = static_cast<int>(std::lround(fs / midi_to_frequency(69)));
  const int frame_len = 13 * n0;
  const std::span<const double> frame(fx.audio.samples.data(), frame_len);

  const AcfSeries base = compress(autocorrelation(frame, 12 * n0));
  const double at_pitch =
      kernel_score(base, *cached_kernel(n0, {}, KernelKind::Bident));
  const double octave_up =
      kernel_score(base, *cached_kernel(n0_up, {}, KernelKind::Bident));
  CHECK(at_pitch > 0.0);
  CHECK(octave_up < 0.0);
}

TEST_CASE("score normalization is rate-invariant within 2%") {
  // The same continuous tone sampled at two rates: the 1/(12 N0) prefactor
  // keeps the score independent of the window size.
  double scores[2];
  const int rates[2] = {44100, 88200};
  for (int i = 0; i < 2; ++i) {
    const double fs = rates[i];
    const ToneSpec t = testutil::tone(69, 0.0, 0.6, 0.6, 4, 0.0);
    const SynthResult fx = synthesize({t}, rates[i], 0.6, 1024.0 / fs);
    const int n0 = static_cast<int>(std::lround(fs / midi_to_frequency(69)));
    const std::span<const double> frame(fx.audio.samples.data(), 13 * n0);
    const auto rho = to_coefficient(autocorrelation(frame, 12 * n0));
    REQUIRE(rho.has_value());
    const AcfSeries base = compress(*rho);
    scores[i] = kernel_score(base, *cached_kernel(n0, {}, KernelKind::Bident));
  }
  CHECK(std::abs(scores[0] - scores[1]) / std::abs(scores[1]) < 0.02);
}
