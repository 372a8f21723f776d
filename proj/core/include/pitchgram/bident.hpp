#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pitchgram/acf.hpp"

namespace pitchgram {

enum class KernelKind { Bident, Sinc };

/// Spike weights of the harmonic bident. With alpha = 2, beta = 1 the three
/// prongs at f0/2, f0 and 2 f0 have equal magnitude.
struct BidentParams {
  double alpha = 2.0;
  double beta = 1.0;
  int span_periods = 12;  // chromatic design; fixed, exposed for experiments

  friend bool operator==(const BidentParams&, const BidentParams&) = default;
};

/// Analysis filter taps over lags 0 .. span_periods*N0 - 1.
struct FilterKernel {
  std::vector<double> taps;
  KernelKind kind = KernelKind::Bident;
  int period = 0;  // N0 in samples

  std::size_t length() const { return taps.size(); }
};

/// Bident prototype g(n) = alpha * sin(3 pi n / N0) * tan(pi n / N0) - beta.
/// At the tan poles (n a half-odd multiple of N0, only reachable for even N0)
/// the tap is defined as the two-sided average of g at n +- 1e-6 periods.
double prototype_g(double n, int period, const BidentParams& params);

/// Bident: h(n) = g(n) * cos(pi n / N0); sinc kind: h(n) = cos(2 pi n / N0).
FilterKernel build_kernel(int period, const BidentParams& params, KernelKind kind);

/// Memoized kernel lookup keyed on (N0, alpha, beta, span, kind). Safe for
/// concurrent callers; construction is idempotent.
std::shared_ptr<const FilterKernel> cached_kernel(int period,
                                                  const BidentParams& params,
                                                  KernelKind kind);

/// Per-pitch score: Y = (1 / (span*N0)) * sum_n r(n) h(n). Requires the
/// series to hold at least as many lags as the kernel has taps.
double kernel_score(const AcfSeries& r, const FilterKernel& kernel);
double kernel_score(std::span<const double> lags, const FilterKernel& kernel);

}  // namespace pitchgram
