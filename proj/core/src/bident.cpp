#include "pitchgram/bident.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace pitchgram {

namespace {

double g_raw(double u, const BidentParams& params) {
  // u = n / N0, position in pitch periods
  constexpr double pi = std::numbers::pi;
  return params.alpha * std::sin(3.0 * pi * u) * std::tan(pi * u) - params.beta;
}

bool at_tan_pole(long long n2, int period) {
  // pole where n / N0 is a half-odd integer, i.e. 2n = odd * N0
  if (period % 2 != 0) return false;
  const long long q = n2 / period;
  return n2 % period == 0 && q % 2 != 0;
}

}  // namespace

double prototype_g(double n, int period, const BidentParams& params) {
  if (period < 2)
    throw std::invalid_argument("prototype_g: period must be >= 2 samples");
  const double u = n / period;
  const double n2 = 2.0 * n;
  if (n2 == std::floor(n2) && at_tan_pole(static_cast<long long>(n2), period)) {
    const double eps = 1e-6;  // in periods
    return 0.5 * (g_raw(u - eps, params) + g_raw(u + eps, params));
  }
  return g_raw(u, params);
}

FilterKernel build_kernel(int period, const BidentParams& params, KernelKind kind) {
  if (period < 2)
    throw std::invalid_argument("build_kernel: period must be >= 2 samples");
  if (params.alpha <= 0.0 || params.beta < 0.0)
    throw std::invalid_argument("build_kernel: require alpha > 0 and beta >= 0");
  if (params.span_periods < 1)
    throw std::invalid_argument("build_kernel: span must be >= 1 period");

  constexpr double pi = std::numbers::pi;
  FilterKernel k;
  k.kind = kind;
  k.period = period;
  k.taps.resize(static_cast<std::size_t>(params.span_periods) * period);
  for (std::size_t n = 0; n < k.taps.size(); ++n) {
    const double u = static_cast<double>(n) / period;
    if (kind == KernelKind::Sinc) {
      k.taps[n] = std::cos(2.0 * pi * u);
    } else if (period % 2 == 0 && at_tan_pole(2 * static_cast<long long>(n), period)) {
      // g(n) alone has no finite limit at the tan pole, but the modulated
      // tap does: tan * cos cancels to sin, leaving alpha sin(3 pi u) sin(pi u).
      // Using that limit keeps the three bident prongs at equal magnitude;
      // a zeroed tap would skew the f0 and 2 f0 prongs by ~4 % at N0 = 100.
      k.taps[n] = params.alpha * std::sin(3.0 * pi * u) * std::sin(pi * u);
    } else {
      k.taps[n] = prototype_g(static_cast<double>(n), period, params) *
                  std::cos(pi * u);
    }
  }
  return k;
}

std::shared_ptr<const FilterKernel> cached_kernel(int period,
                                                  const BidentParams& params,
                                                  KernelKind kind) {
  using Key = std::tuple<int, double, double, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const FilterKernel>> cache;

  const Key key{period, params.alpha, params.beta, params.span_periods,
                static_cast<int>(kind)};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const FilterKernel>(build_kernel(period, params, kind));
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(built));
  return it->second;
}

double kernel_score(std::span<const double> lags, const FilterKernel& kernel) {
  if (lags.size() < kernel.length())
    throw std::invalid_argument("kernel_score: not enough lags for the kernel");
  double acc = 0.0;
  const std::size_t len = kernel.length();
  for (std::size_t n = 0; n < len; ++n) acc += lags[n] * kernel.taps[n];
  return acc / static_cast<double>(len);
}

double kernel_score(const AcfSeries& r, const FilterKernel& kernel) {
  return kernel_score(std::span<const double>(r.values), kernel);
}

}  // namespace pitchgram
