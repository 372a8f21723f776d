#include "pitchgram/acf.hpp"

#include <cmath>
#include <stdexcept>

namespace pitchgram {

AcfSeries autocorrelation(std::span<const double> frame, int max_lag) {
  if (max_lag < 1)
    throw std::invalid_argument("autocorrelation: max_lag must be >= 1");
  const std::size_t n = frame.size();
  if (n < static_cast<std::size_t>(max_lag))
    throw std::invalid_argument("autocorrelation: frame shorter than max_lag");

  AcfSeries r;
  r.values.resize(max_lag);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int lag = 0; lag < max_lag; ++lag) {
    double acc = 0.0;
    const double* a = frame.data() + lag;
    const double* b = frame.data();
    const std::size_t len = n - lag;
    for (std::size_t i = 0; i < len; ++i) acc += a[i] * b[i];
    r.values[lag] = acc * inv_n;
  }
  return r;
}

std::optional<AcfSeries> to_coefficient(const AcfSeries& r) {
  if (r.normalized)
    throw std::invalid_argument("to_coefficient: series already normalized");
  if (r.values.empty())
    throw std::invalid_argument("to_coefficient: empty series");
  const double power = r.values[0];
  if (power <= 0.0) return std::nullopt;  // silent frame
  AcfSeries out = r;
  for (double& v : out.values) v /= power;
  out.normalized = true;
  return out;
}

AcfSeries compress(const AcfSeries& r) {
  if (r.compressed)
    throw std::invalid_argument("compress: series already compressed");
  AcfSeries out = r;
  for (double& v : out.values)
    v = v >= 0.0 ? std::sqrt(v) : -std::sqrt(-v);
  out.compressed = true;
  return out;
}

}  // namespace pitchgram
