#pragma once

#include <optional>
#include <span>
#include <vector>

namespace pitchgram {

/// One-sided autocorrelation series, lags 0 .. max_lag-1. The flags record
/// whether the series has been power-normalized (ACC) and/or compressed, so
/// the transforms cannot be applied twice by accident.
struct AcfSeries {
  std::vector<double> values;
  bool normalized = false;
  bool compressed = false;

  std::size_t max_lag() const { return values.size(); }
};

/// Biased estimator: r(v) = (1/N) * sum_n y(n) y(n - v), out-of-range samples
/// taken as zero. Requires frame length >= max_lag and max_lag >= 1.
AcfSeries autocorrelation(std::span<const double> frame, int max_lag);

/// Normalizes by the mean signal power r(0), giving the autocorrelation
/// coefficient. Returns nullopt for a silent frame (r(0) = 0); the caller is
/// expected to emit zero scores in that case.
std::optional<AcfSeries> to_coefficient(const AcfSeries& r);

/// Signed square root per element: sgn(r) * |r|^(1/2). Applying it twice is
/// a contract violation and throws.
AcfSeries compress(const AcfSeries& r);

}  // namespace pitchgram
