#include "pitchgram/comb.hpp"

#include <cmath>
#include <stdexcept>

namespace pitchgram {

namespace {

void check_period(const CombParams& params) {
  if (params.period < 1)
    throw std::invalid_argument("comb filter: period must be >= 1 sample");
}

}  // namespace

std::vector<double> comb_feedforward(std::span<const double> x, CombParams params) {
  check_period(params);
  std::vector<double> y(x.size());
  const int n0 = params.period;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double delayed = n >= static_cast<std::size_t>(n0) ? x[n - n0] : 0.0;
    y[n] = x[n] + params.a * delayed;
  }
  return y;
}

void comb_feedback_into(std::span<const double> x, CombParams params,
                        std::span<double> out) {
  check_period(params);
  if (std::abs(params.a) >= 1.0)
    throw std::invalid_argument("feed-backward comb is unstable for |a| >= 1");
  if (out.size() < x.size())
    throw std::invalid_argument("comb filter: output buffer too small");
  const int n0 = params.period;
  const std::size_t head = std::min(x.size(), static_cast<std::size_t>(n0));
  for (std::size_t n = 0; n < head; ++n) out[n] = x[n];
  for (std::size_t n = head; n < x.size(); ++n)
    out[n] = x[n] + params.a * out[n - n0];
}

std::vector<double> comb_feedback(std::span<const double> x, CombParams params) {
  std::vector<double> y(x.size());
  comb_feedback_into(x, params, y);
  return y;
}

double harmonicity(std::span<const double> window, int period) {
  if (period < 1)
    throw std::invalid_argument("harmonicity: period must be >= 1 sample");
  if (window.size() < static_cast<std::size_t>(period))
    throw std::invalid_argument("harmonicity: window shorter than one period");
  double acc = 0.0;
  for (int n = 0; n < period; ++n) acc += window[n] * window[n];
  return std::sqrt(acc / period);
}

std::vector<double> weight_by_harmonicity(std::span<const double> x, double eta) {
  if (eta < 0.0)
    throw std::invalid_argument("weight_by_harmonicity: eta must be >= 0");
  std::vector<double> y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) y[n] = eta * x[n];
  return y;
}

}  // namespace pitchgram
