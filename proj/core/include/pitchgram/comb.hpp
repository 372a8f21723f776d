#pragma once

#include <span>
#include <vector>

namespace pitchgram {

/// Pitch-synchronous comb filter parameters: delay of one pitch period and
/// a scaling factor a. The feed-backward variant is stable only for |a| < 1.
struct CombParams {
  double a = 0.8;
  int period = 1;  // N0, pitch period in samples
};

/// y(n) = x(n) + a * x(n - N0), signal zero for n < 0.
std::vector<double> comb_feedforward(std::span<const double> x, CombParams params);

/// y(n) = x(n) + a * y(n - N0), zero initial state. Throws for |a| >= 1.
std::vector<double> comb_feedback(std::span<const double> x, CombParams params);

/// In-place feed-backward comb into a caller-provided buffer (hot path).
void comb_feedback_into(std::span<const double> x, CombParams params,
                        std::span<double> out);

/// Harmonicity coefficient: RMS over the first `period` samples of the given
/// window of the comb-filtered signal. Callers pass the steady-state tail of
/// an analysis frame.
double harmonicity(std::span<const double> window, int period);

/// y(n) = eta * x(n). Scales the original signal, not the filtered one.
std::vector<double> weight_by_harmonicity(std::span<const double> x, double eta);

}  // namespace pitchgram
