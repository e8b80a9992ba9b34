#pragma once

#include <span>
#include <vector>

namespace vac {

/// Second-order section, a0 normalised to 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

/// 2nd-order Butterworth low-pass via the bilinear transform with a
/// prewarped cutoff. Throws ValidationError unless 0 < cutoff < fs/2.
Biquad butterworth_lowpass(double cutoff_hz, double sample_rate_hz);

/// |H(e^{jw})| of a single pass at `freq_hz`.
double magnitude_response(const Biquad& f, double freq_hz, double sample_rate_hz);

/// Single causal pass, starting from the given direct-form-II-transposed state.
std::vector<double> lfilter(const Biquad& f, std::span<const double> x, double z1 = 0.0, double z2 = 0.0);

/// Zero-phase forward-backward filtering. The signal is extended at both ends
/// by odd reflection (6 samples) and each pass starts from the steady state of
/// its first sample, so constant signals pass through unchanged.
/// Requires more than 6 samples.
std::vector<double> filtfilt(const Biquad& f, std::span<const double> x);

}  // namespace vac
