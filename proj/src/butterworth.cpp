#include "vac/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "vac/errors.hpp"

namespace vac {
namespace {

constexpr std::size_t kPad = 6;  // 3 * (order + 1), as in common filtfilt implementations

struct SteadyState {
    double z1, z2;
};

// State for which a constant input `level` produces a constant output.
SteadyState steady_state(const Biquad& f, double level) {
    const double y = level * (f.b0 + f.b1 + f.b2) / (1.0 + f.a1 + f.a2);
    const double z2 = f.b2 * level - f.a2 * y;
    const double z1 = f.b1 * level - f.a1 * y + z2;
    return {z1, z2};
}

}  // namespace

Biquad butterworth_lowpass(double cutoff_hz, double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0)) throw ValidationError("sample_rate", "must be positive");
    if (!(cutoff_hz > 0.0 && cutoff_hz < 0.5 * sample_rate_hz)) {
        throw ValidationError("cutoff", "must lie in (0, Nyquist = " + std::to_string(0.5 * sample_rate_hz) +
                                            " Hz), got " + std::to_string(cutoff_hz));
    }
    const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
    const double k2 = k * k;
    const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k2);
    Biquad f;
    f.b0 = k2 * norm;
    f.b1 = 2.0 * f.b0;
    f.b2 = f.b0;
    f.a1 = 2.0 * (k2 - 1.0) * norm;
    f.a2 = (1.0 - std::numbers::sqrt2 * k + k2) * norm;
    return f;
}

double magnitude_response(const Biquad& f, double freq_hz, double sample_rate_hz) {
    const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_hz);
    const std::complex<double> z2 = z1 * z1;
    return std::abs((f.b0 + f.b1 * z1 + f.b2 * z2) / (1.0 + f.a1 * z1 + f.a2 * z2));
}

std::vector<double> lfilter(const Biquad& f, std::span<const double> x, double z1, double z2) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double yi = f.b0 * xi + z1;
        z1 = f.b1 * xi - f.a1 * yi + z2;
        z2 = f.b2 * xi - f.a2 * yi;
        y[i] = yi;
    }
    return y;
}

std::vector<double> filtfilt(const Biquad& f, std::span<const double> x) {
    const std::size_t n = x.size();
    if (n <= kPad) {
        throw ValidationError("samples", "at least " + std::to_string(kPad + 1) + " samples are required for filtering");
    }
    std::vector<double> ext;
    ext.reserve(n + 2 * kPad);
    for (std::size_t i = kPad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= kPad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    auto s = steady_state(f, ext.front());
    std::vector<double> fwd = lfilter(f, ext, s.z1, s.z2);
    std::reverse(fwd.begin(), fwd.end());
    s = steady_state(f, fwd.front());
    std::vector<double> bwd = lfilter(f, fwd, s.z1, s.z2);
    std::reverse(bwd.begin(), bwd.end());
    return {bwd.begin() + kPad, bwd.begin() + kPad + n};
}

}  // namespace vac
