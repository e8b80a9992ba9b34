#include "vac/butterworth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vac/errors.hpp"

namespace vac {
namespace {

constexpr double kFs = 250.0;

std::vector<double> sine(double freq, std::size_t n, double offset = 0.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = offset + std::sin(2.0 * std::numbers::pi * freq * i / kFs);
    return x;
}

double rms(const std::vector<double>& x, std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) s += x[i] * x[i];
    return std::sqrt(s / (to - from));
}

TEST(ButterworthLowpass, CoefficientsMatchReferenceDesign) {
    // scipy.signal.butter(2, 10, fs=250)
    const Biquad f = butterworth_lowpass(10.0, kFs);
    EXPECT_NEAR(f.b0, 0.013359200027856505, 1e-15);
    EXPECT_NEAR(f.b1, 0.02671840005571301, 1e-15);
    EXPECT_NEAR(f.b2, 0.013359200027856505, 1e-15);
    EXPECT_NEAR(f.a1, -1.6474599810769768, 1e-14);
    EXPECT_NEAR(f.a2, 0.7008967811884027, 1e-14);
}

TEST(ButterworthLowpass, RejectsCutoffOutsideNyquist) {
    EXPECT_THROW(butterworth_lowpass(0.0, kFs), ValidationError);
    EXPECT_THROW(butterworth_lowpass(125.0, kFs), ValidationError);
    EXPECT_THROW(butterworth_lowpass(10.0, 0.0), ValidationError);
}

TEST(MagnitudeResponse, HalfPowerAtCutoff) {
    const Biquad f = butterworth_lowpass(10.0, kFs);
    EXPECT_NEAR(magnitude_response(f, 0.0, kFs), 1.0, 1e-14);
    EXPECT_NEAR(std::pow(magnitude_response(f, 10.0, kFs), 2), 0.5, 1e-12);
}

TEST(MagnitudeResponse, ForwardBackwardGain) {
    const Biquad f = butterworth_lowpass(10.0, kFs);
    const double g1 = std::pow(magnitude_response(f, 1.0, kFs), 2);
    const double g25 = std::pow(magnitude_response(f, 25.0, kFs), 2);
    EXPECT_NEAR(g1, 0.99990208, 1e-8);
    EXPECT_NEAR(g25, 0.0223409, 1e-7);
    EXPECT_GE(g1, 0.99);
    EXPECT_LE(g25, 0.03);
}

TEST(Filtfilt, MatchesReferenceImplementation) {
    // scipy.signal.filtfilt(b, a, x, padtype='odd', padlen=6)
    const auto y = filtfilt(butterworth_lowpass(10.0, kFs), sine(3.0, 300, 0.5));
    EXPECT_NEAR(y[0], 0.4962847238700647, 1e-12);
    EXPECT_NEAR(y[1], 0.5654773790571006, 1e-12);
    EXPECT_NEAR(y[150], -0.44355930955700756, 1e-12);
    EXPECT_NEAR(y[299], 0.041999671430763226, 1e-12);
}

TEST(Filtfilt, ConstantSignalUnchanged) {
    const std::vector<double> x(100, 0.3125);
    for (double v : filtfilt(butterworth_lowpass(10.0, kFs), x)) EXPECT_NEAR(v, 0.3125, 1e-9);
}

TEST(Filtfilt, PassbandAndStopband) {
    const Biquad f = butterworth_lowpass(10.0, kFs);
    const std::size_t n = 2500;
    const auto lo = sine(1.0, n);
    const auto hi = sine(25.0, n);
    const auto ylo = filtfilt(f, lo);
    const auto yhi = filtfilt(f, hi);
    // Interior only, away from edge transients.
    EXPECT_GE(rms(ylo, 250, n - 250) / rms(lo, 250, n - 250), 0.99);
    EXPECT_LE(rms(yhi, 250, n - 250) / rms(hi, 250, n - 250), 0.03);
}

TEST(Filtfilt, ZeroPhaseLag) {
    const std::size_t n = 1000;
    const auto x = sine(2.0, n);
    const auto y = filtfilt(butterworth_lowpass(10.0, kFs), x);
    int best_lag = 99;
    double best = -1e300;
    for (int lag = -10; lag <= 10; ++lag) {
        double c = 0.0;
        for (std::size_t i = 100; i + 100 < n; ++i) c += x[i] * y[i + lag];
        if (c > best) {
            best = c;
            best_lag = lag;
        }
    }
    EXPECT_EQ(best_lag, 0);
}

TEST(Filtfilt, Linear) {
    const Biquad f = butterworth_lowpass(10.0, kFs);
    const auto a = sine(2.0, 200, 0.1);
    const auto b = sine(17.0, 200, -0.4);
    std::vector<double> sum(200);
    for (std::size_t i = 0; i < 200; ++i) sum[i] = 2.0 * a[i] - 3.0 * b[i];
    const auto ya = filtfilt(f, a), yb = filtfilt(f, b), ys = filtfilt(f, sum);
    for (std::size_t i = 0; i < 200; ++i) EXPECT_NEAR(ys[i], 2.0 * ya[i] - 3.0 * yb[i], 1e-12);
}

TEST(Filtfilt, RequiresMoreThanPadLength) {
    EXPECT_THROW(filtfilt(butterworth_lowpass(10.0, kFs), std::vector<double>(6, 1.0)), ValidationError);
}

}  // namespace
}  // namespace vac
