#include "vac/perception.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vac/errors.hpp"
#include "vac/units.hpp"

namespace vac {
namespace {

const EyeGeometry kEyes64(0.064);
const PerturbationParams kBeta022{deg_to_rad(0.22), std::nullopt};

ViewingConfiguration fixated(const ScenePoint& p, const EyeGeometry& eyes = kEyes64) {
    return {eyes, FixationState(p, eyes), p};
}

TEST(PerturbationParams, RejectsImplausibleOffset) {
    EXPECT_THROW((PerturbationParams{0.05, std::nullopt}.validate()), ValidationError);
    EXPECT_THROW((PerturbationParams{-0.06, std::nullopt}.validate()), ValidationError);
    EXPECT_NO_THROW(kBeta022.validate());
}

TEST(PerturbedVergence, AddsOffset) {
    EXPECT_EQ(perturbed_vergence(0.1, {}), 0.1);
    EXPECT_NEAR(rad_to_deg(perturbed_vergence(deg_to_rad(8.1350), kBeta022)), 8.3550, 1e-12);
    EXPECT_LT(perturbed_vergence(0.1, {0.001, {}}), perturbed_vergence(0.1, {0.002, {}}));
}

TEST(EffectiveTargetAngle, Examples) {
    const double tau = subtended_angle({0, 0, 0.5}, kEyes64);
    EXPECT_NEAR(effective_target_angle(tau, 0.0, kBeta022), tau + kBeta022.beta_offset, 1e-16);
    EXPECT_EQ(effective_target_angle(0.2, 0.05, {}), 0.2 - 0.05);
    // phi(0.4 m) - delta = tau(0.5 m); plus 0.22 deg -> 7.543871151 deg.
    const double phi = subtended_angle({0, 0, 0.4}, kEyes64);
    EXPECT_NEAR(rad_to_deg(effective_target_angle(phi, phi - tau, kBeta022)), 7.543871151039605709, 1e-12);
    EXPECT_THROW(effective_target_angle(0.01, 0.02, {}), DomainError);
}

TEST(PerceivedDistance, IdentityWithoutOffset) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lateral(-0.3, 0.3), depth(0.2, 2.0);
    for (int i = 0; i < 2000; ++i) {
        const ScenePoint target{lateral(rng), lateral(rng), depth(rng)};
        const ScenePoint fix{lateral(rng), lateral(rng), depth(rng)};
        const ViewingConfiguration c{kEyes64, FixationState(fix, kEyes64), target};
        EXPECT_NEAR(perceived_distance(c, {}) / target.norm(), 1.0, 1e-12);
        EXPECT_NEAR(distance_error(c, {}), 0.0, 1e-12);
    }
}

TEST(PerceivedDistance, DeskExample) {
    // tau = 8.135039 deg, tau_hat = 8.355039 deg, d_hat = 0.032 / tan(tau_hat / 2).
    const auto c = fixated({0, 0, 0.45});
    EXPECT_NEAR(perceived_distance(c, kBeta022), 0.43811041764250836, 1e-13);
    EXPECT_NEAR(distance_error(c, kBeta022), -0.011889582357491643, 1e-13);
}

TEST(PerceivedDistance, FixationDoesNotChangeThePercept) {
    const ScenePoint target{0.02, -0.1, 0.6};
    const double reference = perceived_distance(fixated(target), kBeta022);
    for (double zf : {0.3, 0.5, 0.9}) {
        const ViewingConfiguration c{kEyes64, FixationState({0, 0, zf}, kEyes64), target};
        EXPECT_NEAR(perceived_distance(c, kBeta022), reference, 1e-14);
    }
}

TEST(DistanceError, UndershootGrowsWithDistance) {
    double previous = 0.0;
    for (int i = 0; i <= 50; ++i) {
        const double d = 0.3 + 0.01 * i;
        const double e = distance_error(fixated({0, 0, d}), kBeta022);
        EXPECT_LT(e, 0.0);
        if (i > 0) EXPECT_GT(std::abs(e), std::abs(previous)) << d;
        previous = e;
    }
}

TEST(DistanceError, FiniteDifferenceSlopeOfMagnitudeIsPositive) {
    const double h = 1e-5;
    for (double d = 0.2; d <= 2.0; d += 0.05) {
        const double lo = std::abs(distance_error(fixated({0, 0, d - h}), kBeta022));
        const double hi = std::abs(distance_error(fixated({0, 0, d + h}), kBeta022));
        EXPECT_GT((hi - lo) / (2 * h), 0.0) << d;
    }
}

TEST(OffsetAsFixationShift, ZeroWithoutOffset) {
    EXPECT_NEAR(offset_as_fixation_shift({}, 0.7, kEyes64), 0.0, 1e-16);
}

TEST(OffsetAsFixationShift, MonotoneInDistance) {
    const EyeGeometry eyes(0.063);
    double previous = 0.0;
    for (double d = 0.3; d <= 1.5; d += 0.05) {
        const double s = offset_as_fixation_shift(kBeta022, d, eyes);
        EXPECT_GT(s, previous);
        previous = s;
    }
}

TEST(OffsetAsFixationShift, ReportedEquivalenceImpliesFocalDistanceNear071m) {
    // 0.22 deg with a 63 mm IPD corresponds to a 2.93 cm shift at ~0.7074 m.
    const EyeGeometry eyes(0.063);
    const double focal = fixation_distance_for_shift(kBeta022, 0.0293, eyes, 0.5, 1.0);
    EXPECT_NEAR(focal, 0.70744103307213715, 1e-9);
    EXPECT_NEAR(offset_as_fixation_shift(kBeta022, focal, eyes), 0.0293, 1e-12);
    EXPECT_THROW(fixation_distance_for_shift(kBeta022, 0.5, eyes, 0.5, 1.0), ValidationError);
}

TEST(PredictEndpoint, MatchesPerceivedDistanceOnAxis) {
    const auto p = predict_endpoint(0.45, kBeta022, kEyes64);
    EXPECT_NEAR(p.error, -0.011889582357491643, 1e-13);
    for (double d : {0.2, 0.45, 0.8}) {
        EXPECT_NEAR(predict_endpoint(d, kBeta022, kEyes64).error, distance_error(fixated({0, 0, d}), kBeta022), 1e-15);
        EXPECT_NEAR(predict_endpoint(d, {}, kEyes64).error, 0.0, 1e-15);
    }
}

TEST(PredictEndpoint, DisparityDifferenceIsMinusBetaAtEveryDistance) {
    for (double d = 0.2; d <= 1.5; d += 0.1) {
        const auto p = predict_endpoint(d, kBeta022, kEyes64);
        EXPECT_NEAR(disparity_difference({0, 0, p.endpoint}, {0, 0, d}, kEyes64), -kBeta022.beta_offset, 1e-15);
    }
}

TEST(PerceivedPoint, KeepsLateralCoordinates) {
    const ScenePoint p{0.1, -0.3, 0.5};
    const ScenePoint q = perceived_point(p, kEyes64, kBeta022);
    EXPECT_EQ(q.x, p.x);
    EXPECT_EQ(q.y, p.y);
    EXPECT_NEAR(q.norm(), perceived_distance(fixated(p), kBeta022), 1e-14);
    EXPECT_THROW(perceived_point({0.0, 0.5, 0.005}, kEyes64, {0.04, {}}), DomainError);
}

TEST(PredictedReachError, DeskGeometryReference) {
    // Eye 0.30 m behind and 0.35 m above home; 63 mm IPD; 0.22 deg.
    const EyeGeometry eyes(0.063);
    const auto pose = default_eye_pose();
    const double expected_mm[] = {-27.039466955696126, -29.841300394161944, -32.969258851827879, -36.406954065282265};
    const double reach[] = {0.20, 0.25, 0.30, 0.35};
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(m_to_mm(predicted_reach_error(reach[i], eyes, kBeta022, pose)), expected_mm[i], 1e-9);
    }
}

TEST(PredictedReachError, AnalyticGradientMatchesFiniteDifferences) {
    const auto pose = default_eye_pose();
    for (double reach : {0.2, 0.3, 0.35}) {
        for (double ipd : {0.05, 0.063, 0.075}) {
            for (double beta : {0.0, 0.002, 0.01}) {
                const auto g = predicted_reach_error_gradient(reach, ipd, beta, pose);
                EXPECT_NEAR(g.value, predicted_reach_error(reach, EyeGeometry(ipd), {beta, {}}, pose), 1e-15);
                const double hb = 1e-7, hi = 1e-7;
                const double db = (predicted_reach_error_gradient(reach, ipd, beta + hb, pose).value -
                                   predicted_reach_error_gradient(reach, ipd, beta - hb, pose).value) / (2 * hb);
                const double di = (predicted_reach_error_gradient(reach, ipd + hi, beta, pose).value -
                                   predicted_reach_error_gradient(reach, ipd - hi, beta, pose).value) / (2 * hi);
                EXPECT_NEAR(g.d_beta, db, 1e-6);
                EXPECT_NEAR(g.d_ipd, di, 1e-6);
            }
        }
    }
}

TEST(PredictionCurve, RowsFollowPredictEndpoint) {
    const std::vector<double> d{0.45, 0.5, 0.55};
    const auto rows = prediction_curve(d, kBeta022, kEyes64);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(rows[i].predicted_error, predict_endpoint(d[i], kBeta022, kEyes64).error);
}

}  // namespace
}  // namespace vac
