#include "vac/fitting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vac/errors.hpp"
#include "vac/perception.hpp"
#include "vac/units.hpp"

namespace vac {
namespace {

const double kBeta = deg_to_rad(0.22);
const std::vector<double> kIpds{0.058, 0.061, 0.063, 0.066, 0.068};
const std::vector<double> kDistances{0.20, 0.25, 0.30, 0.35};

std::string pid(std::size_t i) { return "P0" + std::to_string(i + 1); }

// Observations generated directly from the model (optionally with noise).
std::vector<Observation> model_observations(double beta, double noise_sd, std::uint64_t seed, int reps = 4,
                                            const std::string& condition = "online/original") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sd > 0 ? noise_sd : 1.0);
    std::vector<Observation> obs;
    for (std::size_t p = 0; p < kIpds.size(); ++p) {
        for (double d : kDistances) {
            const double de = predicted_reach_error(d, EyeGeometry(kIpds[p]), {beta, {}}, default_eye_pose());
            for (int r = 0; r < reps; ++r) {
                obs.push_back({pid(p), condition, d, de + (noise_sd > 0 ? noise(rng) : 0.0)});
            }
        }
    }
    return obs;
}

Eigen::VectorXd truth(double beta) {
    Eigen::VectorXd x(1 + kIpds.size());
    x[0] = beta;
    for (std::size_t i = 0; i < kIpds.size(); ++i) x[1 + i] = kIpds[i];
    return x;
}

TEST(MakeSplit, StratifiedAndDeterministic) {
    const auto obs = model_observations(kBeta, 0.0, 1, 10);
    const auto a = make_split(obs, 0.7, 42);
    const auto b = make_split(obs, 0.7, 42);
    const auto c = make_split(obs, 0.7, 43);
    EXPECT_EQ(a.split, b.split);
    EXPECT_NE(a.split, c.split);
    EXPECT_EQ(a.count(SplitPart::train), 7u * kIpds.size() * kDistances.size());
    // Every (participant, distance) stratum contributes 7 of its 10 rows.
    for (std::size_t p = 0; p < kIpds.size(); ++p) {
        for (double d : kDistances) {
            int train = 0;
            for (std::size_t i = 0; i < obs.size(); ++i) {
                if (obs[i].participant_id == pid(p) && obs[i].target_distance == d && a.split[i] == SplitPart::train) ++train;
            }
            EXPECT_EQ(train, 7);
        }
    }
    EXPECT_THROW(make_split(obs, 1.0, 1), ValidationError);
}

TEST(FitDataset, SubsetsAndParticipants) {
    auto obs = model_observations(kBeta, 0.0, 1, 2, "a");
    const auto more = model_observations(0.0, 0.0, 1, 2, "b");
    obs.insert(obs.end(), more.begin(), more.end());
    const auto data = make_split(obs, 0.5, 3);
    EXPECT_EQ(data.conditions(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(data.participants().size(), kIpds.size());
    const auto a = data.subset("a");
    EXPECT_EQ(a.observations.size(), obs.size() / 2);
    for (const auto& o : a.observations) EXPECT_EQ(o.condition, "a");
}

TEST(Residuals, ZeroAtTheGeneratingParameters) {
    const auto data = make_split(model_observations(kBeta, 0.0, 1), 0.7, 1);
    const ModelSpec spec;
    EXPECT_LT(residuals(spec, truth(kBeta), data).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(residuals(spec, truth(kBeta), data, SplitPart::test).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ResidualJacobian, MatchesFiniteDifferences) {
    const auto data = make_split(model_observations(kBeta, 0.002, 5), 0.7, 1);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ipd(0.05, 0.075), beta(-0.01, 0.01);
    for (const ModelVariant variant : {ModelVariant::with_offset, ModelVariant::zero_offset}) {
        ModelSpec spec;
        spec.variant = variant;
        const auto problem = make_problem(spec, data);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd x = default_initial_params(spec, kIpds.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = ipd(rng);
            if (variant == ModelVariant::with_offset) x[0] = beta(rng);
            const Eigen::MatrixXd J = residual_jacobian(spec, x, data);
            EXPECT_LT((finite_difference_jacobian(problem, x) - J).cwiseAbs().maxCoeff(), 1e-5);
        }
    }
}

TEST(Fit, NoiseFreeDataRecoversParametersExactly) {
    const auto data = make_split(model_observations(kBeta, 0.0, 1), 0.7, 1);
    const auto res = fit(ModelSpec{}, data);
    EXPECT_TRUE(res.converged) << res.stop_reason;
    EXPECT_NEAR(res.beta, kBeta, 1e-8);
    for (std::size_t i = 0; i < kIpds.size(); ++i) EXPECT_NEAR(res.ipds[i], kIpds[i], 1e-8);
    EXPECT_LT(res.rss_train, 1e-20);
    EXPECT_NEAR(res.r2_test, 1.0, 1e-10);
}

TEST(Fit, BoxCornerStartsReachTheSameOptimum) {
    const auto data = make_split(model_observations(kBeta, 0.0, 1), 0.7, 1);
    const ModelSpec spec;
    const double betas[] = {-spec.beta_bound, spec.beta_bound};
    const double ipds[] = {spec.ipd_lower, spec.ipd_upper};
    for (double b : betas) {
        for (double ipd : ipds) {
            Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1 + kIpds.size(), ipd);
            x0[0] = b;
            const auto res = fit(spec, data, x0);
            EXPECT_NEAR(res.beta, kBeta, 1e-6) << b << " " << ipd;
            for (std::size_t i = 0; i < kIpds.size(); ++i) EXPECT_NEAR(res.ipds[i], kIpds[i], 1e-6);
        }
    }
}

TEST(Fit, ZeroOffsetVariantPredictsNoError) {
    const auto data = make_split(model_observations(kBeta, 0.0, 1), 0.7, 1);
    ModelSpec spec;
    spec.variant = ModelVariant::zero_offset;
    const auto res = fit(spec, data);
    EXPECT_EQ(res.beta, 0.0);
    EXPECT_EQ(res.num_parameters, kIpds.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < data.observations.size(); ++i) {
        if (data.split[i] == SplitPart::train) ss += std::pow(data.observations[i].distance_error, 2);
    }
    EXPECT_NEAR(res.rss_train, ss, 1e-15);
}

TEST(Fit, NoisyDataRecoversTheOffsetScaleTogetherWithIpd) {
    // Only beta / ipd is well determined; check that ratio per participant.
    const auto data = make_split(model_observations(kBeta, 0.002, 11, 40), 0.7, 1);
    const auto res = fit(ModelSpec{}, data);
    EXPECT_TRUE(res.converged);
    for (std::size_t i = 0; i < kIpds.size(); ++i) {
        EXPECT_NEAR((res.beta / res.ipds[i]) / (kBeta / kIpds[i]), 1.0, 0.05);
    }
    bool flagged = false;
    for (const auto& w : res.warnings) flagged |= w.find("weakly identified") != std::string::npos;
    EXPECT_TRUE(flagged);
}

TEST(Fit, WarnsForSingleDistanceParticipants) {
    std::vector<Observation> obs;
    for (const auto& o : model_observations(kBeta, 0.0, 1)) {
        if (o.participant_id != "P01" || o.target_distance == 0.25) obs.push_back(o);
    }
    const auto res = fit(ModelSpec{}, make_split(obs, 0.5, 2));
    bool found = false;
    for (const auto& w : res.warnings) found |= w.find("P01 has a single target distance") != std::string::npos;
    EXPECT_TRUE(found);
}

TEST(GoodnessOfFit, BicAndRSquared) {
    EXPECT_NEAR(bic(2.0, 100, 3), 100 * std::log(0.02) + 3 * std::log(100.0), 1e-12);
    EXPECT_THROW(bic(1.0, 3, 3), ValidationError);
    EXPECT_TRUE(std::isfinite(bic(0.0, 10, 2)));
    EXPECT_EQ(r_squared(0.0, 4.0), 1.0);
    EXPECT_EQ(r_squared(1.0, 4.0), 0.75);
    EXPECT_EQ(r_squared(4.0, 4.0), 0.0);
}

TEST(GoodnessOfFit, EmptyTestSplitIsUndefined) {
    FitDataset data;
    data.observations = model_observations(kBeta, 0.0, 1);
    data.split.assign(data.observations.size(), SplitPart::train);
    const auto res = fit(ModelSpec{}, data);
    EXPECT_EQ(res.n_test, 0u);
    EXPECT_TRUE(std::isnan(res.bic_test));
    EXPECT_TRUE(std::isnan(res.r2_test));
    EXPECT_TRUE(std::isfinite(res.bic_train));
}

TEST(CompareModels, SelectsOffsetForPerturbedAndZeroForUnperturbedData) {
    auto obs = model_observations(kBeta, 0.005, 7, 48, "online/original");
    const auto ff = model_observations(0.0, 0.005 * std::sqrt(1.5), 8, 48, "feedforward/original");
    obs.insert(obs.end(), ff.begin(), ff.end());
    const auto comparisons = compare_models(make_split(obs, 0.7, 9), ModelSpec{});
    ASSERT_EQ(comparisons.size(), 2u);
    EXPECT_EQ(comparisons[0].condition, "feedforward/original");
    EXPECT_EQ(comparisons[0].selected, ModelVariant::zero_offset);
    EXPECT_EQ(comparisons[1].condition, "online/original");
    EXPECT_EQ(comparisons[1].selected, ModelVariant::with_offset);
    EXPECT_LT(comparisons[1].with_offset.bic_test, comparisons[1].zero_offset.bic_test);
}

TEST(Fit, DeterministicGivenDataAndSeed) {
    const auto obs = model_observations(kBeta, 0.005, 3, 8);
    const auto a = fit(ModelSpec{}, make_split(obs, 0.7, 4));
    const auto b = fit(ModelSpec{}, make_split(obs, 0.7, 4));
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.bic_test, b.bic_test);
}

}  // namespace
}  // namespace vac
