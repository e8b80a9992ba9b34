#pragma once

// Least-squares estimation of the vergence-offset model: one offset shared by
// all participants plus one IPD per participant, fitted to distance errors.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vac/levenberg_marquardt.hpp"
#include "vac/pose.hpp"

namespace vac {

struct Observation {
    std::string participant_id;
    std::string condition;
    double target_distance = 0.0;  // reach distance from home, m
    double distance_error = 0.0;   // m
};

enum class SplitPart : std::uint8_t { train, test };

struct FitDataset {
    std::vector<Observation> observations;
    std::vector<SplitPart> split;  // parallel to observations
    std::uint64_t split_seed = 0;

    /// Sorted distinct participant ids.
    std::vector<std::string> participants() const;
    std::size_t count(SplitPart part) const;
    /// Observations of one condition, keeping their split assignment.
    FitDataset subset(std::string_view condition) const;
    std::vector<std::string> conditions() const;
};

/// Assigns train/test stratified by (participant, condition, target distance): each
/// stratum of size n gets round(train_fraction * n) training rows, chosen by
/// a seeded Fisher-Yates shuffle. Identical seeds give identical splits.
FitDataset make_split(std::vector<Observation> observations, double train_fraction, std::uint64_t seed);

enum class ModelVariant { with_offset, zero_offset };

std::string_view to_string(ModelVariant v);

struct ModelSpec {
    ModelVariant variant = ModelVariant::with_offset;
    RigidTransform view_from_world = default_eye_pose();
    double ipd_lower = 0.045;
    double ipd_upper = 0.080;
    double beta_bound = 0.05;     // |beta| <= beta_bound
    double initial_ipd = 0.063;
    double initial_beta = 0.0;
    LmOptions lm;

    /// Free parameters: [beta, ipd_1..ipd_N] or [ipd_1..ipd_N].
    std::size_t num_parameters(std::size_t num_participants) const;
};

/// r_i = observed DE - predicted DE for the rows in `part`. Rows whose
/// geometry is infeasible at `params` get an infinite residual.
Eigen::VectorXd residuals(const ModelSpec& spec, const Eigen::VectorXd& params, const FitDataset& data,
                          SplitPart part = SplitPart::train);

/// Analytic Jacobian of residuals() with respect to `params`.
Eigen::MatrixXd residual_jacobian(const ModelSpec& spec, const Eigen::VectorXd& params, const FitDataset& data,
                                  SplitPart part = SplitPart::train);

/// The training-split problem handed to the optimizer.
LeastSquaresProblem make_problem(const ModelSpec& spec, const FitDataset& data);

struct FitResult {
    ModelVariant variant = ModelVariant::with_offset;
    double beta = 0.0;     // rad
    double beta_se = 0.0;  // rad, linearised standard error (with-offset only)
    std::vector<std::string> participants;
    std::vector<double> ipds;  // m, parallel to participants
    Eigen::VectorXd params;
    std::size_t num_parameters = 0;
    std::size_t n_train = 0, n_test = 0;
    double rss_train = 0.0, rss_test = 0.0;
    double r2_train = 0.0, r2_test = 0.0;
    double bic_train = 0.0, bic_test = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
    std::vector<std::string> warnings;
};

/// Default start: beta = initial_beta, every IPD = initial_ipd.
Eigen::VectorXd default_initial_params(const ModelSpec& spec, std::size_t num_participants);

/// Levenberg-Marquardt fit on the training split, then goodness of fit on
/// both splits.
FitResult fit(const ModelSpec& spec, const FitDataset& data, std::optional<Eigen::VectorXd> init = std::nullopt);

/// BIC is NaN for a split with no more rows than parameters, r^2 for an empty one.
struct GoodnessOfFit {
    double bic_train = 0.0, bic_test = 0.0;
    double r2_train = 0.0, r2_test = 0.0;
};

/// n ln(RSS/n) + k ln(n). Throws ValidationError when n <= k.
double bic(double rss, std::size_t n, std::size_t k);
/// 1 - RSS/TSS.
double r_squared(double rss, double tss);

GoodnessOfFit goodness_of_fit(const FitResult& result, const FitDataset& data, const ModelSpec& spec);

struct ModelComparison {
    std::string condition;
    FitResult with_offset;
    FitResult zero_offset;
    ModelVariant selected = ModelVariant::with_offset;  // lower test BIC
};

/// Fits both variants on each condition's rows (shared split) and selects
/// the one with the lower test BIC.
std::vector<ModelComparison> compare_models(const FitDataset& data, const ModelSpec& base);

}  // namespace vac
