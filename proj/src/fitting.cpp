#include "vac/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "vac/errors.hpp"
#include "vac/perception.hpp"
#include "vac/units.hpp"

namespace vac {
namespace {

struct Layout {
    std::vector<std::string> participants;
    std::map<std::string, Eigen::Index> index;
    bool has_beta = true;

    Eigen::Index ipd_slot(const std::string& pid) const { return index.at(pid) + (has_beta ? 1 : 0); }
    double beta(const Eigen::VectorXd& p) const { return has_beta ? p[0] : 0.0; }
};

Layout make_layout(const ModelSpec& spec, const FitDataset& data) {
    Layout l;
    l.participants = data.participants();
    for (std::size_t i = 0; i < l.participants.size(); ++i) l.index[l.participants[i]] = static_cast<Eigen::Index>(i);
    l.has_beta = spec.variant == ModelVariant::with_offset;
    return l;
}

std::vector<std::size_t> rows_of(const FitDataset& data, SplitPart part) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.observations.size(); ++i)
        if (data.split.at(i) == part) rows.push_back(i);
    return rows;
}

void check_dimension(const Layout& l, const Eigen::VectorXd& params) {
    const auto expected = static_cast<Eigen::Index>(l.participants.size()) + (l.has_beta ? 1 : 0);
    if (params.size() != expected) {
        throw ValidationError("params", "expected " + std::to_string(expected) + " parameters, got " +
                                            std::to_string(params.size()));
    }
}

double total_sum_of_squares(const FitDataset& data, SplitPart part) {
    const auto rows = rows_of(data, part);
    if (rows.empty()) return 0.0;
    double mean = 0.0;
    for (auto i : rows) mean += data.observations[i].distance_error;
    mean /= static_cast<double>(rows.size());
    double tss = 0.0;
    for (auto i : rows) {
        const double d = data.observations[i].distance_error - mean;
        tss += d * d;
    }
    return tss;
}

double squared_norm(const Eigen::VectorXd& r) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) s += r[i] * r[i];
    return s;
}

}  // namespace

std::vector<std::string> FitDataset::participants() const {
    std::set<std::string> ids;
    for (const auto& o : observations) ids.insert(o.participant_id);
    return {ids.begin(), ids.end()};
}

std::vector<std::string> FitDataset::conditions() const {
    std::set<std::string> ids;
    for (const auto& o : observations) ids.insert(o.condition);
    return {ids.begin(), ids.end()};
}

std::size_t FitDataset::count(SplitPart part) const {
    return static_cast<std::size_t>(std::count(split.begin(), split.end(), part));
}

FitDataset FitDataset::subset(std::string_view condition) const {
    FitDataset out;
    out.split_seed = split_seed;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        if (observations[i].condition == condition) {
            out.observations.push_back(observations[i]);
            out.split.push_back(split.at(i));
        }
    }
    return out;
}

FitDataset make_split(std::vector<Observation> observations, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ValidationError("split", "train fraction must lie in (0, 1)");
    }
    FitDataset data;
    data.split_seed = seed;
    data.observations = std::move(observations);
    data.split.assign(data.observations.size(), SplitPart::test);

    std::map<std::pair<std::string, double>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < data.observations.size(); ++i) {
        const auto& o = data.observations[i];
        strata[{o.participant_id + '\x1f' + o.condition, o.target_distance}].push_back(i);
    }
    std::mt19937_64 rng(seed);
    for (auto& [key, rows] : strata) {
        for (std::size_t i = rows.size(); i > 1; --i) {
            std::swap(rows[i - 1], rows[rng() % i]);
        }
        const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(rows.size())));
        for (std::size_t k = 0; k < n_train; ++k) data.split[rows[k]] = SplitPart::train;
    }
    return data;
}

std::string_view to_string(ModelVariant v) {
    return v == ModelVariant::with_offset ? "with_offset" : "zero_offset";
}

std::size_t ModelSpec::num_parameters(std::size_t num_participants) const {
    return num_participants + (variant == ModelVariant::with_offset ? 1 : 0);
}

Eigen::VectorXd residuals(const ModelSpec& spec, const Eigen::VectorXd& params, const FitDataset& data,
                          SplitPart part) {
    const Layout l = make_layout(spec, data);
    check_dimension(l, params);
    const auto rows = rows_of(data, part);
    Eigen::VectorXd r(static_cast<Eigen::Index>(rows.size()));
    const double beta = l.beta(params);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Observation& o = data.observations[rows[k]];
        const double ipd = params[l.ipd_slot(o.participant_id)];
        try {
            const auto pred = predicted_reach_error_gradient(o.target_distance, ipd, beta, spec.view_from_world);
            r[static_cast<Eigen::Index>(k)] = o.distance_error - pred.value;
        } catch (const DomainError&) {
            r[static_cast<Eigen::Index>(k)] = std::numeric_limits<double>::infinity();
        }
    }
    return r;
}

Eigen::MatrixXd residual_jacobian(const ModelSpec& spec, const Eigen::VectorXd& params, const FitDataset& data,
                                  SplitPart part) {
    const Layout l = make_layout(spec, data);
    check_dimension(l, params);
    const auto rows = rows_of(data, part);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), params.size());
    const double beta = l.beta(params);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Observation& o = data.observations[rows[k]];
        const Eigen::Index slot = l.ipd_slot(o.participant_id);
        const auto row = static_cast<Eigen::Index>(k);
        try {
            const auto g = predicted_reach_error_gradient(o.target_distance, params[slot], beta, spec.view_from_world);
            if (l.has_beta) J(row, 0) = -g.d_beta;
            J(row, slot) = -g.d_ipd;
        } catch (const DomainError&) {
            // left at zero; the residual is already infinite
        }
    }
    return J;
}

LeastSquaresProblem make_problem(const ModelSpec& spec, const FitDataset& data) {
    const Layout l = make_layout(spec, data);
    const auto n = static_cast<Eigen::Index>(l.participants.size()) + (l.has_beta ? 1 : 0);
    LeastSquaresProblem p;
    p.num_residuals = static_cast<Eigen::Index>(data.count(SplitPart::train));
    p.residuals = [&spec, &data](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
        r = residuals(spec, x, data, SplitPart::train);
    };
    p.jacobian = [&spec, &data](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
        J = residual_jacobian(spec, x, data, SplitPart::train);
    };
    p.lower = Eigen::VectorXd::Constant(n, spec.ipd_lower);
    p.upper = Eigen::VectorXd::Constant(n, spec.ipd_upper);
    if (l.has_beta) {
        p.lower[0] = -spec.beta_bound;
        p.upper[0] = spec.beta_bound;
    }
    return p;
}

Eigen::VectorXd default_initial_params(const ModelSpec& spec, std::size_t num_participants) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(spec.num_parameters(num_participants)),
                                                  spec.initial_ipd);
    if (spec.variant == ModelVariant::with_offset) x[0] = spec.initial_beta;
    return x;
}

double bic(double rss, std::size_t n, std::size_t k) {
    if (n <= k) {
        throw ValidationError("observations", "BIC needs more observations (" + std::to_string(n) +
                                                  ") than parameters (" + std::to_string(k) + ")");
    }
    const double nn = static_cast<double>(n);
    const double mean_sq = std::max(rss / nn, std::numeric_limits<double>::min());
    return nn * std::log(mean_sq) + static_cast<double>(k) * std::log(nn);
}

double r_squared(double rss, double tss) {
    if (tss > 0.0) return 1.0 - rss / tss;
    return rss == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
}

GoodnessOfFit goodness_of_fit(const FitResult& result, const FitDataset& data, const ModelSpec& spec) {
    const double rss_train = squared_norm(residuals(spec, result.params, data, SplitPart::train));
    const double rss_test = squared_norm(residuals(spec, result.params, data, SplitPart::test));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto bic_or_nan = [&](double rss, std::size_t n) {
        return n > result.num_parameters ? bic(rss, n, result.num_parameters) : nan;
    };
    GoodnessOfFit g;
    g.bic_train = bic_or_nan(rss_train, data.count(SplitPart::train));
    g.bic_test = bic_or_nan(rss_test, data.count(SplitPart::test));
    g.r2_train = data.count(SplitPart::train) > 0 ? r_squared(rss_train, total_sum_of_squares(data, SplitPart::train)) : nan;
    g.r2_test = data.count(SplitPart::test) > 0 ? r_squared(rss_test, total_sum_of_squares(data, SplitPart::test)) : nan;
    return g;
}

FitResult fit(const ModelSpec& spec, const FitDataset& data, std::optional<Eigen::VectorXd> init) {
    if (data.split.size() != data.observations.size()) {
        throw ValidationError("split", "every observation needs a train/test assignment");
    }
    const Layout l = make_layout(spec, data);
    FitResult result;
    result.variant = spec.variant;
    result.participants = l.participants;
    result.num_parameters = spec.num_parameters(l.participants.size());
    result.n_train = data.count(SplitPart::train);
    result.n_test = data.count(SplitPart::test);

    Eigen::VectorXd x0 = init ? *init : default_initial_params(spec, l.participants.size());
    check_dimension(l, x0);

    std::map<std::string, std::set<double>> distances;
    for (std::size_t i = 0; i < data.observations.size(); ++i) {
        if (data.split[i] == SplitPart::train) {
            distances[data.observations[i].participant_id].insert(data.observations[i].target_distance);
        }
    }
    for (const auto& pid : l.participants) {
        const auto it = distances.find(pid);
        if (it == distances.end()) {
            result.warnings.push_back("participant " + pid + " has no training rows; IPD stays at its start value");
        } else if (it->second.size() < 2 && l.has_beta) {
            result.warnings.push_back("participant " + pid +
                                      " has a single target distance; offset and IPD are not separately identifiable");
        }
    }

    const LeastSquaresProblem problem = make_problem(spec, data);
    const LmResult lm = levenberg_marquardt(problem, x0, spec.lm);
    result.params = lm.x;
    result.iterations = lm.iterations;
    result.converged = lm.converged;
    result.stop_reason = lm.stop_reason;
    result.beta = l.beta(lm.x);
    for (const auto& pid : l.participants) result.ipds.push_back(lm.x[l.ipd_slot(pid)]);

    const auto n_res = static_cast<std::size_t>(problem.num_residuals);
    if (l.has_beta && n_res > result.num_parameters) {
        // Linearised covariance sigma^2 (J^T J)^-1 at the solution, via SVD of J.
        Eigen::MatrixXd J(problem.num_residuals, lm.x.size());
        problem.jacobian(lm.x, J);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinV);
        const auto& s = svd.singularValues();
        const double sigma2 = lm.rss / static_cast<double>(n_res - result.num_parameters);
        double var = 0.0;
        for (Eigen::Index k = 0; k < s.size(); ++k) {
            const double v = svd.matrixV()(0, k);
            var += s[k] > 0.0 ? v * v / (s[k] * s[k]) : (v != 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        }
        result.beta_se = std::sqrt(sigma2 * var);
        if (result.beta_se > 0.1 * std::abs(result.beta)) {
            std::ostringstream msg;
            msg << "offset is weakly identified against the IPDs: standard error " << rad_to_deg(result.beta_se)
                << " deg for an estimate of " << rad_to_deg(result.beta) << " deg";
            result.warnings.push_back(msg.str());
        }
    }

    result.rss_train = lm.rss;
    result.rss_test = squared_norm(residuals(spec, lm.x, data, SplitPart::test));
    const GoodnessOfFit g = goodness_of_fit(result, data, spec);
    result.bic_train = g.bic_train;
    result.bic_test = g.bic_test;
    result.r2_train = g.r2_train;
    result.r2_test = g.r2_test;
    return result;
}

std::vector<ModelComparison> compare_models(const FitDataset& data, const ModelSpec& base) {
    std::vector<ModelComparison> out;
    for (const auto& condition : data.conditions()) {
        const FitDataset subset = data.subset(condition);
        ModelSpec with = base;
        with.variant = ModelVariant::with_offset;
        ModelSpec without = base;
        without.variant = ModelVariant::zero_offset;
        ModelComparison c;
        c.condition = condition;
        c.with_offset = fit(with, subset);
        c.zero_offset = fit(without, subset);
        c.selected = c.with_offset.bic_test < c.zero_offset.bic_test ? ModelVariant::with_offset
                                                                      : ModelVariant::zero_offset;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace vac
