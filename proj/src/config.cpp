#include "vac/config.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "vac/csv.hpp"
#include "vac/errors.hpp"
#include "vac/units.hpp"

namespace vac {
namespace {

using csv::format_double;

template <typename T>
T get(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(key, e.what());
    }
}

template <typename T>
T require(const Json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(key, "required field is missing");
    return get<T>(j, key, T{});
}

VisualCondition parse_condition(const std::string& s) {
    if (s == "original") return VisualCondition::original;
    if (s == "transformed") return VisualCondition::transformed;
    throw ValidationError("conditions", "unknown condition '" + s + "'");
}

Feedback parse_feedback(const std::string& s) {
    if (s == "online") return Feedback::online;
    if (s == "feedforward") return Feedback::feedforward;
    throw ValidationError("feedbacks", "unknown feedback mode '" + s + "'");
}

void write_outcome_header(std::ostream& out) {
    out << "trial_id,participant_id,feedback,condition,target_distance_m,movement_distance_m,distance_error_m,"
           "endpoint_error_m,disparity_difference_rad,peak_velocity_mps,onset_time_s,termination_time_s,valid,"
           "rejection_reason";
}

}  // namespace

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path, 0, "cannot open file");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path, 0, e.what());
    }
}

RigidTransform eye_pose_from_json(const Json& j) {
    if (j.contains("rotation") || j.contains("translation_m")) {
        const auto rot = get<std::vector<std::vector<double>>>(j, "rotation", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
        const auto tr = get<std::vector<double>>(j, "translation_m", {0, 0, 0});
        if (rot.size() != 3 || tr.size() != 3) throw ValidationError("eye_pose", "rotation must be 3x3, translation 3");
        Eigen::Matrix3d r;
        for (int a = 0; a < 3; ++a) {
            if (rot[static_cast<std::size_t>(a)].size() != 3) throw ValidationError("eye_pose.rotation", "must be 3x3");
            for (int b = 0; b < 3; ++b) r(a, b) = rot[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        }
        return RigidTransform(r, Eigen::Vector3d(tr[0], tr[1], tr[2]));
    }
    return RigidTransform::eye_behind_above(get<double>(j, "eye_behind_home_m", kDefaultEyeBehindHome),
                                            get<double>(j, "eye_above_home_m", kDefaultEyeAboveHome));
}

Json eye_pose_to_json(const RigidTransform& pose) {
    Json rot = Json::array();
    for (int a = 0; a < 3; ++a) rot.push_back({pose.rotation()(a, 0), pose.rotation()(a, 1), pose.rotation()(a, 2)});
    return Json{{"rotation", rot},
                {"translation_m", {pose.translation().x(), pose.translation().y(), pose.translation().z()}}};
}

SimConfig sim_config_from_json(const Json& j) {
    SimConfig c;
    c.n_participants = get<std::size_t>(j, "n_participants", c.n_participants);
    const auto dist = get<std::string>(j, "ipd_distribution", "uniform");
    if (dist == "uniform") {
        c.ipd_distribution = IpdDistribution::uniform;
    } else if (dist == "normal") {
        c.ipd_distribution = IpdDistribution::normal;
    } else {
        throw ValidationError("ipd_distribution", "must be 'uniform' or 'normal'");
    }
    c.ipd_low = mm_to_m(get<double>(j, "ipd_low_mm", m_to_mm(c.ipd_low)));
    c.ipd_high = mm_to_m(get<double>(j, "ipd_high_mm", m_to_mm(c.ipd_high)));
    c.ipd_mean = mm_to_m(get<double>(j, "ipd_mean_mm", m_to_mm(c.ipd_mean)));
    c.ipd_sd = mm_to_m(get<double>(j, "ipd_sd_mm", m_to_mm(c.ipd_sd)));
    c.beta = deg_to_rad(get<double>(j, "beta_deg", rad_to_deg(c.beta)));
    c.correction_beta = deg_to_rad(get<double>(j, "correction_beta_deg", rad_to_deg(c.beta)));
    c.motor_noise_sd = mm_to_m(get<double>(j, "motor_noise_sd_mm", m_to_mm(c.motor_noise_sd)));
    c.target_distances = get<std::vector<double>>(j, "target_distances_m", c.target_distances);
    c.repetitions = get<std::size_t>(j, "repetitions", c.repetitions);
    c.movement_duration = get<double>(j, "movement_duration_s", c.movement_duration);
    if (j.contains("conditions")) {
        c.conditions.clear();
        for (const auto& s : get<std::vector<std::string>>(j, "conditions", {})) c.conditions.push_back(parse_condition(s));
    }
    if (j.contains("feedbacks")) {
        c.feedbacks.clear();
        for (const auto& s : get<std::vector<std::string>>(j, "feedbacks", {})) c.feedbacks.push_back(parse_feedback(s));
    }
    c.feedforward_variance_factor = get<double>(j, "feedforward_variance_factor", c.feedforward_variance_factor);
    c.heterogeneity = get<bool>(j, "heterogeneity", c.heterogeneity);
    if (j.contains("heterogeneity_weights")) {
        const auto w = get<std::vector<double>>(j, "heterogeneity_weights", {});
        if (w.size() != 3) throw ValidationError("heterogeneity_weights", "needs three weights for {1, 0, -0.5}");
        c.heterogeneity_weights = {w[0], w[1], w[2]};
    }
    c.sample_rate = get<double>(j, "sample_rate_hz", c.sample_rate);
    c.rest_before = get<double>(j, "rest_before_s", c.rest_before);
    c.rest_after = get<double>(j, "rest_after_s", c.rest_after);
    c.trajectory_noise_sd = mm_to_m(get<double>(j, "trajectory_noise_sd_mm", m_to_mm(c.trajectory_noise_sd)));
    c.trajectory_noise_cutoff = get<double>(j, "trajectory_noise_cutoff_hz", c.trajectory_noise_cutoff);
    if (j.contains("eye_pose")) c.view_from_world = eye_pose_from_json(j.at("eye_pose"));
    c.seed = get<std::uint64_t>(j, "seed", c.seed);
    c.validate();
    return c;
}

Json sim_config_to_json(const SimConfig& c) {
    Json conditions = Json::array(), feedbacks = Json::array();
    for (auto v : c.conditions) conditions.push_back(std::string(to_string(v)));
    for (auto v : c.feedbacks) feedbacks.push_back(std::string(to_string(v)));
    return Json{{"n_participants", c.n_participants},
                {"ipd_distribution", c.ipd_distribution == IpdDistribution::uniform ? "uniform" : "normal"},
                {"ipd_low_mm", m_to_mm(c.ipd_low)},
                {"ipd_high_mm", m_to_mm(c.ipd_high)},
                {"ipd_mean_mm", m_to_mm(c.ipd_mean)},
                {"ipd_sd_mm", m_to_mm(c.ipd_sd)},
                {"beta_deg", rad_to_deg(c.beta)},
                {"correction_beta_deg", rad_to_deg(c.correction_beta)},
                {"motor_noise_sd_mm", m_to_mm(c.motor_noise_sd)},
                {"target_distances_m", c.target_distances},
                {"repetitions", c.repetitions},
                {"movement_duration_s", c.movement_duration},
                {"conditions", conditions},
                {"feedbacks", feedbacks},
                {"feedforward_variance_factor", c.feedforward_variance_factor},
                {"heterogeneity", c.heterogeneity},
                {"heterogeneity_weights", c.heterogeneity_weights},
                {"sample_rate_hz", c.sample_rate},
                {"rest_before_s", c.rest_before},
                {"rest_after_s", c.rest_after},
                {"trajectory_noise_sd_mm", m_to_mm(c.trajectory_noise_sd)},
                {"trajectory_noise_cutoff_hz", c.trajectory_noise_cutoff},
                {"eye_pose", eye_pose_to_json(c.view_from_world)},
                {"seed", c.seed}};
}

ModelSpec model_spec_from_json(const Json& j, ModelSpec base) {
    if (j.contains("eye_pose")) base.view_from_world = eye_pose_from_json(j.at("eye_pose"));
    if (j.contains("ipd_bounds_mm")) {
        const auto b = get<std::vector<double>>(j, "ipd_bounds_mm", {});
        if (b.size() != 2 || !(b[0] > 0.0 && b[0] < b[1])) {
            throw ValidationError("ipd_bounds_mm", "needs [low, high] with 0 < low < high");
        }
        base.ipd_lower = mm_to_m(b[0]);
        base.ipd_upper = mm_to_m(b[1]);
    }
    base.beta_bound = deg_to_rad(get<double>(j, "beta_bound_deg", rad_to_deg(base.beta_bound)));
    base.initial_ipd = mm_to_m(get<double>(j, "initial_ipd_mm", m_to_mm(base.initial_ipd)));
    base.initial_beta = deg_to_rad(get<double>(j, "initial_beta_deg", rad_to_deg(base.initial_beta)));
    base.lm.max_iterations = get<int>(j, "max_iterations", base.lm.max_iterations);
    if (!(base.initial_ipd >= base.ipd_lower && base.initial_ipd <= base.ipd_upper)) {
        throw ValidationError("initial_ipd_mm", "must lie inside the IPD bounds");
    }
    if (!(std::abs(base.initial_beta) <= base.beta_bound)) {
        throw ValidationError("initial_beta_deg", "must lie inside the offset bound");
    }
    return base;
}

Json model_spec_to_json(const ModelSpec& spec) {
    return Json{{"eye_pose", eye_pose_to_json(spec.view_from_world)},
                {"ipd_bounds_mm", {m_to_mm(spec.ipd_lower), m_to_mm(spec.ipd_upper)}},
                {"beta_bound_deg", rad_to_deg(spec.beta_bound)},
                {"initial_ipd_mm", m_to_mm(spec.initial_ipd)},
                {"initial_beta_deg", rad_to_deg(spec.initial_beta)},
                {"max_iterations", spec.lm.max_iterations}};
}

std::vector<TrialInfo> trial_infos_from_json(const Json& j, const std::string& source) {
    if (!j.contains("trials") || !j.at("trials").is_array()) {
        throw DataError(source, 0, "expected an object with a 'trials' array");
    }
    std::vector<TrialInfo> out;
    for (const auto& t : j.at("trials")) {
        TrialInfo info;
        info.trial_id = require<std::string>(t, "trial_id");
        info.participant_id = get<std::string>(t, "participant_id", "");
        info.condition = get<std::string>(t, "condition", "");
        info.feedback = get<std::string>(t, "feedback", "");
        const auto target = require<std::vector<double>>(t, "target_m");
        if (target.size() != 3) throw ValidationError("target_m", "needs [x, y, z]");
        info.target = {target[0], target[1], target[2]};
        if (t.contains("go_time_s")) info.go_time = get<double>(t, "go_time_s", 0.0);
        out.push_back(std::move(info));
    }
    return out;
}

Json trial_infos_to_json(const std::vector<TrialInfo>& infos) {
    Json trials = Json::array();
    for (const auto& i : infos) {
        Json t{{"trial_id", i.trial_id},
               {"participant_id", i.participant_id},
               {"condition", i.condition},
               {"feedback", i.feedback},
               {"target_m", {i.target.x, i.target.y, i.target.z}}};
        if (i.go_time) t["go_time_s"] = *i.go_time;
        trials.push_back(std::move(t));
    }
    return Json{{"trials", trials}};
}

std::vector<Trajectory> read_trajectories_csv(std::istream& in, const std::string& source, double sample_rate) {
    const auto table = csv::Table::read(in, source);
    std::vector<Trajectory> out;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const std::string& id = table.text(r, "trial_id");
        auto [it, inserted] = index.emplace(id, out.size());
        if (inserted) out.push_back(Trajectory{id, sample_rate, {}});
        out[it->second].samples.push_back(
            {table.number(r, "t"), table.number(r, "x"), table.number(r, "y"), table.number(r, "z")});
    }
    return out;
}

void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories) {
    out << "trial_id,t,x,y,z\n";
    for (const auto& traj : trajectories) {
        for (const auto& s : traj.samples) {
            out << traj.trial_id << ',' << format_double(s.t) << ',' << format_double(s.x) << ','
                << format_double(s.y) << ',' << format_double(s.z) << '\n';
        }
    }
}

void write_outcomes_csv(std::ostream& out, const std::vector<TrialOutcome>& outcomes) {
    write_outcome_header(out);
    out << '\n';
    for (const auto& o : outcomes) {
        out << o.trial_id << ',' << o.participant_id << ',' << o.feedback << ',' << o.condition << ','
            << format_double(o.target_distance) << ',';
        if (o.valid) {
            out << format_double(o.movement_distance) << ',' << format_double(o.distance_error) << ','
                << format_double(o.endpoint_error) << ',' << format_double(o.disparity_difference) << ','
                << format_double(o.peak_velocity) << ',' << format_double(o.segment->onset_time) << ','
                << format_double(o.segment->termination_time) << ",1,none\n";
        } else {
            out << ",,,,,,,0," << to_string(o.rejection) << '\n';
        }
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "condition,target_distance_m,n,mean_distance_error_m,ci95_distance_error_m,mean_endpoint_error_m,"
           "ci95_endpoint_error_m,mean_disparity_difference_rad,ci95_disparity_difference_rad\n";
    for (const auto& r : rows) {
        out << r.condition << ',' << format_double(r.target_distance) << ',' << r.n << ','
            << format_double(r.mean_distance_error) << ',' << format_double(r.ci_distance_error) << ','
            << format_double(r.mean_endpoint_error) << ',' << format_double(r.ci_endpoint_error) << ','
            << format_double(r.mean_disparity_difference) << ',' << format_double(r.ci_disparity_difference)
            << '\n';
    }
}

void write_sim_trials_csv(std::ostream& out, const std::vector<SimTrial>& trials) {
    write_outcome_header(out);
    out << ",true_ipd_m,true_beta_rad\n";
    for (const auto& t : trials) {
        out << t.trial_id << ',' << t.participant_id << ',' << to_string(t.feedback) << ',' << to_string(t.condition)
            << ',' << format_double(t.target_distance) << ',' << format_double(t.endpoint.z) << ','
            << format_double(t.distance_error) << ',' << format_double(t.endpoint_error) << ','
            << format_double(t.disparity_difference) << ",,,,1,none," << format_double(t.true_ipd) << ','
            << format_double(t.true_beta) << '\n';
    }
}

void write_participants_csv(std::ostream& out, const std::vector<Participant>& participants) {
    out << "participant_id,ipd_m,beta_multiplier\n";
    for (const auto& p : participants) {
        out << p.id << ',' << format_double(p.ipd) << ',' << format_double(p.beta_multiplier) << '\n';
    }
}

std::vector<Observation> read_observations_csv(std::istream& in, const std::string& source) {
    const auto table = csv::Table::read(in, source);
    const bool has_valid = table.has_column("valid");
    const bool has_feedback = table.has_column("feedback");
    const bool has_condition = table.has_column("condition");
    std::vector<Observation> out;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        if (has_valid && table.text(r, "valid") != "1") continue;
        Observation o;
        o.participant_id = table.text(r, "participant_id");
        if (has_feedback && has_condition) {
            o.condition = table.text(r, "feedback") + "/" + table.text(r, "condition");
        } else if (has_condition) {
            o.condition = table.text(r, "condition");
        }
        o.target_distance = table.number(r, "target_distance_m");
        o.distance_error = table.number(r, "distance_error_m");
        if (!(o.target_distance > 0.0)) {
            throw DataError(source, table.line_of(r), "target_distance_m must be positive");
        }
        out.push_back(std::move(o));
    }
    return out;
}

Json fit_result_to_json(const FitResult& r) {
    Json ipds = Json::object();
    for (std::size_t i = 0; i < r.participants.size(); ++i) ipds[r.participants[i]] = m_to_mm(r.ipds[i]);
    return Json{{"variant", std::string(to_string(r.variant))},
                {"beta_rad", r.beta},
                {"beta_deg", rad_to_deg(r.beta)},
                {"beta_se_deg", rad_to_deg(r.beta_se)},
                {"ipd_mm", ipds},
                {"num_parameters", r.num_parameters},
                {"n_train", r.n_train},
                {"n_test", r.n_test},
                {"rss_train", r.rss_train},
                {"rss_test", r.rss_test},
                {"r2_train", r.r2_train},
                {"r2_test", r.r2_test},
                {"bic_train", r.bic_train},
                {"bic_test", r.bic_test},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"stop_reason", r.stop_reason},
                {"warnings", r.warnings}};
}

void write_comparison_csv(std::ostream& out, const std::vector<ModelComparison>& comparisons) {
    out << "condition,variant,bic_train,bic_test,r2_train,r2_test,beta_deg,selected\n";
    for (const auto& c : comparisons) {
        for (const FitResult* r : {&c.with_offset, &c.zero_offset}) {
            out << c.condition << ',' << to_string(r->variant) << ',' << format_double(r->bic_train) << ','
                << format_double(r->bic_test) << ',' << format_double(r->r2_train) << ','
                << format_double(r->r2_test) << ',' << format_double(rad_to_deg(r->beta)) << ','
                << (c.selected == r->variant ? 1 : 0) << '\n';
        }
    }
}

}  // namespace vac
