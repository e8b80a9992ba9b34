#pragma once

// JSON configuration and CSV exchange formats shared by the CLI subcommands.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "vac/fitting.hpp"
#include "vac/kinematics.hpp"
#include "vac/pose.hpp"
#include "vac/synth.hpp"

namespace vac {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::string& path);

/// {"eye_behind_home_m": .., "eye_above_home_m": ..} or
/// {"rotation": [[..],[..],[..]], "translation_m": [x, y, z]} (view-from-world).
RigidTransform eye_pose_from_json(const Json& j);
Json eye_pose_to_json(const RigidTransform& pose);

SimConfig sim_config_from_json(const Json& j);
Json sim_config_to_json(const SimConfig& c);

/// Applies optional "eye_pose", "ipd_bounds_mm", "beta_bound_deg",
/// "initial_ipd_mm", "initial_beta_deg", "max_iterations" keys.
ModelSpec model_spec_from_json(const Json& j, ModelSpec base = {});
Json model_spec_to_json(const ModelSpec& spec);

/// {"trials": [{"trial_id", "participant_id", "condition", "feedback",
///              "target_m": [x, y, z], "go_time_s"?}]}
std::vector<TrialInfo> trial_infos_from_json(const Json& j, const std::string& source);
Json trial_infos_to_json(const std::vector<TrialInfo>& infos);

/// Trajectory CSV: header trial_id,t,x,y,z. Rows of a trial must be
/// contiguous or not; they are grouped by trial_id in order of first
/// appearance.
std::vector<Trajectory> read_trajectories_csv(std::istream& in, const std::string& source, double sample_rate);
void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories);

void write_outcomes_csv(std::ostream& out, const std::vector<TrialOutcome>& outcomes);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
/// Same columns as the outcome CSV plus true_ipd_m and true_beta_rad.
void write_sim_trials_csv(std::ostream& out, const std::vector<SimTrial>& trials);
void write_participants_csv(std::ostream& out, const std::vector<Participant>& participants);

/// Reads valid rows of an outcome or simulated-trial CSV. The condition
/// label is "<feedback>/<condition>" when both columns exist.
std::vector<Observation> read_observations_csv(std::istream& in, const std::string& source);

Json fit_result_to_json(const FitResult& r);
/// Model comparison table: one row per condition and variant.
void write_comparison_csv(std::ostream& out, const std::vector<ModelComparison>& comparisons);

}  // namespace vac
