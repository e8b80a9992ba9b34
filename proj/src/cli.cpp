#include "vac/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "vac/config.hpp"
#include "vac/correction.hpp"
#include "vac/csv.hpp"
#include "vac/errors.hpp"
#include "vac/mesh_io.hpp"
#include "vac/units.hpp"

#ifndef VAC_VERSION
#define VAC_VERSION "0.0.0"
#endif

namespace vac::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kConfigEnv = "VAC_CONFIG";

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

std::string absolute(const std::string& path) { return path.empty() ? path : fs::absolute(path).lexically_normal().string(); }

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError(path.string(), 0, "cannot open for writing");
    return f;
}

void ensure_not_input(const fs::path& out, const std::vector<std::string>& inputs) {
    for (const auto& in : inputs) {
        if (!in.empty() && fs::exists(in) && fs::exists(out) && fs::equivalent(out, in)) {
            throw ValidationError("out", "output " + out.string() + " would overwrite input " + in);
        }
    }
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const std::vector<std::string>& argv,
                    Json resolved) {
    Json m{{"tool", "vac"},
           {"version", version()},
           {"subcommand", subcommand},
           {"argv", argv},
           {"resolved", std::move(resolved)},
           {"created_utc", utc_now()}};
    auto f = open_output(dir / "manifest.json");
    f << m.dump(2) << '\n';
}

std::vector<double> parse_list(const std::string& text, const char* field) {
    std::vector<double> out;
    for (const auto& tok : csv::split(text)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError(field, "not a number: '" + tok + "'");
        }
    }
    if (out.empty()) throw ValidationError(field, "empty list");
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + csv::format_double(v[i]);
    return s;
}

EyeGeometry eyes_from_mm(double ipd_mm) { return EyeGeometry(mm_to_m(ipd_mm)); }

PerturbationParams params_from_deg(double beta_deg) {
    PerturbationParams p{deg_to_rad(beta_deg), std::nullopt};
    try {
        p.validate();
    } catch (const ValidationError& e) {
        throw ValidationError("beta-deg", e.what());
    }
    return p;
}

std::string default_config_path() {
    const char* env = std::getenv(kConfigEnv);
    return env ? env : "";
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
    double beta_deg = 0.22;
    double ipd_mm = 63.0;
    std::string distances = "0.20,0.25,0.30,0.35";
    std::string eye_pose;
    std::string out = "vac-out";
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
    const auto params = params_from_deg(a.beta_deg);
    const auto eyes = eyes_from_mm(a.ipd_mm);
    const auto distances = parse_list(a.distances, "distances");
    std::vector<CorrectionRow> rows;
    Json resolved{{"beta_deg", a.beta_deg}, {"ipd_mm", a.ipd_mm}, {"distances_m", distances}};
    std::optional<RigidTransform> pose;
    if (!a.eye_pose.empty()) {
        pose = eye_pose_from_json(read_json_file(a.eye_pose));
        resolved["eye_pose"] = eye_pose_to_json(*pose);
        rows = predicted_correction_curve(distances, eyes, params, *pose);
    } else {
        rows = predicted_correction_curve(distances, eyes, params);
    }

    std::ostringstream table;
    table << "distance_m,original_error_m,transformed_error_m,disparity_difference_deg\n";
    for (const auto& r : rows) {
        double dd = 0.0;
        if (pose) {
            const ScenePoint target = pose->apply({0.0, 0.0, r.distance});
            const ScenePoint hand = pose->apply({0.0, 0.0, r.distance + r.original_error});
            dd = disparity_difference(hand, target, eyes);
        } else {
            dd = disparity_difference({0.0, 0.0, r.distance + r.original_error}, {0.0, 0.0, r.distance}, eyes);
        }
        table << csv::format_double(r.distance) << ',' << csv::format_double(r.original_error) << ','
              << csv::format_double(r.transformed_error) << ',' << csv::format_double(rad_to_deg(dd)) << '\n';
    }
    out << table.str();

    fs::create_directories(a.out);
    open_output(fs::path(a.out) / "predictions.csv") << table.str();
    std::vector<std::string> argv{"predict", "--beta-deg", csv::format_double(a.beta_deg), "--ipd-mm",
                                  csv::format_double(a.ipd_mm), "--distances", join(distances)};
    if (!a.eye_pose.empty()) argv.insert(argv.end(), {"--eye-pose", absolute(a.eye_pose)});
    write_manifest(a.out, "predict", argv, resolved);
    return kExitOk;
}

// -------------------------------------------------------------- transform

struct TransformArgs {
    std::string in;
    double beta_deg = 0.22;
    double ipd_mm = 63.0;
    bool literal = false;
    std::string eye_pose;
    std::string out = "vac-out";
};

int cmd_transform(const TransformArgs& a, std::ostream& out) {
    const auto params = params_from_deg(a.beta_deg);
    const auto eyes = eyes_from_mm(a.ipd_mm);
    const auto convention = a.literal ? CorrectionConvention::literal_half_angle : CorrectionConvention::reconciled;
    const RigidTransform pose = a.eye_pose.empty() ? RigidTransform::identity()
                                                   : eye_pose_from_json(read_json_file(a.eye_pose));
    fs::create_directories(a.out);
    const fs::path in_path(a.in);
    const std::string ext = in_path.extension().string();
    const fs::path out_path = fs::path(a.out) / (in_path.stem().string() + "_corrected" + ext);
    ensure_not_input(out_path, {a.in});

    Json report{{"input", absolute(a.in)}, {"output", absolute(out_path.string())},
                {"convention", a.literal ? "literal_half_angle" : "reconciled"}};
    if (ext == ".obj" || ext == ".OBJ") {
        const ObjDocument doc = read_obj_file(a.in);
        MeshModel corrected;
        try {
            corrected = transform_mesh(doc.mesh, eyes, params, convention, pose);
        } catch (const DomainError& e) {
            throw DataError(a.in, 0, e.what());
        }
        std::ostringstream buf;
        write_obj(buf, doc, corrected.vertices);
        open_output(out_path) << buf.str();
        report["vertices"] = doc.mesh.vertices.size();
        report["faces"] = doc.mesh.faces.size();
        report["normals_passed_through"] = doc.normal_count;
        report["normals_stale"] = doc.normal_count > 0 && params.beta_offset != 0.0;
    } else if (ext == ".csv" || ext == ".CSV") {
        std::ifstream in(a.in);
        if (!in) throw DataError(a.in, 0, "cannot open file");
        const auto points = read_points_csv(in, a.in);
        std::vector<ScenePoint> corrected;
        corrected.reserve(points.size());
        const RigidTransform inv = pose.inverse();
        for (std::size_t i = 0; i < points.size(); ++i) {
            try {
                corrected.push_back(inv.apply(transform_point(pose.apply(points[i]), eyes, params, convention)));
            } catch (const DomainError& e) {
                throw DataError(a.in, i + 2, e.what());
            }
        }
        std::ostringstream buf;
        write_points_csv(buf, corrected);
        open_output(out_path) << buf.str();
        report["points"] = points.size();
    } else {
        throw ValidationError("in", "unsupported extension '" + ext + "' (expected .obj or .csv)");
    }
    open_output(fs::path(a.out) / "transform_report.json") << report.dump(2) << '\n';
    out << "wrote " << out_path.string() << '\n';

    std::vector<std::string> argv{"transform", "--in", absolute(a.in), "--beta-deg", csv::format_double(a.beta_deg),
                                  "--ipd-mm", csv::format_double(a.ipd_mm)};
    if (a.literal) argv.push_back("--compat-literal-eq14");
    if (!a.eye_pose.empty()) argv.insert(argv.end(), {"--eye-pose", absolute(a.eye_pose)});
    write_manifest(a.out, "transform", argv,
                   Json{{"beta_deg", a.beta_deg}, {"ipd_mm", a.ipd_mm}, {"eye_pose", eye_pose_to_json(pose)},
                        {"convention", report["convention"]}});
    return kExitOk;
}

// --------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool trajectories = true;
    std::string out = "vac-out";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const std::string config_path = a.config.empty() ? default_config_path() : a.config;
    Json j = config_path.empty() ? Json::object() : read_json_file(config_path);
    if (a.seed) j["seed"] = *a.seed;
    const SimConfig config = sim_config_from_json(j);

    const auto participants = generate_participants(config);
    const auto trials = generate_trials(config, participants);
    fs::create_directories(a.out);
    const fs::path dir(a.out);
    {
        auto f = open_output(dir / "participants.csv");
        write_participants_csv(f, participants);
    }
    {
        auto f = open_output(dir / "trials.csv");
        write_sim_trials_csv(f, trials);
    }
    open_output(dir / "targets.json") << trial_infos_to_json(trial_infos(trials)).dump(2) << '\n';
    open_output(dir / "eye_pose.json") << eye_pose_to_json(config.view_from_world).dump(2) << '\n';
    if (a.trajectories) {
        auto f = open_output(dir / "trajectories.csv");
        write_trajectories_csv(f, generate_trajectories(config, trials));
    }
    out << "simulated " << participants.size() << " participants, " << trials.size() << " trials into "
        << dir.string() << '\n';

    const fs::path resolved_config = dir / "sim_config.json";
    open_output(resolved_config) << sim_config_to_json(config).dump(2) << '\n';
    std::vector<std::string> argv{"simulate", "--config", absolute(resolved_config.string())};
    if (!a.trajectories) argv.push_back("--no-trajectories");
    write_manifest(a.out, "simulate", argv, sim_config_to_json(config));
    return kExitOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string input;
    std::string targets;
    std::string eye_pose;
    double cutoff_hz = kDefaultCutoff;
    double threshold_mmps = m_to_mm(kDefaultVelocityThreshold);
    double hold_ms = m_to_mm(kDefaultHoldTime);
    double sample_rate_hz = kDefaultSampleRate;
    double ipd_mm = 63.0;
    std::optional<double> go_time_s;
    std::string out = "vac-out";
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const auto eyes = eyes_from_mm(a.ipd_mm);
    const RigidTransform pose = a.eye_pose.empty() ? default_eye_pose() : eye_pose_from_json(read_json_file(a.eye_pose));
    const auto infos = trial_infos_from_json(read_json_file(a.targets), a.targets);
    std::ifstream in(a.input);
    if (!in) throw DataError(a.input, 0, "cannot open file");
    auto trajectories = read_trajectories_csv(in, a.input, a.sample_rate_hz);

    AnalysisOptions options;
    options.cutoff_hz = a.cutoff_hz;
    options.segment.threshold = mm_to_m(a.threshold_mmps);
    options.segment.hold_time = a.hold_ms * 1e-3;
    options.go_time = a.go_time_s;
    const auto outcomes = analyze_trials(std::move(trajectories), infos, eyes, pose, options);

    fs::create_directories(a.out);
    const fs::path dir(a.out);
    ensure_not_input(dir / "outcomes.csv", {a.input});
    {
        auto f = open_output(dir / "outcomes.csv");
        write_outcomes_csv(f, outcomes);
    }
    {
        auto f = open_output(dir / "summary.csv");
        write_summary_csv(f, summarize(outcomes));
    }
    std::size_t valid = 0;
    for (const auto& o : outcomes) valid += o.valid ? 1 : 0;
    out << "analyzed " << outcomes.size() << " trials (" << valid << " valid) into " << dir.string() << '\n';

    std::vector<std::string> argv{"analyze",       "--input",        absolute(a.input),
                                  "--targets",     absolute(a.targets),
                                  "--cutoff-hz",   csv::format_double(a.cutoff_hz),
                                  "--threshold-mmps", csv::format_double(a.threshold_mmps),
                                  "--hold-ms",     csv::format_double(a.hold_ms),
                                  "--sample-rate-hz", csv::format_double(a.sample_rate_hz),
                                  "--ipd-mm",      csv::format_double(a.ipd_mm)};
    if (!a.eye_pose.empty()) argv.insert(argv.end(), {"--eye-pose", absolute(a.eye_pose)});
    if (a.go_time_s) argv.insert(argv.end(), {"--go-time-s", csv::format_double(*a.go_time_s)});
    write_manifest(a.out, "analyze", argv,
                   Json{{"cutoff_hz", a.cutoff_hz},
                        {"threshold_mmps", a.threshold_mmps},
                        {"hold_ms", a.hold_ms},
                        {"sample_rate_hz", a.sample_rate_hz},
                        {"ipd_mm", a.ipd_mm},
                        {"eye_pose", eye_pose_to_json(pose)},
                        {"filter", "2nd-order Butterworth, forward-backward"}});
    return kExitOk;
}

// -------------------------------------------------------------------- fit

struct FitArgs {
    std::string input;
    std::string variant = "both";
    double split = 0.7;
    std::uint64_t seed = 0;
    std::string config;
    std::string out = "vac-out";
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
    const std::string config_path = a.config.empty() ? default_config_path() : a.config;
    const Json j = config_path.empty() ? Json::object() : read_json_file(config_path);
    const ModelSpec base = model_spec_from_json(j);
    std::ifstream in(a.input);
    if (!in) throw DataError(a.input, 0, "cannot open file");
    const FitDataset data = make_split(read_observations_csv(in, a.input), a.split, a.seed);
    if (data.observations.empty()) throw DataError(a.input, 0, "no valid observations");

    fs::create_directories(a.out);
    const fs::path dir(a.out);
    Json results = Json::array();
    std::vector<ModelComparison> comparisons;
    if (a.variant == "both") {
        comparisons = compare_models(data, base);
        for (const auto& c : comparisons) {
            results.push_back(Json{{"condition", c.condition},
                                   {"selected", std::string(to_string(c.selected))},
                                   {"with_offset", fit_result_to_json(c.with_offset)},
                                   {"zero_offset", fit_result_to_json(c.zero_offset)}});
            out << c.condition << ": beta = " << rad_to_deg(c.with_offset.beta) << " deg, test BIC "
                << c.with_offset.bic_test << " (with offset) vs " << c.zero_offset.bic_test
                << " (zero offset) -> " << to_string(c.selected) << '\n';
        }
        auto f = open_output(dir / "comparison.csv");
        write_comparison_csv(f, comparisons);
    } else {
        ModelSpec spec = base;
        spec.variant = a.variant == "with-offset" ? ModelVariant::with_offset : ModelVariant::zero_offset;
        for (const auto& condition : data.conditions()) {
            const FitResult r = fit(spec, data.subset(condition));
            results.push_back(Json{{"condition", condition}, {std::string(to_string(r.variant)), fit_result_to_json(r)}});
            out << condition << ": " << to_string(r.variant) << " beta = " << rad_to_deg(r.beta) << " deg, test r2 "
                << r.r2_test << '\n';
        }
    }
    open_output(dir / "fit_results.json") << results.dump(2) << '\n';

    write_manifest(a.out, "fit",
                   {"fit", "--input", absolute(a.input), "--variant", a.variant, "--split", csv::format_double(a.split),
                    "--seed", std::to_string(a.seed), "--config", config_path.empty() ? "" : absolute(config_path)},
                   Json{{"model", model_spec_to_json(base)}, {"split", a.split}, {"seed", a.seed}});
    return kExitOk;
}

}  // namespace

std::string version() { return VAC_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"vac: vergence-offset geometry, depth correction, trajectory analysis and model fitting"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    PredictArgs pa;
    auto* predict = app.add_subcommand("predict", "Predicted endpoint errors before and after correction");
    predict->add_option("--beta-deg", pa.beta_deg, "Vergence offset (deg)")->capture_default_str();
    predict->add_option("--ipd-mm", pa.ipd_mm, "Interpupillary distance (mm)")->capture_default_str();
    predict->add_option("--distances", pa.distances, "Comma-separated distances (m)")->capture_default_str();
    predict->add_option("--eye-pose", pa.eye_pose, "Eye pose JSON; distances become reach distances from home");
    predict->add_option("--out", pa.out, "Output directory")->capture_default_str();

    TransformArgs ta;
    auto* transform = app.add_subcommand("transform", "Depth-correct an OBJ mesh or CSV point list");
    transform->add_option("--in", ta.in, "Input .obj or .csv (x,y,z in m)")->required();
    transform->add_option("--beta-deg", ta.beta_deg, "Vergence offset (deg)")->capture_default_str();
    transform->add_option("--ipd-mm", ta.ipd_mm, "Interpupillary distance (mm)")->capture_default_str();
    transform->add_flag("--compat-literal-eq14", ta.literal, "Subtract the offset from the half angle");
    transform->add_option("--eye-pose", ta.eye_pose, "View-from-world pose JSON (default: input is in view space)");
    transform->add_option("--out", ta.out, "Output directory")->capture_default_str();

    SimulateArgs sa;
    std::uint64_t sim_seed = 0;
    bool no_traj = false;
    auto* simulate = app.add_subcommand("simulate", "Generate a seeded synthetic experiment");
    simulate->add_option("--config", sa.config, std::string("Simulation config JSON (default: $") + kConfigEnv + ")");
    auto* seed_opt = simulate->add_option("--seed", sim_seed, "Override the config seed");
    simulate->add_flag("--no-trajectories", no_traj, "Skip trajectory generation");
    simulate->add_option("--out", sa.out, "Output directory")->capture_default_str();

    AnalyzeArgs aa;
    double go_time = 0.0;
    auto* analyze = app.add_subcommand("analyze", "Kinematic analysis of trajectory CSV files");
    analyze->add_option("--input", aa.input, "Trajectory CSV (trial_id,t,x,y,z)")->required();
    analyze->add_option("--targets", aa.targets, "Targets JSON")->required();
    analyze->add_option("--eye-pose", aa.eye_pose, "Eye pose JSON (default: 0.30 m behind, 0.35 m above home)");
    analyze->add_option("--cutoff-hz", aa.cutoff_hz, "Low-pass cutoff (Hz)")->capture_default_str();
    analyze->add_option("--threshold-mmps", aa.threshold_mmps, "Velocity threshold (mm/s)")->capture_default_str();
    analyze->add_option("--hold-ms", aa.hold_ms, "Threshold hold time (ms)")->capture_default_str();
    analyze->add_option("--sample-rate-hz", aa.sample_rate_hz, "Nominal sampling rate (Hz)")->capture_default_str();
    analyze->add_option("--ipd-mm", aa.ipd_mm, "IPD for disparity differences (mm)")->capture_default_str();
    auto* go_opt = analyze->add_option("--go-time-s", go_time, "Go cue time; earlier onsets are false starts");
    analyze->add_option("--out", aa.out, "Output directory")->capture_default_str();

    FitArgs fa;
    auto* fitc = app.add_subcommand("fit", "Fit the vergence-offset model to distance errors");
    fitc->add_option("--input", fa.input, "Outcome or simulated-trial CSV")->required();
    fitc->add_option("--variant", fa.variant, "both | with-offset | zero-offset")
        ->check(CLI::IsMember({"both", "with-offset", "zero-offset"}))
        ->capture_default_str();
    fitc->add_option("--split", fa.split, "Training fraction")->capture_default_str();
    fitc->add_option("--seed", fa.seed, "Split seed")->capture_default_str();
    fitc->add_option("--config", fa.config, std::string("Model config JSON (default: $") + kConfigEnv + ")");
    fitc->add_option("--out", fa.out, "Output directory")->capture_default_str();

    std::string manifest_path, rerun_out;
    auto* rerun = app.add_subcommand("rerun", "Repeat a run recorded in a manifest");
    rerun->add_option("--manifest", manifest_path, "manifest.json")->required();
    rerun->add_option("--out", rerun_out, "Output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*predict) return cmd_predict(pa, out);
        if (*transform) return cmd_transform(ta, out);
        if (*simulate) {
            if (*seed_opt) sa.seed = sim_seed;
            sa.trajectories = !no_traj;
            return cmd_simulate(sa, out);
        }
        if (*analyze) {
            if (*go_opt) aa.go_time_s = go_time;
            return cmd_analyze(aa, out);
        }
        if (*fitc) return cmd_fit(fa, out);
        if (*rerun) {
            const Json m = read_json_file(manifest_path);
            if (!m.contains("argv") || !m.at("argv").is_array()) {
                throw DataError(manifest_path, 0, "manifest has no argv");
            }
            auto argv = m.at("argv").get<std::vector<std::string>>();
            if (!argv.empty() && argv.front() == "rerun") throw DataError(manifest_path, 0, "recursive manifest");
            // Drop empty-valued options (e.g. an unset --config).
            std::vector<std::string> cleaned;
            for (std::size_t i = 0; i < argv.size(); ++i) {
                if (i + 1 < argv.size() && argv[i].starts_with("--") && argv[i + 1].empty()) {
                    ++i;
                    continue;
                }
                cleaned.push_back(argv[i]);
            }
            cleaned.insert(cleaned.end(), {"--out", rerun_out});
            return run(cleaned, out, err);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DomainError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const FitError& e) {
        err << "fit error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitValidation;
}

}  // namespace vac::cli
