#include "vac/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vac/csv.hpp"
#include "vac/units.hpp"

namespace fs = std::filesystem;

namespace vac {
namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::path(VAC_TEST_TMP) / info->name();
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    fs::path path(const std::string& name) const { return dir_ / name; }
    std::string str(const std::string& name) const { return path(name).string(); }

    fs::path dir_;
};

TEST_F(CliTest, PredictWritesCurveAndManifest) {
    const auto r = run({"predict", "--beta-deg", "0.22", "--ipd-mm", "64", "--distances", "0.45,0.5", "--out", str("p")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto table = csv::Table::read_file(str("p/predictions.csv"));
    ASSERT_EQ(table.rows(), 2u);
    EXPECT_NEAR(table.number(0, "original_error_m"), -0.011889582357491643, 1e-13);
    EXPECT_NEAR(table.number(0, "transformed_error_m"), 0.0, 1e-12);
    EXPECT_NEAR(table.number(1, "disparity_difference_deg"), -0.22, 1e-12);
    EXPECT_NE(r.out.find("distance_m,original_error_m"), std::string::npos);
    const auto m = nlohmann::json::parse(slurp(path("p/manifest.json")));
    EXPECT_EQ(m["subcommand"], "predict");
    EXPECT_EQ(m["tool"], "vac");
}

TEST_F(CliTest, PredictWithEyePoseUsesReachDistances) {
    spit(path("pose.json"), R"({"eye_behind_home_m": 0.30, "eye_above_home_m": 0.35})");
    const auto r = run({"predict", "--eye-pose", str("pose.json"), "--out", str("p")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto table = csv::Table::read_file(str("p/predictions.csv"));
    ASSERT_EQ(table.rows(), 4u);
    EXPECT_NEAR(m_to_mm(table.number(0, "original_error_m")), -27.039466955696126, 1e-9);
    EXPECT_NEAR(m_to_mm(table.number(3, "original_error_m")), -36.406954065282265, 1e-9);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(table.number(i, "disparity_difference_deg"), -0.22, 1e-12);
}

TEST_F(CliTest, InvalidArgumentsExitWithOne) {
    EXPECT_EQ(run({"predict", "--beta-deg", "5", "--out", str("p")}).code, 1);
    EXPECT_EQ(run({"predict", "--ipd-mm", "0", "--out", str("p")}).code, 1);
    EXPECT_EQ(run({"predict", "--distances", "a,b", "--out", str("p")}).code, 1);
    EXPECT_EQ(run({"predict", "--nope"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"fit", "--input", str("x.csv"), "--variant", "other"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, UnreadableDataExitsWithTwo) {
    EXPECT_EQ(run({"transform", "--in", str("missing.obj"), "--out", str("t")}).code, 2);
    spit(path("bad.obj"), "v 0 0 0.5\nv 1 0 oops\n");
    const auto r = run({"transform", "--in", str("bad.obj"), "--out", str("t")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(":2"), std::string::npos) << r.err;
    spit(path("far.csv"), "x,y,z\n0,0,0.5\n0,0,50\n");
    EXPECT_EQ(run({"transform", "--in", str("far.csv"), "--out", str("t")}).code, 2);
}

TEST_F(CliTest, TransformWithZeroOffsetIsByteIdentical) {
    const std::string obj = "# cube corner\nv 0.1 0.2 0.5\nv -0.1 0.25 0.55\nv 0 0 0.6\nvn 0 0 1\nf 1//1 2//1 3//1\n";
    spit(path("in/mesh.obj"), obj);
    const auto r = run({"transform", "--in", str("in/mesh.obj"), "--beta-deg", "0", "--out", str("t")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("t/mesh_corrected.obj")), obj);
    EXPECT_EQ(slurp(path("in/mesh.obj")), obj);
    const auto report = nlohmann::json::parse(slurp(path("t/transform_report.json")));
    EXPECT_EQ(report["normals_stale"], false);
}

TEST_F(CliTest, TransformCsvMatchesLibrary) {
    spit(path("pts.csv"), "x,y,z\n0,0,0.43811041764250836\n0.1,0.05,0.7\n");
    const auto r = run({"transform", "--in", str("pts.csv"), "--ipd-mm", "64", "--out", str("t")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto table = csv::Table::read_file(str("t/pts_corrected.csv"));
    EXPECT_NEAR(table.number(0, "z"), 0.45, 1e-12);
    EXPECT_EQ(table.number(1, "x"), 0.1);
    EXPECT_GT(table.number(1, "z"), 0.7);
    EXPECT_EQ(run({"transform", "--in", str("pts.txt"), "--out", str("t")}).code, 1);
}

TEST_F(CliTest, TransformRefusesToOverwriteItsInput) {
    spit(path("t/pts_corrected.csv"), "x,y,z\n0,0,0.5\n");
    const auto before = slurp(path("t/pts_corrected.csv"));
    EXPECT_EQ(run({"transform", "--in", str("t/pts_corrected.csv"), "--out", str("t")}).code, 0);
    EXPECT_EQ(slurp(path("t/pts_corrected.csv")), before);
}

TEST_F(CliTest, SimulateThenFitRecoversNoiseFreeParameters) {
    spit(path("sim.json"), R"({"n_participants": 5, "motor_noise_sd_mm": 0, "repetitions": 4, "seed": 3})");
    auto r = run({"simulate", "--config", str("sim.json"), "--no-trajectories", "--out", str("sim")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_FALSE(fs::exists(path("sim/trajectories.csv")));
    r = run({"fit", "--input", str("sim/trials.csv"), "--variant", "with-offset", "--out", str("fit")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto results = nlohmann::json::parse(slurp(path("fit/fit_results.json")));
    const auto& fit = results[0]["with_offset"];
    EXPECT_NEAR(fit["beta_deg"].get<double>(), 0.22, 1e-6);
    const auto participants = csv::Table::read_file(str("sim/participants.csv"));
    for (std::size_t i = 0; i < participants.rows(); ++i) {
        EXPECT_NEAR(fit["ipd_mm"][participants.text(i, "participant_id")].get<double>(), m_to_mm(participants.number(i, "ipd_m")), 1e-5);
    }
}

TEST_F(CliTest, SimulateAnalyzeFitPipeline) {
    spit(path("sim.json"),
         R"({"n_participants": 6, "repetitions": 6, "feedbacks": ["online", "feedforward"], "seed": 5,
             "trajectory_noise_sd_mm": 0.2})");
    auto r = run({"simulate", "--config", str("sim.json"), "--out", str("sim")});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run({"analyze", "--input", str("sim/trajectories.csv"), "--targets", str("sim/targets.json"), "--eye-pose",
             str("sim/eye_pose.json"), "--out", str("an")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto outcomes = csv::Table::read_file(str("an/outcomes.csv"));
    EXPECT_EQ(outcomes.rows(), 6u * 2 * 4 * 6);
    for (std::size_t i = 0; i < outcomes.rows(); ++i) EXPECT_EQ(outcomes.text(i, "valid"), "1");
    EXPECT_TRUE(fs::exists(path("an/summary.csv")));
    r = run({"fit", "--input", str("an/outcomes.csv"), "--out", str("fit")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto cmp = csv::Table::read_file(str("fit/comparison.csv"));
    ASSERT_EQ(cmp.rows(), 4u);
    // A strong offset is detected even in this small design; the 20-seed
    // selection rates are covered by the acceptance suite.
    for (std::size_t i = 0; i < cmp.rows(); ++i) {
        if (cmp.text(i, "condition") == "online/original" && cmp.text(i, "selected") == "1") {
            EXPECT_EQ(cmp.text(i, "variant"), "with_offset");
        }
    }
    const auto results = nlohmann::json::parse(slurp(path("fit/fit_results.json")));
    ASSERT_EQ(results.size(), 2u);
    EXPECT_EQ(results[0]["condition"], "feedforward/original");
    EXPECT_GT(results[1]["with_offset"]["beta_deg"].get<double>(), 0.0);
}

TEST_F(CliTest, RerunFromManifestIsByteIdentical) {
    spit(path("sim.json"), R"({"n_participants": 3, "repetitions": 2, "trajectory_noise_sd_mm": 0.5, "seed": 9})");
    ASSERT_EQ(run({"simulate", "--config", str("sim.json"), "--out", str("a")}).code, 0);
    ASSERT_EQ(run({"rerun", "--manifest", str("a/manifest.json"), "--out", str("b")}).code, 0);
    for (const char* f : {"participants.csv", "trials.csv", "targets.json", "trajectories.csv", "sim_config.json"}) {
        EXPECT_EQ(slurp(path("a") / f), slurp(path("b") / f)) << f;
    }
    ASSERT_EQ(run({"fit", "--input", str("a/trials.csv"), "--seed", "4", "--out", str("fa")}).code, 0);
    ASSERT_EQ(run({"rerun", "--manifest", str("fa/manifest.json"), "--out", str("fb")}).code, 0);
    EXPECT_EQ(slurp(path("fa/fit_results.json")), slurp(path("fb/fit_results.json")));
    EXPECT_EQ(slurp(path("fa/comparison.csv")), slurp(path("fb/comparison.csv")));
}

TEST_F(CliTest, SimulateWithoutConfigUsesDefaultsAndSeedOverride) {
    ASSERT_EQ(run({"simulate", "--no-trajectories", "--seed", "11", "--out", str("s")}).code, 0);
    const auto cfg = nlohmann::json::parse(slurp(path("s/sim_config.json")));
    EXPECT_EQ(cfg["seed"], 11);
    EXPECT_EQ(cfg["n_participants"], 20);
    spit(path("bad.json"), R"({"n_participants": 0})");
    EXPECT_EQ(run({"simulate", "--config", str("bad.json"), "--out", str("s2")}).code, 1);
    spit(path("broken.json"), "{");
    EXPECT_EQ(run({"simulate", "--config", str("broken.json"), "--out", str("s3")}).code, 2);
}

TEST_F(CliTest, AnalyzeReportsMissingTargets) {
    spit(path("traj.csv"), "trial_id,t,x,y,z\nT1,0,0,0,0\nT1,0.004,0,0,0\nT1,0.008,0,0,0\n");
    spit(path("targets.json"), R"({"trials": []})");
    const auto r = run({"analyze", "--input", str("traj.csv"), "--targets", str("targets.json"), "--out", str("an")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("T1"), std::string::npos);
}

}  // namespace
}  // namespace vac
