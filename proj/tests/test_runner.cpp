#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "runner.hpp"

using namespace bt;
using namespace bt::runner;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small, fast experiment: 64x64 frames, 10 s pass at 20 fps (201 frames).
ExperimentConfig small_config() {
    ExperimentConfig c;
    c.seed = 9001;
    c.camera.width_px = 64;
    c.camera.height_px = 64;
    c.beam.waist_px = 5.0;
    c.noise.salt_pepper_prob = 0.001;
    c.pass.transit_time_s = 10.0;
    c.pass.window_deg = 2.0;
    c.pass.scale_px_per_mrad = 0.4;
    c.learn_detections = 20;
    c.learn_max_frames = 30;
    c.learn_min_detections = 5;
    c.filter_q = 1e-3;
    c.filter_r = 0.05;
    c.out_dir = (fs::temp_directory_path() / "bt_runner_test").string();
    return c;
}

}  // namespace

TEST_CASE("config text parsing") {
    const auto entries = parse_config_text(
        "# comment line\n"
        "seed = 77\n"
        "\n"
        "camera.width_px = 128   # trailing comment\n"
        "pass.kind = cj\n");
    const ExperimentConfig c = config_from_map(entries);
    CHECK(c.seed == 77);
    CHECK(c.camera.width_px == 128);
    CHECK(c.pass.kind == traj::PassKind::ConstantJerk);
    CHECK(c.camera.height_px == 512);  // untouched default

    CHECK_THROWS_AS(parse_config_text("seed\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("seed = 1\nseed = 2\n"), config_error);
}

TEST_CASE("unknown and malformed keys carry their field path") {
    try {
        config_from_map(parse_config_text("camera.wdith_px = 128\n"));
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(e.field() == "camera.wdith_px");
    }
    try {
        config_from_map(parse_config_text("camera.width_px = fast\n"));
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(e.field() == "camera.width_px");
    }
    try {
        config_from_map(parse_config_text("camera.width_px = 4\n"));
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(e.field() == "camera");
    }
    CHECK_THROWS_AS(config_from_map(parse_config_text("filter.r = -1\n")), config_error);
    CHECK_THROWS_AS(config_from_map(parse_config_text("occlusion.intervals = 5-2\n")),
                    config_error);
}

TEST_CASE("config round trips through its map form") {
    ExperimentConfig c = small_config();
    c.occlusion.intervals = {{3.0, 4.0}};
    c.occlusion.blind_spot = traj::BlindSpot{{1.0, 2.0}, 5.0};
    const auto m = config_to_map(c);
    const ExperimentConfig back = config_from_map(m);
    CHECK(back.seed == c.seed);
    CHECK(back.camera.width_px == c.camera.width_px);
    CHECK(back.occlusion.intervals == c.occlusion.intervals);
    CHECK(back.occlusion.blind_spot->radius_px == 5.0);
    CHECK(back.beam.power_w == doctest::Approx(c.beam.power_w));
}

TEST_CASE("runs are deterministic; artifacts byte-identical") {
    ExperimentConfig c = small_config();
    c.out_dir = (fs::temp_directory_path() / "bt_det_a").string();
    const RunResult a = run_experiment(c);
    const std::string track_a = slurp(fs::path(c.out_dir) / "tracking.csv");
    const std::string control_a = slurp(fs::path(c.out_dir) / "control.csv");

    c.out_dir = (fs::temp_directory_path() / "bt_det_b").string();
    const RunResult b = run_experiment(c);
    CHECK(slurp(fs::path(c.out_dir) / "tracking.csv") == track_a);
    CHECK(slurp(fs::path(c.out_dir) / "control.csv") == control_a);
    CHECK(a.report.rms_px == b.report.rms_px);

    fs::remove_all(fs::temp_directory_path() / "bt_det_a");
    fs::remove_all(fs::temp_directory_path() / "bt_det_b");
}

TEST_CASE("frame ordering and segment bookkeeping") {
    ExperimentConfig c = small_config();
    c.occlusion.intervals = {{5.0, 6.0}};
    const RunResult res = run_experiment(c, false);

    CHECK(res.report.frames_total == 201);
    CHECK(static_cast<long>(res.control.size()) == res.report.frames_total);
    for (std::size_t i = 1; i < res.track.size(); ++i)
        CHECK(res.track[i].seq == res.track[i - 1].seq + 1);

    // Learning + tracked frames account for every frame.
    CHECK(res.report.frames_learning + static_cast<long>(res.track.size()) ==
          res.report.frames_total);
    CHECK(res.report.frames_pre + res.report.frames_coast + res.report.frames_post ==
          static_cast<long>(res.track.size()));

    // The occlusion interval shows up as coasting frames.
    CHECK(res.report.frames_coast >= 20);
    for (const TrackRow& row : res.track) {
        if (row.t >= 5.05 && row.t <= 5.95) CHECK(row.coasting);
        if (row.coasting) CHECK_FALSE(row.meas.has_value());
    }
}

TEST_CASE("high power tracking error stays small") {
    ExperimentConfig c = small_config();
    const RunResult res = run_experiment(c, false);
    CHECK(res.report.rms_px < 1.0);
    CHECK(res.report.rms_mrad == doctest::Approx(res.report.rms_px * c.rad_per_px * 1e3));
    CHECK(res.report.detections > 150);
}

TEST_CASE("occluded learning window raises an acquisition failure") {
    ExperimentConfig c = small_config();
    c.occlusion.intervals = {{0.0, 3.0}};  // covers all 30 learning frames
    CHECK_THROWS_AS(run_experiment(c, false), acquisition_error);
}

TEST_CASE("partial learning window proceeds when enough detections arrive") {
    ExperimentConfig c = small_config();
    c.occlusion.intervals = {{0.0, 1.0}};  // eats 21 of the 30 learning frames
    const RunResult res = run_experiment(c, false);
    CHECK(res.report.frames_learning >= 20);
    CHECK(res.report.rms_px < 5.0);
}

TEST_CASE("the 8-state filter inverts its acceleration once past mid-pass") {
    ExperimentConfig c = small_config();
    c.pass.kind = traj::PassKind::ConstantJerk;
    c.pass.scale_px_per_mrad = 0.05;  // keep the fast overpass on the sensor
    c.filter_kind = kalman::FilterKind::ConstantJerk;
    c.filter_q = 1e-4;
    const RunResult cj = run_experiment(c, false);
    CHECK(cj.report.zenith_flips == 1);

    ExperimentConfig cv = small_config();
    const RunResult plain = run_experiment(cv, false);
    CHECK(plain.report.zenith_flips == 0);
}

TEST_CASE("fsm saturation triggers coarse handoffs and recovery") {
    ExperimentConfig c = small_config();
    c.fsm_max_deflection_deg = 0.05;  // ~4.7 px of authority: forces handoffs
    const RunResult res = run_experiment(c, false);
    CHECK(res.report.handoff_count > 0);
    CHECK(res.report.rms_px < 2.0);  // tracking survives the handoffs
}

TEST_CASE("dump_frames writes every frame as pgm") {
    ExperimentConfig c = small_config();
    c.pass.transit_time_s = 2.0;  // 41 frames
    c.learn_detections = 10;
    c.learn_max_frames = 15;
    c.dump_frames = true;
    c.out_dir = (fs::temp_directory_path() / "bt_dump_test").string();
    run_experiment(c);
    CHECK(fs::exists(fs::path(c.out_dir) / "frame_000000.pgm"));
    CHECK(fs::exists(fs::path(c.out_dir) / "frame_000040.pgm"));
    CHECK(fs::exists(fs::path(c.out_dir) / "stage_000040_subtracted.pgm"));
    CHECK(fs::exists(fs::path(c.out_dir) / "stage_000040_opened.pgm"));
    CHECK(fs::exists(fs::path(c.out_dir) / "stage_000040_mask.pgm"));
    CHECK(fs::exists(fs::path(c.out_dir) / "truth.csv"));
    CHECK(fs::exists(fs::path(c.out_dir) / "fig6_tracking.csv"));
    fs::remove_all(c.out_dir);
}

TEST_CASE("compare_power_settings pairs seeds") {
    ExperimentConfig c = small_config();
    c.pass.transit_time_s = 5.0;
    c.compare_low_power_uw = 5.55;  // identical powers: ratio exactly 1
    c.compare_high_power_uw = 5.55;
    const CompareResult res = compare_power_settings(c, 3, false);
    CHECK(res.pairs.size() == 3);
    for (const ComparePair& p : res.pairs) {
        CHECK(p.rms_low_px == p.rms_high_px);
        CHECK(p.ratio == doctest::Approx(1.0));
    }
    CHECK(res.sigma_low_rad == doctest::Approx(res.mean_rms_low_px * c.rad_per_px));
}

TEST_CASE("tune_from_config returns a grid point") {
    ExperimentConfig c = small_config();
    c.pass.transit_time_s = 6.0;
    c.grid.q_candidates = {1e-3, 1e-1};
    c.grid.r_candidates = {0.01, 1.0};
    const kalman::TuneResult res = tune_from_config(c);
    const bool q_ok = res.q == 1e-3 || res.q == 1e-1;
    const bool r_ok = res.r == 0.01 || res.r == 1.0;
    CHECK(q_ok);
    CHECK(r_ok);
    CHECK(res.rms >= 0.0);
}

TEST_CASE("figure csvs are written, empty inputs give headers only") {
    const fs::path dir = fs::temp_directory_path() / "bt_figs_test";
    fs::remove_all(dir);
    ExperimentConfig c = small_config();
    emit_figures_data({}, nullptr, c, dir.string());
    const std::string fig5 = slurp(dir / "fig5_compensation.csv");
    CHECK(fig5.find("t,disturbance_px,residual_px") != std::string::npos);
    CHECK(std::count(fig5.begin(), fig5.end(), '\n') == 2);  // comment + header

    // A blind spot at the track origin forces coasting rows into the fig7 set.
    c.occlusion.blind_spot = traj::BlindSpot{{0.0, 0.0}, 1.5};
    const RunResult res = run_experiment(c, false);
    const auto sweep = qkd::rate_vs_loss_sweep({20.0, 30.0}, 1e-6, 5e-7, c.geometry, c.bb84,
                                               c.cvqkd);
    emit_figures_data({res}, &sweep, c, dir.string());
    const std::string fig9 = slurp(dir / "fig9_key_rates.csv");
    CHECK(fig9.find("loss_db,r_dv_low,r_dv_high,k_cv_low,k_cv_high") != std::string::npos);
    const std::string fig6 = slurp(dir / "fig6_tracking.csv");
    CHECK(std::count(fig6.begin(), fig6.end(), '\n') >= 150);
    const std::string fig7 = slurp(dir / "fig7_blindspot.csv");
    CHECK(std::count(fig7.begin(), fig7.end(), '\n') > 2);  // gap rows present
    fs::remove_all(dir);
}
