// Exercises the shared-library surface plus the CLI binary's exit codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "beacontrack/beacontrack.h"

namespace fs = std::filesystem;

namespace {

void apply_small_settings(bt_config* cfg) {
    const char* kv[][2] = {
        {"seed", "4242"},
        {"camera.width_px", "64"},
        {"camera.height_px", "64"},
        {"beam.waist_px", "5"},
        {"pass.transit_time_s", "8"},
        {"pass.window_deg", "2"},
        {"pass.scale_px_per_mrad", "0.4"},
        {"filter.learn_detections", "20"},
        {"filter.learn_max_frames", "30"},
        {"filter.learn_min", "5"},
    };
    for (const auto& pair : kv) REQUIRE(bt_config_set(cfg, pair[0], pair[1]) == BT_OK);
}

std::string write_temp(const std::string& name, const std::string& body) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << body;
    return p.string();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(bt_version()) == "1.0.0");
    CHECK(std::string(bt_status_name(BT_OK)) == "ok");
    CHECK(std::string(bt_status_name(BT_ERR_CONFIG)) == "config_error");
    CHECK(std::string(bt_status_name(BT_ERR_ACQUISITION)) == "acquisition_failure");
}

TEST_CASE("config create, set, get") {
    bt_config* cfg = nullptr;
    REQUIRE(bt_config_create(&cfg) == BT_OK);

    char buf[64];
    REQUIRE(bt_config_get(cfg, "camera.width_px", buf, sizeof(buf)) == BT_OK);
    CHECK(std::string(buf) == "512");

    REQUIRE(bt_config_set(cfg, "camera.width_px", "256") == BT_OK);
    REQUIRE(bt_config_get(cfg, "camera.width_px", buf, sizeof(buf)) == BT_OK);
    CHECK(std::string(buf) == "256");

    CHECK(bt_config_set(cfg, "camera.bogus", "1") == BT_ERR_CONFIG);
    CHECK(std::string(bt_last_error()).find("camera.bogus") != std::string::npos);
    CHECK(bt_config_set(cfg, "camera.width_px", "potato") == BT_ERR_CONFIG);

    // Failed set must not corrupt the stored configuration.
    REQUIRE(bt_config_get(cfg, "camera.width_px", buf, sizeof(buf)) == BT_OK);
    CHECK(std::string(buf) == "256");

    CHECK(bt_config_get(cfg, "no.such.key", buf, sizeof(buf)) == BT_ERR_CONFIG);
    CHECK(bt_config_get(cfg, "camera.width_px", buf, 2) == BT_ERR_INVALID_ARGUMENT);
    CHECK(bt_config_create(nullptr) == BT_ERR_INVALID_ARGUMENT);

    bt_config_free(cfg);
}

TEST_CASE("config file loading") {
    const std::string good = write_temp("bt_capi_good.cfg",
                                        "seed = 5\ncamera.width_px = 64\ncamera.height_px = 64\n");
    bt_config* cfg = nullptr;
    REQUIRE(bt_config_load(good.c_str(), &cfg) == BT_OK);
    char buf[64];
    REQUIRE(bt_config_get(cfg, "seed", buf, sizeof(buf)) == BT_OK);
    CHECK(std::string(buf) == "5");
    bt_config_free(cfg);

    const std::string bad = write_temp("bt_capi_bad.cfg", "camera.width_px == 64\n");
    bt_config* bad_cfg = nullptr;
    CHECK(bt_config_load(bad.c_str(), &bad_cfg) == BT_ERR_CONFIG);
    CHECK(bt_config_load("/no/such/path.cfg", &bad_cfg) == BT_ERR_CONFIG);
}

TEST_CASE("run through the shared library") {
    bt_config* cfg = nullptr;
    REQUIRE(bt_config_create(&cfg) == BT_OK);
    apply_small_settings(cfg);

    bt_report* report = nullptr;
    REQUIRE(bt_run(cfg, 0, &report) == BT_OK);
    CHECK(bt_report_frames_total(report) == 161);
    CHECK(bt_report_rms_px(report) > 0.0);
    CHECK(bt_report_rms_px(report) < 2.0);
    CHECK(bt_report_detections(report) > 100);
    CHECK(bt_report_rms_mrad(report) ==
          doctest::Approx(bt_report_sigma_theta_rad(report) * 1e3));
    CHECK(bt_report_wall_time_s(report) > 0.0);
    bt_report_free(report);

    // Occlusion across the whole learning window surfaces as acquisition failure.
    REQUIRE(bt_config_set(cfg, "occlusion.intervals", "0-2") == BT_OK);
    bt_report* failed = nullptr;
    CHECK(bt_run(cfg, 0, &failed) == BT_ERR_ACQUISITION);
    CHECK(std::string(bt_last_error()).find("learning window") != std::string::npos);

    bt_config_free(cfg);
}

TEST_CASE("sweep and compare tables") {
    bt_config* cfg = nullptr;
    REQUIRE(bt_config_create(&cfg) == BT_OK);
    apply_small_settings(cfg);
    REQUIRE(bt_config_set(cfg, "qkd.sweep_loss_min_db", "20") == BT_OK);
    REQUIRE(bt_config_set(cfg, "qkd.sweep_loss_max_db", "30") == BT_OK);
    REQUIRE(bt_config_set(cfg, "qkd.sweep_loss_step_db", "5") == BT_OK);

    bt_table* sweep = nullptr;
    REQUIRE(bt_sweep(cfg, 0, &sweep) == BT_OK);
    CHECK(bt_table_rows(sweep) == 3);
    CHECK(bt_table_cols(sweep) == 5);
    CHECK(std::string(bt_table_column_name(sweep, 0)) == "loss_db");
    CHECK(std::string(bt_table_column_name(sweep, 4)) == "k_cv_high");
    CHECK(bt_table_cell(sweep, 0, 0) == 20.0);
    CHECK(bt_table_cell(sweep, 2, 0) == 30.0);
    CHECK(bt_table_cell(sweep, 0, 1) >= bt_table_cell(sweep, 1, 1));  // monotone
    CHECK(bt_table_column_name(sweep, 99) == nullptr);
    bt_table_free(sweep);

    REQUIRE(bt_config_set(cfg, "compare.low_power_uw", "5.55") == BT_OK);
    REQUIRE(bt_config_set(cfg, "compare.high_power_uw", "5.55") == BT_OK);
    bt_table* cmp = nullptr;
    REQUIRE(bt_compare(cfg, 2, 0, &cmp) == BT_OK);
    CHECK(bt_table_rows(cmp) == 2);
    CHECK(bt_table_cell(cmp, 0, 3) == doctest::Approx(1.0));  // identical powers
    bt_table_free(cmp);
    bt_config_free(cfg);
}

TEST_CASE("cli exit codes") {
    const std::string good = write_temp(
        "bt_cli_ok.cfg",
        "seed = 11\ncamera.width_px = 64\ncamera.height_px = 64\nbeam.waist_px = 5\n"
        "pass.transit_time_s = 8\npass.window_deg = 2\npass.scale_px_per_mrad = 0.4\n"
        "filter.learn_detections = 20\nfilter.learn_max_frames = 30\nfilter.learn_min = 5\n");
    const fs::path out = fs::temp_directory_path() / "bt_cli_out";
    CHECK(run_cli("run --config " + good + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "tracking.csv"));
    fs::remove_all(out);

    const std::string bad = write_temp("bt_cli_bad.cfg", "camera.width_px = -3\n");
    CHECK(run_cli("run --config " + bad) == 2);

    const std::string occluded = write_temp(
        "bt_cli_occ.cfg",
        "seed = 11\ncamera.width_px = 64\ncamera.height_px = 64\nbeam.waist_px = 5\n"
        "pass.transit_time_s = 8\npass.window_deg = 2\npass.scale_px_per_mrad = 0.4\n"
        "filter.learn_detections = 20\nfilter.learn_max_frames = 30\nfilter.learn_min = 5\n"
        "occlusion.intervals = 0-2\n");
    CHECK(run_cli("run --config " + occluded) == 3);

    CHECK(run_cli("sweep --config " + good) == 0);
}
