// Command-line front end for the beacontrack shared library. Talks to the
// core exclusively through the C API.

#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "beacontrack/beacontrack.h"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitAcquisitionFailure = 3;

int exit_code_for(bt_status status) {
    switch (status) {
        case BT_OK: return 0;
        case BT_ERR_CONFIG: return kExitConfigError;
        case BT_ERR_ACQUISITION: return kExitAcquisitionFailure;
        default: return 1;
    }
}

int report_failure(bt_status status) {
    std::fprintf(stderr, "error (%s): %s\n", bt_status_name(status), bt_last_error());
    return exit_code_for(status);
}

struct ConfigHandle {
    bt_config* ptr = nullptr;
    ~ConfigHandle() { bt_config_free(ptr); }
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    bool dump_frames = false;
};

// Builds the configuration from the optional file plus CLI overrides.
bt_status build_config(const CommonOpts& opts, ConfigHandle& handle) {
    bt_status st = opts.config_path.empty() ? bt_config_create(&handle.ptr)
                                            : bt_config_load(opts.config_path.c_str(), &handle.ptr);
    if (st != BT_OK) return st;
    if (opts.seed >= 0) {
        st = bt_config_set(handle.ptr, "seed", std::to_string(opts.seed).c_str());
        if (st != BT_OK) return st;
    }
    if (!opts.out_dir.empty()) {
        st = bt_config_set(handle.ptr, "out_dir", opts.out_dir.c_str());
        if (st != BT_OK) return st;
    }
    if (opts.dump_frames) {
        st = bt_config_set(handle.ptr, "dump_frames", "true");
        if (st != BT_OK) return st;
    }
    return BT_OK;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Configuration file (key = value lines)");
    cmd->add_option("--seed", opts.seed, "Override the experiment seed");
    cmd->add_option("--out", opts.out_dir, "Output directory for CSV/PGM artifacts");
    cmd->add_flag("--dump-frames", opts.dump_frames, "Write every rendered frame as PGM");
}

void print_table(const bt_table* table) {
    const int rows = bt_table_rows(table);
    const int cols = bt_table_cols(table);
    for (int c = 0; c < cols; ++c)
        std::printf("%s%s", c ? "," : "", bt_table_column_name(table, c));
    std::printf("\n");
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c)
            std::printf("%s%.10g", c ? "," : "", bt_table_cell(table, r, c));
        std::printf("\n");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"beacontrack: closed-loop beacon tracking simulator and QKD rate calculator"};
    app.require_subcommand(1);

    CommonOpts run_opts, tune_opts, sweep_opts, compare_opts;
    int compare_seeds = 0;

    CLI::App* run = app.add_subcommand("run", "Run one closed-loop tracking experiment");
    add_common(run, run_opts);
    CLI::App* tune = app.add_subcommand("tune", "Grid-search the filter noise covariances");
    add_common(tune, tune_opts);
    CLI::App* sweep = app.add_subcommand("sweep", "Key rate vs channel loss (four curves)");
    add_common(sweep, sweep_opts);
    CLI::App* compare = app.add_subcommand("compare", "Paired low/high beacon power runs");
    add_common(compare, compare_opts);
    compare->add_option("--seeds", compare_seeds, "Number of paired seeds (default from config)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        ConfigHandle cfg;
        bt_status st = build_config(run_opts, cfg);
        if (st != BT_OK) return report_failure(st);
        bt_report* report = nullptr;
        st = bt_run(cfg.ptr, 1, &report);
        if (st != BT_OK) return report_failure(st);
        std::printf("frames: %lld (coasted %lld), detections: %lld\n",
                    static_cast<long long>(bt_report_frames_total(report)),
                    static_cast<long long>(bt_report_frames_coast(report)),
                    static_cast<long long>(bt_report_detections(report)));
        std::printf("rms: %.6g px (%.6g mrad), segments pre/coast/post: %.6g/%.6g/%.6g px\n",
                    bt_report_rms_px(report), bt_report_rms_mrad(report),
                    bt_report_rms_pre_px(report), bt_report_rms_coast_px(report),
                    bt_report_rms_post_px(report));
        std::printf("saturations: %lld, handoffs: %lld, wall time: %.2f s\n",
                    static_cast<long long>(bt_report_saturation_count(report)),
                    static_cast<long long>(bt_report_handoff_count(report)),
                    bt_report_wall_time_s(report));
        bt_report_free(report);
        return 0;
    }

    if (tune->parsed()) {
        ConfigHandle cfg;
        bt_status st = build_config(tune_opts, cfg);
        if (st != BT_OK) return report_failure(st);
        double q = 0.0, r = 0.0, rms = 0.0;
        st = bt_tune(cfg.ptr, &q, &r, &rms);
        if (st != BT_OK) return report_failure(st);
        std::printf("q_best: %.10g\nr_best: %.10g\nrms_best: %.10g px\n", q, r, rms);
        return 0;
    }

    if (sweep->parsed()) {
        ConfigHandle cfg;
        bt_status st = build_config(sweep_opts, cfg);
        if (st != BT_OK) return report_failure(st);
        bt_table* table = nullptr;
        st = bt_sweep(cfg.ptr, 1, &table);
        if (st != BT_OK) return report_failure(st);
        print_table(table);
        bt_table_free(table);
        return 0;
    }

    ConfigHandle cfg;
    bt_status st = build_config(compare_opts, cfg);
    if (st != BT_OK) return report_failure(st);
    if (compare_seeds <= 0) {
        char buf[32];
        st = bt_config_get(cfg.ptr, "compare.seeds", buf, sizeof(buf));
        if (st != BT_OK) return report_failure(st);
        compare_seeds = std::atoi(buf);
    }
    bt_table* table = nullptr;
    st = bt_compare(cfg.ptr, compare_seeds, 1, &table);
    if (st != BT_OK) return report_failure(st);
    print_table(table);
    bt_table_free(table);
    return 0;
}
