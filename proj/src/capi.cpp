#include "beacontrack/beacontrack.h"

#include <cstring>
#include <filesystem>
#include <vector>

#include "config.hpp"
#include "runner.hpp"

struct bt_config {
    std::map<std::string, std::string> entries;
};

struct bt_report {
    bt::runner::RunReport report;
};

struct bt_table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

namespace {

thread_local std::string g_last_error;

bt_status fail(bt_status status, const char* what) {
    g_last_error = what;
    return status;
}

template <typename Fn>
bt_status guarded(Fn&& fn) {
    try {
        fn();
        return BT_OK;
    } catch (const bt::config_error& e) {
        return fail(BT_ERR_CONFIG, e.what());
    } catch (const bt::acquisition_error& e) {
        return fail(BT_ERR_ACQUISITION, e.what());
    } catch (const bt::numerical_error& e) {
        return fail(BT_ERR_NUMERIC, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(BT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(BT_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(BT_ERR_UNKNOWN, e.what());
    }
}

bt::runner::ExperimentConfig materialize(const bt_config* cfg) {
    return bt::runner::config_from_map(cfg->entries);
}

}  // namespace

extern "C" {

const char* bt_version(void) { return "1.0.0"; }

const char* bt_status_name(bt_status status) {
    switch (status) {
        case BT_OK: return "ok";
        case BT_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case BT_ERR_CONFIG: return "config_error";
        case BT_ERR_IO: return "io_error";
        case BT_ERR_ACQUISITION: return "acquisition_failure";
        case BT_ERR_NUMERIC: return "numerical_failure";
        case BT_ERR_UNKNOWN: return "unknown_error";
    }
    return "unknown_error";
}

const char* bt_last_error(void) { return g_last_error.c_str(); }

bt_status bt_config_create(bt_config** out) {
    if (!out) return fail(BT_ERR_INVALID_ARGUMENT, "bt_config_create: null out pointer");
    return guarded([&] { *out = new bt_config{}; });
}

bt_status bt_config_load(const char* path, bt_config** out) {
    if (!path || !out) return fail(BT_ERR_INVALID_ARGUMENT, "bt_config_load: null argument");
    return guarded([&] {
        auto entries = bt::runner::load_config_file(path);
        bt::runner::config_from_map(entries);  // validate eagerly
        *out = new bt_config{std::move(entries)};
    });
}

bt_status bt_config_set(bt_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value)
        return fail(BT_ERR_INVALID_ARGUMENT, "bt_config_set: null argument");
    return guarded([&] {
        auto trial = cfg->entries;
        trial[key] = value;
        bt::runner::config_from_map(trial);  // reject bad keys/values atomically
        cfg->entries = std::move(trial);
    });
}

bt_status bt_config_get(const bt_config* cfg, const char* key, char* buf, size_t cap) {
    if (!cfg || !key || !buf || cap == 0)
        return fail(BT_ERR_INVALID_ARGUMENT, "bt_config_get: null argument");
    return guarded([&] {
        const auto full = bt::runner::config_to_map(materialize(cfg));
        const auto it = full.find(key);
        if (it == full.end()) throw bt::config_error(key, "unknown key");
        if (it->second.size() + 1 > cap)
            throw std::invalid_argument("bt_config_get: buffer too small");
        std::memcpy(buf, it->second.c_str(), it->second.size() + 1);
    });
}

void bt_config_free(bt_config* cfg) { delete cfg; }

bt_status bt_run(const bt_config* cfg, int write_artifacts, bt_report** out) {
    if (!cfg || !out) return fail(BT_ERR_INVALID_ARGUMENT, "bt_run: null argument");
    return guarded([&] {
        const auto result = bt::runner::run_experiment(materialize(cfg), write_artifacts != 0);
        *out = new bt_report{result.report};
    });
}

double bt_report_rms_px(const bt_report* r) { return r->report.rms_px; }
double bt_report_rms_mrad(const bt_report* r) { return r->report.rms_mrad; }
double bt_report_sigma_theta_rad(const bt_report* r) { return r->report.sigma_theta_rad; }
double bt_report_rms_pre_px(const bt_report* r) { return r->report.rms_pre_px; }
double bt_report_rms_coast_px(const bt_report* r) { return r->report.rms_coast_px; }
double bt_report_rms_post_px(const bt_report* r) { return r->report.rms_post_px; }
int64_t bt_report_frames_total(const bt_report* r) { return r->report.frames_total; }
int64_t bt_report_frames_coast(const bt_report* r) { return r->report.frames_coast; }
int64_t bt_report_detections(const bt_report* r) { return r->report.detections; }
int64_t bt_report_saturation_count(const bt_report* r) { return r->report.saturation_count; }
int64_t bt_report_handoff_count(const bt_report* r) { return r->report.handoff_count; }
double bt_report_wall_time_s(const bt_report* r) { return r->report.wall_time_s; }
void bt_report_free(bt_report* r) { delete r; }

bt_status bt_tune(const bt_config* cfg, double* q_best, double* r_best, double* rms_best) {
    if (!cfg || !q_best || !r_best || !rms_best)
        return fail(BT_ERR_INVALID_ARGUMENT, "bt_tune: null argument");
    return guarded([&] {
        const auto res = bt::runner::tune_from_config(materialize(cfg));
        *q_best = res.q;
        *r_best = res.r;
        *rms_best = res.rms;
    });
}

bt_status bt_compare(const bt_config* cfg, int n_seeds, int write_artifacts, bt_table** out) {
    if (!cfg || !out) return fail(BT_ERR_INVALID_ARGUMENT, "bt_compare: null argument");
    return guarded([&] {
        const auto res = bt::runner::compare_power_settings(materialize(cfg), n_seeds,
                                                            write_artifacts != 0);
        auto* table = new bt_table;
        table->columns = {"seed", "rms_low_px", "rms_high_px", "ratio"};
        for (const auto& p : res.pairs)
            table->rows.push_back({static_cast<double>(p.seed), p.rms_low_px, p.rms_high_px,
                                   p.ratio});
        *out = table;
    });
}

bt_status bt_sweep(const bt_config* cfg, int write_artifacts, bt_table** out) {
    if (!cfg || !out) return fail(BT_ERR_INVALID_ARGUMENT, "bt_sweep: null argument");
    return guarded([&] {
        const auto c = materialize(cfg);
        const auto table = bt::qkd::rate_vs_loss_sweep(
            c.sweep_loss_grid(), c.sigma_low_px * c.rad_per_px, c.sigma_high_px * c.rad_per_px,
            c.geometry, c.bb84, c.cvqkd);
        if (write_artifacts) {
            std::filesystem::create_directories(c.out_dir);
            bt::qkd::write_sweep_csv(table, c.geometry, c.bb84, c.cvqkd,
                                     (std::filesystem::path(c.out_dir) / "sweep.csv").string());
        }
        auto* t = new bt_table;
        t->columns = {"loss_db", "r_dv_low", "r_dv_high", "k_cv_low", "k_cv_high"};
        for (const auto& row : table.rows)
            t->rows.push_back({row.loss_db, row.r_dv_low, row.r_dv_high, row.k_cv_low,
                               row.k_cv_high});
        *out = t;
    });
}

int bt_table_rows(const bt_table* table) { return static_cast<int>(table->rows.size()); }
int bt_table_cols(const bt_table* table) { return static_cast<int>(table->columns.size()); }

const char* bt_table_column_name(const bt_table* table, int col) {
    if (col < 0 || col >= static_cast<int>(table->columns.size())) return nullptr;
    return table->columns[static_cast<std::size_t>(col)].c_str();
}

double bt_table_cell(const bt_table* table, int row, int col) {
    if (row < 0 || row >= static_cast<int>(table->rows.size())) return 0.0;
    const auto& r = table->rows[static_cast<std::size_t>(row)];
    if (col < 0 || col >= static_cast<int>(r.size())) return 0.0;
    return r[static_cast<std::size_t>(col)];
}

void bt_table_free(bt_table* table) { delete table; }

}  // extern "C"
