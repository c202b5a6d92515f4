/* beacontrack C API: beacon-tracking simulator and QKD rate calculator.
 *
 * All entry points return bt_status; BT_OK is 0. On failure a thread-local
 * message is available through bt_last_error(). Objects returned through
 * out-parameters are owned by the caller and released with the matching
 * *_free function. Handles are opaque.
 */
#ifndef BEACONTRACK_H
#define BEACONTRACK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BT_API __declspec(dllexport)
#else
#define BT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bt_status {
    BT_OK = 0,
    BT_ERR_INVALID_ARGUMENT = 1,
    BT_ERR_CONFIG = 2,      /* malformed configuration file or value */
    BT_ERR_IO = 3,          /* file system failure */
    BT_ERR_ACQUISITION = 4, /* learning window yielded too few detections */
    BT_ERR_NUMERIC = 5,     /* numerical failure inside the filter or rates */
    BT_ERR_UNKNOWN = 6
} bt_status;

typedef struct bt_config bt_config;
typedef struct bt_report bt_report;
typedef struct bt_table bt_table;

BT_API const char* bt_version(void);
BT_API const char* bt_status_name(bt_status status);

/* Thread-local message describing the most recent failure. */
BT_API const char* bt_last_error(void);

/* Configuration ----------------------------------------------------------- */

/* Creates a configuration populated with the built-in defaults. */
BT_API bt_status bt_config_create(bt_config** out);
/* Loads a flat `key = value` configuration file. */
BT_API bt_status bt_config_load(const char* path, bt_config** out);
/* Overrides one key; the value is validated against the full configuration. */
BT_API bt_status bt_config_set(bt_config* cfg, const char* key, const char* value);
/* Reads the current value of a key into buf (NUL terminated). */
BT_API bt_status bt_config_get(const bt_config* cfg, const char* key, char* buf, size_t cap);
BT_API void bt_config_free(bt_config* cfg);

/* Experiments ------------------------------------------------------------- */

/* Runs the closed-loop experiment; artifacts land in the configured out_dir
 * unless write_artifacts is 0. */
BT_API bt_status bt_run(const bt_config* cfg, int write_artifacts, bt_report** out);

BT_API double bt_report_rms_px(const bt_report* report);
BT_API double bt_report_rms_mrad(const bt_report* report);
BT_API double bt_report_sigma_theta_rad(const bt_report* report);
BT_API double bt_report_rms_pre_px(const bt_report* report);
BT_API double bt_report_rms_coast_px(const bt_report* report);
BT_API double bt_report_rms_post_px(const bt_report* report);
BT_API int64_t bt_report_frames_total(const bt_report* report);
BT_API int64_t bt_report_frames_coast(const bt_report* report);
BT_API int64_t bt_report_detections(const bt_report* report);
BT_API int64_t bt_report_saturation_count(const bt_report* report);
BT_API int64_t bt_report_handoff_count(const bt_report* report);
BT_API double bt_report_wall_time_s(const bt_report* report);
BT_API void bt_report_free(bt_report* report);

/* Offline grid search for the filter noise covariances. */
BT_API bt_status bt_tune(const bt_config* cfg, double* q_best, double* r_best, double* rms_best);

/* Paired low/high power runs; one table row per seed:
 * seed, rms_low_px, rms_high_px, ratio. */
BT_API bt_status bt_compare(const bt_config* cfg, int n_seeds, int write_artifacts,
                            bt_table** out);

/* Rate-vs-loss sweep; rows: loss_db, r_dv_low, r_dv_high, k_cv_low, k_cv_high. */
BT_API bt_status bt_sweep(const bt_config* cfg, int write_artifacts, bt_table** out);

BT_API int bt_table_rows(const bt_table* table);
BT_API int bt_table_cols(const bt_table* table);
BT_API const char* bt_table_column_name(const bt_table* table, int col);
BT_API double bt_table_cell(const bt_table* table, int row, int col);
BT_API void bt_table_free(bt_table* table);

#ifdef __cplusplus
}
#endif

#endif /* BEACONTRACK_H */
