#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace bt::runner {

struct RunReport {
    double rms_px = 0.0;
    double rms_mrad = 0.0;
    double sigma_theta_rad = 0.0;
    double rms_pre_px = 0.0;    // tracked frames before the first coast
    double rms_coast_px = 0.0;  // frames coasted on prediction only
    double rms_post_px = 0.0;   // tracked frames after the first coast
    long frames_total = 0;
    long frames_learning = 0;
    long frames_pre = 0;
    long frames_coast = 0;
    long frames_post = 0;
    long detections = 0;
    long saturation_count = 0;
    long handoff_count = 0;
    long zenith_flips = 0;
    double wall_time_s = 0.0;
};

struct TrackRow {
    double t = 0.0;
    std::int64_t seq = 0;
    std::optional<Vec2> meas;  // blank in the CSV when occluded
    Vec2 est;
    Vec2 truth;
    bool coasting = false;
};

struct ControlRow {
    double t = 0.0;
    double disturbance_px = 0.0;
    Vec2 correction_deg;
    double residual_px = 0.0;
    bool saturated = false;
    bool handoff = false;
};

struct RunResult {
    RunReport report;
    std::vector<TrackRow> track;      // post-learning frames
    std::vector<ControlRow> control;  // every frame
};

// Full closed-loop experiment: render, detect, filter (or coast), steer, log.
// Deterministic for a fixed seed. When `write_artifacts` is set the tracking,
// control and truth CSVs (and optionally PGM frames) land in cfg.out_dir.
RunResult run_experiment(const ExperimentConfig& cfg, bool write_artifacts = true);

struct ComparePair {
    std::uint64_t seed = 0;
    double rms_low_px = 0.0;
    double rms_high_px = 0.0;
    double ratio = 0.0;
};

struct CompareResult {
    std::vector<ComparePair> pairs;
    double mean_rms_low_px = 0.0;
    double mean_rms_high_px = 0.0;
    double sigma_low_rad = 0.0;
    double sigma_high_rad = 0.0;
};

// Paired runs differing only in beam power, one pair per seed.
CompareResult compare_power_settings(const ExperimentConfig& cfg, int n_seeds,
                                     bool write_artifacts = true);

// Offline grid search on a synthetic pass generated from the config.
kalman::TuneResult tune_from_config(const ExperimentConfig& cfg);

// Figure-analog CSV set; empty inputs produce header-only files.
void emit_figures_data(const std::vector<RunResult>& runs, const qkd::SweepTable* sweep,
                       const ExperimentConfig& cfg, const std::string& dir);

void write_tracking_csv(const std::vector<TrackRow>& rows, const std::string& path);
void write_control_csv(const std::vector<ControlRow>& rows, const std::string& path);
void write_compare_csv(const CompareResult& result, const std::string& path);

}  // namespace bt::runner
