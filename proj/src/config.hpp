#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "centroid.hpp"
#include "control.hpp"
#include "frames.hpp"
#include "kalman.hpp"
#include "qkd.hpp"
#include "trajectory.hpp"

namespace bt::runner {

enum class FixedPatternKind { None, Constant, Gradient };

struct NoiseSpec {
    FixedPatternKind pattern = FixedPatternKind::None;
    double pattern_value = 0.0;
    double salt_pepper_prob = 0.001;
    int salt_value = 255;
    int pepper_value = 0;
    bool shot_noise = true;

    frames::NoiseModel materialize(const frames::CameraModel& cam, std::uint64_t seed) const;
};

// Everything a run needs, built from a flat dotted-key configuration file.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool dump_frames = false;
    int dark_frames = 16;  // frames averaged into the dark reference

    frames::CameraModel camera;
    frames::BeamModel beam;
    NoiseSpec noise;
    traj::PassProfile pass;
    traj::OcclusionSchedule occlusion;
    traj::MirrorDisturbance disturbance;
    centroid::PipelineConfig pipeline;

    kalman::FilterKind filter_kind = kalman::FilterKind::ConstantVelocity;
    double filter_q = 1e-3;
    double filter_r = 0.05;
    int learn_detections = 100;
    int learn_max_frames = 150;
    int learn_min_detections = 10;
    bool zenith_flip_auto = true;  // fires only for the 8-state filter

    kalman::TuningGrid grid = kalman::TuningGrid::defaults();

    double fsm_max_deflection_deg = 4.0;
    double fsm_distance_mm = 25.0;
    int fsm_latency_frames = 0;
    double fsm_gain = 1.0;
    bool control_enabled = true;

    qkd::LinkGeometry geometry;
    qkd::Bb84Params bb84;
    qkd::CvqkdParams cvqkd;
    double rad_per_px = 2.315e-6;  // pitch 4.63 um over a 2.0 m stand-off
    double sigma_low_px = 0.27107;
    double sigma_high_px = 0.02661;
    double sweep_loss_min_db = 10.0;
    double sweep_loss_max_db = 50.0;
    double sweep_loss_step_db = 1.0;

    double compare_low_power_uw = 0.03;
    double compare_high_power_uw = 5.55;
    int compare_seeds = 20;

    void validate() const;  // throws config_error with the offending key path
    std::vector<double> sweep_loss_grid() const;
};

// Flat `key = value` file: blank lines and '#' comments ignored, keys use
// dotted section names. Unknown keys are errors.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

ExperimentConfig config_from_map(const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> config_to_map(const ExperimentConfig& cfg);

}  // namespace bt::runner
