#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rng.hpp"

namespace bt::runner {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDarkStream = 0x4441524bULL;   // distinct rng stream ids
constexpr std::uint64_t kFrameStream = 0x4652414dULL;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct SegmentAccum {
    double sum = 0.0;
    long count = 0;
    void add(Vec2 err) {
        sum += err.x * err.x + err.y * err.y;
        ++count;
    }
    double rms() const { return count ? std::sqrt(sum / count) : 0.0; }
};

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, bool write_artifacts) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const frames::CameraModel& cam = cfg.camera;
    const frames::NoiseModel noise = cfg.noise.materialize(cam, cfg.seed);
    const double dt = cam.dt();
    const Vec2 center{(cam.width_px - 1) / 2.0, (cam.height_px - 1) / 2.0};
    const long n_frames =
        static_cast<long>(std::floor(cfg.pass.transit_time_s * cam.frame_rate_hz)) + 1;

    fs::path out(cfg.out_dir);
    if (write_artifacts) fs::create_directories(out);

    Rng dark_rng = Rng::derive(cfg.seed, kDarkStream);
    const frames::Frame dark = frames::make_dark_frame(cam, noise, cfg.dark_frames, dark_rng);

    const kalman::FilterModel model =
        cfg.filter_kind == kalman::FilterKind::ConstantVelocity
            ? kalman::build_cv_model(dt, cfg.filter_q, cfg.filter_r)
            : kalman::build_cj_model(dt, cfg.filter_q, cfg.filter_r);

    control::FsmModel fsm;
    fsm.max_deflection_deg = cfg.fsm_max_deflection_deg;
    fsm.distance_mm = cfg.fsm_distance_mm;
    fsm.latency_frames = cfg.fsm_latency_frames;
    fsm.loop_gain = cfg.fsm_gain;

    // The beam lands at: center + truth + fsm shift + coarse shift. On a
    // coarse handoff the mount recenters the line of sight, which we model as
    // an instantaneous shift absorbing the current displacement. The mount
    // has already acquired the target when the pass starts.
    Vec2 coarse_shift = -traj::disturbed_position(traj::true_position(cfg.pass, 0.0),
                                                  cfg.disturbance, 0.0);

    std::optional<kalman::FilterState> state;
    std::vector<Vec2> learn_meas;
    std::vector<long> learn_idx;
    const long learn_deadline = std::min<long>(cfg.learn_max_frames, n_frames);
    bool zenith_flipped = false;
    double peak_speed = 0.0;
    long peak_speed_frame = 0;

    RunResult result;
    result.control.reserve(static_cast<std::size_t>(n_frames));
    SegmentAccum total, pre, coast, post;
    bool coast_seen = false;

    for (long k = 0; k < n_frames; ++k) {
        const double t = k * dt;
        const Vec2 track = traj::true_position(cfg.pass, t);
        const Vec2 truth = traj::disturbed_position(track, cfg.disturbance, t);
        const bool visible = traj::is_visible(cfg.occlusion, track, t);

        const Vec2 fsm_shift = cfg.control_enabled
                                   ? control::beam_shift_px(fsm, cam.pixel_pitch_um)
                                   : Vec2{0.0, 0.0};
        const Vec2 beam_sensor = center + truth + fsm_shift + coarse_shift;

        Rng frame_rng = Rng::derive(cfg.seed, kFrameStream + static_cast<std::uint64_t>(k));
        const frames::Frame frame =
            frames::render_frame(beam_sensor, cfg.beam, cam, noise, !visible, frame_rng, t, k);
        const bool dump = write_artifacts && cfg.dump_frames;
        if (dump) frames::write_pgm(frame, (out / frames::frame_filename(k)).string());

        centroid::PipelineStages stages;
        const auto det = centroid::detect_beacon(frame, dark, cfg.pipeline, dump ? &stages : nullptr);
        if (dump) {
            char name[64];
            std::snprintf(name, sizeof(name), "stage_%06lld_subtracted.pgm",
                          static_cast<long long>(k));
            frames::write_pgm(stages.subtracted, (out / name).string());
            std::snprintf(name, sizeof(name), "stage_%06lld_opened.pgm",
                          static_cast<long long>(k));
            frames::write_pgm(stages.opened, (out / name).string());
            std::snprintf(name, sizeof(name), "stage_%06lld_mask.pgm",
                          static_cast<long long>(k));
            frames::write_pgm(stages.mask, (out / name).string());
        }
        if (det) ++result.report.detections;

        // Reconstructed displacement: sensor offset with the applied
        // corrections stitched back in, i.e. the trajectory the filter tracks.
        std::optional<Vec2> meas;
        if (det) meas = det->centroid - center - fsm_shift - coarse_shift;

        bool coasting = false;
        std::optional<Vec2> est;

        const bool learning = !state.has_value();
        if (learning) {
            if (meas) {
                learn_meas.push_back(*meas);
                learn_idx.push_back(k);
            }
            ++result.report.frames_learning;
            const bool have_enough = static_cast<int>(learn_meas.size()) >= cfg.learn_detections;
            const bool window_over = k + 1 >= learn_deadline;
            if (have_enough || window_over) {
                if (static_cast<int>(learn_meas.size()) < cfg.learn_min_detections)
                    throw acquisition_error(
                        "run_experiment: only " + std::to_string(learn_meas.size()) +
                        " detections in the learning window (need >= " +
                        std::to_string(cfg.learn_min_detections) + ")");
                state = kalman::init_filter(learn_meas, learn_idx, model);
            }
        } else {
            const kalman::StepResult sr = kalman::step(*state, model, meas);
            state = sr.state;
            est = sr.estimate;
            coasting = !meas.has_value();

            // Zenith inversion: fire once when the filtered speed has passed
            // its maximum (5-frame hysteresis).
            if (cfg.zenith_flip_auto && model.dim == 8 && !zenith_flipped) {
                const double speed = std::hypot(state->x(2, 0), state->x(3, 0));
                if (speed > peak_speed) {
                    peak_speed = speed;
                    peak_speed_frame = k;
                } else if (k - peak_speed_frame >= 5) {
                    state = kalman::zenith_flip(*state);
                    zenith_flipped = true;
                    ++result.report.zenith_flips;
                }
            }

            const Vec2 err = *est - truth;
            total.add(err);
            if (coasting) {
                coast_seen = true;
                coast.add(err);
            } else if (!coast_seen) {
                pre.add(err);
            } else {
                post.add(err);
            }

            TrackRow row;
            row.t = t;
            row.seq = k;
            row.meas = meas;
            row.est = *est;
            row.truth = truth;
            row.coasting = coasting;
            result.track.push_back(row);
        }

        ControlRow crow;
        crow.t = t;
        crow.disturbance_px = traj::disturbance_offset(cfg.disturbance, t).norm();
        crow.residual_px = (beam_sensor - center).norm();
        if (cfg.control_enabled) {
            // Steering target: the detection when present, else the filter
            // estimate mapped back onto the sensor. While learning without a
            // detection there is nothing to act on.
            const Vec2 est_sensor =
                est ? center + *est + fsm_shift + coarse_shift : center;
            const control::FsmCommand cmd =
                control::closed_loop_step(fsm, det, est_sensor, center, cam.pixel_pitch_um);
            crow.correction_deg = cmd.delta_deg;
            crow.saturated = cmd.saturated;
            crow.handoff = cmd.handoff;
            if (cmd.saturated) ++result.report.saturation_count;
            if (cmd.handoff) {
                ++result.report.handoff_count;
                fsm.reset();
                coarse_shift = -truth;  // coarse mount recenters the beam
            }
        }
        result.control.push_back(crow);
    }

    if (!state.has_value())
        throw acquisition_error("run_experiment: learning window never completed");

    RunReport& rep = result.report;
    rep.frames_total = n_frames;
    rep.frames_pre = pre.count;
    rep.frames_coast = coast.count;
    rep.frames_post = post.count;
    rep.rms_px = total.rms();
    rep.rms_pre_px = pre.rms();
    rep.rms_coast_px = coast.rms();
    rep.rms_post_px = post.rms();
    rep.sigma_theta_rad = rep.rms_px * cfg.rad_per_px;
    rep.rms_mrad = rep.sigma_theta_rad * 1e3;
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    if (write_artifacts) {
        write_tracking_csv(result.track, (out / "tracking.csv").string());
        write_control_csv(result.control, (out / "control.csv").string());
        traj::write_truth_csv(cfg.pass, cfg.occlusion, cam.frame_rate_hz,
                              (out / "truth.csv").string());
        emit_figures_data({result}, nullptr, cfg, cfg.out_dir);
    }
    return result;
}

CompareResult compare_power_settings(const ExperimentConfig& cfg, int n_seeds,
                                     bool write_artifacts) {
    if (n_seeds < 1) throw std::invalid_argument("compare_power_settings: n_seeds must be >= 1");
    CompareResult res;
    res.pairs.reserve(static_cast<std::size_t>(n_seeds));
    double sum_low = 0.0, sum_high = 0.0;
    for (int i = 0; i < n_seeds; ++i) {
        ExperimentConfig low = cfg;
        low.seed = cfg.seed + static_cast<std::uint64_t>(i);
        low.beam.power_w = cfg.compare_low_power_uw * 1e-6;
        ExperimentConfig high = low;
        high.beam.power_w = cfg.compare_high_power_uw * 1e-6;

        const RunReport rl = run_experiment(low, false).report;
        const RunReport rh = run_experiment(high, false).report;
        ComparePair pair;
        pair.seed = low.seed;
        pair.rms_low_px = rl.rms_px;
        pair.rms_high_px = rh.rms_px;
        pair.ratio = rh.rms_px > 0.0 ? rl.rms_px / rh.rms_px : 0.0;
        res.pairs.push_back(pair);
        sum_low += rl.rms_px;
        sum_high += rh.rms_px;
    }
    res.mean_rms_low_px = sum_low / n_seeds;
    res.mean_rms_high_px = sum_high / n_seeds;
    res.sigma_low_rad = res.mean_rms_low_px * cfg.rad_per_px;
    res.sigma_high_rad = res.mean_rms_high_px * cfg.rad_per_px;
    if (write_artifacts) {
        fs::create_directories(cfg.out_dir);
        write_compare_csv(res, (fs::path(cfg.out_dir) / "compare.csv").string());
    }
    return res;
}

kalman::TuneResult tune_from_config(const ExperimentConfig& cfg) {
    // Calibration pass: run the loop once at the configured power with a
    // mid-grid filter, then grid-search q/r offline on the recorded
    // measurement/truth pairs.
    RunResult run = run_experiment(cfg, false);
    std::vector<Vec2> truth;
    std::vector<std::optional<Vec2>> meas;
    truth.reserve(run.track.size());
    meas.reserve(run.track.size());
    for (const TrackRow& row : run.track) {
        truth.push_back(row.truth);
        meas.push_back(row.meas);
    }
    return kalman::tune_grid_search(truth, meas, cfg.grid, cfg.filter_kind, cfg.camera.dt(),
                                    cfg.learn_detections);
}

void write_tracking_csv(const std::vector<TrackRow>& rows, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("write_tracking_csv: cannot open " + path);
    outf << "t,x_meas,y_meas,x_est,y_est,x_true,y_true,coasting\n";
    for (const TrackRow& r : rows) {
        outf << fmt(r.t) << ',';
        if (r.meas) outf << fmt(r.meas->x) << ',' << fmt(r.meas->y);
        else outf << ',';
        outf << ',' << fmt(r.est.x) << ',' << fmt(r.est.y) << ',' << fmt(r.truth.x) << ','
             << fmt(r.truth.y) << ',' << (r.coasting ? 1 : 0) << '\n';
    }
}

void write_control_csv(const std::vector<ControlRow>& rows, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("write_control_csv: cannot open " + path);
    outf << "t,disturbance_px,correction_x_deg,correction_y_deg,residual_px,saturated,handoff\n";
    for (const ControlRow& r : rows) {
        outf << fmt(r.t) << ',' << fmt(r.disturbance_px) << ',' << fmt(r.correction_deg.x) << ','
             << fmt(r.correction_deg.y) << ',' << fmt(r.residual_px) << ','
             << (r.saturated ? 1 : 0) << ',' << (r.handoff ? 1 : 0) << '\n';
    }
}

void write_compare_csv(const CompareResult& result, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("write_compare_csv: cannot open " + path);
    outf << "seed,rms_low_px,rms_high_px,ratio\n";
    for (const ComparePair& p : result.pairs)
        outf << p.seed << ',' << fmt(p.rms_low_px) << ',' << fmt(p.rms_high_px) << ','
             << fmt(p.ratio) << '\n';
}

void emit_figures_data(const std::vector<RunResult>& runs, const qkd::SweepTable* sweep,
                       const ExperimentConfig& cfg, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path base(dir);

    // Fig. 5 analog: beam displacement vs FSM compensation.
    {
        std::ofstream outf(base / "fig5_compensation.csv");
        outf << "# per-frame disturbance magnitude and FSM residual\n";
        outf << "t,disturbance_px,residual_px,saturated,handoff\n";
        if (!runs.empty())
            for (const ControlRow& r : runs.front().control)
                outf << fmt(r.t) << ',' << fmt(r.disturbance_px) << ',' << fmt(r.residual_px)
                     << ',' << (r.saturated ? 1 : 0) << ',' << (r.handoff ? 1 : 0) << '\n';
    }
    // Fig. 6 analog: tracked vs true trajectory with coasting flags.
    {
        std::ofstream outf(base / "fig6_tracking.csv");
        outf << "# estimated vs true trajectory, one block per run\n";
        outf << "run,t,x_est,y_est,x_true,y_true,coasting\n";
        for (std::size_t i = 0; i < runs.size(); ++i)
            for (const TrackRow& r : runs[i].track)
                outf << i << ',' << fmt(r.t) << ',' << fmt(r.est.x) << ',' << fmt(r.est.y) << ','
                     << fmt(r.truth.x) << ',' << fmt(r.truth.y) << ',' << (r.coasting ? 1 : 0)
                     << '\n';
    }
    // Fig. 7 analog: coasted samples only (occlusions and blind spot gaps).
    {
        std::ofstream outf(base / "fig7_blindspot.csv");
        outf << "# frames where the filter coasted without a measurement\n";
        outf << "run,t,x_est,y_est,x_true,y_true\n";
        for (std::size_t i = 0; i < runs.size(); ++i)
            for (const TrackRow& r : runs[i].track)
                if (r.coasting)
                    outf << i << ',' << fmt(r.t) << ',' << fmt(r.est.x) << ',' << fmt(r.est.y)
                         << ',' << fmt(r.truth.x) << ',' << fmt(r.truth.y) << '\n';
    }
    // Fig. 9 analog: the four-curve rate sweep.
    if (sweep)
        qkd::write_sweep_csv(*sweep, cfg.geometry, cfg.bb84, cfg.cvqkd,
                             (base / "fig9_key_rates.csv").string());
}

}  // namespace bt::runner
