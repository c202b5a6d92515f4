#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bt::runner {

frames::NoiseModel NoiseSpec::materialize(const frames::CameraModel& cam,
                                          std::uint64_t seed) const {
    frames::NoiseModel n;
    switch (pattern) {
        case FixedPatternKind::None: break;
        case FixedPatternKind::Constant: n.fixed_pattern = frames::constant_pattern(cam, pattern_value); break;
        case FixedPatternKind::Gradient: n.fixed_pattern = frames::gradient_pattern(cam, pattern_value); break;
    }
    n.salt_pepper_prob = salt_pepper_prob;
    n.salt_value = salt_value;
    n.pepper_value = pepper_value;
    n.shot_noise = shot_noise;
    n.seed = seed;
    return n;
}

void ExperimentConfig::validate() const {
    const auto wrap = [](const char* key, auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw config_error(key, e.what());
        }
    };
    wrap("camera", [&] { camera.validate(); });
    wrap("beam", [&] { beam.validate(); });
    wrap("noise", [&] { noise.materialize(camera, seed).validate(camera); });
    wrap("pass", [&] { pass.validate(); });
    wrap("occlusion", [&] { occlusion.validate(); });
    wrap("disturbance", [&] { disturbance.validate(); });
    wrap("pipeline", [&] { pipeline.validate(); });
    wrap("tune", [&] { grid.validate(); });
    wrap("qkd", [&] { geometry.validate(); });
    wrap("bb84", [&] { bb84.validate(); });
    wrap("cvqkd", [&] { cvqkd.validate(); });
    if (filter_q < 0.0) throw config_error("filter.q", "must be >= 0");
    if (filter_r <= 0.0) throw config_error("filter.r", "must be > 0");
    if (learn_detections < 2) throw config_error("filter.learn_detections", "must be >= 2");
    if (learn_max_frames < learn_detections)
        throw config_error("filter.learn_max_frames", "must be >= filter.learn_detections");
    if (learn_min_detections < 2 || learn_min_detections > learn_detections)
        throw config_error("filter.learn_min", "must be in [2, learn_detections]");
    if (fsm_max_deflection_deg <= 0.0) throw config_error("fsm.max_deflection_deg", "must be > 0");
    if (fsm_distance_mm <= 0.0) throw config_error("fsm.distance_mm", "must be > 0");
    if (fsm_latency_frames < 0) throw config_error("fsm.latency_frames", "must be >= 0");
    if (fsm_gain <= 0.0) throw config_error("fsm.gain", "must be > 0");
    if (rad_per_px <= 0.0) throw config_error("qkd.rad_per_px", "must be > 0");
    if (sigma_low_px < 0.0) throw config_error("qkd.sigma_low_px", "must be >= 0");
    if (sigma_high_px < 0.0) throw config_error("qkd.sigma_high_px", "must be >= 0");
    if (sweep_loss_step_db <= 0.0) throw config_error("qkd.sweep_loss_step_db", "must be > 0");
    if (sweep_loss_max_db < sweep_loss_min_db)
        throw config_error("qkd.sweep_loss_max_db", "must be >= qkd.sweep_loss_min_db");
    if (compare_low_power_uw <= 0.0) throw config_error("compare.low_power_uw", "must be > 0");
    if (compare_high_power_uw <= 0.0) throw config_error("compare.high_power_uw", "must be > 0");
    if (compare_seeds < 1) throw config_error("compare.seeds", "must be >= 1");
}

std::vector<double> ExperimentConfig::sweep_loss_grid() const {
    std::vector<double> grid_db;
    for (double l = sweep_loss_min_db; l <= sweep_loss_max_db + 1e-9; l += sweep_loss_step_db)
        grid_db.push_back(l);
    return grid_db;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Typed access over the raw key/value map; remembers which keys were read so
// unknown keys can be reported.
class KeyReader {
public:
    explicit KeyReader(const std::map<std::string, std::string>& entries) : entries_(entries) {}

    bool has(const std::string& key) {
        consumed_.insert(key);
        return entries_.count(key) > 0;
    }

    std::string str(const std::string& key, const std::string& fallback) {
        consumed_.insert(key);
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    double num(const std::string& key, double fallback) {
        consumed_.insert(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        return parse_num(key, it->second);
    }

    int integer(const std::string& key, int fallback) {
        const double v = num(key, fallback);
        if (v != std::floor(v)) throw config_error(key, "expected an integer");
        return static_cast<int>(v);
    }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
        consumed_.insert(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw config_error(key, "expected an unsigned integer, got '" + it->second + "'");
        }
    }

    bool boolean(const std::string& key, bool fallback) {
        consumed_.insert(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const std::string& v = it->second;
        if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "off" || v == "no") return false;
        throw config_error(key, "expected a boolean, got '" + v + "'");
    }

    std::vector<double> num_list(const std::string& key, const std::vector<double>& fallback) {
        consumed_.insert(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(parse_num(key, item));
        }
        return out;
    }

    void check_unknown() const {
        for (const auto& [key, value] : entries_)
            if (!consumed_.count(key)) throw config_error(key, "unknown key");
    }

    static double parse_num(const std::string& key, const std::string& text) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw config_error(key, "expected a number, got '" + text + "'");
        }
    }

private:
    const std::map<std::string, std::string>& entries_;
    std::set<std::string> consumed_;
};

traj::PassKind parse_pass_kind(const std::string& key, const std::string& v) {
    if (v == "cv") return traj::PassKind::ConstantVelocity;
    if (v == "cj") return traj::PassKind::ConstantJerk;
    throw config_error(key, "expected 'cv' or 'cj', got '" + v + "'");
}

kalman::FilterKind parse_filter_kind(const std::string& key, const std::string& v) {
    if (v == "cv") return kalman::FilterKind::ConstantVelocity;
    if (v == "cj") return kalman::FilterKind::ConstantJerk;
    throw config_error(key, "expected 'cv' or 'cj', got '" + v + "'");
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> entries;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno), "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("line " + std::to_string(lineno), "empty key");
        if (entries.count(key)) throw config_error(key, "duplicate key");
        entries[key] = value;
    }
    return entries;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error(path, "cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& entries) {
    KeyReader r(entries);
    ExperimentConfig c;

    c.seed = r.u64("seed", c.seed);
    c.out_dir = r.str("out_dir", c.out_dir);
    c.dump_frames = r.boolean("dump_frames", c.dump_frames);
    c.dark_frames = r.integer("dark_frames", c.dark_frames);

    c.camera.width_px = r.integer("camera.width_px", c.camera.width_px);
    c.camera.height_px = r.integer("camera.height_px", c.camera.height_px);
    c.camera.pixel_pitch_um = r.num("camera.pixel_pitch_um", c.camera.pixel_pitch_um);
    c.camera.frame_rate_hz = r.num("camera.frame_rate_hz", c.camera.frame_rate_hz);
    c.camera.exposure_s = r.num("camera.exposure_s", c.camera.exposure_s);
    c.camera.gain = r.num("camera.gain", c.camera.gain);
    c.camera.bit_depth = r.integer("camera.bit_depth", c.camera.bit_depth);
    c.camera.noise_floor_mean = r.num("camera.noise_floor_mean", c.camera.noise_floor_mean);
    c.camera.noise_floor_sd = r.num("camera.noise_floor_sd", c.camera.noise_floor_sd);
    c.camera.saturation_power_w = r.num("camera.saturation_power_uw", c.camera.saturation_power_w * 1e6) * 1e-6;
    c.camera.min_detect_power_w = r.num("camera.min_detect_power_uw", c.camera.min_detect_power_w * 1e6) * 1e-6;
    c.camera.detect_margin_sigmas = r.num("camera.detect_margin_sigmas", c.camera.detect_margin_sigmas);
    c.camera.response_overdrive = r.num("camera.response_overdrive", c.camera.response_overdrive);
    c.camera.shot_noise_scale = r.num("camera.shot_noise_scale", c.camera.shot_noise_scale);

    c.beam.wavelength_nm = r.num("beam.wavelength_nm", c.beam.wavelength_nm);
    c.beam.waist_px = r.num("beam.waist_px", c.beam.waist_px);
    c.beam.power_w = r.num("beam.power_uw", c.beam.power_w * 1e6) * 1e-6;

    const std::string pattern = r.str("noise.fixed_pattern", "none");
    if (pattern == "none") {
        c.noise.pattern = FixedPatternKind::None;
    } else if (pattern.rfind("constant:", 0) == 0) {
        c.noise.pattern = FixedPatternKind::Constant;
        c.noise.pattern_value = KeyReader::parse_num("noise.fixed_pattern", pattern.substr(9));
    } else if (pattern.rfind("gradient:", 0) == 0) {
        c.noise.pattern = FixedPatternKind::Gradient;
        c.noise.pattern_value = KeyReader::parse_num("noise.fixed_pattern", pattern.substr(9));
    } else {
        throw config_error("noise.fixed_pattern", "expected none|constant:<v>|gradient:<v>");
    }
    c.noise.salt_pepper_prob = r.num("noise.salt_pepper_prob", c.noise.salt_pepper_prob);
    c.noise.salt_value = r.integer("noise.salt_value", c.noise.salt_value);
    c.noise.pepper_value = r.integer("noise.pepper_value", c.noise.pepper_value);
    c.noise.shot_noise = r.boolean("noise.shot_noise", c.noise.shot_noise);

    c.pass.kind = parse_pass_kind("pass.kind", r.str("pass.kind", "cv"));
    c.pass.max_elevation_deg = r.num("pass.max_elevation_deg", c.pass.max_elevation_deg);
    c.pass.transit_time_s = r.num("pass.transit_time_s", c.pass.transit_time_s);
    c.pass.altitude_km = r.num("pass.altitude_km", c.pass.altitude_km);
    c.pass.window_deg = r.num("pass.window_deg", c.pass.window_deg);
    c.pass.scale_px_per_mrad = r.num("pass.scale_px_per_mrad", c.pass.scale_px_per_mrad);
    c.pass.orientation_deg = r.num("pass.orientation_deg", c.pass.orientation_deg);

    const std::string intervals = r.str("occlusion.intervals", "");
    if (!intervals.empty()) {
        std::stringstream ss(intervals);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            const std::size_t dash = item.find('-');
            if (dash == std::string::npos)
                throw config_error("occlusion.intervals", "expected 'start-end' pairs");
            const double a = KeyReader::parse_num("occlusion.intervals", trim(item.substr(0, dash)));
            const double b = KeyReader::parse_num("occlusion.intervals", trim(item.substr(dash + 1)));
            c.occlusion.intervals.emplace_back(a, b);
        }
    }
    const std::string blind = r.str("occlusion.blind_spot", "none");
    if (blind != "none") {
        std::stringstream ss(blind);
        std::string sx, sy, sr;
        if (!std::getline(ss, sx, ',') || !std::getline(ss, sy, ',') || !std::getline(ss, sr))
            throw config_error("occlusion.blind_spot", "expected 'x,y,radius' or none");
        traj::BlindSpot bs;
        bs.center.x = KeyReader::parse_num("occlusion.blind_spot", trim(sx));
        bs.center.y = KeyReader::parse_num("occlusion.blind_spot", trim(sy));
        bs.radius_px = KeyReader::parse_num("occlusion.blind_spot", trim(sr));
        c.occlusion.blind_spot = bs;
    }

    const std::string wf = r.str("disturbance.waveform", "none");
    if (wf == "none") c.disturbance.waveform = traj::MirrorDisturbance::Waveform::None;
    else if (wf == "sine") c.disturbance.waveform = traj::MirrorDisturbance::Waveform::Sine;
    else if (wf == "triangle") c.disturbance.waveform = traj::MirrorDisturbance::Waveform::Triangle;
    else throw config_error("disturbance.waveform", "expected none|sine|triangle");
    c.disturbance.amplitude_px = r.num("disturbance.amplitude_px", c.disturbance.amplitude_px);
    c.disturbance.frequency_hz = r.num("disturbance.frequency_hz", c.disturbance.frequency_hz);
    c.disturbance.axis_deg = r.num("disturbance.axis_deg", c.disturbance.axis_deg);

    c.pipeline.opening_kernel = r.integer("pipeline.opening_kernel", c.pipeline.opening_kernel);
    c.pipeline.min_area = r.integer("pipeline.min_area", c.pipeline.min_area);
    c.pipeline.min_total_intensity =
        r.num("pipeline.min_total_intensity", c.pipeline.min_total_intensity);

    c.filter_kind = parse_filter_kind("filter.kind", r.str("filter.kind", "cv"));
    c.filter_q = r.num("filter.q", c.filter_q);
    c.filter_r = r.num("filter.r", c.filter_r);
    c.learn_detections = r.integer("filter.learn_detections", c.learn_detections);
    c.learn_max_frames = r.integer("filter.learn_max_frames", c.learn_max_frames);
    c.learn_min_detections = r.integer("filter.learn_min", c.learn_min_detections);
    const std::string flip = r.str("filter.zenith_flip", "auto");
    if (flip == "auto") c.zenith_flip_auto = true;
    else if (flip == "off") c.zenith_flip_auto = false;
    else throw config_error("filter.zenith_flip", "expected auto|off");

    c.grid.q_candidates = r.num_list("tune.q_grid", c.grid.q_candidates);
    c.grid.r_candidates = r.num_list("tune.r_grid", c.grid.r_candidates);

    c.fsm_max_deflection_deg = r.num("fsm.max_deflection_deg", c.fsm_max_deflection_deg);
    c.fsm_distance_mm = r.num("fsm.distance_mm", c.fsm_distance_mm);
    c.fsm_latency_frames = r.integer("fsm.latency_frames", c.fsm_latency_frames);
    c.fsm_gain = r.num("fsm.gain", c.fsm_gain);
    c.control_enabled = r.boolean("control.enabled", c.control_enabled);

    c.geometry.wavelength_nm = r.num("qkd.wavelength_nm", c.geometry.wavelength_nm);
    c.geometry.receiver_aperture_m = r.num("qkd.receiver_aperture_m", c.geometry.receiver_aperture_m);
    c.geometry.channel_loss_db = r.num("qkd.channel_loss_db", c.geometry.channel_loss_db);
    c.rad_per_px = r.num("qkd.rad_per_px", c.rad_per_px);
    c.sigma_low_px = r.num("qkd.sigma_low_px", c.sigma_low_px);
    c.sigma_high_px = r.num("qkd.sigma_high_px", c.sigma_high_px);
    c.sweep_loss_min_db = r.num("qkd.sweep_loss_min_db", c.sweep_loss_min_db);
    c.sweep_loss_max_db = r.num("qkd.sweep_loss_max_db", c.sweep_loss_max_db);
    c.sweep_loss_step_db = r.num("qkd.sweep_loss_step_db", c.sweep_loss_step_db);

    c.bb84.mu = r.num("bb84.mu", c.bb84.mu);
    c.bb84.nu = r.num("bb84.nu", c.bb84.nu);
    c.bb84.p_dark = r.num("bb84.p_dark", c.bb84.p_dark);
    c.bb84.e_det = r.num("bb84.e_det", c.bb84.e_det);
    c.bb84.e_trk = r.num("bb84.e_trk", c.bb84.e_trk);
    c.bb84.f_ec = r.num("bb84.f_ec", c.bb84.f_ec);
    c.bb84.n_pulses = r.num("bb84.n_pulses", c.bb84.n_pulses);
    c.bb84.p_mu = r.num("bb84.p_mu", c.bb84.p_mu);
    c.bb84.eps_pa = r.num("bb84.eps_pa", c.bb84.eps_pa);
    c.bb84.f_clk_hz = r.num("bb84.f_clk_hz", c.bb84.f_clk_hz);
    c.bb84.q_sift = r.num("bb84.q_sift", c.bb84.q_sift);
    c.bb84.n_max = r.integer("bb84.n_max", c.bb84.n_max);

    c.cvqkd.v_mod = r.num("cvqkd.v_mod", c.cvqkd.v_mod);
    c.cvqkd.xi = r.num("cvqkd.xi", c.cvqkd.xi);
    c.cvqkd.eta_d = r.num("cvqkd.eta_d", c.cvqkd.eta_d);
    c.cvqkd.v_el = r.num("cvqkd.v_el", c.cvqkd.v_el);
    c.cvqkd.beta = r.num("cvqkd.beta", c.cvqkd.beta);

    c.compare_low_power_uw = r.num("compare.low_power_uw", c.compare_low_power_uw);
    c.compare_high_power_uw = r.num("compare.high_power_uw", c.compare_high_power_uw);
    c.compare_seeds = r.integer("compare.seeds", c.compare_seeds);

    r.check_unknown();
    c.validate();
    return c;
}

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::map<std::string, std::string> config_to_map(const ExperimentConfig& c) {
    std::map<std::string, std::string> m;
    m["seed"] = std::to_string(c.seed);
    m["out_dir"] = c.out_dir;
    m["dump_frames"] = c.dump_frames ? "true" : "false";
    m["dark_frames"] = std::to_string(c.dark_frames);
    m["camera.width_px"] = std::to_string(c.camera.width_px);
    m["camera.height_px"] = std::to_string(c.camera.height_px);
    m["camera.pixel_pitch_um"] = fmt(c.camera.pixel_pitch_um);
    m["camera.frame_rate_hz"] = fmt(c.camera.frame_rate_hz);
    m["camera.exposure_s"] = fmt(c.camera.exposure_s);
    m["camera.gain"] = fmt(c.camera.gain);
    m["camera.bit_depth"] = std::to_string(c.camera.bit_depth);
    m["camera.noise_floor_mean"] = fmt(c.camera.noise_floor_mean);
    m["camera.noise_floor_sd"] = fmt(c.camera.noise_floor_sd);
    m["camera.saturation_power_uw"] = fmt(c.camera.saturation_power_w * 1e6);
    m["camera.min_detect_power_uw"] = fmt(c.camera.min_detect_power_w * 1e6);
    m["camera.detect_margin_sigmas"] = fmt(c.camera.detect_margin_sigmas);
    m["camera.response_overdrive"] = fmt(c.camera.response_overdrive);
    m["camera.shot_noise_scale"] = fmt(c.camera.shot_noise_scale);
    m["beam.wavelength_nm"] = fmt(c.beam.wavelength_nm);
    m["beam.waist_px"] = fmt(c.beam.waist_px);
    m["beam.power_uw"] = fmt(c.beam.power_w * 1e6);
    switch (c.noise.pattern) {
        case FixedPatternKind::None: m["noise.fixed_pattern"] = "none"; break;
        case FixedPatternKind::Constant: m["noise.fixed_pattern"] = "constant:" + fmt(c.noise.pattern_value); break;
        case FixedPatternKind::Gradient: m["noise.fixed_pattern"] = "gradient:" + fmt(c.noise.pattern_value); break;
    }
    m["noise.salt_pepper_prob"] = fmt(c.noise.salt_pepper_prob);
    m["noise.salt_value"] = std::to_string(c.noise.salt_value);
    m["noise.pepper_value"] = std::to_string(c.noise.pepper_value);
    m["noise.shot_noise"] = c.noise.shot_noise ? "true" : "false";
    m["pass.kind"] = c.pass.kind == traj::PassKind::ConstantVelocity ? "cv" : "cj";
    m["pass.max_elevation_deg"] = fmt(c.pass.max_elevation_deg);
    m["pass.transit_time_s"] = fmt(c.pass.transit_time_s);
    m["pass.altitude_km"] = fmt(c.pass.altitude_km);
    m["pass.window_deg"] = fmt(c.pass.window_deg);
    m["pass.scale_px_per_mrad"] = fmt(c.pass.scale_px_per_mrad);
    m["pass.orientation_deg"] = fmt(c.pass.orientation_deg);
    {
        std::string s;
        for (const auto& [a, b] : c.occlusion.intervals) {
            if (!s.empty()) s += ",";
            s += fmt(a) + "-" + fmt(b);
        }
        m["occlusion.intervals"] = s;
    }
    m["occlusion.blind_spot"] =
        c.occlusion.blind_spot
            ? fmt(c.occlusion.blind_spot->center.x) + "," + fmt(c.occlusion.blind_spot->center.y) +
                  "," + fmt(c.occlusion.blind_spot->radius_px)
            : "none";
    switch (c.disturbance.waveform) {
        case traj::MirrorDisturbance::Waveform::None: m["disturbance.waveform"] = "none"; break;
        case traj::MirrorDisturbance::Waveform::Sine: m["disturbance.waveform"] = "sine"; break;
        case traj::MirrorDisturbance::Waveform::Triangle: m["disturbance.waveform"] = "triangle"; break;
    }
    m["disturbance.amplitude_px"] = fmt(c.disturbance.amplitude_px);
    m["disturbance.frequency_hz"] = fmt(c.disturbance.frequency_hz);
    m["disturbance.axis_deg"] = fmt(c.disturbance.axis_deg);
    m["pipeline.opening_kernel"] = std::to_string(c.pipeline.opening_kernel);
    m["pipeline.min_area"] = std::to_string(c.pipeline.min_area);
    m["pipeline.min_total_intensity"] = fmt(c.pipeline.min_total_intensity);
    m["filter.kind"] = c.filter_kind == kalman::FilterKind::ConstantVelocity ? "cv" : "cj";
    m["filter.q"] = fmt(c.filter_q);
    m["filter.r"] = fmt(c.filter_r);
    m["filter.learn_detections"] = std::to_string(c.learn_detections);
    m["filter.learn_max_frames"] = std::to_string(c.learn_max_frames);
    m["filter.learn_min"] = std::to_string(c.learn_min_detections);
    m["filter.zenith_flip"] = c.zenith_flip_auto ? "auto" : "off";
    {
        std::string qs, rs;
        for (double q : c.grid.q_candidates) { if (!qs.empty()) qs += ","; qs += fmt(q); }
        for (double rr : c.grid.r_candidates) { if (!rs.empty()) rs += ","; rs += fmt(rr); }
        m["tune.q_grid"] = qs;
        m["tune.r_grid"] = rs;
    }
    m["fsm.max_deflection_deg"] = fmt(c.fsm_max_deflection_deg);
    m["fsm.distance_mm"] = fmt(c.fsm_distance_mm);
    m["fsm.latency_frames"] = std::to_string(c.fsm_latency_frames);
    m["fsm.gain"] = fmt(c.fsm_gain);
    m["control.enabled"] = c.control_enabled ? "true" : "false";
    m["qkd.wavelength_nm"] = fmt(c.geometry.wavelength_nm);
    m["qkd.receiver_aperture_m"] = fmt(c.geometry.receiver_aperture_m);
    m["qkd.channel_loss_db"] = fmt(c.geometry.channel_loss_db);
    m["qkd.rad_per_px"] = fmt(c.rad_per_px);
    m["qkd.sigma_low_px"] = fmt(c.sigma_low_px);
    m["qkd.sigma_high_px"] = fmt(c.sigma_high_px);
    m["qkd.sweep_loss_min_db"] = fmt(c.sweep_loss_min_db);
    m["qkd.sweep_loss_max_db"] = fmt(c.sweep_loss_max_db);
    m["qkd.sweep_loss_step_db"] = fmt(c.sweep_loss_step_db);
    m["bb84.mu"] = fmt(c.bb84.mu);
    m["bb84.nu"] = fmt(c.bb84.nu);
    m["bb84.p_dark"] = fmt(c.bb84.p_dark);
    m["bb84.e_det"] = fmt(c.bb84.e_det);
    m["bb84.e_trk"] = fmt(c.bb84.e_trk);
    m["bb84.f_ec"] = fmt(c.bb84.f_ec);
    m["bb84.n_pulses"] = fmt(c.bb84.n_pulses);
    m["bb84.p_mu"] = fmt(c.bb84.p_mu);
    m["bb84.eps_pa"] = fmt(c.bb84.eps_pa);
    m["bb84.f_clk_hz"] = fmt(c.bb84.f_clk_hz);
    m["bb84.q_sift"] = fmt(c.bb84.q_sift);
    m["bb84.n_max"] = std::to_string(c.bb84.n_max);
    m["cvqkd.v_mod"] = fmt(c.cvqkd.v_mod);
    m["cvqkd.xi"] = fmt(c.cvqkd.xi);
    m["cvqkd.eta_d"] = fmt(c.cvqkd.eta_d);
    m["cvqkd.v_el"] = fmt(c.cvqkd.v_el);
    m["cvqkd.beta"] = fmt(c.cvqkd.beta);
    m["compare.low_power_uw"] = fmt(c.compare_low_power_uw);
    m["compare.high_power_uw"] = fmt(c.compare_high_power_uw);
    m["compare.seeds"] = std::to_string(c.compare_seeds);
    return m;
}

}  // namespace bt::runner
