#include "trajectory.hpp"

#include <cmath>
#include <fstream>

namespace bt::traj {

void PassProfile::validate() const {
    if (transit_time_s <= 0.0) throw std::invalid_argument("pass: transit_time_s must be > 0");
    if (max_elevation_deg <= 0.0 || max_elevation_deg > 90.0)
        throw std::invalid_argument("pass: max_elevation_deg must be in (0, 90]");
    if (altitude_km <= 0.0) throw std::invalid_argument("pass: altitude_km must be > 0");
    if (window_deg <= 0.0 || window_deg >= 90.0)
        throw std::invalid_argument("pass: window_deg must be in (0, 90)");
    if (scale_px_per_mrad <= 0.0)
        throw std::invalid_argument("pass: scale_px_per_mrad must be > 0");
}

void OcclusionSchedule::validate() const {
    double prev_end = -1.0;
    for (const auto& [a, b] : intervals) {
        if (b < a) throw std::invalid_argument("occlusion: interval end before start");
        if (a <= prev_end) throw std::invalid_argument("occlusion: intervals must be disjoint and ordered");
        prev_end = b;
    }
    if (blind_spot && blind_spot->radius_px < 0.0)
        throw std::invalid_argument("occlusion: blind_spot radius must be >= 0");
}

void MirrorDisturbance::validate() const {
    if (amplitude_px < 0.0) throw std::invalid_argument("disturbance: amplitude_px must be >= 0");
    if (frequency_hz < 0.0) throw std::invalid_argument("disturbance: frequency_hz must be >= 0");
}

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kEarthMuKm3S2 = 398600.4418;

// Circular-orbit ground-track speed at the given altitude; ~6.77 km/s for a
// 700 km orbit, which makes a 2-minute 90-degree pass sweep almost exactly
// the +-30 degree zenith window.
double ground_track_speed_km_s(double altitude_km) {
    const double r = kEarthRadiusKm + altitude_km;
    return std::sqrt(kEarthMuKm3S2 / r) * kEarthRadiusKm / r;
}

// Along-track angle in radians at time t.
double track_angle(const PassProfile& p, double t) {
    if (p.kind == PassKind::ConstantVelocity) {
        const double window = deg_to_rad(p.window_deg);
        return window * (2.0 * t / p.transit_time_s - 1.0);
    }
    // Straight-line overpass at orbital speed; the slant range at closest
    // approach grows for lower maximum elevations and shrinks the apparent
    // rate accordingly.
    const double slant_km = p.altitude_km / std::sin(deg_to_rad(p.max_elevation_deg));
    const double v = ground_track_speed_km_s(p.altitude_km);
    const double t_rel = t - 0.5 * p.transit_time_s;
    return std::atan(v * t_rel / slant_km);
}

}  // namespace

Vec2 true_position(const PassProfile& profile, double t) {
    profile.validate();
    if (t < 0.0 || t > profile.transit_time_s)
        throw std::invalid_argument("true_position: t outside [0, transit_time]");
    const double angle_mrad = track_angle(profile, t) * 1000.0;
    const double along = profile.scale_px_per_mrad * angle_mrad;
    const double o = deg_to_rad(profile.orientation_deg);
    return {along * std::cos(o), along * std::sin(o)};
}

bool is_visible(const OcclusionSchedule& schedule, Vec2 pos, double t) {
    for (const auto& [a, b] : schedule.intervals)
        if (t >= a && t <= b) return false;
    if (schedule.blind_spot) {
        const Vec2 d = pos - schedule.blind_spot->center;
        if (d.norm() <= schedule.blind_spot->radius_px) return false;
    }
    return true;
}

Vec2 disturbance_offset(const MirrorDisturbance& d, double t) {
    if (d.waveform == MirrorDisturbance::Waveform::None || d.amplitude_px == 0.0)
        return {0.0, 0.0};
    const double cycles = d.frequency_hz * t;
    double w = 0.0;
    if (d.waveform == MirrorDisturbance::Waveform::Sine) {
        w = std::sin(2.0 * kPi * cycles);
    } else {
        const double f = cycles - std::floor(cycles);
        if (f < 0.25)
            w = 4.0 * f;
        else if (f < 0.75)
            w = 2.0 - 4.0 * f;
        else
            w = 4.0 * f - 4.0;
    }
    const double a = deg_to_rad(d.axis_deg);
    return {d.amplitude_px * w * std::cos(a), d.amplitude_px * w * std::sin(a)};
}

Vec2 disturbed_position(Vec2 base, const MirrorDisturbance& d, double t) {
    return base + disturbance_offset(d, t);
}

void write_truth_csv(const PassProfile& profile, const OcclusionSchedule& schedule,
                     double frame_rate_hz, const std::string& path) {
    profile.validate();
    schedule.validate();
    if (frame_rate_hz <= 0.0) throw std::invalid_argument("write_truth_csv: frame rate must be > 0");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_truth_csv: cannot open " + path);
    out << "t,x_true,y_true,visible\n";
    char buf[128];
    const double dt = 1.0 / frame_rate_hz;
    const auto n = static_cast<long>(std::floor(profile.transit_time_s * frame_rate_hz)) + 1;
    for (long k = 0; k < n; ++k) {
        const double t = k * dt;
        const Vec2 p = true_position(profile, t);
        const bool vis = is_visible(schedule, p, t);
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%d\n", t, p.x, p.y, vis ? 1 : 0);
        out << buf;
    }
}

}  // namespace bt::traj
