#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace bt::traj {

enum class PassKind { ConstantVelocity, ConstantJerk };

// Parametric satellite-pass geometry mapped onto the sensor plane. The pass
// sweeps the zenith angle from -window_deg to +window_deg over transit_time_s
// along a straight track with the given orientation:
//   CV: angle is affine in time.
//   CJ: straight-line overpass at `altitude_km`, slant range set by the
//       maximum elevation, so the apparent rate peaks at mid-pass.
struct PassProfile {
    PassKind kind = PassKind::ConstantVelocity;
    double max_elevation_deg = 90.0;
    double transit_time_s = 120.0;
    double altitude_km = 700.0;
    double window_deg = 30.0;
    double scale_px_per_mrad = 0.5;
    double orientation_deg = 0.0;

    void validate() const;
};

struct BlindSpot {
    Vec2 center;       // in track coordinates (mid-pass maps to the origin)
    double radius_px = 0.0;
};

struct OcclusionSchedule {
    std::vector<std::pair<double, double>> intervals;  // disjoint, ordered [s]
    std::optional<BlindSpot> blind_spot;

    void validate() const;
};

struct MirrorDisturbance {
    enum class Waveform { None, Sine, Triangle };
    Waveform waveform = Waveform::None;
    double amplitude_px = 0.0;
    double frequency_hz = 0.0;
    double axis_deg = 0.0;  // direction of the displacement in the pixel plane

    void validate() const;
};

// True beacon displacement in pixels at time t, relative to the mid-pass
// point. Throws when t lies outside [0, transit_time_s].
Vec2 true_position(const PassProfile& profile, double t);

// False inside any occlusion interval or inside the blind-spot disc.
bool is_visible(const OcclusionSchedule& schedule, Vec2 pos, double t);

Vec2 disturbance_offset(const MirrorDisturbance& d, double t);
Vec2 disturbed_position(Vec2 base, const MirrorDisturbance& d, double t);

// Ground-truth export: t, x_true, y_true, visible.
void write_truth_csv(const PassProfile& profile, const OcclusionSchedule& schedule,
                     double frame_rate_hz, const std::string& path);

}  // namespace bt::traj
