#include "control.hpp"

#include <algorithm>
#include <cmath>

namespace bt::control {

void FsmModel::validate() const {
    if (max_deflection_deg <= 0.0)
        throw std::invalid_argument("fsm: max_deflection_deg must be > 0");
    if (distance_mm <= 0.0) throw std::invalid_argument("fsm: distance_mm must be > 0");
    if (latency_frames < 0) throw std::invalid_argument("fsm: latency_frames must be >= 0");
    if (loop_gain <= 0.0) throw std::invalid_argument("fsm: loop_gain must be > 0");
    if (std::abs(angle_deg.x) > max_deflection_deg || std::abs(angle_deg.y) > max_deflection_deg)
        throw std::invalid_argument("fsm: current angle exceeds max deflection");
}

double calibrate_fsm(double theta_cal_deg, double delta_x_mm) {
    if (theta_cal_deg == 0.0)
        throw std::invalid_argument("calibrate_fsm: calibration angle must be nonzero");
    if (std::abs(theta_cal_deg) >= 90.0)
        throw std::invalid_argument("calibrate_fsm: calibration angle must satisfy |theta| < 90");
    return delta_x_mm / std::tan(deg_to_rad(theta_cal_deg));
}

double pixel_to_angle(double displacement_px, double pitch_um, double distance_mm) {
    if (distance_mm <= 0.0) throw std::invalid_argument("pixel_to_angle: distance must be > 0");
    return rad_to_deg(std::atan(displacement_px * pitch_um * 1e-3 / distance_mm));
}

Vec2 beam_shift_px(const FsmModel& fsm, double pitch_um) {
    const double px_per_tan = fsm.distance_mm / (pitch_um * 1e-3);
    return {-std::tan(deg_to_rad(fsm.angle_deg.x)) * px_per_tan,
            -std::tan(deg_to_rad(fsm.angle_deg.y)) * px_per_tan};
}

FsmCommand command_fsm(FsmModel& fsm, Vec2 requested_deg) {
    fsm.validate();
    const double lim = fsm.max_deflection_deg;
    const Vec2 target{fsm.angle_deg.x + requested_deg.x, fsm.angle_deg.y + requested_deg.y};
    const Vec2 clamped{std::clamp(target.x, -lim, lim), std::clamp(target.y, -lim, lim)};
    FsmCommand cmd;
    cmd.delta_deg = clamped - fsm.angle_deg;
    cmd.saturated = (clamped.x != target.x) || (clamped.y != target.y);
    cmd.handoff = cmd.saturated;
    fsm.angle_deg = clamped;
    return cmd;
}

FsmCommand closed_loop_step(FsmModel& fsm, const std::optional<centroid::Detection>& detection,
                            Vec2 estimate_sensor, Vec2 frame_center, double pitch_um) {
    fsm.validate();
    const Vec2 target = detection ? detection->centroid : estimate_sensor;
    const Vec2 offset = target - frame_center;
    const Vec2 request{fsm.loop_gain * pixel_to_angle(offset.x, pitch_um, fsm.distance_mm),
                       fsm.loop_gain * pixel_to_angle(offset.y, pitch_um, fsm.distance_mm)};
    fsm.pending.push_back(request);
    if (static_cast<int>(fsm.pending.size()) <= fsm.latency_frames)
        return FsmCommand{};  // still filling the latency pipeline
    const Vec2 due = fsm.pending.front();
    fsm.pending.pop_front();
    return command_fsm(fsm, due);
}

}  // namespace bt::control
