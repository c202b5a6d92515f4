#pragma once

#include <deque>
#include <optional>

#include "centroid.hpp"
#include "common.hpp"

namespace bt::control {

// Fine steering mirror: geometry calibration, angular limits with coarse
// handoff signalling, and a frame-quantized actuation latency queue.
struct FsmModel {
    double max_deflection_deg = 4.0;
    double distance_mm = 25.0;  // calibrated free-space-optics-to-camera distance
    int latency_frames = 0;
    double loop_gain = 1.0;
    Vec2 angle_deg;             // current deflection
    std::deque<Vec2> pending;   // queued correction requests (deg)

    void validate() const;
    void reset() { angle_deg = {0.0, 0.0}; pending.clear(); }
};

struct FsmCommand {
    Vec2 delta_deg;         // deflection change applied this frame
    bool saturated = false;
    bool handoff = false;   // coarse mount must take over
};

// d = delta_x / tan(theta_cal).
double calibrate_fsm(double theta_cal_deg, double delta_x_mm);

// atan(displacement * pitch / d), sign preserving, in degrees.
double pixel_to_angle(double displacement_px, double pitch_um, double distance_mm);

// Pixel displacement of the beam induced by the current mirror deflection.
// Positive deflection steers the beam toward negative pixels, so a deflection
// of pixel_to_angle(o) cancels an offset of +o px.
Vec2 beam_shift_px(const FsmModel& fsm, double pitch_um);

// Applies a requested deflection change, clamping at the angular limits.
FsmCommand command_fsm(FsmModel& fsm, Vec2 requested_deg);

// One closed-loop iteration: correction toward frame center computed from the
// detection centroid when present, else from the filter estimate; the request
// passes through the latency queue before actuation.
FsmCommand closed_loop_step(FsmModel& fsm, const std::optional<centroid::Detection>& detection,
                            Vec2 estimate_sensor, Vec2 frame_center, double pitch_um);

}  // namespace bt::control
