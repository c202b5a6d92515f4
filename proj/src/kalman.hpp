#pragma once

#include <optional>
#include <vector>

#include "common.hpp"
#include "matrix.hpp"

namespace bt::kalman {

enum class FilterKind { ConstantVelocity, ConstantJerk };

// State-transition, noise and measurement matrices for one filter.
//   dim 4: [x, y, vx, vy]
//   dim 8: [x, y, vx, vy, ax, ay, jx, jy]
struct FilterModel {
    int dim = 4;
    Mat A;   // dim x dim transition
    Mat H;   // 2 x dim measurement (position selector)
    Mat Q;   // process noise, sigma^2_proc * I
    Mat R;   // measurement noise, sigma^2_meas * I2
    double dt = 0.05;
};

struct FilterState {
    Mat x;        // dim x 1
    Mat P;        // dim x dim
    long k = 0;   // step index

    Vec2 position() const { return {x(0, 0), x(1, 0)}; }
};

FilterModel build_cv_model(double dt, double q, double r);
FilterModel build_cj_model(double dt, double q, double r);

FilterState predict(const FilterState& state, const FilterModel& model);
FilterState update(const FilterState& state, Vec2 z, const FilterModel& model);

struct StepResult {
    FilterState state;
    Vec2 estimate;  // H * x posterior
};

// Predict always; update only when a measurement is present (absence is the
// occlusion coast).
StepResult step(const FilterState& state, const FilterModel& model, std::optional<Vec2> z);

// Two-point style initialization over the learning window: position from the
// last measurement, velocity from end-to-end finite differences, higher
// derivatives zero. `indices` are the frame indices of the measurements and
// may contain gaps; when omitted the measurements are taken as consecutive.
FilterState init_filter(const std::vector<Vec2>& measurements, const FilterModel& model);
FilterState init_filter(const std::vector<Vec2>& measurements,
                        const std::vector<long>& indices, const FilterModel& model);

// Mid-pass sign inversion of the acceleration block (8-state filters only):
// negates a_x, a_y and applies the matching similarity transform to P.
FilterState zenith_flip(const FilterState& state);

struct TuningGrid {
    std::vector<double> q_candidates;
    std::vector<double> r_candidates;

    static TuningGrid defaults();  // q 1e-4..1e2, r 1e-2..1e2, log spaced
    void validate() const;
};

struct TuneResult {
    double q = 0.0;
    double r = 0.0;
    double rms = 0.0;
};

// Exhaustive grid evaluation; argmin of post-learning RMS vs truth; ties go
// to the smaller q, then the smaller r.
TuneResult tune_grid_search(const std::vector<Vec2>& truth,
                            const std::vector<std::optional<Vec2>>& measurements,
                            const TuningGrid& grid, FilterKind kind, double dt,
                            int learn_points = 100);

double rms_error(const std::vector<Vec2>& estimates, const std::vector<Vec2>& truth);

}  // namespace bt::kalman
