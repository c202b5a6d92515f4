#include "kalman.hpp"

#include <cmath>

namespace bt::kalman {

namespace {

Mat measurement_matrix(int dim) {
    Mat h(2, dim);
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    return h;
}

Mat scaled_identity(int n, double s) {
    Mat m = Mat::identity(n);
    for (int i = 0; i < n; ++i) m(i, i) = s;
    return m;
}

void check_noise(double dt, double q, double r) {
    if (dt <= 0.0) throw std::invalid_argument("filter model: dt must be > 0");
    if (q < 0.0 || r < 0.0) throw std::invalid_argument("filter model: q and r must be >= 0");
}

}  // namespace

FilterModel build_cv_model(double dt, double q, double r) {
    check_noise(dt, q, r);
    FilterModel m;
    m.dim = 4;
    m.dt = dt;
    m.A = Mat::identity(4);
    m.A(0, 2) = dt;
    m.A(1, 3) = dt;
    m.H = measurement_matrix(4);
    m.Q = scaled_identity(4, q);
    m.R = scaled_identity(2, r);
    return m;
}

FilterModel build_cj_model(double dt, double q, double r) {
    check_noise(dt, q, r);
    FilterModel m;
    m.dim = 8;
    m.dt = dt;
    m.A = Mat::identity(8);
    const double dt2 = dt * dt / 2.0;
    const double dt3 = dt * dt * dt / 6.0;
    for (int axis = 0; axis < 2; ++axis) {
        m.A(axis, axis + 2) = dt;
        m.A(axis, axis + 4) = dt2;
        m.A(axis, axis + 6) = dt3;
        m.A(axis + 2, axis + 4) = dt;
        m.A(axis + 2, axis + 6) = dt2;
        m.A(axis + 4, axis + 6) = dt;
    }
    m.H = measurement_matrix(8);
    m.Q = scaled_identity(8, q);
    m.R = scaled_identity(2, r);
    return m;
}

FilterState predict(const FilterState& state, const FilterModel& model) {
    if (state.x.rows() != model.dim)
        throw std::invalid_argument("predict: state dimension mismatch");
    FilterState out;
    out.x = model.A * state.x;
    out.P = model.A * state.P * model.A.transposed() + model.Q;
    out.P.symmetrize();
    out.k = state.k;
    return out;
}

FilterState update(const FilterState& state, Vec2 z, const FilterModel& model) {
    if (state.x.rows() != model.dim)
        throw std::invalid_argument("update: state dimension mismatch");
    const Mat ht = model.H.transposed();
    const Mat s = model.H * state.P * ht + model.R;  // 2x2 innovation covariance
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    if (!(std::abs(det) > 1e-300))
        throw numerical_error("update: singular innovation covariance");
    Mat s_inv(2, 2);
    s_inv(0, 0) = s(1, 1) / det;
    s_inv(1, 1) = s(0, 0) / det;
    s_inv(0, 1) = -s(0, 1) / det;
    s_inv(1, 0) = -s(1, 0) / det;

    const Mat gain = state.P * ht * s_inv;
    Mat innovation(2, 1);
    innovation(0, 0) = z.x - state.x(0, 0);
    innovation(1, 0) = z.y - state.x(1, 0);

    FilterState out;
    out.x = state.x + gain * innovation;
    out.P = (Mat::identity(model.dim) - gain * model.H) * state.P;
    out.P.symmetrize();
    out.k = state.k;
    return out;
}

StepResult step(const FilterState& state, const FilterModel& model, std::optional<Vec2> z) {
    FilterState next = predict(state, model);
    if (z) next = update(next, *z, model);
    next.k = state.k + 1;
    return {next, next.position()};
}

FilterState init_filter(const std::vector<Vec2>& measurements, const FilterModel& model) {
    std::vector<long> idx(measurements.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<long>(i);
    return init_filter(measurements, idx, model);
}

FilterState init_filter(const std::vector<Vec2>& measurements,
                        const std::vector<long>& indices, const FilterModel& model) {
    if (measurements.size() < 2)
        throw std::invalid_argument("init_filter: need at least 2 measurements");
    if (indices.size() != measurements.size())
        throw std::invalid_argument("init_filter: indices size mismatch");
    const long span = indices.back() - indices.front();
    if (span <= 0) throw std::invalid_argument("init_filter: indices must increase");

    const Vec2 last = measurements.back();
    const Vec2 vel = (last - measurements.front()) * (1.0 / (span * model.dt));

    FilterState s;
    s.x = Mat(model.dim, 1);
    s.x(0, 0) = last.x;
    s.x(1, 0) = last.y;
    s.x(2, 0) = vel.x;
    s.x(3, 0) = vel.y;

    // Measurement variance on position, inflated on the derivatives the
    // learning window cannot observe directly.
    const double r = model.R(0, 0);
    const double vel_var = 2.0 * r / (model.dt * model.dt);
    s.P = Mat(model.dim, model.dim);
    s.P(0, 0) = r;
    s.P(1, 1) = r;
    s.P(2, 2) = vel_var;
    s.P(3, 3) = vel_var;
    for (int i = 4; i < model.dim; ++i) s.P(i, i) = 10.0 * vel_var;
    s.k = indices.back();
    return s;
}

FilterState zenith_flip(const FilterState& state) {
    if (state.x.rows() != 8)
        throw std::invalid_argument("zenith_flip: requires the 8-state filter");
    FilterState out = state;
    out.x(4, 0) = -out.x(4, 0);
    out.x(5, 0) = -out.x(5, 0);
    // D P D with D = diag(1,1,1,1,-1,-1,1,1): negate cross terms touching
    // exactly one of the acceleration rows.
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            const bool fi = (i == 4 || i == 5);
            const bool fj = (j == 4 || j == 5);
            if (fi != fj) out.P(i, j) = -out.P(i, j);
        }
    }
    return out;
}

TuningGrid TuningGrid::defaults() {
    TuningGrid g;
    for (int e = -4; e <= 2; ++e) g.q_candidates.push_back(std::pow(10.0, e));
    for (int e = -2; e <= 2; ++e) g.r_candidates.push_back(std::pow(10.0, e));
    return g;
}

void TuningGrid::validate() const {
    if (q_candidates.empty() || r_candidates.empty())
        throw std::invalid_argument("tuning grid: candidate lists must be nonempty");
    for (double q : q_candidates)
        if (q <= 0.0) throw std::invalid_argument("tuning grid: q candidates must be > 0");
    for (double r : r_candidates)
        if (r <= 0.0) throw std::invalid_argument("tuning grid: r candidates must be > 0");
}

namespace {

// One full filter pass; returns the post-learning RMS vs truth, or nullopt if
// the data cannot initialize a track.
std::optional<double> evaluate_pair(const std::vector<Vec2>& truth,
                                    const std::vector<std::optional<Vec2>>& meas,
                                    FilterKind kind, double dt, double q, double r,
                                    int learn_points) {
    const FilterModel model = kind == FilterKind::ConstantVelocity
                                  ? build_cv_model(dt, q, r)
                                  : build_cj_model(dt, q, r);
    std::vector<Vec2> learn;
    std::vector<long> learn_idx;
    std::size_t start = 0;
    for (; start < meas.size() && static_cast<int>(learn.size()) < learn_points; ++start) {
        if (meas[start]) {
            learn.push_back(*meas[start]);
            learn_idx.push_back(static_cast<long>(start));
        }
    }
    if (learn.size() < 2) return std::nullopt;

    FilterState state = init_filter(learn, learn_idx, model);
    double sum = 0.0;
    long count = 0;
    for (std::size_t k = start; k < meas.size(); ++k) {
        const StepResult res = step(state, model, meas[k]);
        state = res.state;
        const Vec2 err = res.estimate - truth[k];
        sum += err.x * err.x + err.y * err.y;
        ++count;
    }
    if (count == 0) return std::nullopt;
    return std::sqrt(sum / count);
}

}  // namespace

TuneResult tune_grid_search(const std::vector<Vec2>& truth,
                            const std::vector<std::optional<Vec2>>& measurements,
                            const TuningGrid& grid, FilterKind kind, double dt,
                            int learn_points) {
    grid.validate();
    if (truth.size() != measurements.size())
        throw std::invalid_argument("tune_grid_search: truth and measurements must align");
    if (truth.empty()) throw std::invalid_argument("tune_grid_search: empty data");

    std::optional<TuneResult> best;
    for (double q : grid.q_candidates) {
        for (double r : grid.r_candidates) {
            const auto rms = evaluate_pair(truth, measurements, kind, dt, q, r, learn_points);
            if (!rms) continue;
            if (!best || *rms < best->rms ||
                (*rms == best->rms && (q < best->q || (q == best->q && r < best->r)))) {
                best = TuneResult{q, r, *rms};
            }
        }
    }
    if (!best) throw acquisition_error("tune_grid_search: no grid point could initialize a track");
    return *best;
}

double rms_error(const std::vector<Vec2>& estimates, const std::vector<Vec2>& truth) {
    if (estimates.size() != truth.size())
        throw std::invalid_argument("rms_error: length mismatch");
    if (estimates.empty()) throw std::invalid_argument("rms_error: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const Vec2 d = estimates[i] - truth[i];
        sum += d.x * d.x + d.y * d.y;
    }
    return std::sqrt(sum / estimates.size());
}

}  // namespace bt::kalman
