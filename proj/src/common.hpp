#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace bt {

// Error raised when a configuration file or key/value pair is malformed.
// `field` carries the dotted key path so callers can point at the bad entry.
class config_error : public std::runtime_error {
public:
    config_error(std::string field, const std::string& what)
        : std::runtime_error("config error at '" + field + "': " + what),
          field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Raised when the learning window yields too few detections to start a track.
class acquisition_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised on numerical failure (singular innovation covariance etc.).
class numerical_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    double norm() const { return std::hypot(x, y); }
};

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace bt
