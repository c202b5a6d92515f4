#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace bt::frames {

struct CameraModel {
    int width_px = 512;
    int height_px = 512;
    double pixel_pitch_um = 4.63;
    double frame_rate_hz = 20.0;
    double exposure_s = 32e-6;
    double gain = 120.0;
    int bit_depth = 8;
    double noise_floor_mean = 4.0;
    double noise_floor_sd = 0.5;
    double saturation_power_w = 5.55e-6;
    double min_detect_power_w = 0.03e-6;
    // The response knee is placed so the minimum detectable power lands this
    // many noise sigmas above the floor mean (with an absolute lower bound so
    // shot noise cannot bury the spot tip).
    double detect_margin_sigmas = 4.0;
    // Latent full-well overdrive: at saturation power the un-clipped spot
    // amplitude reaches a multiple of full scale, so the clipped core forms a
    // wide plateau the way a defocused bench spot does.
    double response_overdrive = 30.0;
    // Shot-noise variance per count; above 1 because the analog gain
    // multiplies photon fluctuations into output counts.
    double shot_noise_scale = 3.0;

    int full_scale() const { return (1 << bit_depth) - 1; }
    double dt() const { return 1.0 / frame_rate_hz; }
    void validate() const;
};

struct BeamModel {
    double wavelength_nm = 638.0;
    double waist_px = 12.0;  // 1/e^2 radius on the sensor
    double power_w = 5.55e-6;

    void validate() const;
};

struct NoiseModel {
    std::vector<double> fixed_pattern;  // empty means all-zero offsets
    double salt_pepper_prob = 0.0;
    int salt_value = 255;
    int pepper_value = 0;
    bool shot_noise = false;
    std::uint64_t seed = 1;

    void validate(const CameraModel& cam) const;
};

// Synthetic fixed-pattern offset maps.
std::vector<double> constant_pattern(const CameraModel& cam, double value);
std::vector<double> gradient_pattern(const CameraModel& cam, double max_value);

struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major
    double timestamp = 0.0;
    std::int64_t seq = 0;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// Mean peak pixel intensity produced by a beam of the given optical power.
// Saturating-concave response, clamped to full scale at saturation power.
double camera_response(double power_w, const CameraModel& cam);

// Un-clipped spot amplitude behind camera_response; exceeds full scale once
// the sensor saturates. Rendering clips it per pixel.
double latent_peak(double power_w, const CameraModel& cam);

// Renders one frame: quantized Gaussian spot at `true_pos` (unless occluded)
// plus fixed-pattern offset, Gaussian noise floor, optional shot noise and
// salt-and-pepper noise. Bit-deterministic for a given rng state.
Frame render_frame(Vec2 true_pos, const BeamModel& beam, const CameraModel& cam,
                   const NoiseModel& noise, bool occluded, Rng& rng,
                   double timestamp = 0.0, std::int64_t seq = 0);

// Per-pixel average of n_avg noise-only frames.
Frame make_dark_frame(const CameraModel& cam, const NoiseModel& noise, int n_avg, Rng& rng);

// Binary PGM (P5, maxval 255) I/O; round trips are bit exact.
void write_pgm(const Frame& frame, const std::string& path);
Frame read_pgm(const std::string& path);
std::string frame_filename(std::int64_t seq);

}  // namespace bt::frames
