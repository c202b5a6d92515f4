#include "frames.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace bt::frames {

void CameraModel::validate() const {
    if (width_px < 16 || height_px < 16)
        throw std::invalid_argument("camera: width_px and height_px must be >= 16");
    if (pixel_pitch_um <= 0.0) throw std::invalid_argument("camera: pixel_pitch_um must be > 0");
    if (frame_rate_hz <= 0.0) throw std::invalid_argument("camera: frame_rate_hz must be > 0");
    if (bit_depth < 1 || bit_depth > 8)
        throw std::invalid_argument("camera: bit_depth must be in [1, 8]");
    if (!(min_detect_power_w > 0.0) || !(min_detect_power_w < saturation_power_w))
        throw std::invalid_argument("camera: need 0 < min_detect_power_w < saturation_power_w");
    if (noise_floor_sd < 0.0) throw std::invalid_argument("camera: noise_floor_sd must be >= 0");
}

void BeamModel::validate() const {
    if (waist_px <= 0.0) throw std::invalid_argument("beam: waist_px must be > 0");
    if (power_w < 0.0) throw std::invalid_argument("beam: power_w must be >= 0");
}

void NoiseModel::validate(const CameraModel& cam) const {
    if (salt_pepper_prob < 0.0 || salt_pepper_prob > 1.0)
        throw std::invalid_argument("noise: salt_pepper_prob must be in [0, 1]");
    const auto expected = static_cast<std::size_t>(cam.width_px) * cam.height_px;
    if (!fixed_pattern.empty() && fixed_pattern.size() != expected)
        throw std::invalid_argument("noise: fixed_pattern size must match frame dimensions");
}

std::vector<double> constant_pattern(const CameraModel& cam, double value) {
    return std::vector<double>(static_cast<std::size_t>(cam.width_px) * cam.height_px, value);
}

std::vector<double> gradient_pattern(const CameraModel& cam, double max_value) {
    std::vector<double> p(static_cast<std::size_t>(cam.width_px) * cam.height_px);
    const double denom = static_cast<double>(cam.width_px + cam.height_px - 2);
    for (int y = 0; y < cam.height_px; ++y)
        for (int x = 0; x < cam.width_px; ++x)
            p[static_cast<std::size_t>(y) * cam.width_px + x] =
                max_value * static_cast<double>(x + y) / denom;
    return p;
}

namespace {

// Spot amplitude at the minimum detectable power: the configured sigma margin
// above the floor, but never so few counts that shot noise erases the tip.
double detect_floor_level(const CameraModel& cam) {
    constexpr double kMinDetectCounts = 7.0;
    const double level = std::max(
        cam.noise_floor_mean + cam.detect_margin_sigmas * cam.noise_floor_sd, kMinDetectCounts);
    return std::min(level, 0.4 * cam.response_overdrive * cam.full_scale());
}

std::uint8_t quantize(double v, int full) {
    const long r = std::lround(v);
    return static_cast<std::uint8_t>(std::clamp(r, 0L, static_cast<long>(full)));
}

}  // namespace

double latent_peak(double power_w, const CameraModel& cam) {
    if (power_w < 0.0) throw std::invalid_argument("camera_response: power must be >= 0");
    const double ceiling = cam.response_overdrive * cam.full_scale();
    const double frac = detect_floor_level(cam) / ceiling;
    const double k = -std::log(1.0 - frac) * cam.saturation_power_w / cam.min_detect_power_w;
    return ceiling * (1.0 - std::exp(-k * power_w / cam.saturation_power_w));
}

double camera_response(double power_w, const CameraModel& cam) {
    const double full = cam.full_scale();
    if (power_w >= cam.saturation_power_w) return full;
    return std::min(latent_peak(power_w, cam), full);
}

Frame render_frame(Vec2 true_pos, const BeamModel& beam, const CameraModel& cam,
                   const NoiseModel& noise, bool occluded, Rng& rng,
                   double timestamp, std::int64_t seq) {
    cam.validate();
    beam.validate();
    noise.validate(cam);

    const int w = cam.width_px;
    const int h = cam.height_px;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> acc(n, 0.0);

    if (!noise.fixed_pattern.empty())
        std::copy(noise.fixed_pattern.begin(), noise.fixed_pattern.end(), acc.begin());

    if (cam.noise_floor_mean != 0.0 || cam.noise_floor_sd != 0.0) {
        if (cam.noise_floor_sd > 0.0) {
            for (std::size_t i = 0; i < n; ++i)
                acc[i] += rng.normal(cam.noise_floor_mean, cam.noise_floor_sd);
        } else {
            for (std::size_t i = 0; i < n; ++i) acc[i] += cam.noise_floor_mean;
        }
    }

    const double peak = occluded ? 0.0 : latent_peak(beam.power_w, cam);
    if (peak > 0.25) {
        const double sigma = beam.waist_px / 2.0;
        const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
        // Skip pixels where the spot contributes less than a quarter count.
        const double radius = sigma * std::sqrt(2.0 * std::log(peak / 0.25));
        const int x0 = std::max(0, static_cast<int>(std::floor(true_pos.x - radius)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(true_pos.x + radius)));
        const int y0 = std::max(0, static_cast<int>(std::floor(true_pos.y - radius)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(true_pos.y + radius)));
        for (int y = y0; y <= y1; ++y) {
            const double dy = y - true_pos.y;
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - true_pos.x;
                double s = peak * std::exp(-(dx * dx + dy * dy) * inv2s2);
                if (noise.shot_noise && s > 0.0)
                    s += rng.normal(0.0, std::sqrt(cam.shot_noise_scale * s));
                acc[static_cast<std::size_t>(y) * w + x] += s;
            }
        }
    }

    if (noise.salt_pepper_prob > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.uniform() < noise.salt_pepper_prob)
                acc[i] = rng.uniform() < 0.5 ? noise.salt_value : noise.pepper_value;
        }
    }

    Frame f;
    f.width = w;
    f.height = h;
    f.timestamp = timestamp;
    f.seq = seq;
    f.pixels.resize(n);
    const int full = cam.full_scale();
    for (std::size_t i = 0; i < n; ++i) f.pixels[i] = quantize(acc[i], full);
    return f;
}

Frame make_dark_frame(const CameraModel& cam, const NoiseModel& noise, int n_avg, Rng& rng) {
    if (n_avg < 1) throw std::invalid_argument("make_dark_frame: n_avg must be >= 1");
    cam.validate();
    noise.validate(cam);
    const std::size_t n = static_cast<std::size_t>(cam.width_px) * cam.height_px;
    std::vector<double> acc(n, 0.0);
    BeamModel off;
    off.power_w = 0.0;
    for (int i = 0; i < n_avg; ++i) {
        const Frame f = render_frame({0.0, 0.0}, off, cam, noise, true, rng);
        for (std::size_t j = 0; j < n; ++j) acc[j] += f.pixels[j];
    }
    Frame dark;
    dark.width = cam.width_px;
    dark.height = cam.height_px;
    dark.pixels.resize(n);
    const int full = cam.full_scale();
    for (std::size_t j = 0; j < n; ++j) dark.pixels[j] = quantize(acc[j] / n_avg, full);
    return dark;
}

void write_pgm(const Frame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

Frame read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("read_pgm: not a P5 file: " + path);
    auto next_int = [&in, &path]() {
        // Skip whitespace and '#' comment lines between header tokens.
        int c = in.get();
        while (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '#') {
            if (c == '#')
                while (c != '\n' && c != EOF) c = in.get();
            c = in.get();
        }
        in.unget();
        long v = 0;
        if (!(in >> v)) throw std::runtime_error("read_pgm: bad header in " + path);
        return v;
    };
    const long w = next_int();
    const long h = next_int();
    const long maxval = next_int();
    if (w <= 0 || h <= 0 || maxval != 255)
        throw std::runtime_error("read_pgm: unsupported header in " + path);
    in.get();  // single whitespace after maxval
    Frame f;
    f.width = static_cast<int>(w);
    f.height = static_cast<int>(h);
    f.pixels.resize(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.pixels.size()))
        throw std::runtime_error("read_pgm: truncated pixel data in " + path);
    return f;
}

std::string frame_filename(std::int64_t seq) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06lld.pgm", static_cast<long long>(seq));
    return buf;
}

}  // namespace bt::frames
