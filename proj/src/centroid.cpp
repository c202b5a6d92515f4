#include "centroid.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace bt::centroid {

void PipelineConfig::validate() const {
    if (opening_kernel < 1 || opening_kernel % 2 == 0)
        throw std::invalid_argument("pipeline: opening_kernel must be odd and >= 1");
    if (min_area < 1) throw std::invalid_argument("pipeline: min_area must be >= 1");
    if (min_total_intensity < 0.0)
        throw std::invalid_argument("pipeline: min_total_intensity must be >= 0");
}

Frame dark_subtract(const Frame& frame, const Frame& dark) {
    if (frame.width != dark.width || frame.height != dark.height)
        throw std::invalid_argument("dark_subtract: frame dimensions differ");
    Frame out = frame;
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = frame.pixels[i] > dark.pixels[i]
                            ? static_cast<std::uint8_t>(frame.pixels[i] - dark.pixels[i])
                            : 0;
    return out;
}

namespace {

enum class Reduce { Min, Max };

// One separable pass along a row or column, window of `kernel` samples,
// indices clamped at the borders (edge replication).
void filter_pass(const std::vector<std::uint8_t>& src, std::vector<std::uint8_t>& dst,
                 int width, int height, int kernel, bool horizontal, Reduce op) {
    const int r = kernel / 2;
    const int outer = horizontal ? height : width;
    const int inner = horizontal ? width : height;
    for (int o = 0; o < outer; ++o) {
        for (int i = 0; i < inner; ++i) {
            const int lo = std::max(0, i - r);
            const int hi = std::min(inner - 1, i + r);
            std::uint8_t v = op == Reduce::Min ? 255 : 0;
            for (int j = lo; j <= hi; ++j) {
                const std::size_t idx = horizontal
                                            ? static_cast<std::size_t>(o) * width + j
                                            : static_cast<std::size_t>(j) * width + o;
                v = op == Reduce::Min ? std::min(v, src[idx]) : std::max(v, src[idx]);
            }
            const std::size_t idx = horizontal ? static_cast<std::size_t>(o) * width + i
                                               : static_cast<std::size_t>(i) * width + o;
            dst[idx] = v;
        }
    }
}

// Square-window min/max filters factor into two 1-D passes.
void rect_filter(std::vector<std::uint8_t>& pixels, int width, int height, int kernel, Reduce op) {
    std::vector<std::uint8_t> tmp(pixels.size());
    filter_pass(pixels, tmp, width, height, kernel, true, op);
    filter_pass(tmp, pixels, width, height, kernel, false, op);
}

}  // namespace

Frame morphological_open(const Frame& frame, int kernel) {
    if (kernel < 1 || kernel % 2 == 0)
        throw std::invalid_argument("morphological_open: kernel must be odd and >= 1");
    Frame out = frame;
    if (kernel == 1) return out;
    rect_filter(out.pixels, out.width, out.height, kernel, Reduce::Min);
    rect_filter(out.pixels, out.width, out.height, kernel, Reduce::Max);
    return out;
}

namespace {

// Exact comparison of (a1^2 / d1) > (a2^2 / d2) for the Otsu scan. The cross
// products can exceed 128 bits for large frames, so multiply in 64-bit limbs.
bool variance_greater(std::int64_t a1, std::uint64_t d1, std::int64_t a2, std::uint64_t d2) {
    const std::uint64_t u1 = static_cast<std::uint64_t>(a1 < 0 ? -a1 : a1);
    const std::uint64_t u2 = static_cast<std::uint64_t>(a2 < 0 ? -a2 : a2);
    const unsigned __int128 n1 = static_cast<unsigned __int128>(u1) * u1;
    const unsigned __int128 n2 = static_cast<unsigned __int128>(u2) * u2;
    const std::uint64_t n1_hi = static_cast<std::uint64_t>(n1 >> 64);
    const std::uint64_t n1_lo = static_cast<std::uint64_t>(n1);
    const std::uint64_t n2_hi = static_cast<std::uint64_t>(n2 >> 64);
    const std::uint64_t n2_lo = static_cast<std::uint64_t>(n2);
    // l = n * d as a 192-bit value split into (hi, lo128).
    const auto mul = [](std::uint64_t hi, std::uint64_t lo, std::uint64_t d) {
        const unsigned __int128 low = static_cast<unsigned __int128>(lo) * d;
        const unsigned __int128 high = static_cast<unsigned __int128>(hi) * d +
                                       static_cast<std::uint64_t>(low >> 64);
        return std::pair<unsigned __int128, std::uint64_t>(high, static_cast<std::uint64_t>(low));
    };
    const auto [l_hi, l_lo] = mul(n1_hi, n1_lo, d2);
    const auto [r_hi, r_lo] = mul(n2_hi, n2_lo, d1);
    if (l_hi != r_hi) return l_hi > r_hi;
    return l_lo > r_lo;
}

}  // namespace

std::optional<OtsuResult> otsu_threshold(const Frame& frame) {
    if (frame.pixels.empty()) throw std::invalid_argument("otsu_threshold: empty frame");
    std::array<std::uint32_t, 256> hist{};
    for (std::uint8_t p : frame.pixels) ++hist[p];

    const std::uint64_t total = frame.pixels.size();
    std::uint64_t weighted_sum = 0;
    for (int i = 0; i < 256; ++i) weighted_sum += static_cast<std::uint64_t>(i) * hist[i];

    // Between-class variance for cut t is (s0*N - S*w0)^2 / (w0*w1), maximised
    // with exact integer arithmetic so ties resolve deterministically.
    bool found = false;
    int best_t = 0;
    std::int64_t best_num = 0;
    std::uint64_t best_den = 1;
    std::uint64_t w0 = 0, s0 = 0;
    for (int t = 0; t < 255; ++t) {
        w0 += hist[t];
        s0 += static_cast<std::uint64_t>(t) * hist[t];
        if (w0 == 0) continue;
        const std::uint64_t w1 = total - w0;
        if (w1 == 0) break;
        const std::int64_t num = static_cast<std::int64_t>(s0 * total) -
                                 static_cast<std::int64_t>(weighted_sum * w0);
        const std::uint64_t den = w0 * w1;
        if (!found || variance_greater(num, den, best_num, best_den)) {
            found = true;
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    if (!found) return std::nullopt;  // constant frame

    OtsuResult res;
    res.threshold = best_t;
    res.mask.resize(frame.pixels.size());
    for (std::size_t i = 0; i < frame.pixels.size(); ++i)
        res.mask[i] = frame.pixels[i] > best_t ? 1 : 0;
    return res;
}

namespace {

struct UnionFind {
    std::vector<std::int32_t> parent;
    std::int32_t find(std::int32_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::optional<Component> largest_component(const std::vector<std::uint8_t>& mask,
                                           int width, int height,
                                           const Frame& source, int min_area) {
    if (static_cast<std::size_t>(width) * height != mask.size())
        throw std::invalid_argument("largest_component: mask size mismatch");
    if (source.width != width || source.height != height)
        throw std::invalid_argument("largest_component: source dimensions differ");

    std::vector<std::int32_t> label(mask.size(), -1);
    UnionFind uf;
    std::int32_t next = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            if (!mask[i]) continue;
            // 8-connectivity: merge with W, NW, N, NE neighbours already seen.
            std::int32_t lbl = -1;
            const auto consider = [&](int nx, int ny) {
                if (nx < 0 || nx >= width || ny < 0) return;
                const std::size_t j = static_cast<std::size_t>(ny) * width + nx;
                if (label[j] < 0) return;
                if (lbl < 0)
                    lbl = uf.find(label[j]);
                else
                    uf.unite(lbl, label[j]);
            };
            consider(x - 1, y);
            consider(x - 1, y - 1);
            consider(x, y - 1);
            consider(x + 1, y - 1);
            if (lbl < 0) {
                lbl = next++;
                uf.parent.push_back(lbl);
            }
            label[i] = lbl;
        }
    }
    if (next == 0) return std::nullopt;

    struct Stats {
        std::int64_t count = 0;
        double intensity = 0.0;
        std::size_t first_pixel = 0;
        bool seen = false;
    };
    std::vector<Stats> stats(next);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (label[i] < 0) continue;
        const std::int32_t root = uf.find(label[i]);
        label[i] = root;
        Stats& s = stats[root];
        if (!s.seen) {
            s.seen = true;
            s.first_pixel = i;
        }
        ++s.count;
        s.intensity += source.pixels[i];
    }

    std::int32_t best = -1;
    for (std::int32_t r = 0; r < next; ++r) {
        if (!stats[r].seen || stats[r].count < min_area) continue;
        if (best < 0) {
            best = r;
            continue;
        }
        const Stats& a = stats[r];
        const Stats& b = stats[best];
        if (a.count != b.count) {
            if (a.count > b.count) best = r;
        } else if (a.intensity != b.intensity) {
            if (a.intensity > b.intensity) best = r;
        } else if (a.first_pixel < b.first_pixel) {
            best = r;
        }
    }
    if (best < 0) return std::nullopt;

    Component c;
    c.min_x = width;
    c.min_y = height;
    c.max_x = 0;
    c.max_y = 0;
    c.total_intensity = stats[best].intensity;
    c.pixels.reserve(static_cast<std::size_t>(stats[best].count));
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (label[i] != best) continue;
        c.pixels.push_back(static_cast<int>(i));
        const int x = static_cast<int>(i) % width;
        const int y = static_cast<int>(i) / width;
        c.min_x = std::min(c.min_x, x);
        c.min_y = std::min(c.min_y, y);
        c.max_x = std::max(c.max_x, x);
        c.max_y = std::max(c.max_y, y);
    }
    return c;
}

Vec2 moments_centroid(const Component& component, const Frame& frame) {
    if (component.pixels.empty())
        throw std::invalid_argument("moments_centroid: empty component");
    double sum = 0.0, sx = 0.0, sy = 0.0;
    for (int idx : component.pixels) {
        const double v = frame.pixels[static_cast<std::size_t>(idx)];
        const int x = idx % frame.width;
        const int y = idx / frame.width;
        sum += v;
        sx += v * x;
        sy += v * y;
    }
    if (sum <= 0.0) throw std::invalid_argument("moments_centroid: zero total intensity");
    return {sx / sum, sy / sum};
}

std::optional<Detection> detect_beacon(const Frame& frame, const Frame& dark,
                                       const PipelineConfig& cfg, PipelineStages* stages) {
    cfg.validate();
    Frame subtracted = dark_subtract(frame, dark);
    Frame opened = morphological_open(subtracted, cfg.opening_kernel);
    auto otsu = otsu_threshold(opened);
    if (stages) {
        stages->subtracted = subtracted;
        stages->opened = opened;
        stages->mask = opened;
        std::fill(stages->mask.pixels.begin(), stages->mask.pixels.end(), 0);
    }
    if (!otsu) return std::nullopt;
    if (stages) {
        for (std::size_t i = 0; i < otsu->mask.size(); ++i)
            stages->mask.pixels[i] = otsu->mask[i] ? 255 : 0;
    }
    auto component = largest_component(otsu->mask, frame.width, frame.height,
                                       subtracted, cfg.min_area);
    if (!component) return std::nullopt;
    if (component->total_intensity <= 0.0) return std::nullopt;
    // Policy floor on the opened intensities: opening has already scrubbed
    // salt noise there, so residual border speckle cannot pose as a beacon.
    double opened_total = 0.0;
    for (int idx : component->pixels) opened_total += opened.pixels[static_cast<std::size_t>(idx)];
    if (opened_total < cfg.min_total_intensity) return std::nullopt;

    Detection det;
    det.centroid = moments_centroid(*component, subtracted);
    det.area_px = static_cast<int>(component->pixels.size());
    det.total_intensity = component->total_intensity;
    det.threshold_used = otsu->threshold;
    return det;
}

}  // namespace bt::centroid
