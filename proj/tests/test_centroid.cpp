#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "centroid.hpp"
#include "frames.hpp"

using namespace bt;
using namespace bt::centroid;
using bt::frames::Frame;

namespace {

Frame make_frame(int w, int h, std::uint8_t fill = 0) {
    Frame f;
    f.width = w;
    f.height = h;
    f.pixels.assign(static_cast<std::size_t>(w) * h, fill);
    return f;
}

Frame random_frame(int w, int h, Rng& rng) {
    Frame f = make_frame(w, h);
    for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng.next_u64() & 0xff);
    return f;
}

// --- independent oracles -----------------------------------------------

// Naive per-pixel window scan with edge replication.
Frame oracle_minmax(const Frame& src, int kernel, bool take_min) {
    Frame out = src;
    const int r = kernel / 2;
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            int v = take_min ? 255 : 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const int cx = std::clamp(x + dx, 0, src.width - 1);
                    const int cy = std::clamp(y + dy, 0, src.height - 1);
                    const int s = src.at(cx, cy);
                    v = take_min ? std::min(v, s) : std::max(v, s);
                }
            out.at(x, y) = static_cast<std::uint8_t>(v);
        }
    return out;
}

Frame oracle_open(const Frame& src, int kernel) {
    return oracle_minmax(oracle_minmax(src, kernel, true), kernel, false);
}

// Exhaustive Otsu: recompute both class statistics from scratch for every
// candidate threshold, exact integer comparison.
int oracle_otsu(const Frame& f) {
    long hist[256] = {0};
    for (auto p : f.pixels) ++hist[p];
    int best_t = -1;
    __int128 best_num = 0;
    __int128 best_den = 1;
    for (int t = 0; t < 255; ++t) {
        long w0 = 0, w1 = 0;
        long long s0 = 0, s1 = 0;
        for (int i = 0; i <= t; ++i) {
            w0 += hist[i];
            s0 += static_cast<long long>(i) * hist[i];
        }
        for (int i = t + 1; i < 256; ++i) {
            w1 += hist[i];
            s1 += static_cast<long long>(i) * hist[i];
        }
        if (w0 == 0 || w1 == 0) continue;
        // sigma_b^2 proportional to (s0*w1 - s1*w0)^2 / (w0*w1)
        const long long diff = s0 * w1 - s1 * w0;
        const __int128 num = static_cast<__int128>(diff) * diff;
        const __int128 den = static_cast<__int128>(w0) * w1;
        if (best_t < 0 || num * best_den > best_num * den) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    return best_t;
}

// Stack-based flood fill, 8-connected.
std::vector<std::vector<int>> oracle_components(const std::vector<std::uint8_t>& mask,
                                                int w, int h) {
    std::vector<char> seen(mask.size(), 0);
    std::vector<std::vector<int>> comps;
    for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
        if (!mask[start] || seen[start]) continue;
        std::vector<int> comp;
        std::vector<int> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            comp.push_back(i);
            const int x = i % w, y = i / w;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const int j = ny * w + nx;
                    if (mask[j] && !seen[j]) {
                        seen[j] = 1;
                        stack.push_back(j);
                    }
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

}  // namespace

TEST_CASE("dark_subtract saturates at zero and matches the scalar oracle") {
    Frame f = make_frame(4, 4, 5);
    Frame d = make_frame(4, 4, 9);
    const Frame z = dark_subtract(f, d);
    for (auto p : z.pixels) CHECK(p == 0);

    CHECK(dark_subtract(f, f).pixels == make_frame(4, 4, 0).pixels);

    Rng rng(3);
    const Frame a = random_frame(32, 24, rng);
    const Frame b = random_frame(32, 24, rng);
    const Frame s = dark_subtract(a, b);
    for (std::size_t i = 0; i < s.pixels.size(); ++i)
        CHECK(s.pixels[i] == std::max(0, a.pixels[i] - b.pixels[i]));

    Frame wrong = make_frame(5, 4);
    CHECK_THROWS_AS(dark_subtract(f, wrong), std::invalid_argument);
}

TEST_CASE("morphological_open basics") {
    Rng rng(5);
    const Frame f = random_frame(16, 16, rng);
    CHECK(morphological_open(f, 1).pixels == f.pixels);
    CHECK_THROWS_AS(morphological_open(f, 2), std::invalid_argument);

    // A single bright pixel in a dark field does not survive opening.
    Frame speck = make_frame(16, 16, 0);
    speck.at(8, 8) = 200;
    const Frame opened = morphological_open(speck, 3);
    for (auto p : opened.pixels) CHECK(p == 0);

    // A 10x10 square is preserved exactly.
    Frame square = make_frame(32, 32, 0);
    for (int y = 10; y < 20; ++y)
        for (int x = 10; x < 20; ++x) square.at(x, y) = 180;
    CHECK(morphological_open(square, 3).pixels == square.pixels);
}

TEST_CASE("morphological_open matches the brute-force window oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const int w = 8 + static_cast<int>(rng.next_u64() % 24);
        const int h = 8 + static_cast<int>(rng.next_u64() % 24);
        const Frame f = random_frame(w, h, rng);
        for (int kernel : {3, 5}) {
            CHECK(morphological_open(f, kernel).pixels == oracle_open(f, kernel).pixels);
        }
    }
}

TEST_CASE("opening is idempotent on binary frames") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        Frame f = make_frame(24, 24);
        for (auto& p : f.pixels) p = (rng.uniform() < 0.4) ? 255 : 0;
        const Frame once = morphological_open(f, 3);
        const Frame twice = morphological_open(once, 3);
        CHECK(once.pixels == twice.pixels);
    }
}

TEST_CASE("otsu threshold on a perfectly bimodal frame") {
    Frame f = make_frame(16, 16);
    for (std::size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = i % 2 ? 255 : 0;
    const auto res = otsu_threshold(f);
    REQUIRE(res.has_value());
    long selected = 0;
    for (std::size_t i = 0; i < f.pixels.size(); ++i) {
        if (res->mask[i]) {
            ++selected;
            CHECK(f.pixels[i] == 255);
        }
    }
    CHECK(selected == static_cast<long>(f.pixels.size() / 2));
}

TEST_CASE("otsu reports a degenerate histogram on constant frames") {
    CHECK_FALSE(otsu_threshold(make_frame(8, 8, 0)).has_value());
    CHECK_FALSE(otsu_threshold(make_frame(8, 8, 137)).has_value());
}

TEST_CASE("otsu equals the exhaustive argmax oracle on random frames") {
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        Frame f = random_frame(24, 24, rng);
        if (trial % 3 == 0) {
            // Bias towards few distinct levels so exact ties actually occur.
            for (auto& p : f.pixels) p = static_cast<std::uint8_t>((p / 64) * 64);
        }
        const auto res = otsu_threshold(f);
        REQUIRE(res.has_value());
        CHECK(res->threshold == oracle_otsu(f));
    }
}

TEST_CASE("largest_component basics and flood-fill oracle") {
    // Two blobs, 6 px and 3 px: the bigger one wins.
    Frame src = make_frame(16, 16, 10);
    std::vector<std::uint8_t> mask(src.pixels.size(), 0);
    for (int x = 2; x < 5; ++x) {
        mask[2 * 16 + x] = 1;
        mask[3 * 16 + x] = 1;
    }
    for (int x = 10; x < 13; ++x) mask[10 * 16 + x] = 1;
    const auto comp = largest_component(mask, 16, 16, src, 1);
    REQUIRE(comp.has_value());
    CHECK(comp->pixels.size() == 6);

    CHECK_FALSE(largest_component(std::vector<std::uint8_t>(256, 0), 16, 16, src, 1).has_value());
    CHECK_FALSE(largest_component(mask, 16, 16, src, 7).has_value());  // min_area

    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const int w = 10 + static_cast<int>(rng.next_u64() % 20);
        const int h = 10 + static_cast<int>(rng.next_u64() % 20);
        Frame source = random_frame(w, h, rng);
        std::vector<std::uint8_t> m(static_cast<std::size_t>(w) * h);
        for (auto& b : m) b = rng.uniform() < 0.35 ? 1 : 0;
        const auto got = largest_component(m, w, h, source, 1);
        auto comps = oracle_components(m, w, h);
        if (comps.empty()) {
            CHECK_FALSE(got.has_value());
            continue;
        }
        // Oracle pick: max size, then max source intensity, then first pixel.
        const auto intensity = [&](const std::vector<int>& c) {
            double s = 0.0;
            for (int i : c) s += source.pixels[i];
            return s;
        };
        const auto* best = &comps[0];
        for (const auto& c : comps) {
            if (c.size() != best->size()) {
                if (c.size() > best->size()) best = &c;
            } else if (intensity(c) != intensity(*best)) {
                if (intensity(c) > intensity(*best)) best = &c;
            } else if (c.front() < best->front()) {
                best = &c;
            }
        }
        REQUIRE(got.has_value());
        CHECK(got->pixels == *best);
    }
}

TEST_CASE("moments_centroid hand cases") {
    Frame f = make_frame(32, 32, 0);
    f.at(10, 20) = 50;
    Component single;
    single.pixels = {20 * 32 + 10};
    const Vec2 c1 = moments_centroid(single, f);
    CHECK(c1.x == doctest::Approx(10.0));
    CHECK(c1.y == doctest::Approx(20.0));

    // Uniform 3x3 blob centered at (5, 5).
    Frame g = make_frame(32, 32, 0);
    Component blob;
    for (int y = 4; y <= 6; ++y)
        for (int x = 4; x <= 6; ++x) {
            g.at(x, y) = 90;
            blob.pixels.push_back(y * 32 + x);
        }
    const Vec2 c2 = moments_centroid(blob, g);
    CHECK(c2.x == doctest::Approx(5.0));
    CHECK(c2.y == doctest::Approx(5.0));

    // Intensities in 1:3 ratio at (0,0) and (1,0): weighted mean x = 0.75.
    Frame h = make_frame(8, 8, 0);
    h.at(0, 0) = 50;
    h.at(1, 0) = 150;
    Component pair;
    pair.pixels = {0, 1};
    const Vec2 c3 = moments_centroid(pair, h);
    CHECK(c3.x == doctest::Approx(0.75));
    CHECK(c3.y == doctest::Approx(0.0));

    Component empty;
    CHECK_THROWS_AS(moments_centroid(empty, f), std::invalid_argument);
    Component dark;
    dark.pixels = {5};
    CHECK_THROWS_AS(moments_centroid(dark, make_frame(8, 8, 0)), std::invalid_argument);
}

TEST_CASE("detect_beacon on rendered frames") {
    using namespace bt::frames;
    CameraModel cam;
    cam.width_px = 256;
    cam.height_px = 256;
    PipelineConfig cfg;

    SUBCASE("occluded noise-only frame yields no detection") {
        NoiseModel noise;
        noise.salt_pepper_prob = 0.001;
        Rng dark_rng(1), frame_rng(2);
        const Frame dark = make_dark_frame(cam, noise, 16, dark_rng);
        BeamModel beam;
        const Frame f = render_frame({100, 100}, beam, cam, noise, true, frame_rng);
        CHECK_FALSE(detect_beacon(f, dark, cfg).has_value());
    }

    SUBCASE("clean high-power spot lands within half a pixel") {
        CameraModel quiet = cam;
        quiet.noise_floor_mean = 0.0;
        quiet.noise_floor_sd = 0.0;
        NoiseModel none;
        Rng r1(1), r2(2);
        const Frame dark = make_dark_frame(quiet, none, 4, r1);
        BeamModel beam;
        const Frame f = render_frame({100.0, 200.0}, beam, quiet, none, false, r2);
        const auto det = detect_beacon(f, dark, cfg);
        REQUIRE(det.has_value());
        CHECK(std::abs(det->centroid.x - 100.0) < 0.5);
        CHECK(std::abs(det->centroid.y - 200.0) < 0.5);
    }

    SUBCASE("low power detects with a much smaller area") {
        NoiseModel noise;
        noise.salt_pepper_prob = 0.001;
        noise.shot_noise = true;
        Rng dark_rng(7);
        const Frame dark = make_dark_frame(cam, noise, 16, dark_rng);
        BeamModel low, high;
        low.power_w = cam.min_detect_power_w;
        high.power_w = cam.saturation_power_w;
        double area_low = 0.0, area_high = 0.0;
        int low_hits = 0;
        const int trials = 10;
        for (int i = 0; i < trials; ++i) {
            Rng rl(100 + i), rh(100 + i);
            const Frame fl = render_frame({128, 128}, low, cam, noise, false, rl);
            const Frame fh = render_frame({128, 128}, high, cam, noise, false, rh);
            const auto dl = detect_beacon(fl, dark, cfg);
            const auto dh = detect_beacon(fh, dark, cfg);
            REQUIRE(dh.has_value());
            area_high += dh->area_px;
            if (dl) {
                area_low += dl->area_px;
                ++low_hits;
            }
        }
        REQUIRE(low_hits >= 8);  // the minimum power must remain detectable
        CHECK(area_low / low_hits <= 0.2 * (area_high / trials));
    }
}

TEST_CASE("pipeline determinism and centroid containment") {
    using namespace bt::frames;
    CameraModel cam;
    cam.width_px = 128;
    cam.height_px = 128;
    NoiseModel noise;
    noise.salt_pepper_prob = 0.002;
    noise.shot_noise = true;
    PipelineConfig cfg;
    Rng dark_rng(3);
    const Frame dark = make_dark_frame(cam, noise, 8, dark_rng);
    BeamModel beam;
    beam.waist_px = 8.0;

    for (int trial = 0; trial < 10; ++trial) {
        Rng ra(200 + trial), rb(200 + trial);
        const Frame fa = render_frame({60.4, 70.2}, beam, cam, noise, false, ra);
        const Frame fb = render_frame({60.4, 70.2}, beam, cam, noise, false, rb);
        const auto da = detect_beacon(fa, dark, cfg);
        const auto db = detect_beacon(fb, dark, cfg);
        REQUIRE(da.has_value());
        REQUIRE(db.has_value());
        CHECK(da->centroid.x == db->centroid.x);
        CHECK(da->centroid.y == db->centroid.y);

        // Containment: centroid lies inside the component bounding box.
        PipelineStages stages;
        const auto det = detect_beacon(fa, dark, cfg, &stages);
        REQUIRE(det.has_value());
        const auto otsu = otsu_threshold(stages.opened);
        REQUIRE(otsu.has_value());
        const auto comp = largest_component(otsu->mask, fa.width, fa.height,
                                            stages.subtracted, cfg.min_area);
        REQUIRE(comp.has_value());
        CHECK(det->centroid.x >= comp->min_x);
        CHECK(det->centroid.x <= comp->max_x);
        CHECK(det->centroid.y >= comp->min_y);
        CHECK(det->centroid.y <= comp->max_y);
    }
}

TEST_CASE("centroid noise grows as power drops") {
    using namespace bt::frames;
    CameraModel cam;
    cam.width_px = 128;
    cam.height_px = 128;
    NoiseModel noise;
    noise.salt_pepper_prob = 0.001;
    noise.shot_noise = true;
    PipelineConfig cfg;
    Rng dark_rng(31);
    const Frame dark = make_dark_frame(cam, noise, 16, dark_rng);

    const auto error_variance = [&](double power) {
        BeamModel beam;
        beam.power_w = power;
        double sum2 = 0.0;
        int n = 0;
        for (int trial = 0; trial < 60; ++trial) {
            Rng rng(1000 + trial);  // matched noise realizations across powers
            const Frame f = render_frame({64.25, 64.75}, beam, cam, noise, false, rng);
            const auto det = detect_beacon(f, dark, cfg);
            if (!det) continue;
            const Vec2 e = det->centroid - Vec2{64.25, 64.75};
            sum2 += e.x * e.x + e.y * e.y;
            ++n;
        }
        REQUIRE(n > 30);
        return sum2 / n;
    };
    CHECK(error_variance(cam.min_detect_power_w) >= error_variance(cam.saturation_power_w));
}
