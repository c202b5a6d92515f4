#pragma once

#include <optional>
#include <vector>

#include "frames.hpp"

namespace bt::centroid {

using frames::Frame;

struct PipelineConfig {
    int opening_kernel = 3;  // odd, >= 1
    int min_area = 5;        // pixels
    // Detection policy: reject components whose summed subtracted intensity
    // falls below this, so border-replication noise survivors cannot pass as
    // a beacon.
    double min_total_intensity = 40.0;

    void validate() const;
};

struct Detection {
    Vec2 centroid;             // sub-pixel, x = column, y = row
    int area_px = 0;
    double total_intensity = 0.0;  // sum of subtracted intensities over the component
    int threshold_used = 0;
};

// Per-pixel saturating subtraction (clamped at zero).
Frame dark_subtract(const Frame& frame, const Frame& dark);

// Grayscale opening: min filter then max filter over a kernel x kernel
// window, borders handled by edge replication.
Frame morphological_open(const Frame& frame, int kernel);

struct OtsuResult {
    int threshold = 0;
    std::vector<std::uint8_t> mask;  // 1 where pixel > threshold
};

// Empty result signals a degenerate histogram (constant frame); callers treat
// that as no detection.
std::optional<OtsuResult> otsu_threshold(const Frame& frame);

struct Component {
    std::vector<int> pixels;  // linear indices, ascending
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    double total_intensity = 0.0;  // from the source frame
};

// Largest 8-connected foreground component. Ties broken by larger source
// intensity, then by the earlier first pixel in row-major order. Absent when
// no component reaches min_area.
std::optional<Component> largest_component(const std::vector<std::uint8_t>& mask,
                                           int width, int height,
                                           const Frame& source, int min_area);

// Intensity-weighted first moment over the component pixels.
Vec2 moments_centroid(const Component& component, const Frame& frame);

struct PipelineStages {
    Frame subtracted;
    Frame opened;
    Frame mask;  // 0/255 for graymap dumps
};

// Full beacon identification chain: subtract, open, threshold, largest
// component, moments. Absent on any degenerate stage; that absence is the
// occlusion signal consumed by the tracking filter.
std::optional<Detection> detect_beacon(const Frame& frame, const Frame& dark,
                                       const PipelineConfig& cfg,
                                       PipelineStages* stages = nullptr);

}  // namespace bt::centroid
