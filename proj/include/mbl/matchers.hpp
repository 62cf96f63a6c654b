#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mbl/image.hpp"

namespace mbl {

// One pixel correspondence query -> window, sub-pixel, confidence in [0,1].
struct Match {
    double query_u = 0, query_v = 0;
    double window_u = 0, window_v = 0;
    double confidence = 0;
};

// Matches for one window, sorted by confidence descending with ties broken
// by (query u, query v) ascending.
struct MatchSet {
    int window_id = -1;
    std::string matcher;
    double scale = 1.0; // scale hypothesis that produced the peak
    std::vector<Match> matches;
};

struct MatchParams {
    // Hypothesized query-GSD / map-GSD ratios. Empty: 7 log-spaced steps
    // over [1.0, 3.125], the ratio span of the 64-200 m altitude range.
    std::vector<double> scales;
    // > 0: search only a narrow pyramid around this ratio (e.g. derived
    // from an altitude prior).
    double scale_hint = 0.0;
    int grid_step = 16; // correspondence grid step in query pixels
    // When the query exceeds the window at some scale, crop the query
    // centrally instead of discarding that scale.
    bool crop_to_fit = false;
    // Coarse low-resolution gate: windows whose decimated peak confidence
    // stays below prefilter_min_conf return an empty MatchSet without a
    // full-resolution pass.
    bool prefilter = false;
    double prefilter_min_conf = 0.85;
    int prefilter_decimation = 4;
};

// Normalized cross-correlation matcher. The window is resampled to the
// hypothesized query GSD for each scale in the pyramid, the best peak is
// refined to sub-pixel by a 3x3 quadratic fit, and correspondences are
// emitted on a grid in query pixels mapped through the recovered
// translation+scale. Confidence = (1 + NCC) / 2.
// Throws InvalidParameterError when images are empty or when the query is
// larger than the window at every scale (with crop_to_fit off).
MatchSet ncc_match(const Image8& query, const Image8& window,
                   const MatchParams& params = {});

struct PhaseShift {
    double dx = 0, dy = 0;
    double response = 0; // normalized cross-power peak in [0, 1]
};

// Translation between equal-sized images via the normalized cross-power
// spectrum, sub-pixel by 3-point parabola. phase_correlate(a, shift(a, d))
// returns d for circular shifts. Dimensions must be powers of two.
// Throws InvalidParameterError on size mismatch or zero-variance input.
PhaseShift phase_correlate(const Image8& a, const Image8& b);

// Per window keep the top_k matches by confidence (tie rule above), then
// keep only matches meeting the confidence threshold across all windows.
std::vector<Match> filter_matches(const std::vector<MatchSet>& sets,
                                  size_t top_k = 500, double conf_threshold = 0.95);

// Matcher registry. Registered functions receive the triplet (query gray,
// window gray, window normalized depth); classical matchers ignore the
// depth channel. Built-ins: "ncc", "phase".
using MatcherFn = std::function<MatchSet(const Image8& query, const Image8& window_gray,
                                         const ImageF& window_depth_norm,
                                         const MatchParams& params)>;
void register_matcher(const std::string& name, MatcherFn fn);
MatchSet run_matcher(const std::string& name, const Image8& query,
                     const Image8& window_gray, const ImageF& window_depth_norm,
                     const MatchParams& params);
std::vector<std::string> matcher_names();

} // namespace mbl
