#pragma once

#include <string>
#include <vector>

#include "mbl/accel.hpp"
#include "mbl/geometry.hpp"
#include "mbl/image.hpp"
#include "mbl/lighting.hpp"

namespace mbl {

// Depth value written where a ray leaves the terrain.
constexpr float kNodataDepth = -1.f;

struct RenderSettings {
    int width = 640;
    int height = 480;
    double exposure = 0.0;   // <= 0: analytic default for the sun irradiance
    int shadow_samples = -1; // < 0: take SunConfig::shadow_samples
    uint64_t seed = 0;       // keys the per-pixel shadow sampling streams
    bool keep_double_depth = false;
};

// Gray + depth raster pair with full provenance. Depth is the component of
// camera-to-surface distance along the viewing direction, in meters.
struct RenderedImage {
    Image8 gray;
    ImageF depth;
    std::vector<double> depth64; // populated when keep_double_depth
    std::string camera_kind;     // "orthographic" | "perspective"
    Pose pose;
    OrthoIntrinsics ortho;
    PerspectiveIntrinsics persp;
    SunConfig sun;
    double exposure = 0.0; // resolved value actually used
    float nodata_depth = kNodataDepth;
    uint64_t seed = 0;
};

// One parallel ray per pixel along the camera viewing axis. Misses render
// as gray 0 / depth nodata. Pixel rows run parallel over tiles; output is
// identical at any thread count.
RenderedImage render_ortho(const Raycaster& caster, const OrthoIntrinsics& oi,
                           const Pose& pose, const SunConfig& sun,
                           const RenderSettings& settings);

// Pinhole rays through pixel centers; depth is camera-frame z of the hit,
// not the slant range.
RenderedImage render_perspective(const Raycaster& caster,
                                 const PerspectiveIntrinsics& pi, const Pose& pose,
                                 const SunConfig& sun, const RenderSettings& settings);

// Nadir pose at (x, y) with the camera `altitude_agl` meters above the
// terrain surface hit by a downward ray. Throws PlacementError when the
// ray misses (outside extent or nodata hole).
Pose place_camera(const Raycaster& caster, double x, double y, double altitude_agl);

// On-disk form: <prefix>.pgm (gray), <prefix>.pfm (depth), <prefix>.json
// (camera, sun, exposure, seed).
void save_rendered(const RenderedImage& img, const std::string& prefix);
RenderedImage load_rendered(const std::string& prefix);

} // namespace mbl
