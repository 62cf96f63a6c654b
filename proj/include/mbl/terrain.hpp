#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mbl {

// Heightfield terrain with an albedo texture, both centered on the world
// origin. Height posts are row-major with row 0 at the north edge, so the
// world extent is (cols-1)*spacing east-west by (rows-1)*spacing
// north-south. Immutable after construction; all queries are const and
// thread-safe.
struct TerrainModel {
    int rows = 0;
    int cols = 0;
    double post_spacing = 1.0; // m/post
    float nodata = -32768.f;
    std::vector<float> heights; // row-major, north to south

    int tex_rows = 0;
    int tex_cols = 0;
    double tex_pixel_size = 0.25; // m/px
    std::vector<float> albedo;    // [0,1], row-major, north to south

    double extent_x() const { return (cols - 1) * post_spacing; }
    double extent_y() const { return (rows - 1) * post_spacing; }
    double min_x() const { return -0.5 * extent_x(); }
    double max_x() const { return 0.5 * extent_x(); }
    double min_y() const { return -0.5 * extent_y(); }
    double max_y() const { return 0.5 * extent_y(); }
    bool in_extent(double x, double y) const {
        return x >= min_x() && x <= max_x() && y >= min_y() && y <= max_y();
    }

    // Continuous grid coordinates of a world position (posts at integers).
    double grid_col(double x) const { return x / post_spacing + 0.5 * (cols - 1); }
    double grid_row(double y) const { return 0.5 * (rows - 1) - y / post_spacing; }
    double post_x(int c) const { return (c - 0.5 * (cols - 1)) * post_spacing; }
    double post_y(int r) const { return (0.5 * (rows - 1) - r) * post_spacing; }

    float post(int r, int c) const { return heights[size_t(r) * cols + c]; }
    bool post_is_nodata(int r, int c) const;

    // Bilinear height. Throws OutOfBoundsError outside the extent and
    // NodataError when any of the four surrounding posts is nodata.
    double height_at(double x, double y) const;

    // Unit surface normal of the bilinearly interpolated surface via
    // central differences (step spacing/2, samples clamped to the extent).
    Eigen::Vector3d normal_at(double x, double y) const;

    // Bilinear albedo with edge clamping; 0.5 when no texture is attached.
    double albedo_at(double x, double y) const;

    double min_height() const; // ignoring nodata
    double max_height() const;
};

// Raw-grid DTM on disk: little-endian float32, row-major, north to south,
// with a JSON sidecar at <dtm_path>.json holding {rows, cols,
// post_spacing_m, nodata, origin:"center"}. Texture: 8-bit PGM (P5) with a
// sidecar at <texture_path>.json holding {rows, cols, pixel_size_m,
// origin:"center"}.
TerrainModel load_terrain(const std::string& dtm_path, const std::string& texture_path);
void save_terrain(const TerrainModel& terrain, const std::string& dtm_path,
                  const std::string& texture_path);

struct SyntheticTerrainParams {
    double size_m = 2000.0;
    double post_spacing = 1.0;
    double tex_pixel_size = 0.25;
    double roughness_m = 8.0; // fBm amplitude; 0 = flat
    int octaves = 8;
    double gain = 0.5;
    int crater_count = 30;
    double crater_min_radius = 8.0;
    double crater_max_radius = 80.0;
    double crater_depth_ratio = 0.12; // depth = ratio * radius
};

// Deterministic fractal terrain: fBm value noise plus parabolic crater
// depressions; albedo is height-correlated noise snapped to the 8-bit grid
// so save/load round-trips are bit-identical.
TerrainModel generate_synthetic_terrain(uint64_t seed, const SyntheticTerrainParams& params);

} // namespace mbl
