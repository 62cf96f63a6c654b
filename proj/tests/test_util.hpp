#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "mbl/rng.hpp"
#include "mbl/terrain.hpp"

namespace mbl::test {

// Random rotation via quaternion from four normal draws.
inline Eigen::Matrix3d random_rotation(Rng& rng) {
    Eigen::Quaterniond q(rng.next_normal(), rng.next_normal(), rng.next_normal(),
                         rng.next_normal());
    q.normalize();
    return q.toRotationMatrix();
}

// Scratch directory under the test working directory, wiped on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
    std::filesystem::path dir = std::filesystem::path("scratch") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Small random terrain with heights in [-amp, amp], flat albedo.
inline TerrainModel random_terrain(uint64_t seed, int rows, int cols, double spacing,
                                   double amp) {
    TerrainModel t;
    t.rows = rows;
    t.cols = cols;
    t.post_spacing = spacing;
    t.heights.resize(size_t(rows) * cols);
    Rng rng(seed);
    for (auto& h : t.heights) h = float(rng.uniform(-amp, amp));
    return t;
}

} // namespace mbl::test
