#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mbl/terrain.hpp"

namespace mbl {

struct RayHit {
    Eigen::Vector3d point;  // world [m]
    Eigen::Vector3d normal; // unit, z > 0 for heightfields
    double albedo = 0.5;
    double t = 0.0; // ray parameter, meters when direction is unit length
};

// Bounding volume hierarchy over heightfield cells. Each cell is split
// into two triangles along the world lower-left to upper-right diagonal;
// nodata cells carry no geometry (rays pass through). Immutable after
// construction and safe for concurrent queries.
//
// Ties between candidate triangles (equal t) break toward the smaller
// (cell, triangle) index, matching intersect_brute exactly.
class TerrainAccel {
  public:
    explicit TerrainAccel(const TerrainModel& terrain);

    // Nearest intersection; t_min excludes hits at or before it.
    std::optional<RayHit> intersect(const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& dir,
                                    double t_min = 1e-9) const;

    // Any-hit query for shadow rays.
    bool occluded(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                  double t_min = 1e-9) const;

    const TerrainModel& terrain() const { return *terrain_; }

  private:
    struct Node {
        double bb[6];        // xmin xmax ymin ymax zmin zmax
        int32_t left = -1;   // < 0 marks a leaf
        int32_t right = -1;
        int32_t r0 = 0, r1 = 0, c0 = 0, c1 = 0; // leaf cell range, exclusive end
    };

    int32_t build(int r0, int r1, int c0, int c1);

    const TerrainModel* terrain_;
    std::vector<Node> nodes_;
    int32_t root_ = -1;
};

inline TerrainAccel build_accel(const TerrainModel& terrain) { return TerrainAccel(terrain); }

inline std::optional<RayHit> ray_intersect(const TerrainAccel& accel,
                                           const Eigen::Vector3d& origin,
                                           const Eigen::Vector3d& dir) {
    return accel.intersect(origin, dir);
}

// Exhaustive reference intersector: tests every triangle of every cell in
// row-major order. Oracle twin of TerrainAccel::intersect.
std::optional<RayHit> intersect_brute(const TerrainModel& terrain,
                                      const Eigen::Vector3d& origin,
                                      const Eigen::Vector3d& dir,
                                      double t_min = 1e-9);

// Dispatch helper used by the renderer so the accelerated and brute-force
// paths stay interchangeable.
struct Raycaster {
    const TerrainModel* terrain = nullptr;
    const TerrainAccel* accel = nullptr; // null -> brute force

    std::optional<RayHit> intersect(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                                    double t_min = 1e-9) const {
        return accel ? accel->intersect(o, d, t_min) : intersect_brute(*terrain, o, d, t_min);
    }
    bool occluded(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                  double t_min = 1e-9) const {
        if (accel) return accel->occluded(o, d, t_min);
        return intersect_brute(*terrain, o, d, t_min).has_value();
    }
    const TerrainModel& model() const { return accel ? accel->terrain() : *terrain; }
};

} // namespace mbl
