#include "mbl/accel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mbl/errors.hpp"

namespace mbl {

namespace {

constexpr int kLeafCells = 16;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct TriCandidate {
    double t = kInf;
    uint64_t key = ~0ULL; // (cell_index << 1) | triangle
};

// Moller-Trumbore with slightly inclusive barycentric bounds so rays
// crossing shared cell edges register on at least one of the triangles.
inline bool ray_triangle(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                         const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                         const Eigen::Vector3d& c, double t_min, double& t_out) {
    Eigen::Vector3d e1 = b - a;
    Eigen::Vector3d e2 = c - a;
    Eigen::Vector3d p = d.cross(e2);
    double det = e1.dot(p);
    if (std::abs(det) < 1e-14) return false;
    double inv = 1.0 / det;
    Eigen::Vector3d tv = o - a;
    double u = tv.dot(p) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) return false;
    Eigen::Vector3d q = tv.cross(e1);
    double v = d.dot(q) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return false;
    double t = e2.dot(q) * inv;
    if (t <= t_min) return false;
    t_out = t;
    return true;
}

// Tests the two triangles of cell (r, c); updates the running best hit.
// Vertex construction is shared verbatim by the BVH and brute-force paths.
inline void test_cell(const TerrainModel& t, int r, int c, const Eigen::Vector3d& o,
                      const Eigen::Vector3d& d, double t_min, TriCandidate& best) {
    if (t.post_is_nodata(r, c) || t.post_is_nodata(r, c + 1) ||
        t.post_is_nodata(r + 1, c) || t.post_is_nodata(r + 1, c + 1))
        return;
    double x0 = t.post_x(c), x1 = t.post_x(c + 1);
    double yn = t.post_y(r), ys = t.post_y(r + 1);
    Eigen::Vector3d ul(x0, yn, t.post(r, c));
    Eigen::Vector3d ur(x1, yn, t.post(r, c + 1));
    Eigen::Vector3d ll(x0, ys, t.post(r + 1, c));
    Eigen::Vector3d lr(x1, ys, t.post(r + 1, c + 1));
    uint64_t cell = uint64_t(r) * uint64_t(t.cols - 1) + uint64_t(c);
    double ht;
    if (ray_triangle(o, d, ll, lr, ur, t_min, ht)) {
        uint64_t key = cell * 2;
        if (ht < best.t || (ht == best.t && key < best.key)) {
            best.t = ht;
            best.key = key;
        }
    }
    if (ray_triangle(o, d, ll, ur, ul, t_min, ht)) {
        uint64_t key = cell * 2 + 1;
        if (ht < best.t || (ht == best.t && key < best.key)) {
            best.t = ht;
            best.key = key;
        }
    }
}

inline bool slab_hit(const double bb[6], const Eigen::Vector3d& o,
                     const Eigen::Vector3d& inv, double t_lo, double t_hi,
                     double& t_near) {
    double t0 = t_lo, t1 = t_hi;
    for (int i = 0; i < 3; ++i) {
        double a = (bb[2 * i] - o[i]) * inv[i];
        double b = (bb[2 * i + 1] - o[i]) * inv[i];
        if (a > b) std::swap(a, b);
        // fmax/fmin ignore NaN from 0*inf, keeping the test conservative
        t0 = std::fmax(t0, a);
        t1 = std::fmin(t1, b);
        if (t0 > t1) return false;
    }
    t_near = t0;
    return true;
}

std::optional<RayHit> finish_hit(const TerrainModel& terrain, const Eigen::Vector3d& o,
                                 const Eigen::Vector3d& d, const TriCandidate& best) {
    if (!std::isfinite(best.t)) return std::nullopt;
    RayHit hit;
    hit.t = best.t;
    hit.point = o + best.t * d;
    double x = std::clamp(hit.point.x(), terrain.min_x(), terrain.max_x());
    double y = std::clamp(hit.point.y(), terrain.min_y(), terrain.max_y());
    try {
        hit.normal = terrain.normal_at(x, y);
    } catch (const NodataError&) {
        // normal samples straddle a nodata hole: use the hit triangle's
        // geometric normal instead
        int r = int(best.key / 2 / uint64_t(terrain.cols - 1));
        int c = int(best.key / 2 % uint64_t(terrain.cols - 1));
        double x0 = terrain.post_x(c), x1 = terrain.post_x(c + 1);
        double yn = terrain.post_y(r), ys = terrain.post_y(r + 1);
        Eigen::Vector3d ul(x0, yn, terrain.post(r, c));
        Eigen::Vector3d ur(x1, yn, terrain.post(r, c + 1));
        Eigen::Vector3d ll(x0, ys, terrain.post(r + 1, c));
        Eigen::Vector3d lr(x1, ys, terrain.post(r + 1, c + 1));
        Eigen::Vector3d n = (best.key & 1) ? (ur - ll).cross(ul - ll)
                                           : (lr - ll).cross(ur - ll);
        hit.normal = n.normalized();
    }
    hit.albedo = terrain.albedo_at(x, y);
    return hit;
}

} // namespace

TerrainAccel::TerrainAccel(const TerrainModel& terrain) : terrain_(&terrain) {
    if (terrain.rows < 2 || terrain.cols < 2 || terrain.heights.empty())
        throw InvalidParameterError("TerrainAccel: terrain has no cells");
    size_t cells = size_t(terrain.rows - 1) * size_t(terrain.cols - 1);
    nodes_.reserve(2 * (cells / kLeafCells + 2));
    root_ = build(0, terrain.rows - 1, 0, terrain.cols - 1);
}

int32_t TerrainAccel::build(int r0, int r1, int c0, int c1) {
    const TerrainModel& t = *terrain_;
    Node n;
    if ((r1 - r0) * (c1 - c0) <= kLeafCells) {
        n.r0 = r0;
        n.r1 = r1;
        n.c0 = c0;
        n.c1 = c1;
        double zmin = kInf, zmax = -kInf;
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                if (!t.post_is_nodata(r, c)) {
                    double h = t.post(r, c);
                    zmin = std::min(zmin, h);
                    zmax = std::max(zmax, h);
                }
        if (zmin > zmax) {
            zmin = 1.0; // finite empty box, always culled
            zmax = 0.0;
        }
        n.bb[0] = t.post_x(c0);
        n.bb[1] = t.post_x(c1);
        n.bb[2] = t.post_y(r1);
        n.bb[3] = t.post_y(r0);
        n.bb[4] = zmin;
        n.bb[5] = zmax;
    } else {
        int32_t left, right;
        if (r1 - r0 >= c1 - c0) {
            int rm = (r0 + r1) / 2;
            left = build(r0, rm, c0, c1);
            right = build(rm, r1, c0, c1);
        } else {
            int cm = (c0 + c1) / 2;
            left = build(r0, r1, c0, cm);
            right = build(r0, r1, cm, c1);
        }
        n.left = left;
        n.right = right;
        const Node& a = nodes_[size_t(left)];
        const Node& b = nodes_[size_t(right)];
        for (int i = 0; i < 3; ++i) {
            n.bb[2 * i] = std::min(a.bb[2 * i], b.bb[2 * i]);
            n.bb[2 * i + 1] = std::max(a.bb[2 * i + 1], b.bb[2 * i + 1]);
        }
    }
    // pad so boundary-tangent rays are never wrongly culled
    for (int i = 0; i < 3; ++i) {
        double pad = 1e-9 * (1.0 + std::abs(n.bb[2 * i]) + std::abs(n.bb[2 * i + 1]));
        n.bb[2 * i] -= pad;
        n.bb[2 * i + 1] += pad;
    }
    nodes_.push_back(n);
    return int32_t(nodes_.size() - 1);
}

std::optional<RayHit> TerrainAccel::intersect(const Eigen::Vector3d& o,
                                              const Eigen::Vector3d& d,
                                              double t_min) const {
    if (d.squaredNorm() == 0.0)
        throw InvalidParameterError("ray_intersect: direction must be non-zero");
    Eigen::Vector3d inv(1.0 / d.x(), 1.0 / d.y(), 1.0 / d.z());
    TriCandidate best;

    struct Entry {
        int32_t node;
        double t_near;
    };
    Entry stack[96];
    int sp = 0;
    double t_near;
    if (!slab_hit(nodes_[size_t(root_)].bb, o, inv, t_min, kInf, t_near))
        return std::nullopt;
    stack[sp++] = {root_, t_near};

    while (sp > 0) {
        Entry e = stack[--sp];
        if (e.t_near > best.t) continue;
        const Node& n = nodes_[size_t(e.node)];
        if (n.left < 0) {
            for (int r = n.r0; r < n.r1; ++r)
                for (int c = n.c0; c < n.c1; ++c)
                    test_cell(*terrain_, r, c, o, d, t_min, best);
            continue;
        }
        double tl, tr;
        bool hl = slab_hit(nodes_[size_t(n.left)].bb, o, inv, t_min,
                           std::min(best.t, kInf), tl);
        bool hr = slab_hit(nodes_[size_t(n.right)].bb, o, inv, t_min,
                           std::min(best.t, kInf), tr);
        if (hl && hr) {
            // near child on top of the stack
            if (tl <= tr) {
                stack[sp++] = {n.right, tr};
                stack[sp++] = {n.left, tl};
            } else {
                stack[sp++] = {n.left, tl};
                stack[sp++] = {n.right, tr};
            }
        } else if (hl) {
            stack[sp++] = {n.left, tl};
        } else if (hr) {
            stack[sp++] = {n.right, tr};
        }
    }
    return finish_hit(*terrain_, o, d, best);
}

bool TerrainAccel::occluded(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                            double t_min) const {
    if (d.squaredNorm() == 0.0)
        throw InvalidParameterError("occluded: direction must be non-zero");
    Eigen::Vector3d inv(1.0 / d.x(), 1.0 / d.y(), 1.0 / d.z());
    int32_t stack[96];
    int sp = 0;
    double tn;
    if (!slab_hit(nodes_[size_t(root_)].bb, o, inv, t_min, kInf, tn)) return false;
    stack[sp++] = root_;
    while (sp > 0) {
        const Node& n = nodes_[size_t(stack[--sp])];
        if (n.left < 0) {
            TriCandidate best;
            for (int r = n.r0; r < n.r1; ++r)
                for (int c = n.c0; c < n.c1; ++c) {
                    test_cell(*terrain_, r, c, o, d, t_min, best);
                    if (std::isfinite(best.t)) return true;
                }
            continue;
        }
        if (slab_hit(nodes_[size_t(n.left)].bb, o, inv, t_min, kInf, tn))
            stack[sp++] = n.left;
        if (slab_hit(nodes_[size_t(n.right)].bb, o, inv, t_min, kInf, tn))
            stack[sp++] = n.right;
    }
    return false;
}

std::optional<RayHit> intersect_brute(const TerrainModel& terrain,
                                      const Eigen::Vector3d& o,
                                      const Eigen::Vector3d& d, double t_min) {
    if (d.squaredNorm() == 0.0)
        throw InvalidParameterError("intersect_brute: direction must be non-zero");
    TriCandidate best;
    for (int r = 0; r < terrain.rows - 1; ++r)
        for (int c = 0; c < terrain.cols - 1; ++c)
            test_cell(terrain, r, c, o, d, t_min, best);
    return finish_hit(terrain, o, d, best);
}

} // namespace mbl
