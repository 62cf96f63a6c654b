#pragma once

#include <Eigen/Dense>

namespace mbl {

// World frame is East-North-Up with origin at the terrain map center:
// +X = East, +Y = North, +Z = Up, right-handed. All lengths in meters,
// all angles in degrees at API boundaries.

inline double deg2rad(double deg) { return deg * 0.017453292519943295; }
inline double rad2deg(double rad) { return rad * 57.29577951308232; }

// Camera pose. R_WC aligns the world frame to the camera frame:
// X_C = R_WC * (X_W - t_WC). The camera X axis runs rightward along the
// image width and Z points toward the terrain. For the nadir attitude
// used throughout (X=East, Y=-North, Z=-Up) R_WC equals its own inverse,
// which is what makes the orthographic back-projection below use R_WC
// directly on camera-frame offsets.
struct Pose {
    Eigen::Matrix3d R_WC = Eigen::Matrix3d::Identity();
    Eigen::Vector3d t_WC = Eigen::Vector3d::Zero();

    Eigen::Vector3d world_to_camera(const Eigen::Vector3d& X_W) const {
        return R_WC * (X_W - t_WC);
    }

    // Checks orthonormality and det = +1 to `tol`.
    bool is_rotation(double tol = 1e-9) const;
};

// Pinhole optics. Pixel (u, v) addresses the pixel center; fx = f*W/s.
struct PerspectiveIntrinsics {
    double focal_mm = 32.0;
    double sensor_width_mm = 80.0;
    int width = 640;
    int height = 480;
    double shift_x_px = 0.0;
    double shift_y_px = 0.0;
    double pixel_aspect = 1.0;

    double fx() const { return focal_mm * width / sensor_width_mm; }
    double fy() const { return fx() / pixel_aspect; }
    double cx() const { return 0.5 * width + shift_x_px; }
    double cy() const { return 0.5 * height + shift_y_px; }

    // Ground sample distance of a nadir view at height h above terrain.
    double gsd(double h) const { return h * sensor_width_mm / (focal_mm * width); }
};

// Orthographic camera covering `scale_m` meters of ground across `width`
// pixels; p_map = scale_m / width.
struct OrthoIntrinsics {
    double scale_m = 6737.0;
    int width = 0;
    int height = 0;
    double cx = 0.0;
    double cy = 0.0;

    double pixel_size() const { return scale_m / width; }

    static OrthoIntrinsics centered(double scale_m, int width, int height) {
        return OrthoIntrinsics{scale_m, width, height, 0.5 * width, 0.5 * height};
    }
};

struct PixelDepth {
    double u = 0.0;
    double v = 0.0;
    double z = 0.0; // depth along the camera viewing direction [m]
};

// K = [fx 0 cx; 0 fy cy; 0 0 1]. Throws InvalidParameterError on
// non-positive optics parameters.
Eigen::Matrix3d intrinsics_matrix(const PerspectiveIntrinsics& pi);

// Pinhole projection; depth is the camera-frame z of the point. Throws
// BehindCameraError when the point has non-positive camera-frame z.
PixelDepth project_perspective(const Eigen::Matrix3d& K, const Pose& pose,
                               const Eigen::Vector3d& X_W);

// Inverse orthographic projection of a map pixel with depth Z:
//   X_W = p_map * R_WC * [u - cx, v - cy, Z / p_map]^T + t_WC.
// Throws InvalidDepthError for Z <= 0 or non-finite Z.
Eigen::Vector3d backproject_ortho(const OrthoIntrinsics& oi, const Pose& map_pose,
                                  double u, double v, double Z);

// Forward orthographic projection, the exact algebraic inverse of
// backproject_ortho (camera offsets recovered with R_WC^T; identical to
// the world_to_camera convention whenever R_WC is nadir).
PixelDepth project_ortho(const OrthoIntrinsics& oi, const Pose& map_pose,
                         const Eigen::Vector3d& X_W);

// Canonical nadir attitude at world position (x, y, z_world): camera
// X=+East, Y=-North, Z=-Up, so image rows advance southward.
Pose nadir_pose(double x, double y, double z_world);

} // namespace mbl
