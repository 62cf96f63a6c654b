#include "mbl/geometry.hpp"

#include <cmath>

#include "mbl/errors.hpp"

namespace mbl {

bool Pose::is_rotation(double tol) const {
    Eigen::Matrix3d I = R_WC * R_WC.transpose();
    if ((I - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(R_WC.determinant() - 1.0) <= tol;
}

Eigen::Matrix3d intrinsics_matrix(const PerspectiveIntrinsics& pi) {
    if (pi.focal_mm <= 0 || pi.sensor_width_mm <= 0 || pi.width <= 0 ||
        pi.height <= 0 || pi.pixel_aspect <= 0) {
        throw InvalidParameterError("intrinsics_matrix: optics parameters must be positive");
    }
    Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
    K(0, 0) = pi.fx();
    K(1, 1) = pi.fy();
    K(0, 2) = pi.cx();
    K(1, 2) = pi.cy();
    return K;
}

PixelDepth project_perspective(const Eigen::Matrix3d& K, const Pose& pose,
                               const Eigen::Vector3d& X_W) {
    Eigen::Vector3d X_C = pose.world_to_camera(X_W);
    if (X_C.z() <= 0.0) {
        throw BehindCameraError("project_perspective: point behind camera");
    }
    double inv_z = 1.0 / X_C.z();
    PixelDepth out;
    out.u = K(0, 0) * X_C.x() * inv_z + K(0, 2);
    out.v = K(1, 1) * X_C.y() * inv_z + K(1, 2);
    out.z = X_C.z();
    return out;
}

Eigen::Vector3d backproject_ortho(const OrthoIntrinsics& oi, const Pose& map_pose,
                                  double u, double v, double Z) {
    if (!(Z > 0.0) || !std::isfinite(Z)) {
        throw InvalidDepthError("backproject_ortho: depth must be positive and finite");
    }
    double p = oi.pixel_size();
    Eigen::Vector3d cam(p * (u - oi.cx), p * (v - oi.cy), Z);
    return map_pose.R_WC * cam + map_pose.t_WC;
}

PixelDepth project_ortho(const OrthoIntrinsics& oi, const Pose& map_pose,
                         const Eigen::Vector3d& X_W) {
    Eigen::Vector3d cam = map_pose.R_WC.transpose() * (X_W - map_pose.t_WC);
    double p = oi.pixel_size();
    PixelDepth out;
    out.u = cam.x() / p + oi.cx;
    out.v = cam.y() / p + oi.cy;
    out.z = cam.z();
    return out;
}

Pose nadir_pose(double x, double y, double z_world) {
    Pose pose;
    pose.R_WC << 1, 0, 0,
                 0, -1, 0,
                 0, 0, -1;
    pose.t_WC = Eigen::Vector3d(x, y, z_world);
    return pose;
}

} // namespace mbl
