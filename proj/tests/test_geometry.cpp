#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mbl/errors.hpp"
#include "mbl/geometry.hpp"
#include "mbl/rng.hpp"
#include "test_util.hpp"

using namespace mbl;

TEST_CASE("intrinsics matrix from paper-style optics") {
    PerspectiveIntrinsics pi; // f=32, s=80, 640x480
    Eigen::Matrix3d K = intrinsics_matrix(pi);
    CHECK(K(0, 0) == doctest::Approx(256.0).epsilon(1e-12));
    CHECK(K(1, 1) == doctest::Approx(256.0).epsilon(1e-12));
    CHECK(K(0, 2) == doctest::Approx(320.0));
    CHECK(K(1, 2) == doctest::Approx(240.0));

    PerspectiveIntrinsics square{36.0, 36.0, 100, 100};
    Eigen::Matrix3d Ks = intrinsics_matrix(square);
    CHECK(Ks(0, 0) == doctest::Approx(100.0));
    CHECK(Ks(0, 2) == doctest::Approx(50.0));
    CHECK(Ks(1, 2) == doctest::Approx(50.0));

    PerspectiveIntrinsics wide{32.0, 80.0, 1280, 960};
    CHECK(intrinsics_matrix(wide)(0, 0) == doctest::Approx(512.0));
}

TEST_CASE("intrinsics matrix rejects non-positive optics") {
    PerspectiveIntrinsics pi;
    pi.focal_mm = 0.0;
    CHECK_THROWS_AS(intrinsics_matrix(pi), InvalidParameterError);
    pi.focal_mm = 32.0;
    pi.width = -640;
    CHECK_THROWS_AS(intrinsics_matrix(pi), InvalidParameterError);
}

TEST_CASE("intrinsics homogeneity: doubling W and H doubles fx, cx, cy") {
    PerspectiveIntrinsics a{32.0, 80.0, 640, 480};
    PerspectiveIntrinsics b{32.0, 80.0, 1280, 960};
    Eigen::Matrix3d Ka = intrinsics_matrix(a), Kb = intrinsics_matrix(b);
    CHECK(Kb(0, 0) == 2.0 * Ka(0, 0));
    CHECK(Kb(1, 1) == 2.0 * Ka(1, 1));
    CHECK(Kb(0, 2) == 2.0 * Ka(0, 2));
    CHECK(Kb(1, 2) == 2.0 * Ka(1, 2));
}

TEST_CASE("perspective projection on the optical axis") {
    PerspectiveIntrinsics pi;
    Eigen::Matrix3d K = intrinsics_matrix(pi);
    Pose pose = nadir_pose(0, 0, 100);
    PixelDepth pd = project_perspective(K, pose, Eigen::Vector3d(0, 0, 0));
    CHECK(pd.u == doctest::Approx(320.0).epsilon(1e-12));
    CHECK(pd.v == doctest::Approx(240.0).epsilon(1e-12));
    CHECK(pd.z == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("perspective projection: 1 m east offset moves u by fx/h") {
    // similar triangles: fx * (1 / 100) = 2.56 px
    PerspectiveIntrinsics pi;
    Eigen::Matrix3d K = intrinsics_matrix(pi);
    Pose pose = nadir_pose(0, 0, 100);
    PixelDepth pd = project_perspective(K, pose, Eigen::Vector3d(1, 0, 0));
    CHECK(pd.u == doctest::Approx(320.0 + 2.56).epsilon(1e-12));
    CHECK(pd.v == doctest::Approx(240.0).epsilon(1e-12));
}

TEST_CASE("perspective projection rejects points behind the camera") {
    PerspectiveIntrinsics pi;
    Eigen::Matrix3d K = intrinsics_matrix(pi);
    Pose pose = nadir_pose(0, 0, 100);
    CHECK_THROWS_AS(project_perspective(K, pose, Eigen::Vector3d(0, 0, 200)),
                    BehindCameraError);
}

TEST_CASE("perspective project / unproject round-trip on random poses") {
    // oracle: X = t + z * R^T K^-1 [u v 1]
    PerspectiveIntrinsics pi;
    Eigen::Matrix3d K = intrinsics_matrix(pi);
    Eigen::Matrix3d Kinv = K.inverse();
    Rng rng(77);
    double worst = 0.0;
    int tested = 0;
    while (tested < 1000) {
        Pose pose;
        pose.R_WC = test::random_rotation(rng);
        pose.t_WC = Eigen::Vector3d(rng.uniform(-100, 100), rng.uniform(-100, 100),
                                    rng.uniform(-100, 100));
        Eigen::Vector3d X(rng.uniform(-200, 200), rng.uniform(-200, 200),
                          rng.uniform(-200, 200));
        Eigen::Vector3d X_C = pose.world_to_camera(X);
        if (X_C.z() < 1.0) continue;
        ++tested;
        PixelDepth pd = project_perspective(K, pose, X);
        Eigen::Vector3d back = pose.t_WC + pd.z * (pose.R_WC.transpose() * (Kinv * Eigen::Vector3d(pd.u, pd.v, 1.0)));
        worst = std::max(worst, (back - X).norm());
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("orthographic back-projection of the principal ray") {
    OrthoIntrinsics oi = OrthoIntrinsics::centered(2000.0, 8000, 8000); // 0.25 m/px
    Pose pose = nadir_pose(0, 0, 4000);
    Eigen::Vector3d X = backproject_ortho(oi, pose, oi.cx, oi.cy, 4000.0);
    CHECK(X.norm() < 1e-9);
}

TEST_CASE("orthographic back-projection offsets follow the nadir axes") {
    OrthoIntrinsics oi = OrthoIntrinsics::centered(2000.0, 8000, 8000);
    REQUIRE(oi.pixel_size() == doctest::Approx(0.25));
    Pose pose = nadir_pose(0, 0, 4000);

    // oracle: forward orthographic projection of the expected world point
    Eigen::Vector3d east(1, 0, 100);
    PixelDepth pd = project_ortho(oi, pose, east);
    CHECK(pd.u == doctest::Approx(oi.cx + 4).epsilon(1e-12));
    CHECK(pd.v == doctest::Approx(oi.cy));
    CHECK(pd.z == doctest::Approx(3900.0));
    Eigen::Vector3d back = backproject_ortho(oi, pose, oi.cx + 4, oi.cy, 3900.0);
    CHECK((back - east).norm() < 1e-9);

    // +v maps to -north under the right-handed nadir frame
    Eigen::Vector3d south(0, -1, 100);
    PixelDepth pd2 = project_ortho(oi, pose, south);
    CHECK(pd2.u == doctest::Approx(oi.cx));
    CHECK(pd2.v == doctest::Approx(oi.cy + 4).epsilon(1e-12));
    Eigen::Vector3d back2 = backproject_ortho(oi, pose, oi.cx, oi.cy + 4, 3900.0);
    CHECK((back2 - south).norm() < 1e-9);
}

TEST_CASE("back-projection rejects non-positive depth") {
    OrthoIntrinsics oi = OrthoIntrinsics::centered(2000.0, 8000, 8000);
    Pose pose = nadir_pose(0, 0, 4000);
    CHECK_THROWS_AS(backproject_ortho(oi, pose, 10, 10, 0.0), InvalidDepthError);
    CHECK_THROWS_AS(backproject_ortho(oi, pose, 10, 10, -5.0), InvalidDepthError);
}

TEST_CASE("ortho projection inverts back-projection on random poses") {
    OrthoIntrinsics oi = OrthoIntrinsics::centered(6737.0, 26949, 57613);
    Rng rng(12345);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        Pose pose;
        pose.R_WC = test::random_rotation(rng);
        pose.t_WC = Eigen::Vector3d(rng.uniform(-3000, 3000), rng.uniform(-3000, 3000),
                                    rng.uniform(100, 5000));
        double u = rng.uniform(0, oi.width);
        double v = rng.uniform(0, oi.height);
        double Z = rng.uniform(0.1, 5000.0);
        Eigen::Vector3d X = backproject_ortho(oi, pose, u, v, Z);
        PixelDepth pd = project_ortho(oi, pose, X);
        worst = std::max({worst, std::abs(pd.u - u) * oi.pixel_size(),
                          std::abs(pd.v - v) * oi.pixel_size(), std::abs(pd.z - Z)});
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("nadir pose axes and handedness") {
    Pose pose = nadir_pose(0, 0, 4000);
    Eigen::Matrix3d expect;
    expect << 1, 0, 0, 0, -1, 0, 0, 0, -1;
    CHECK((pose.R_WC - expect).cwiseAbs().maxCoeff() == 0.0);
    CHECK(pose.R_WC.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pose.is_rotation());

    // moving a ground point north must decrease v
    PerspectiveIntrinsics pi;
    Eigen::Matrix3d K = intrinsics_matrix(pi);
    Pose cam = nadir_pose(0, 0, 100);
    PixelDepth center = project_perspective(K, cam, Eigen::Vector3d(0, 0, 0));
    PixelDepth north = project_perspective(K, cam, Eigen::Vector3d(0, 1, 0));
    CHECK(north.v < center.v);
    CHECK(north.u == doctest::Approx(center.u));
}
