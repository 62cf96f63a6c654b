#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mbl/errors.hpp"
#include "mbl/image_io.hpp"
#include "mbl/parallel.hpp"
#include "mbl/render.hpp"
#include "test_util.hpp"

using namespace mbl;

namespace {

TerrainModel flat_terrain(int n, double spacing, float z) {
    TerrainModel t;
    t.rows = t.cols = n;
    t.post_spacing = spacing;
    t.heights.assign(size_t(n) * n, z);
    return t;
}

TerrainModel fixture_terrain(uint64_t seed) {
    SyntheticTerrainParams sp;
    sp.size_m = 64;
    sp.post_spacing = 1.0;
    sp.tex_pixel_size = 0.5;
    sp.roughness_m = 3.0;
    sp.crater_count = 2;
    sp.crater_min_radius = 6.0;
    sp.crater_max_radius = 14.0;
    return generate_synthetic_terrain(seed, sp);
}

SunConfig fixture_sun() {
    SunConfig sun;
    sun.azimuth_deg = 180.0;
    sun.elevation_deg = 40.0;
    sun.shadow_samples = 4;
    return sun;
}

} // namespace

TEST_CASE("ortho render of flat terrain has constant depth 4000") {
    TerrainModel t = flat_terrain(65, 1.0, 0.f);
    TerrainAccel accel(t);
    Raycaster caster{&t, &accel};
    OrthoIntrinsics oi = OrthoIntrinsics::centered(60.0, 60, 60);
    RenderSettings rset;
    RenderedImage img = render_ortho(caster, oi, nadir_pose(0, 0, 4000), fixture_sun(), rset);
    for (float d : img.depth.data) CHECK(d == 4000.f);
}

TEST_CASE("ortho ground footprint arithmetic: 1 m equals 4 px at 0.25 m/px") {
    OrthoIntrinsics oi = OrthoIntrinsics::centered(2000.0, 8000, 8000);
    Pose pose = nadir_pose(0, 0, 4000);
    PixelDepth a = project_ortho(oi, pose, Eigen::Vector3d(3.0, 5.0, 0.0));
    PixelDepth b = project_ortho(oi, pose, Eigen::Vector3d(4.0, 5.0, 0.0));
    CHECK(std::abs(b.u - a.u) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("accelerated ortho render matches the frozen brute-force golden") {
    TerrainModel t = fixture_terrain(42);
    TerrainAccel accel(t);
    Raycaster caster{&t, &accel};
    OrthoIntrinsics oi = OrthoIntrinsics::centered(64.0, 128, 128);
    RenderSettings rset;
    rset.width = rset.height = 128;
    rset.seed = 7;
    RenderedImage img = render_ortho(caster, oi, nadir_pose(0, 0, 4000), fixture_sun(), rset);
    Image8 gray = read_pgm("fixtures/golden_ortho_seed42.pgm");
    ImageF depth = read_pfm("fixtures/golden_ortho_seed42.pfm");
    REQUIRE(gray.width == img.gray.width);
    REQUIRE(gray.height == img.gray.height);
    CHECK(img.gray.data == gray.data);
    CHECK(img.depth.data == depth.data);
}

TEST_CASE("brute-force and accelerated renders are identical") {
    TerrainModel t = fixture_terrain(3);
    TerrainAccel accel(t);
    Raycaster fast{&t, &accel};
    Raycaster brute{&t, nullptr};
    RenderSettings rset;
    rset.seed = 21;
    rset.keep_double_depth = true;

    OrthoIntrinsics oi = OrthoIntrinsics::centered(64.0, 64, 64);
    Pose mp = nadir_pose(0, 0, 4000);
    RenderedImage a = render_ortho(fast, oi, mp, fixture_sun(), rset);
    RenderedImage b = render_ortho(brute, oi, mp, fixture_sun(), rset);
    CHECK(a.gray.data == b.gray.data);
    double dmax = 0;
    for (size_t i = 0; i < a.depth64.size(); ++i)
        dmax = std::max(dmax, std::abs(a.depth64[i] - b.depth64[i]));
    CHECK(dmax < 1e-9);

    PerspectiveIntrinsics pi;
    pi.width = 64;
    pi.height = 48;
    Pose qp = place_camera(fast, 2.0, -3.0, 80.0);
    RenderedImage c = render_perspective(fast, pi, qp, fixture_sun(), rset);
    RenderedImage d = render_perspective(brute, pi, qp, fixture_sun(), rset);
    CHECK(c.gray.data == d.gray.data);
    for (size_t i = 0; i < c.depth64.size(); ++i)
        dmax = std::max(dmax, std::abs(c.depth64[i] - d.depth64[i]));
    CHECK(dmax < 1e-9);
}

TEST_CASE("nadir perspective depth over flat terrain is the altitude everywhere") {
    TerrainModel t = flat_terrain(257, 1.0, 0.f);
    TerrainAccel accel(t);
    Raycaster caster{&t, &accel};
    PerspectiveIntrinsics pi;
    pi.width = 160;
    pi.height = 120;
    RenderSettings rset;
    rset.keep_double_depth = true;
    RenderedImage img =
        render_perspective(caster, pi, nadir_pose(0, 0, 100), fixture_sun(), rset);
    double worst = 0;
    for (double d : img.depth64) worst = std::max(worst, std::abs(d - 100.0));
    CHECK(worst < 1e-6);
}

TEST_CASE("ortho and perspective agree on the center pixel gray over flat terrain") {
    TerrainModel t = fixture_terrain(8);
    for (auto& h : t.heights) h = 0.f; // flat, keep the albedo texture
    TerrainAccel accel(t);
    Raycaster caster{&t, &accel};

    OrthoIntrinsics oi = OrthoIntrinsics::centered(32.0, 128, 128); // 0.25 m/px
    RenderSettings rset;
    rset.seed = 2;
    SunConfig sun = fixture_sun();
    RenderedImage ortho = render_ortho(caster, oi, nadir_pose(0, 0, 4000), sun, rset);

    PerspectiveIntrinsics pi;
    RenderedImage persp =
        render_perspective(caster, pi, nadir_pose(1.0, -2.0, 64.0), sun, rset);

    // ground point (1, -2) lands on ortho pixel (cx + 4, cy + 8)
    int gu = int(oi.cx) + 4, gv = int(oi.cy) + 8;
    int pu = int(pi.cx()), pv = int(pi.cy());
    CHECK(std::abs(int(ortho.gray.at(gu, gv)) - int(persp.gray.at(pu, pv))) <= 1);
}

TEST_CASE("perspective GSD endpoints match the camera table") {
    PerspectiveIntrinsics pi;
    CHECK(pi.gsd(64.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(pi.gsd(200.0) == doctest::Approx(0.78125).epsilon(1e-12));
}

TEST_CASE("place_camera on flat, ramp, and synthetic terrain") {
    TerrainModel flat = flat_terrain(65, 1.0, 0.f);
    TerrainAccel fa(flat);
    Raycaster fc{&flat, &fa};
    Pose p = place_camera(fc, 3.0, -4.0, 100.0);
    CHECK(p.t_WC.x() == doctest::Approx(3.0));
    CHECK(p.t_WC.y() == doctest::Approx(-4.0));
    CHECK(p.t_WC.z() == doctest::Approx(100.0).epsilon(1e-9));

    TerrainModel ramp = flat_terrain(65, 1.0, 0.f);
    for (int r = 0; r < ramp.rows; ++r)
        for (int c = 0; c < ramp.cols; ++c)
            ramp.heights[size_t(r) * ramp.cols + c] = float(ramp.post_x(c));
    TerrainAccel ra(ramp);
    Raycaster rc{&ramp, &ra};
    Pose pr = place_camera(rc, 10.0, 1.0, 64.0);
    CHECK(pr.t_WC.z() == doctest::Approx(74.0).epsilon(1e-9));

    // center-pixel depth equals the AGL altitude by construction
    TerrainModel fbm = fixture_terrain(5);
    TerrainAccel ba(fbm);
    Raycaster bc{&fbm, &ba};
    PerspectiveIntrinsics pi;
    pi.width = 64;
    pi.height = 48;
    RenderSettings rset;
    rset.keep_double_depth = true;
    Pose pq = place_camera(bc, 1.0, 2.0, 80.0);
    RenderedImage img = render_perspective(bc, pi, pq, fixture_sun(), rset);
    double center = img.depth64[size_t(pi.height / 2) * pi.width + pi.width / 2];
    CHECK(std::abs(center - 80.0) < 1.0);
}

TEST_CASE("place_camera errors on misses") {
    TerrainModel t = flat_terrain(17, 1.0, 0.f);
    t.heights.assign(t.heights.size(), t.nodata); // all holes
    TerrainAccel a(t);
    Raycaster c{&t, &a};
    CHECK_THROWS_AS(place_camera(c, 0.0, 0.0, 50.0), PlacementError);

    TerrainModel t2 = flat_terrain(17, 1.0, 0.f);
    TerrainAccel a2(t2);
    Raycaster c2{&t2, &a2};
    CHECK_THROWS_AS(place_camera(c2, 500.0, 0.0, 50.0), PlacementError);
}

TEST_CASE("rendering is deterministic across thread counts") {
    TerrainModel t = fixture_terrain(12);
    TerrainAccel accel(t);
    Raycaster caster{&t, &accel};
    OrthoIntrinsics oi = OrthoIntrinsics::centered(64.0, 96, 96);
    RenderSettings rset;
    rset.seed = 9;
    set_worker_threads(1);
    RenderedImage one = render_ortho(caster, oi, nadir_pose(0, 0, 4000), fixture_sun(), rset);
    set_worker_threads(4);
    RenderedImage four = render_ortho(caster, oi, nadir_pose(0, 0, 4000), fixture_sun(), rset);
    set_worker_threads(0);
    CHECK(one.gray.data == four.gray.data);
    CHECK(one.depth.data == four.depth.data);
}

TEST_CASE("rendered image save/load round-trip") {
    auto dir = test::scratch_dir("render_io");
    TerrainModel t = fixture_terrain(4);
    TerrainAccel accel(t);
    Raycaster caster{&t, &accel};
    PerspectiveIntrinsics pi;
    pi.width = 32;
    pi.height = 24;
    RenderSettings rset;
    rset.seed = 11;
    Pose pose = place_camera(caster, 0.0, 0.0, 70.0);
    RenderedImage img = render_perspective(caster, pi, pose, fixture_sun(), rset);
    std::string prefix = (dir / "query0").string();
    save_rendered(img, prefix);
    RenderedImage re = load_rendered(prefix);
    CHECK(re.gray.data == img.gray.data);
    CHECK(re.depth.data == img.depth.data);
    CHECK(re.camera_kind == "perspective");
    CHECK((re.pose.R_WC - img.pose.R_WC).cwiseAbs().maxCoeff() == 0.0);
    CHECK((re.pose.t_WC - img.pose.t_WC).norm() == 0.0);
    CHECK(re.sun.elevation_deg == img.sun.elevation_deg);
    CHECK(re.persp.width == pi.width);
    CHECK(re.exposure == img.exposure);
}
