#include "mbl/render.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mbl/errors.hpp"
#include "mbl/image_io.hpp"
#include "mbl/parallel.hpp"
#include "mbl/rng.hpp"

namespace mbl {

namespace {

struct ResolvedShading {
    SunConfig sun;
    Eigen::Vector3d sun_dir;
    double exposure;
};

ResolvedShading resolve(const SunConfig& sun, const RenderSettings& settings) {
    ResolvedShading rs;
    rs.sun = sun;
    if (settings.shadow_samples >= 0) rs.sun.shadow_samples = settings.shadow_samples;
    rs.sun_dir = sun_direction(sun.azimuth_deg, sun.elevation_deg);
    rs.exposure = settings.exposure > 0.0 ? settings.exposure
                                          : default_exposure(sun.irradiance);
    return rs;
}

void shade_pixel(const Raycaster& caster, const ResolvedShading& rs, uint64_t seed,
                 int64_t pixel_index, const std::optional<RayHit>& hit,
                 RenderedImage& out) {
    if (hit) {
        uint64_t key = hash_combine(seed, uint64_t(pixel_index));
        double vis = visibility(caster, hit->point, hit->normal, rs.sun, key);
        out.gray.data[size_t(pixel_index)] = shade(
            hit->albedo, hit->normal, rs.sun_dir, rs.sun.irradiance, vis, rs.exposure);
        out.depth.data[size_t(pixel_index)] = float(hit->t);
        if (!out.depth64.empty()) out.depth64[size_t(pixel_index)] = hit->t;
    } else {
        out.gray.data[size_t(pixel_index)] = 0;
        out.depth.data[size_t(pixel_index)] = kNodataDepth;
        if (!out.depth64.empty()) out.depth64[size_t(pixel_index)] = double(kNodataDepth);
    }
}

} // namespace

RenderedImage render_ortho(const Raycaster& caster, const OrthoIntrinsics& oi,
                           const Pose& pose, const SunConfig& sun,
                           const RenderSettings& settings) {
    if (oi.width <= 0 || oi.height <= 0)
        throw InvalidParameterError("render_ortho: image dimensions must be positive");
    ResolvedShading rs = resolve(sun, settings);
    RenderedImage out;
    out.gray = Image8(oi.width, oi.height);
    out.depth = ImageF(oi.width, oi.height);
    if (settings.keep_double_depth) out.depth64.assign(out.depth.data.size(), 0.0);
    out.camera_kind = "orthographic";
    out.pose = pose;
    out.ortho = oi;
    out.sun = rs.sun;
    out.exposure = rs.exposure;
    out.seed = settings.seed;

    const double p = oi.pixel_size();
    const Eigen::Vector3d axis = pose.R_WC * Eigen::Vector3d::UnitZ();
    parallel_for(0, oi.height, [&](int64_t y0, int64_t y1) {
        for (int64_t v = y0; v < y1; ++v) {
            for (int u = 0; u < oi.width; ++u) {
                Eigen::Vector3d cam(p * (u - oi.cx), p * (double(v) - oi.cy), 0.0);
                Eigen::Vector3d origin = pose.R_WC * cam + pose.t_WC;
                auto hit = caster.intersect(origin, axis);
                shade_pixel(caster, rs, settings.seed, v * oi.width + u, hit, out);
            }
        }
    });
    return out;
}

RenderedImage render_perspective(const Raycaster& caster,
                                 const PerspectiveIntrinsics& pi, const Pose& pose,
                                 const SunConfig& sun, const RenderSettings& settings) {
    Eigen::Matrix3d K = intrinsics_matrix(pi); // validates optics
    ResolvedShading rs = resolve(sun, settings);
    RenderedImage out;
    out.gray = Image8(pi.width, pi.height);
    out.depth = ImageF(pi.width, pi.height);
    if (settings.keep_double_depth) out.depth64.assign(out.depth.data.size(), 0.0);
    out.camera_kind = "perspective";
    out.pose = pose;
    out.persp = pi;
    out.sun = rs.sun;
    out.exposure = rs.exposure;
    out.seed = settings.seed;

    const double fx = K(0, 0), fy = K(1, 1), cx = K(0, 2), cy = K(1, 2);
    const Eigen::Matrix3d R_CW = pose.R_WC.transpose();
    parallel_for(0, pi.height, [&](int64_t y0, int64_t y1) {
        for (int64_t v = y0; v < y1; ++v) {
            for (int u = 0; u < pi.width; ++u) {
                // camera-frame z component of dir is 1, so the ray
                // parameter at the hit equals the depth-buffer value
                Eigen::Vector3d dir_c((u - cx) / fx, (double(v) - cy) / fy, 1.0);
                Eigen::Vector3d dir = R_CW * dir_c;
                auto hit = caster.intersect(pose.t_WC, dir);
                shade_pixel(caster, rs, settings.seed, v * pi.width + u, hit, out);
            }
        }
    });
    return out;
}

Pose place_camera(const Raycaster& caster, double x, double y, double altitude_agl) {
    const TerrainModel& t = caster.model();
    double z0 = t.max_height() + 100.0;
    auto hit = caster.intersect(Eigen::Vector3d(x, y, z0), -Eigen::Vector3d::UnitZ());
    if (!hit)
        throw PlacementError("place_camera: downward ray misses the terrain at (" +
                             std::to_string(x) + ", " + std::to_string(y) + ")");
    return nadir_pose(x, y, hit->point.z() + altitude_agl);
}

namespace {

nlohmann::ordered_json pose_to_json(const Pose& pose) {
    nlohmann::ordered_json j;
    std::vector<double> R(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) R[size_t(3 * r + c)] = pose.R_WC(r, c);
    j["R"] = R;
    j["t"] = {pose.t_WC.x(), pose.t_WC.y(), pose.t_WC.z()};
    return j;
}

Pose pose_from_json(const nlohmann::json& j) {
    Pose pose;
    auto R = j.at("R").get<std::vector<double>>();
    if (R.size() != 9) throw FormatError("pose: R must have 9 entries");
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) pose.R_WC(r, c) = R[size_t(3 * r + c)];
    auto t = j.at("t").get<std::vector<double>>();
    if (t.size() != 3) throw FormatError("pose: t must have 3 entries");
    pose.t_WC = Eigen::Vector3d(t[0], t[1], t[2]);
    return pose;
}

nlohmann::ordered_json sun_to_json(const SunConfig& s) {
    return {{"azimuth_deg", s.azimuth_deg},
            {"elevation_deg", s.elevation_deg},
            {"irradiance", s.irradiance},
            {"angular_diameter_deg", s.angular_diameter_deg},
            {"shadow_samples", s.shadow_samples}};
}

SunConfig sun_from_json(const nlohmann::json& j) {
    SunConfig s;
    s.azimuth_deg = j.at("azimuth_deg").get<double>();
    s.elevation_deg = j.at("elevation_deg").get<double>();
    s.irradiance = j.at("irradiance").get<double>();
    s.angular_diameter_deg = j.at("angular_diameter_deg").get<double>();
    s.shadow_samples = j.at("shadow_samples").get<int>();
    return s;
}

} // namespace

void save_rendered(const RenderedImage& img, const std::string& prefix) {
    write_pgm(prefix + ".pgm", img.gray);
    write_pfm(prefix + ".pfm", img.depth);
    nlohmann::ordered_json j;
    j["camera"]["kind"] = img.camera_kind;
    j["camera"]["pose"] = pose_to_json(img.pose);
    if (img.camera_kind == "orthographic") {
        j["camera"]["ortho"] = {{"scale_m", img.ortho.scale_m},
                                {"width", img.ortho.width},
                                {"height", img.ortho.height},
                                {"cx", img.ortho.cx},
                                {"cy", img.ortho.cy}};
    } else {
        j["camera"]["perspective"] = {{"focal_mm", img.persp.focal_mm},
                                      {"sensor_width_mm", img.persp.sensor_width_mm},
                                      {"width", img.persp.width},
                                      {"height", img.persp.height},
                                      {"shift_x_px", img.persp.shift_x_px},
                                      {"shift_y_px", img.persp.shift_y_px},
                                      {"pixel_aspect", img.persp.pixel_aspect}};
    }
    j["sun"] = sun_to_json(img.sun);
    j["exposure"] = img.exposure;
    j["nodata_depth"] = img.nodata_depth;
    j["seed"] = img.seed;
    std::ofstream out(prefix + ".json");
    if (!out) throw FormatError("cannot write sidecar: " + prefix + ".json");
    out << j.dump(2) << "\n";
}

RenderedImage load_rendered(const std::string& prefix) {
    RenderedImage img;
    img.gray = read_pgm(prefix + ".pgm");
    img.depth = read_pfm(prefix + ".pfm");
    std::ifstream in(prefix + ".json");
    if (!in) throw FormatError("missing sidecar: " + prefix + ".json");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FormatError(std::string("malformed sidecar: ") + e.what());
    }
    img.camera_kind = j.at("camera").at("kind").get<std::string>();
    img.pose = pose_from_json(j.at("camera").at("pose"));
    if (img.camera_kind == "orthographic") {
        const auto& o = j.at("camera").at("ortho");
        img.ortho.scale_m = o.at("scale_m").get<double>();
        img.ortho.width = o.at("width").get<int>();
        img.ortho.height = o.at("height").get<int>();
        img.ortho.cx = o.at("cx").get<double>();
        img.ortho.cy = o.at("cy").get<double>();
    } else if (img.camera_kind == "perspective") {
        const auto& p = j.at("camera").at("perspective");
        img.persp.focal_mm = p.at("focal_mm").get<double>();
        img.persp.sensor_width_mm = p.at("sensor_width_mm").get<double>();
        img.persp.width = p.at("width").get<int>();
        img.persp.height = p.at("height").get<int>();
        img.persp.shift_x_px = p.at("shift_x_px").get<double>();
        img.persp.shift_y_px = p.at("shift_y_px").get<double>();
        img.persp.pixel_aspect = p.at("pixel_aspect").get<double>();
    } else {
        throw FormatError("sidecar: unknown camera kind: " + img.camera_kind);
    }
    img.sun = sun_from_json(j.at("sun"));
    img.exposure = j.at("exposure").get<double>();
    img.nodata_depth = j.at("nodata_depth").get<float>();
    img.seed = j.at("seed").get<uint64_t>();
    if (img.gray.width != img.depth.width || img.gray.height != img.depth.height)
        throw FormatError("gray/depth raster dimensions disagree: " + prefix);
    return img;
}

} // namespace mbl
