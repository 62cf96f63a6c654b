#include "mbl/lighting.hpp"

#include <cmath>

#include "mbl/errors.hpp"
#include "mbl/geometry.hpp"
#include "mbl/rng.hpp"

namespace mbl {

Eigen::Vector3d sun_direction(double azimuth_deg, double elevation_deg) {
    if (elevation_deg < 0.0 || elevation_deg > 90.0)
        throw InvalidParameterError("sun_direction: elevation must be in [0, 90] deg");
    double az = deg2rad(azimuth_deg);
    double el = deg2rad(elevation_deg);
    return Eigen::Vector3d(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                           std::sin(el));
}

double visibility(const Raycaster& caster, const Eigen::Vector3d& point,
                  const Eigen::Vector3d& normal, const SunConfig& sun,
                  uint64_t rng_key) {
    const Eigen::Vector3d s = sun_direction(sun.azimuth_deg, sun.elevation_deg);
    double eps = 1e-3 * caster.model().post_spacing;
    Eigen::Vector3d origin = point + eps * normal;

    if (sun.angular_diameter_deg <= 0.0 || sun.shadow_samples <= 1)
        return caster.occluded(origin, s) ? 0.0 : 1.0;

    // orthonormal frame around the sun direction
    Eigen::Vector3d helper = std::abs(s.z()) < 0.9 ? Eigen::Vector3d::UnitZ()
                                                   : Eigen::Vector3d::UnitX();
    Eigen::Vector3d t1 = s.cross(helper).normalized();
    Eigen::Vector3d t2 = s.cross(t1);

    double cos_alpha = std::cos(deg2rad(0.5 * sun.angular_diameter_deg));
    int n = sun.shadow_samples;
    int sx = int(std::sqrt(double(n)));
    while (sx > 1 && n % sx != 0) --sx;
    int sy = n / sx;

    int clear = 0;
    for (int i = 0; i < n; ++i) {
        double j1 = double(counter_rng(rng_key, uint64_t(2 * i)) >> 11) * 0x1.0p-53;
        double j2 = double(counter_rng(rng_key, uint64_t(2 * i + 1)) >> 11) * 0x1.0p-53;
        double u1 = (double(i % sx) + j1) / sx;
        double u2 = (double(i / sx) + j2) / sy;
        double cos_t = 1.0 - u1 * (1.0 - cos_alpha);
        double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
        double phi = 6.283185307179586 * u2;
        Eigen::Vector3d dir =
            s * cos_t + (t1 * std::cos(phi) + t2 * std::sin(phi)) * sin_t;
        if (!caster.occluded(origin, dir)) ++clear;
    }
    return double(clear) / double(n);
}

double default_exposure(double irradiance) {
    constexpr double kPi = 3.141592653589793;
    double sin40 = std::sin(deg2rad(40.0));
    return 128.0 * kPi / (255.0 * irradiance * 0.5 * sin40);
}

uint8_t shade(double albedo, const Eigen::Vector3d& normal,
              const Eigen::Vector3d& sun_dir, double irradiance, double vis,
              double exposure) {
    constexpr double kPi = 3.141592653589793;
    double ndots = std::max(0.0, normal.dot(sun_dir));
    double radiance = irradiance * albedo * ndots * vis / kPi;
    double v = std::min(1.0, exposure * radiance);
    long g = std::lround(255.0 * v);
    return uint8_t(g < 0 ? 0 : (g > 255 ? 255 : g));
}

} // namespace mbl
