#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "mbl/accel.hpp"

namespace mbl {

// Sun light source. Azimuth is measured counter-clockwise from +X (east,
// the right edge of a nadir image); elevation above the horizon. Angles in
// degrees.
struct SunConfig {
    double azimuth_deg = 180.0;
    double elevation_deg = 40.0;
    double irradiance = 590.0;          // W/m^2
    double angular_diameter_deg = 0.35; // 0 = hard shadows
    int shadow_samples = 16;
};

// Unit vector toward the sun: (cosEL cosAZ, cosEL sinAZ, sinEL).
// Throws InvalidParameterError for elevation outside [0, 90].
Eigen::Vector3d sun_direction(double azimuth_deg, double elevation_deg);

// Fraction of stratified sample rays toward the sun disk (uniform over its
// solid angle) that escape without hitting terrain. The shading point is
// offset by 1e-3 * post_spacing along the surface normal before casting.
// Draws are keyed by (rng_key, sample index), so results are independent
// of evaluation order. Diameter 0 casts a single hard ray and returns
// exactly 0 or 1.
double visibility(const Raycaster& caster, const Eigen::Vector3d& point,
                  const Eigen::Vector3d& normal, const SunConfig& sun,
                  uint64_t rng_key);

// Exposure that maps albedo 0.5 at EL=40, full visibility to gray 128.
double default_exposure(double irradiance);

// Lambertian shading to an 8-bit gray value:
//   L = E * albedo * max(0, n.s) * visibility / pi
//   pixel = clamp(round(255 * min(1, exposure * L)), 0, 255)
uint8_t shade(double albedo, const Eigen::Vector3d& normal,
              const Eigen::Vector3d& sun_dir, double irradiance, double vis,
              double exposure);

} // namespace mbl
