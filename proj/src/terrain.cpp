#include "mbl/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "mbl/errors.hpp"
#include "mbl/image_io.hpp"
#include "mbl/parallel.hpp"
#include "mbl/rng.hpp"

namespace mbl {

bool TerrainModel::post_is_nodata(int r, int c) const {
    float h = post(r, c);
    return !std::isfinite(h) || h == nodata;
}

double TerrainModel::height_at(double x, double y) const {
    if (!in_extent(x, y))
        throw OutOfBoundsError("height_at: point outside terrain extent");
    double gc = grid_col(x);
    double gr = grid_row(y);
    int c0 = std::clamp(int(std::floor(gc)), 0, cols - 2);
    int r0 = std::clamp(int(std::floor(gr)), 0, rows - 2);
    double fx = gc - c0;
    double fy = gr - r0;
    if (post_is_nodata(r0, c0) || post_is_nodata(r0, c0 + 1) ||
        post_is_nodata(r0 + 1, c0) || post_is_nodata(r0 + 1, c0 + 1))
        throw NodataError("height_at: nodata post in interpolation cell");
    double h00 = post(r0, c0);
    double h01 = post(r0, c0 + 1);
    double h10 = post(r0 + 1, c0);
    double h11 = post(r0 + 1, c0 + 1);
    return h00 * (1 - fx) * (1 - fy) + h01 * fx * (1 - fy) + h10 * (1 - fx) * fy +
           h11 * fx * fy;
}

Eigen::Vector3d TerrainModel::normal_at(double x, double y) const {
    if (!in_extent(x, y))
        throw OutOfBoundsError("normal_at: point outside terrain extent");
    double d = 0.5 * post_spacing;
    double x1 = std::max(x - d, min_x());
    double x2 = std::min(x + d, max_x());
    double y1 = std::max(y - d, min_y());
    double y2 = std::min(y + d, max_y());
    double dzdx = (height_at(x2, y) - height_at(x1, y)) / (x2 - x1);
    double dzdy = (height_at(x, y2) - height_at(x, y1)) / (y2 - y1);
    return Eigen::Vector3d(-dzdx, -dzdy, 1.0).normalized();
}

double TerrainModel::albedo_at(double x, double y) const {
    if (albedo.empty()) return 0.5;
    double px = tex_pixel_size;
    double gc = x / px + 0.5 * (tex_cols - 1);
    double gr = 0.5 * (tex_rows - 1) - y / px;
    gc = std::clamp(gc, 0.0, double(tex_cols - 1));
    gr = std::clamp(gr, 0.0, double(tex_rows - 1));
    int c0 = std::min(int(gc), tex_cols - 2 >= 0 ? tex_cols - 2 : 0);
    int r0 = std::min(int(gr), tex_rows - 2 >= 0 ? tex_rows - 2 : 0);
    int c1 = std::min(c0 + 1, tex_cols - 1);
    int r1 = std::min(r0 + 1, tex_rows - 1);
    double fx = gc - c0;
    double fy = gr - r0;
    double a00 = albedo[size_t(r0) * tex_cols + c0];
    double a01 = albedo[size_t(r0) * tex_cols + c1];
    double a10 = albedo[size_t(r1) * tex_cols + c0];
    double a11 = albedo[size_t(r1) * tex_cols + c1];
    return a00 * (1 - fx) * (1 - fy) + a01 * fx * (1 - fy) + a10 * (1 - fx) * fy +
           a11 * fx * fy;
}

double TerrainModel::min_height() const {
    double m = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (!post_is_nodata(r, c)) m = std::min(m, double(post(r, c)));
    return m;
}

double TerrainModel::max_height() const {
    double m = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (!post_is_nodata(r, c)) m = std::max(m, double(post(r, c)));
    return m;
}

TerrainModel load_terrain(const std::string& dtm_path, const std::string& texture_path) {
    std::ifstream hdr(dtm_path + ".json");
    if (!hdr) throw FormatError("missing DTM sidecar: " + dtm_path + ".json");
    nlohmann::json j;
    try {
        hdr >> j;
    } catch (const std::exception& e) {
        throw FormatError(std::string("malformed DTM sidecar: ") + e.what());
    }
    TerrainModel t;
    try {
        t.rows = j.at("rows").get<int>();
        t.cols = j.at("cols").get<int>();
        t.post_spacing = j.at("post_spacing_m").get<double>();
        t.nodata = j.at("nodata").get<float>();
        if (j.at("origin").get<std::string>() != "center")
            throw FormatError("DTM sidecar: only origin:\"center\" is supported");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("DTM sidecar missing field: ") + e.what());
    }
    if (t.rows < 2 || t.cols < 2 || t.post_spacing <= 0)
        throw FormatError("DTM sidecar: rows/cols must be >= 2 and spacing positive");

    std::ifstream raw(dtm_path, std::ios::binary);
    if (!raw) throw FormatError("cannot open DTM payload: " + dtm_path);
    raw.seekg(0, std::ios::end);
    auto bytes = raw.tellg();
    raw.seekg(0);
    size_t expect = size_t(t.rows) * t.cols * sizeof(float);
    if (size_t(bytes) != expect)
        throw FormatError("DTM payload size mismatch: header says " +
                          std::to_string(expect) + " bytes, file has " +
                          std::to_string(size_t(bytes)));
    t.heights.resize(size_t(t.rows) * t.cols);
    raw.read(reinterpret_cast<char*>(t.heights.data()), std::streamsize(expect));
    if (raw.gcount() != std::streamsize(expect))
        throw FormatError("short read on DTM payload: " + dtm_path);

    if (!texture_path.empty()) {
        std::ifstream thdr(texture_path + ".json");
        if (!thdr) throw FormatError("missing texture sidecar: " + texture_path + ".json");
        nlohmann::json tj;
        try {
            thdr >> tj;
        } catch (const std::exception& e) {
            throw FormatError(std::string("malformed texture sidecar: ") + e.what());
        }
        Image8 tex = read_pgm(texture_path);
        try {
            t.tex_rows = tj.at("rows").get<int>();
            t.tex_cols = tj.at("cols").get<int>();
            t.tex_pixel_size = tj.at("pixel_size_m").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("texture sidecar missing field: ") + e.what());
        }
        if (t.tex_rows != tex.height || t.tex_cols != tex.width)
            throw FormatError("texture sidecar dimensions disagree with PGM payload");
        double ex = (t.tex_cols - 1) * t.tex_pixel_size;
        double ey = (t.tex_rows - 1) * t.tex_pixel_size;
        if (std::abs(ex - t.extent_x()) > 0.5 * t.post_spacing ||
            std::abs(ey - t.extent_y()) > 0.5 * t.post_spacing)
            throw FormatError("texture extent mismatches DTM extent beyond 0.5 post");
        t.albedo.resize(tex.data.size());
        for (size_t i = 0; i < tex.data.size(); ++i) t.albedo[i] = tex.data[i] / 255.f;
    }
    return t;
}

void save_terrain(const TerrainModel& terrain, const std::string& dtm_path,
                  const std::string& texture_path) {
    nlohmann::ordered_json j;
    j["rows"] = terrain.rows;
    j["cols"] = terrain.cols;
    j["post_spacing_m"] = terrain.post_spacing;
    j["nodata"] = terrain.nodata;
    j["origin"] = "center";
    std::ofstream hdr(dtm_path + ".json");
    if (!hdr) throw FormatError("cannot write DTM sidecar: " + dtm_path + ".json");
    hdr << j.dump(2) << "\n";

    std::ofstream raw(dtm_path, std::ios::binary);
    if (!raw) throw FormatError("cannot write DTM payload: " + dtm_path);
    raw.write(reinterpret_cast<const char*>(terrain.heights.data()),
              std::streamsize(terrain.heights.size() * sizeof(float)));
    if (!raw) throw FormatError("short write on DTM payload: " + dtm_path);

    if (!texture_path.empty() && !terrain.albedo.empty()) {
        Image8 tex(terrain.tex_cols, terrain.tex_rows);
        for (size_t i = 0; i < terrain.albedo.size(); ++i) {
            double v = std::clamp(double(terrain.albedo[i]), 0.0, 1.0);
            tex.data[i] = uint8_t(std::lround(v * 255.0));
        }
        write_pgm(texture_path, tex);
        nlohmann::ordered_json tj;
        tj["rows"] = terrain.tex_rows;
        tj["cols"] = terrain.tex_cols;
        tj["pixel_size_m"] = terrain.tex_pixel_size;
        tj["origin"] = "center";
        std::ofstream thdr(texture_path + ".json");
        if (!thdr) throw FormatError("cannot write texture sidecar: " + texture_path + ".json");
        thdr << tj.dump(2) << "\n";
    }
}

namespace {

// Lattice value noise in [-1, 1], bit-deterministic via integer hashing.
double lattice_value(uint64_t seed, int octave, int64_t ix, int64_t iy) {
    uint64_t h = hash_combine(seed, hash_combine(uint64_t(octave) + 1,
                                                 hash_combine(uint64_t(ix), uint64_t(iy))));
    return double(h >> 11) * 0x1.0p-52 - 1.0;
}

double smooth5(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double value_noise(uint64_t seed, int octave, double x, double y) {
    double fx = std::floor(x), fy = std::floor(y);
    int64_t ix = int64_t(fx), iy = int64_t(fy);
    double tx = smooth5(x - fx);
    double ty = smooth5(y - fy);
    double v00 = lattice_value(seed, octave, ix, iy);
    double v01 = lattice_value(seed, octave, ix + 1, iy);
    double v10 = lattice_value(seed, octave, ix, iy + 1);
    double v11 = lattice_value(seed, octave, ix + 1, iy + 1);
    return v00 * (1 - tx) * (1 - ty) + v01 * tx * (1 - ty) + v10 * (1 - tx) * ty +
           v11 * tx * ty;
}

double fbm(uint64_t seed, double x, double y, double base_wavelength, int octaves,
           double gain) {
    double sum = 0.0;
    double amp = 1.0;
    double freq = 1.0 / base_wavelength;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(seed, o, x * freq, y * freq);
        amp *= gain;
        freq *= 2.0;
    }
    return sum;
}

struct Crater {
    double x, y, radius, depth;
};

} // namespace

TerrainModel generate_synthetic_terrain(uint64_t seed, const SyntheticTerrainParams& p) {
    if (p.size_m <= 0 || p.post_spacing <= 0)
        throw InvalidParameterError("generate_synthetic_terrain: size and spacing must be positive");
    TerrainModel t;
    t.post_spacing = p.post_spacing;
    t.cols = int(std::lround(p.size_m / p.post_spacing)) + 1;
    t.rows = t.cols;
    t.heights.assign(size_t(t.rows) * t.cols, 0.f);

    Rng crater_rng = Rng(seed).fork(0xc7a7e7);
    std::vector<Crater> craters;
    craters.reserve(size_t(std::max(p.crater_count, 0)));
    for (int i = 0; i < p.crater_count; ++i) {
        Crater c;
        c.x = crater_rng.uniform(t.min_x(), t.max_x());
        c.y = crater_rng.uniform(t.min_y(), t.max_y());
        c.radius = crater_rng.uniform(p.crater_min_radius, p.crater_max_radius);
        c.depth = p.crater_depth_ratio * c.radius;
        craters.push_back(c);
    }

    double base_wavelength = std::max(p.size_m / 4.0, 4.0 * p.post_spacing);
    uint64_t hseed = hash_combine(seed, 0x7e44a1);
    parallel_for(0, t.rows, [&](int64_t r0, int64_t r1) {
        for (int64_t r = r0; r < r1; ++r) {
            double y = t.post_y(int(r));
            for (int c = 0; c < t.cols; ++c) {
                double x = t.post_x(c);
                double h = 0.0;
                if (p.roughness_m > 0.0)
                    h = p.roughness_m * fbm(hseed, x, y, base_wavelength, p.octaves, p.gain);
                for (const Crater& cr : craters) {
                    double dx = x - cr.x, dy = y - cr.y;
                    double r2 = dx * dx + dy * dy;
                    double R2 = cr.radius * cr.radius;
                    if (r2 < R2) h -= cr.depth * (1.0 - r2 / R2);
                }
                t.heights[size_t(r) * t.cols + c] = float(h);
            }
        }
    });

    // Height-correlated albedo with fine detail, snapped to the 8-bit grid.
    t.tex_pixel_size = p.tex_pixel_size;
    t.tex_cols = int(std::lround(t.extent_x() / p.tex_pixel_size)) + 1;
    t.tex_rows = int(std::lround(t.extent_y() / p.tex_pixel_size)) + 1;
    t.albedo.assign(size_t(t.tex_rows) * t.tex_cols, 0.5f);
    double hmin = t.min_height(), hmax = t.max_height();
    double hspan = (hmax > hmin) ? (hmax - hmin) : 1.0;
    uint64_t aseed = hash_combine(seed, 0xa1bed0);
    parallel_for(0, t.tex_rows, [&](int64_t r0, int64_t r1) {
        for (int64_t r = r0; r < r1; ++r) {
            double y = std::clamp((0.5 * (t.tex_rows - 1) - double(r)) * p.tex_pixel_size,
                                  t.min_y(), t.max_y());
            for (int c = 0; c < t.tex_cols; ++c) {
                double x = std::clamp((c - 0.5 * (t.tex_cols - 1)) * p.tex_pixel_size,
                                      t.min_x(), t.max_x());
                double hn = 0.0;
                try {
                    hn = 2.0 * (t.height_at(x, y) - hmin) / hspan - 1.0;
                } catch (const NodataError&) {
                    hn = 0.0;
                }
                double fine = fbm(aseed, x, y, 8.0 * p.tex_pixel_size, 4, 0.55);
                double grain = value_noise(aseed ^ 0x5eedULL, 31,
                                           x / p.tex_pixel_size * 0.5,
                                           y / p.tex_pixel_size * 0.5);
                double a = 0.5 + 0.18 * hn + 0.16 * fine + 0.06 * grain;
                a = std::clamp(a, 0.1, 0.9);
                t.albedo[size_t(r) * t.tex_cols + c] =
                    float(std::lround(a * 255.0) / 255.0);
            }
        }
    });
    return t;
}

} // namespace mbl
