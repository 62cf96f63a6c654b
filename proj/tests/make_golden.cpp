// Writes the frozen fixtures consumed by the test suites:
//   fixtures/height_hist_seed42.json  height histogram of the seed-42 terrain
//   fixtures/golden_ortho_seed42.{pgm,pfm}  128x128 ortho render, produced
//     by the brute-force (no acceleration structure) render path
// Run manually from tests/; outputs are committed and never regenerated by
// the test runs themselves.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbl/accel.hpp"
#include "mbl/image_io.hpp"
#include "mbl/render.hpp"
#include "mbl/terrain.hpp"

using namespace mbl;

int main() {
    {
        SyntheticTerrainParams sp;
        sp.size_m = 256;
        sp.post_spacing = 1.0;
        sp.tex_pixel_size = 1.0;
        sp.crater_count = 6;
        sp.crater_min_radius = 8.0;
        sp.crater_max_radius = 30.0;
        TerrainModel t = generate_synthetic_terrain(42, sp);
        std::vector<int64_t> hist(128, 0);
        for (float h : t.heights) {
            int bin = int(std::floor((h + 64.0) / 1.0));
            if (bin < 0 || bin >= 128) {
                std::fprintf(stderr, "height %f outside histogram range\n", h);
                return 1;
            }
            ++hist[size_t(bin)];
        }
        nlohmann::ordered_json j;
        j["seed"] = 42;
        j["bin_width_m"] = 1.0;
        j["range_m"] = {-64.0, 64.0};
        j["hist"] = hist;
        std::ofstream out("fixtures/height_hist_seed42.json");
        out << j.dump(2) << "\n";
        std::printf("wrote fixtures/height_hist_seed42.json\n");
    }

    {
        SyntheticTerrainParams sp;
        sp.size_m = 64;
        sp.post_spacing = 1.0;
        sp.tex_pixel_size = 0.5;
        sp.roughness_m = 3.0;
        sp.crater_count = 2;
        sp.crater_min_radius = 6.0;
        sp.crater_max_radius = 14.0;
        TerrainModel t = generate_synthetic_terrain(42, sp);
        Raycaster brute{&t, nullptr};
        OrthoIntrinsics oi = OrthoIntrinsics::centered(64.0, 128, 128);
        SunConfig sun;
        sun.azimuth_deg = 180.0;
        sun.elevation_deg = 40.0;
        sun.shadow_samples = 4;
        RenderSettings rset;
        rset.width = 128;
        rset.height = 128;
        rset.seed = 7;
        RenderedImage img = render_ortho(brute, oi, nadir_pose(0, 0, 4000), sun, rset);
        write_pgm("fixtures/golden_ortho_seed42.pgm", img.gray);
        write_pfm("fixtures/golden_ortho_seed42.pfm", img.depth);
        std::printf("wrote fixtures/golden_ortho_seed42.{pgm,pfm}\n");
    }
    return 0;
}
