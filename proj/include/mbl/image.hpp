#pragma once

#include <cstdint>
#include <vector>

namespace mbl {

// Row-major rasters, row 0 at the top (north for nadir renders).
struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    Image8() = default;
    Image8(int w, int h, uint8_t fill = 0) : width(w), height(h), data(size_t(w) * h, fill) {}

    uint8_t& at(int x, int y) { return data[size_t(y) * width + x]; }
    uint8_t at(int x, int y) const { return data[size_t(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool empty() const { return data.empty(); }
};

struct ImageF {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    ImageF() = default;
    ImageF(int w, int h, float fill = 0.f) : width(w), height(h), data(size_t(w) * h, fill) {}

    float& at(int x, int y) { return data[size_t(y) * width + x]; }
    float at(int x, int y) const { return data[size_t(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool empty() const { return data.empty(); }
};

} // namespace mbl
