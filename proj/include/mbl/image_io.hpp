#pragma once

#include <string>

#include "mbl/image.hpp"

namespace mbl {

// Binary PGM, P5 maxval 255.
void write_pgm(const std::string& path, const Image8& img);
Image8 read_pgm(const std::string& path);

// Grayscale PFM ("Pf", scale -1.0 = little-endian). PFM stores rows
// bottom-up; the in-memory rasters are top-down and the flip happens here.
void write_pfm(const std::string& path, const ImageF& img);
ImageF read_pfm(const std::string& path);

} // namespace mbl
