#pragma once

#include <filesystem>

#include "core/types.hpp"

namespace tide::core {

// Lossless 8-bit image files: binary PPM (P6) for RGB, PGM (P5) for masks.
// Images hold values n/255, so a save/load round trip is exact.

void write_ppm(const Image& img, const std::filesystem::path& path);
Image read_ppm(const std::filesystem::path& path);

void write_mask_pgm(const ConceptMask& mask, const std::filesystem::path& path);
ConceptMask read_mask_pgm(const std::filesystem::path& path);

// Snap every channel to the 8-bit lattice (round(v*255)/255).
void quantize_to_8bit(Image& img);

// Nearest-neighbor upsample of a feature-grid map to image resolution.
Map2D upsample_nearest(const Map2D& grid, int out_w, int out_h);

// Grayscale view (luma) of an RGB image.
Map2D to_gray(const Image& img);

}  // namespace tide::core
