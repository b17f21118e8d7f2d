#pragma once

#include <random>
#include <vector>

#include "core/image.hpp"
#include "core/types.hpp"
#include "synthbench/spec.hpp"

namespace tide::synthbench {

// A concept instance placed on a concrete canvas: jittered center (pixels),
// jittered area (pixels^2), and its rasterized occupancy grid.
struct PlacedConcept {
  int concept_id = -1;
  double cx = 0.0;
  double cy = 0.0;
  double area_px = 0.0;
  std::vector<std::uint8_t> occupancy;  // image_size * image_size
};

// Pixel-center rasterization of one primitive.
std::vector<std::uint8_t> rasterize(Primitive shape, double cx, double cy,
                                    double area_px, int image_size);

// Conservative half-extent of a primitive, in pixels.
double bounding_radius(Primitive shape, double area_px);

// Occupancy >= 0.5 per feature-grid cell.
core::ConceptMask downsample_mask(const std::vector<std::uint8_t>& occupancy,
                                  int image_size, int grid, int concept_id);

// Renders one sample under a domain style. Consumes `rng` in a fixed order,
// so equal seeds give byte-identical images.
core::Image render_sample(const BenchmarkConfig& cfg, const ClassSpec& cls,
                          const DomainStyle& style,
                          const std::vector<PlacedConcept>& placed,
                          std::mt19937_64& rng);

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b);
void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v);

}  // namespace tide::synthbench
