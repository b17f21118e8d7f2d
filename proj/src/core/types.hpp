#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace tide::core {

// Dense W x H grid of doubles, row-major (index = y * w + x).
struct Map2D {
  int w = 0;
  int h = 0;
  std::vector<double> v;

  Map2D() = default;
  Map2D(int width, int height, double fill = 0.0)
      : w(width), h(height), v(static_cast<size_t>(width) * height, fill) {}

  double& at(int x, int y) { return v[static_cast<size_t>(y) * w + x]; }
  double at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
  size_t size() const { return v.size(); }
};

enum class SaliencyTarget { kClass, kConcept };

// GradCAM output, normalized to [0,1] per map.
struct SaliencyMap {
  Map2D map;
  SaliencyTarget target = SaliencyTarget::kClass;
  int target_id = -1;
};

// Binary ground-truth map for one concept at feature-grid resolution.
struct ConceptMask {
  int w = 0;
  int h = 0;
  std::vector<std::uint8_t> v;  // entries in {0,1}
  int concept_id = -1;

  ConceptMask() = default;
  ConceptMask(int width, int height, int concept_identifier,
              std::uint8_t fill = 0)
      : w(width),
        h(height),
        v(static_cast<size_t>(width) * height, fill),
        concept_id(concept_identifier) {}

  std::uint8_t& at(int x, int y) { return v[static_cast<size_t>(y) * w + x]; }
  std::uint8_t at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
  int count() const {
    int n = 0;
    for (auto b : v) n += b ? 1 : 0;
    return n;
  }
};

// Backbone activations, W x H x C, channel-last (index = (y*w+x)*c + l).
struct FeatureVolume {
  int w = 0;
  int h = 0;
  int c = 0;
  std::vector<double> v;

  FeatureVolume() = default;
  FeatureVolume(int width, int height, int channels, double fill = 0.0)
      : w(width),
        h(height),
        c(channels),
        v(static_cast<size_t>(width) * height * channels, fill) {}

  double& at(int x, int y, int l) {
    return v[(static_cast<size_t>(y) * w + x) * c + l];
  }
  double at(int x, int y, int l) const {
    return v[(static_cast<size_t>(y) * w + x) * c + l];
  }
  const double* cell(int x, int y) const {
    return v.data() + (static_cast<size_t>(y) * w + x) * c;
  }
  double* cell(int x, int y) {
    return v.data() + (static_cast<size_t>(y) * w + x) * c;
  }
};

// Mask- or saliency-pooled feature for one concept on one image (length C).
struct ConceptVector {
  std::vector<double> v;
  int concept_id = -1;
  std::string source_sample_id;
};

// Mean of ConceptVectors over the source samples containing the concept.
struct Signature {
  std::vector<double> v;
  int concept_id = -1;
  int support_count = 0;
};

// RGB image, channel-last (index = (y*w+x)*3 + ch), values in [0,1].
struct Image {
  int w = 0;
  int h = 0;
  std::vector<double> v;

  Image() = default;
  Image(int width, int height, double fill = 0.0)
      : w(width), h(height), v(static_cast<size_t>(width) * height * 3, fill) {}

  double& at(int x, int y, int ch) {
    return v[(static_cast<size_t>(y) * w + x) * 3 + ch];
  }
  double at(int x, int y, int ch) const {
    return v[(static_cast<size_t>(y) * w + x) * 3 + ch];
  }
};

}  // namespace tide::core
