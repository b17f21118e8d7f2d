#pragma once

#include <random>
#include <span>

#include "synthbench/manifest.hpp"

namespace tide::synthbench {

enum class AugmentKind { kQuantize, kBlur, kEdge };

const char* augment_kind_name(AugmentKind k);

// Uniform color quantization to n levels per channel. n = 256 is the
// identity on 8-bit images.
core::Image quantize_colors(const core::Image& img, int levels);

// Separable Gaussian blur; sigma = 0 is the identity.
core::Image gaussian_blur(const core::Image& img, double sigma);

// Binary edge map from Sobel gradient magnitude, replicated across the
// three channels.
core::Image edge_map(const core::Image& img, double threshold = 0.25);

struct Triplet {
  core::Image positive;       // augmented anchor; masks are the anchor's
  AugmentKind augment;
  const Sample* negative = nullptr;
  int anchor_concept = -1;    // k
  int negative_concept = -1;  // k', not among the anchor's concepts
};

// Builds (anchor, positive, negative): the positive is the anchor under one
// randomly chosen augmentation (geometry and masks unchanged); the negative
// is a pool sample owning a concept the anchor lacks. anchor_concepts
// restricts which k may be drawn (defaults to all of the anchor's labels).
// Throws TripletExhausted when no pool sample has a differing concept.
Triplet augment_triplet(const Sample& anchor,
                        std::span<const Sample* const> pool,
                        std::mt19937_64& rng,
                        std::span<const int> anchor_concepts = {});

}  // namespace tide::synthbench
