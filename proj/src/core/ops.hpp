#pragma once

#include <span>

#include "core/types.hpp"

namespace tide::core {

// Min-max normalization to [0,1]. A constant map normalizes to all zeros.
SaliencyMap normalize_map(const Map2D& raw);

// Threshold a normalized map at `threshold` in (0,1); cells >= threshold
// become 1.
ConceptMask binarize(const SaliencyMap& map, double threshold);

// 1 - cosine similarity, in [0,2]. Throws ZeroNormError when either vector
// has zero norm; callers that need the "vanished concept" semantics use
// verification_distance in the correction module instead.
double cosine_distance(std::span<const double> a, std::span<const double> b);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

}  // namespace tide::core
