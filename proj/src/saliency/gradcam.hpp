#pragma once

#include "core/model.hpp"
#include "core/ops.hpp"
#include "core/types.hpp"

namespace tide::saliency {

struct GradCamResult {
  core::SaliencyMap map;
  bool degenerate = false;  // true when the raw map is identically zero
};

// Per-channel weight = spatial mean of the logit gradient; raw map =
// ReLU(sum_l weight_l * F(.,.,l)); min-max normalized to [0,1]. An all-zero
// gradient yields an all-zero map flagged degenerate rather than an error.
GradCamResult gradcam(const core::FeatureVolume& features,
                      const core::FeatureVolume& logit_gradient);

GradCamResult class_saliency(const core::ConceptModel& model,
                             const core::FeatureVolume& features,
                             int class_id);
GradCamResult concept_saliency(const core::ConceptModel& model,
                               const core::FeatureVolume& features,
                               int concept_id);

// Eq.-style overlap: sum min(S, G) / sum G, in [0,1]. Throws
// UndefinedOverlap when G is all zero.
double overlap(const core::SaliencyMap& s, const core::ConceptMask& g);

}  // namespace tide::saliency
