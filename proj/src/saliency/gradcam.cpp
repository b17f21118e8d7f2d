#include "saliency/gradcam.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tide::saliency {

GradCamResult gradcam(const core::FeatureVolume& features,
                      const core::FeatureVolume& logit_gradient) {
  if (features.w != logit_gradient.w || features.h != logit_gradient.h ||
      features.c != logit_gradient.c) {
    throw Error(ErrorCode::kInvalidInput,
                "gradcam: feature/gradient shape mismatch");
  }
  const int w = features.w, h = features.h, c = features.c;
  const double inv_cells = 1.0 / (static_cast<double>(w) * h);

  std::vector<double> weights(static_cast<size_t>(c), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double* g = logit_gradient.cell(x, y);
      for (int l = 0; l < c; ++l) weights[static_cast<size_t>(l)] += g[l];
    }
  }
  for (double& wl : weights) wl *= inv_cells;

  core::Map2D raw(w, h);
  bool any_positive = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double* f = features.cell(x, y);
      double acc = 0.0;
      for (int l = 0; l < c; ++l) acc += weights[static_cast<size_t>(l)] * f[l];
      double r = std::max(0.0, acc);
      raw.at(x, y) = r;
      if (r > 0.0) any_positive = true;
    }
  }

  GradCamResult out;
  out.map = core::normalize_map(raw);
  out.degenerate = !any_positive;
  return out;
}

GradCamResult class_saliency(const core::ConceptModel& model,
                             const core::FeatureVolume& features,
                             int class_id) {
  auto result = gradcam(features, model.class_logit_gradient(features, class_id));
  result.map.target = core::SaliencyTarget::kClass;
  result.map.target_id = class_id;
  return result;
}

GradCamResult concept_saliency(const core::ConceptModel& model,
                               const core::FeatureVolume& features,
                               int concept_id) {
  auto result =
      gradcam(features, model.concept_logit_gradient(features, concept_id));
  result.map.target = core::SaliencyTarget::kConcept;
  result.map.target_id = concept_id;
  return result;
}

double overlap(const core::SaliencyMap& s, const core::ConceptMask& g) {
  if (s.map.w != g.w || s.map.h != g.h) {
    throw Error(ErrorCode::kInvalidInput, "overlap: shape mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      const double gv = g.at(x, y) ? 1.0 : 0.0;
      num += std::min(s.map.at(x, y), gv);
      den += gv;
    }
  }
  if (den == 0.0) {
    throw Error(ErrorCode::kUndefinedOverlap, "overlap: empty concept mask");
  }
  return num / den;
}

}  // namespace tide::saliency
