#pragma once

#include <vector>

#include "core/types.hpp"

namespace tide::core {

// Inference surface shared by saliency, discovery, and test-time correction.
// Implementations must be deterministic and safe to call concurrently from
// multiple threads on const instances; each call carries its own state.
class ConceptModel {
 public:
  virtual ~ConceptModel() = default;

  virtual int num_classes() const = 0;
  virtual int num_concepts() const = 0;

  // Last-conv-stage activations for an image.
  virtual FeatureVolume features(const Image& img) const = 0;

  virtual std::vector<double> class_logits(const FeatureVolume& f) const = 0;
  virtual std::vector<double> concept_scores(const FeatureVolume& f) const = 0;

  // Gradient of one output logit with respect to the feature volume,
  // evaluated at f. This is the gradient pass GradCAM consumes.
  virtual FeatureVolume class_logit_gradient(const FeatureVolume& f,
                                             int class_id) const = 0;
  virtual FeatureVolume concept_logit_gradient(const FeatureVolume& f,
                                               int concept_id) const = 0;
};

inline int argmax_index(const std::vector<double>& v) {
  int best = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace tide::core
