#pragma once

#include <span>
#include <vector>

#include "core/ops.hpp"
#include "core/types.hpp"

namespace tide::training {

// Softmax cross-entropy for the class head.
double class_loss(std::span<const double> logits, int label);

struct ClassLossGrad {
  double loss = 0.0;
  std::vector<double> d_logits;
};
ClassLossGrad class_loss_grad(std::span<const double> logits, int label);

// Mean over the concept vocabulary of binary cross-entropy on
// sigmoid(score); presence is a 0/1 vector of vocabulary length.
double concept_loss(std::span<const double> scores,
                    std::span<const std::uint8_t> presence);

struct ConceptLossGrad {
  double loss = 0.0;
  std::vector<double> d_scores;
};
ConceptLossGrad concept_loss_grad(std::span<const double> scores,
                                  std::span<const std::uint8_t> presence);

// Mean over paired (saliency, mask) entries of the squared L2 difference.
// An empty set contributes zero.
double csa_loss(std::span<const core::SaliencyMap> maps,
                std::span<const core::ConceptMask> masks);

// Mask-weighted sum of feature vectors (a sum, not a mean).
core::ConceptVector concept_feature(const core::FeatureVolume& f,
                                    const core::ConceptMask& mask);

// Same pooling with real-valued weights; used at test time where only
// predicted saliency maps are available.
std::vector<double> pooled_feature(const core::FeatureVolume& f,
                                   const core::Map2D& weights);

// Triplet margin loss over concept features, Euclidean distance.
double lcc_loss(std::span<const double> f_anchor,
                std::span<const double> f_positive,
                std::span<const double> f_negative, double margin);

struct LccLossGrad {
  double loss = 0.0;
  std::vector<double> d_anchor;
  std::vector<double> d_positive;
  std::vector<double> d_negative;
};
LccLossGrad lcc_loss_grad(std::span<const double> f_anchor,
                          std::span<const double> f_positive,
                          std::span<const double> f_negative, double margin);

}  // namespace tide::training
