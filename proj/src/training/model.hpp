#pragma once

#include <random>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "training/nn.hpp"

namespace tide::training {

struct BackboneBlock {
  int out_channels = 8;
  bool pool = false;
};

struct ModelConfig {
  int image_size = 56;
  std::vector<BackboneBlock> blocks = {
      {8, true}, {16, true}, {32, true}, {64, false}};
  int num_classes = 0;
  int num_concepts = 0;

  int grid() const {
    int g = image_size;
    for (const auto& b : blocks) {
      if (b.pool) g /= 2;
    }
    return g;
  }
  int feature_channels() const { return blocks.back().out_channels; }
};

// Shared conv backbone, global average pooling, and two linear heads
// (softmax classes, independent per-concept scores). Both heads read the
// same pooled feature. With this head structure the gradient of any output
// logit with respect to the feature volume has the closed form
// head_row[l] / (W*H), which is what the saliency and loss paths use.
class TideModel : public core::ConceptModel {
 public:
  explicit TideModel(ModelConfig cfg);

  void init_params(std::mt19937_64& rng);

  // --- core::ConceptModel ---
  int num_classes() const override { return cfg_.num_classes; }
  int num_concepts() const override { return cfg_.num_concepts; }
  core::FeatureVolume features(const core::Image& img) const override;
  std::vector<double> class_logits(const core::FeatureVolume& f) const override;
  std::vector<double> concept_scores(const core::FeatureVolume& f) const override;
  core::FeatureVolume class_logit_gradient(const core::FeatureVolume& f,
                                           int class_id) const override;
  core::FeatureVolume concept_logit_gradient(const core::FeatureVolume& f,
                                             int concept_id) const override;

  // --- training surface ---
  struct ForwardCache {
    std::vector<core::FeatureVolume> conv_in;   // input to each conv
    std::vector<core::FeatureVolume> pre_act;   // conv output, pre-ReLU
    std::vector<core::FeatureVolume> act;       // post-ReLU
    std::vector<PoolResult> pools;              // for blocks with pooling
    core::FeatureVolume feat;                   // final feature volume
    std::vector<double> pooled;
    std::vector<double> class_logits;
    std::vector<double> concept_logits;
  };

  ForwardCache forward(const core::Image& img) const;

  // Accumulates parameter gradients into `grad` (layout of params()) given
  // upstream gradients on the head logits plus any gradient applied
  // directly to the feature volume (CSA and LCC paths). Pass an empty
  // d_feat to mean zero.
  void backward(const ForwardCache& cache, const core::FeatureVolume& d_feat,
                std::span<const double> d_class_logits,
                std::span<const double> d_concept_logits,
                std::span<double> grad) const;

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  size_t param_count() const { return params_.size(); }

  struct ParamSlice {
    std::string name;
    size_t offset;
    size_t size;
  };
  const std::vector<ParamSlice>& param_layout() const { return layout_; }

  const ModelConfig& config() const { return cfg_; }

  // Concept-head row and its gradient offset; the CSA loss needs both to
  // differentiate through the saliency computation.
  std::span<const double> concept_head_row(int k) const;
  size_t concept_head_row_offset(int k) const;

  std::uint64_t params_hash() const;

 private:
  struct ConvSlice {
    size_t w_off, w_size, b_off, b_size;
    int in_c, out_c;
  };

  ModelConfig cfg_;
  std::vector<double> params_;
  std::vector<ParamSlice> layout_;
  std::vector<ConvSlice> convs_;
  size_t class_w_off_ = 0, class_b_off_ = 0;
  size_t concept_w_off_ = 0, concept_b_off_ = 0;

  core::FeatureVolume backbone(const core::Image& img) const;
  std::vector<double> head_apply(const core::FeatureVolume& f, size_t w_off,
                                 size_t b_off, int rows) const;
  core::FeatureVolume head_logit_gradient(const core::FeatureVolume& f,
                                          size_t w_off, int row) const;
};

}  // namespace tide::training
