#include "training/model.hpp"

#include <cmath>

#include "util/hash.hpp"

namespace tide::training {

TideModel::TideModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.num_classes < 2 || cfg_.num_concepts < 1) {
    throw Error(ErrorCode::kInvalidConfig,
                "model needs >= 2 classes and >= 1 concept");
  }
  if (cfg_.blocks.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "model needs >= 1 conv block");
  }
  int g = cfg_.image_size;
  for (const auto& b : cfg_.blocks) {
    if (b.pool) {
      if (g % 2 != 0) {
        throw Error(ErrorCode::kInvalidConfig,
                    "pooling requires even spatial size at every stage");
      }
      g /= 2;
    }
  }

  size_t off = 0;
  int in_c = 3;
  for (size_t b = 0; b < cfg_.blocks.size(); ++b) {
    const int out_c = cfg_.blocks[b].out_channels;
    ConvSlice cs;
    cs.in_c = in_c;
    cs.out_c = out_c;
    cs.w_off = off;
    cs.w_size = static_cast<size_t>(out_c) * 9 * in_c;
    off += cs.w_size;
    cs.b_off = off;
    cs.b_size = static_cast<size_t>(out_c);
    off += cs.b_size;
    convs_.push_back(cs);
    layout_.push_back({"conv" + std::to_string(b) + ".w", cs.w_off, cs.w_size});
    layout_.push_back({"conv" + std::to_string(b) + ".b", cs.b_off, cs.b_size});
    in_c = out_c;
  }
  const int C = cfg_.feature_channels();
  class_w_off_ = off;
  off += static_cast<size_t>(cfg_.num_classes) * C;
  class_b_off_ = off;
  off += static_cast<size_t>(cfg_.num_classes);
  concept_w_off_ = off;
  off += static_cast<size_t>(cfg_.num_concepts) * C;
  concept_b_off_ = off;
  off += static_cast<size_t>(cfg_.num_concepts);
  layout_.push_back({"class_head.w", class_w_off_,
                     static_cast<size_t>(cfg_.num_classes) * C});
  layout_.push_back({"class_head.b", class_b_off_,
                     static_cast<size_t>(cfg_.num_classes)});
  layout_.push_back({"concept_head.w", concept_w_off_,
                     static_cast<size_t>(cfg_.num_concepts) * C});
  layout_.push_back({"concept_head.b", concept_b_off_,
                     static_cast<size_t>(cfg_.num_concepts)});

  params_.assign(off, 0.0);
}

void TideModel::init_params(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& cs : convs_) {
    const double scale = std::sqrt(2.0 / (9.0 * cs.in_c));
    for (size_t i = 0; i < cs.w_size; ++i) {
      params_[cs.w_off + i] = scale * normal(rng);
    }
    for (size_t i = 0; i < cs.b_size; ++i) params_[cs.b_off + i] = 0.0;
  }
  const int C = cfg_.feature_channels();
  const double head_scale = std::sqrt(1.0 / C);
  for (size_t i = 0; i < static_cast<size_t>(cfg_.num_classes) * C; ++i) {
    params_[class_w_off_ + i] = head_scale * normal(rng);
  }
  for (size_t i = 0; i < static_cast<size_t>(cfg_.num_concepts) * C; ++i) {
    params_[concept_w_off_ + i] = head_scale * normal(rng);
  }
  for (int i = 0; i < cfg_.num_classes; ++i) params_[class_b_off_ + i] = 0.0;
  for (int i = 0; i < cfg_.num_concepts; ++i) {
    params_[concept_b_off_ + i] = 0.0;
  }
}

core::FeatureVolume TideModel::backbone(const core::Image& img) const {
  core::FeatureVolume x = image_as_volume(img);
  for (size_t b = 0; b < convs_.size(); ++b) {
    const auto& cs = convs_[b];
    auto z = conv3x3_forward(
        x, std::span<const double>(params_).subspan(cs.w_off, cs.w_size),
        std::span<const double>(params_).subspan(cs.b_off, cs.b_size),
        cs.out_c);
    auto a = relu_forward(z);
    if (cfg_.blocks[b].pool) {
      x = maxpool2_forward(a).out;
    } else {
      x = std::move(a);
    }
  }
  return x;
}

core::FeatureVolume TideModel::features(const core::Image& img) const {
  if (img.w != cfg_.image_size || img.h != cfg_.image_size) {
    throw Error(ErrorCode::kInvalidInput, "model: unexpected image size");
  }
  return backbone(img);
}

std::vector<double> TideModel::head_apply(const core::FeatureVolume& f,
                                          size_t w_off, size_t b_off,
                                          int rows) const {
  const auto pooled = global_avg_pool(f);
  const int C = static_cast<int>(pooled.size());
  std::vector<double> out(static_cast<size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    double acc = params_[b_off + r];
    const double* wp = params_.data() + w_off + static_cast<size_t>(r) * C;
    for (int l = 0; l < C; ++l) acc += wp[l] * pooled[static_cast<size_t>(l)];
    out[static_cast<size_t>(r)] = acc;
  }
  return out;
}

std::vector<double> TideModel::class_logits(
    const core::FeatureVolume& f) const {
  return head_apply(f, class_w_off_, class_b_off_, cfg_.num_classes);
}

std::vector<double> TideModel::concept_scores(
    const core::FeatureVolume& f) const {
  return head_apply(f, concept_w_off_, concept_b_off_, cfg_.num_concepts);
}

core::FeatureVolume TideModel::head_logit_gradient(
    const core::FeatureVolume& f, size_t w_off, int row) const {
  // logit = b + sum_l w[l] * mean_xy F(x,y,l), so d logit / dF(x,y,l) is
  // w[l] / (W*H) at every cell.
  const int C = f.c;
  core::FeatureVolume g(f.w, f.h, C);
  const double inv_cells = 1.0 / (static_cast<double>(f.w) * f.h);
  const double* wp = params_.data() + w_off + static_cast<size_t>(row) * C;
  for (int y = 0; y < f.h; ++y) {
    for (int x = 0; x < f.w; ++x) {
      double* gp = g.cell(x, y);
      for (int l = 0; l < C; ++l) gp[l] = wp[l] * inv_cells;
    }
  }
  return g;
}

core::FeatureVolume TideModel::class_logit_gradient(
    const core::FeatureVolume& f, int class_id) const {
  if (class_id < 0 || class_id >= cfg_.num_classes) {
    throw Error(ErrorCode::kInvalidLabel, "class id out of range");
  }
  return head_logit_gradient(f, class_w_off_, class_id);
}

core::FeatureVolume TideModel::concept_logit_gradient(
    const core::FeatureVolume& f, int concept_id) const {
  if (concept_id < 0 || concept_id >= cfg_.num_concepts) {
    throw Error(ErrorCode::kInvalidLabel, "concept id out of range");
  }
  return head_logit_gradient(f, concept_w_off_, concept_id);
}

TideModel::ForwardCache TideModel::forward(const core::Image& img) const {
  if (img.w != cfg_.image_size || img.h != cfg_.image_size) {
    throw Error(ErrorCode::kInvalidInput, "model: unexpected image size");
  }
  ForwardCache fc;
  core::FeatureVolume x = image_as_volume(img);
  for (size_t b = 0; b < convs_.size(); ++b) {
    const auto& cs = convs_[b];
    fc.conv_in.push_back(x);
    auto z = conv3x3_forward(
        x, std::span<const double>(params_).subspan(cs.w_off, cs.w_size),
        std::span<const double>(params_).subspan(cs.b_off, cs.b_size),
        cs.out_c);
    auto a = relu_forward(z);
    fc.pre_act.push_back(std::move(z));
    if (cfg_.blocks[b].pool) {
      auto pr = maxpool2_forward(a);
      fc.act.push_back(std::move(a));
      x = pr.out;
      fc.pools.push_back(std::move(pr));
    } else {
      x = a;
      fc.act.push_back(std::move(a));
      fc.pools.emplace_back();  // placeholder, not used
    }
  }
  fc.feat = x;
  fc.pooled = global_avg_pool(fc.feat);
  const int C = static_cast<int>(fc.pooled.size());
  auto apply = [&](size_t w_off, size_t b_off, int rows) {
    std::vector<double> out(static_cast<size_t>(rows));
    for (int r = 0; r < rows; ++r) {
      double acc = params_[b_off + r];
      const double* wp = params_.data() + w_off + static_cast<size_t>(r) * C;
      for (int l = 0; l < C; ++l) {
        acc += wp[l] * fc.pooled[static_cast<size_t>(l)];
      }
      out[static_cast<size_t>(r)] = acc;
    }
    return out;
  };
  fc.class_logits = apply(class_w_off_, class_b_off_, cfg_.num_classes);
  fc.concept_logits = apply(concept_w_off_, concept_b_off_, cfg_.num_concepts);
  return fc;
}

void TideModel::backward(const ForwardCache& cache,
                         const core::FeatureVolume& d_feat,
                         std::span<const double> d_class_logits,
                         std::span<const double> d_concept_logits,
                         std::span<double> grad) const {
  const int C = cfg_.feature_channels();
  const int G = cfg_.grid();
  const double inv_cells = 1.0 / (static_cast<double>(G) * G);

  // Head gradients and the pooled-feature gradient.
  std::vector<double> d_pooled(static_cast<size_t>(C), 0.0);
  if (!d_class_logits.empty()) {
    for (int r = 0; r < cfg_.num_classes; ++r) {
      const double g = d_class_logits[static_cast<size_t>(r)];
      if (g == 0.0) continue;
      grad[class_b_off_ + r] += g;
      const double* wp =
          params_.data() + class_w_off_ + static_cast<size_t>(r) * C;
      double* dwp = grad.data() + class_w_off_ + static_cast<size_t>(r) * C;
      for (int l = 0; l < C; ++l) {
        dwp[l] += g * cache.pooled[static_cast<size_t>(l)];
        d_pooled[static_cast<size_t>(l)] += g * wp[l];
      }
    }
  }
  if (!d_concept_logits.empty()) {
    for (int r = 0; r < cfg_.num_concepts; ++r) {
      const double g = d_concept_logits[static_cast<size_t>(r)];
      if (g == 0.0) continue;
      grad[concept_b_off_ + r] += g;
      const double* wp =
          params_.data() + concept_w_off_ + static_cast<size_t>(r) * C;
      double* dwp = grad.data() + concept_w_off_ + static_cast<size_t>(r) * C;
      for (int l = 0; l < C; ++l) {
        dwp[l] += g * cache.pooled[static_cast<size_t>(l)];
        d_pooled[static_cast<size_t>(l)] += g * wp[l];
      }
    }
  }

  // Combine the pooled-path gradient with any direct feature gradient.
  core::FeatureVolume dx(cache.feat.w, cache.feat.h, C, 0.0);
  if (!d_feat.v.empty()) {
    if (d_feat.w != cache.feat.w || d_feat.h != cache.feat.h ||
        d_feat.c != C) {
      throw Error(ErrorCode::kInvalidInput, "backward: d_feat shape mismatch");
    }
    dx.v = d_feat.v;
  }
  for (int y = 0; y < dx.h; ++y) {
    for (int x = 0; x < dx.w; ++x) {
      double* p = dx.cell(x, y);
      for (int l = 0; l < C; ++l) {
        p[l] += d_pooled[static_cast<size_t>(l)] * inv_cells;
      }
    }
  }

  // Backbone, in reverse.
  for (int b = static_cast<int>(convs_.size()) - 1; b >= 0; --b) {
    const auto& cs = convs_[static_cast<size_t>(b)];
    core::FeatureVolume da;
    if (cfg_.blocks[static_cast<size_t>(b)].pool) {
      da = maxpool2_backward(cache.act[static_cast<size_t>(b)],
                             cache.pools[static_cast<size_t>(b)], dx);
    } else {
      da = std::move(dx);
    }
    auto dz = relu_backward(cache.pre_act[static_cast<size_t>(b)], da);
    dx = conv3x3_backward(
        cache.conv_in[static_cast<size_t>(b)],
        std::span<const double>(params_).subspan(cs.w_off, cs.w_size), dz,
        grad.subspan(cs.w_off, cs.w_size), grad.subspan(cs.b_off, cs.b_size));
  }
}

std::span<const double> TideModel::concept_head_row(int k) const {
  const int C = cfg_.feature_channels();
  return std::span<const double>(params_).subspan(
      concept_w_off_ + static_cast<size_t>(k) * C, static_cast<size_t>(C));
}

size_t TideModel::concept_head_row_offset(int k) const {
  return concept_w_off_ +
         static_cast<size_t>(k) * cfg_.feature_channels();
}

std::uint64_t TideModel::params_hash() const {
  return util::fnv1a64(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(params_.data()),
      params_.size() * sizeof(double)));
}

}  // namespace tide::training
