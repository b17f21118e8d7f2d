#include "training/losses.hpp"

#include <algorithm>
#include <cmath>

namespace tide::training {

namespace {

double log_sum_exp(std::span<const double> v) {
  double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

double class_loss(std::span<const double> logits, int label) {
  if (label < 0 || label >= static_cast<int>(logits.size())) {
    throw Error(ErrorCode::kInvalidLabel, "class_loss: label out of range");
  }
  return log_sum_exp(logits) - logits[static_cast<size_t>(label)];
}

ClassLossGrad class_loss_grad(std::span<const double> logits, int label) {
  ClassLossGrad out;
  out.loss = class_loss(logits, label);
  out.d_logits.resize(logits.size());
  double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double x : logits) z += std::exp(x - m);
  for (size_t i = 0; i < logits.size(); ++i) {
    out.d_logits[i] = std::exp(logits[i] - m) / z;
  }
  out.d_logits[static_cast<size_t>(label)] -= 1.0;
  return out;
}

double concept_loss(std::span<const double> scores,
                    std::span<const std::uint8_t> presence) {
  if (scores.size() != presence.size() || scores.empty()) {
    throw Error(ErrorCode::kInvalidInput, "concept_loss: size mismatch");
  }
  double total = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double z = scores[i];
    const double y = presence[i] ? 1.0 : 0.0;
    // Stable BCE-with-logits.
    total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
  }
  return total / static_cast<double>(scores.size());
}

ConceptLossGrad concept_loss_grad(std::span<const double> scores,
                                  std::span<const std::uint8_t> presence) {
  ConceptLossGrad out;
  out.loss = concept_loss(scores, presence);
  out.d_scores.resize(scores.size());
  const double inv = 1.0 / static_cast<double>(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    const double s = 1.0 / (1.0 + std::exp(-scores[i]));
    out.d_scores[i] = (s - (presence[i] ? 1.0 : 0.0)) * inv;
  }
  return out;
}

double csa_loss(std::span<const core::SaliencyMap> maps,
                std::span<const core::ConceptMask> masks) {
  if (maps.size() != masks.size()) {
    throw Error(ErrorCode::kInvalidInput, "csa_loss: pairing mismatch");
  }
  if (maps.empty()) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < maps.size(); ++i) {
    const auto& s = maps[i].map;
    const auto& g = masks[i];
    if (s.w != g.w || s.h != g.h) {
      throw Error(ErrorCode::kInvalidInput, "csa_loss: shape mismatch");
    }
    double sq = 0.0;
    for (size_t j = 0; j < s.v.size(); ++j) {
      const double d = s.v[j] - (g.v[j] ? 1.0 : 0.0);
      sq += d * d;
    }
    total += sq;
  }
  return total / static_cast<double>(maps.size());
}

core::ConceptVector concept_feature(const core::FeatureVolume& f,
                                    const core::ConceptMask& mask) {
  if (f.w != mask.w || f.h != mask.h) {
    throw Error(ErrorCode::kInvalidInput, "concept_feature: shape mismatch");
  }
  core::ConceptVector out;
  out.concept_id = mask.concept_id;
  out.v.assign(static_cast<size_t>(f.c), 0.0);
  for (int y = 0; y < f.h; ++y) {
    for (int x = 0; x < f.w; ++x) {
      if (!mask.at(x, y)) continue;
      const double* fp = f.cell(x, y);
      for (int l = 0; l < f.c; ++l) out.v[static_cast<size_t>(l)] += fp[l];
    }
  }
  return out;
}

std::vector<double> pooled_feature(const core::FeatureVolume& f,
                                   const core::Map2D& weights) {
  if (f.w != weights.w || f.h != weights.h) {
    throw Error(ErrorCode::kInvalidInput, "pooled_feature: shape mismatch");
  }
  std::vector<double> out(static_cast<size_t>(f.c), 0.0);
  for (int y = 0; y < f.h; ++y) {
    for (int x = 0; x < f.w; ++x) {
      const double wgt = weights.at(x, y);
      if (wgt == 0.0) continue;
      const double* fp = f.cell(x, y);
      for (int l = 0; l < f.c; ++l) out[static_cast<size_t>(l)] += wgt * fp[l];
    }
  }
  return out;
}

double lcc_loss(std::span<const double> f_anchor,
                std::span<const double> f_positive,
                std::span<const double> f_negative, double margin) {
  const double dp = core::euclidean_distance(f_anchor, f_positive);
  const double dn = core::euclidean_distance(f_anchor, f_negative);
  return std::max(0.0, dp - dn + margin);
}

LccLossGrad lcc_loss_grad(std::span<const double> f_anchor,
                          std::span<const double> f_positive,
                          std::span<const double> f_negative, double margin) {
  LccLossGrad out;
  const size_t n = f_anchor.size();
  out.d_anchor.assign(n, 0.0);
  out.d_positive.assign(n, 0.0);
  out.d_negative.assign(n, 0.0);
  const double dp = core::euclidean_distance(f_anchor, f_positive);
  const double dn = core::euclidean_distance(f_anchor, f_negative);
  out.loss = std::max(0.0, dp - dn + margin);
  if (out.loss <= 0.0) return out;
  if (dp > 0.0) {
    for (size_t i = 0; i < n; ++i) {
      const double g = (f_anchor[i] - f_positive[i]) / dp;
      out.d_anchor[i] += g;
      out.d_positive[i] -= g;
    }
  }
  if (dn > 0.0) {
    for (size_t i = 0; i < n; ++i) {
      const double g = (f_anchor[i] - f_negative[i]) / dn;
      out.d_anchor[i] -= g;
      out.d_negative[i] += g;
    }
  }
  return out;
}

}  // namespace tide::training
