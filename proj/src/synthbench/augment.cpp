#include "synthbench/augment.hpp"

#include <algorithm>
#include <cmath>

#include "core/image.hpp"
#include "util/rng.hpp"

namespace tide::synthbench {

const char* augment_kind_name(AugmentKind k) {
  switch (k) {
    case AugmentKind::kQuantize: return "quantize";
    case AugmentKind::kBlur: return "blur";
    case AugmentKind::kEdge: return "edge";
  }
  return "quantize";
}

core::Image quantize_colors(const core::Image& img, int levels) {
  if (levels < 2) {
    throw Error(ErrorCode::kInvalidInput, "quantize: need >= 2 levels");
  }
  core::Image out = img;
  const double steps = levels - 1;
  for (double& x : out.v) {
    x = std::round(x * steps) / steps;
  }
  return out;
}

core::Image gaussian_blur(const core::Image& img, double sigma) {
  if (sigma < 0.0) {
    throw Error(ErrorCode::kInvalidInput, "blur: sigma must be >= 0");
  }
  if (sigma == 0.0) return img;

  const int radius = std::max(1, static_cast<int>(std::ceil(2.5 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    kernel[static_cast<size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  core::Image tmp(img.w, img.h);
  core::Image out(img.w, img.h);
  // Horizontal pass with clamped borders.
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int xx = std::clamp(x + i, 0, img.w - 1);
          acc += kernel[static_cast<size_t>(i + radius)] * img.at(xx, y, ch);
        }
        tmp.at(x, y, ch) = acc;
      }
    }
  }
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int yy = std::clamp(y + i, 0, img.h - 1);
          acc += kernel[static_cast<size_t>(i + radius)] * tmp.at(x, yy, ch);
        }
        out.at(x, y, ch) = acc;
      }
    }
  }
  return out;
}

core::Image edge_map(const core::Image& img, double threshold) {
  core::Map2D gray = core::to_gray(img);
  core::Map2D mag(img.w, img.h);
  double peak = 0.0;
  for (int y = 1; y < img.h - 1; ++y) {
    for (int x = 1; x < img.w - 1; ++x) {
      double gx = gray.at(x + 1, y - 1) + 2 * gray.at(x + 1, y) +
                  gray.at(x + 1, y + 1) - gray.at(x - 1, y - 1) -
                  2 * gray.at(x - 1, y) - gray.at(x - 1, y + 1);
      double gy = gray.at(x - 1, y + 1) + 2 * gray.at(x, y + 1) +
                  gray.at(x + 1, y + 1) - gray.at(x - 1, y - 1) -
                  2 * gray.at(x, y - 1) - gray.at(x + 1, y - 1);
      double m = std::sqrt(gx * gx + gy * gy);
      mag.at(x, y) = m;
      peak = std::max(peak, m);
    }
  }
  core::Image out(img.w, img.h);
  if (peak > 0.0) {
    for (int y = 0; y < img.h; ++y) {
      for (int x = 0; x < img.w; ++x) {
        double e = mag.at(x, y) / peak >= threshold ? 1.0 : 0.0;
        out.at(x, y, 0) = e;
        out.at(x, y, 1) = e;
        out.at(x, y, 2) = e;
      }
    }
  }
  return out;
}

Triplet augment_triplet(const Sample& anchor,
                        std::span<const Sample* const> pool,
                        std::mt19937_64& rng,
                        std::span<const int> anchor_concepts) {
  if (anchor.concepts.empty()) {
    throw Error(ErrorCode::kInvalidInput,
                "augment_triplet: anchor has no concepts");
  }
  std::vector<int> candidates(anchor_concepts.begin(), anchor_concepts.end());
  if (candidates.empty()) {
    candidates = anchor.concepts;
  }

  Triplet t;
  t.anchor_concept =
      candidates[static_cast<size_t>(util::uniform_int(
          rng, 0, static_cast<int>(candidates.size()) - 1))];

  // Positive: one randomly chosen perturbation; masks are untouched.
  int kind = util::uniform_int(rng, 0, 2);
  switch (kind) {
    case 0: {
      int levels = 2 * util::uniform_int(rng, 2, 4);  // 4, 6 or 8
      t.positive = quantize_colors(anchor.image, levels);
      t.augment = AugmentKind::kQuantize;
      break;
    }
    case 1: {
      double sigma = util::uniform(rng, 0.6, 1.4);
      t.positive = gaussian_blur(anchor.image, sigma);
      t.augment = AugmentKind::kBlur;
      break;
    }
    default: {
      t.positive = edge_map(anchor.image);
      t.augment = AugmentKind::kEdge;
      break;
    }
  }

  // Negative: uniform over pool samples holding at least one concept the
  // anchor lacks; then uniform over those concepts.
  auto novel_concepts = [&](const Sample& s) {
    std::vector<int> out;
    for (int k : s.concepts) {
      if (std::find(anchor.concepts.begin(), anchor.concepts.end(), k) ==
          anchor.concepts.end()) {
        out.push_back(k);
      }
    }
    return out;
  };
  std::vector<size_t> valid;
  for (size_t i = 0; i < pool.size(); ++i) {
    if (pool[i] != nullptr && !novel_concepts(*pool[i]).empty()) {
      valid.push_back(i);
    }
  }
  if (valid.empty()) {
    throw Error(ErrorCode::kTripletExhausted,
                "augment_triplet: no pool sample has a concept the anchor "
                "lacks");
  }
  size_t pick = valid[static_cast<size_t>(util::uniform_int(
      rng, 0, static_cast<int>(valid.size()) - 1))];
  t.negative = pool[pick];
  auto novel = novel_concepts(*t.negative);
  t.negative_concept = novel[static_cast<size_t>(
      util::uniform_int(rng, 0, static_cast<int>(novel.size()) - 1))];
  return t;
}

}  // namespace tide::synthbench
