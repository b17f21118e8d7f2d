#include "synthbench/spec.hpp"

#include <set>

namespace tide::synthbench {

const char* primitive_name(Primitive p) {
  switch (p) {
    case Primitive::kCircle: return "circle";
    case Primitive::kRing: return "ring";
    case Primitive::kTriangle: return "triangle";
    case Primitive::kSquare: return "square";
    case Primitive::kDiamond: return "diamond";
    case Primitive::kCross: return "cross";
    case Primitive::kStripes: return "stripes";
    case Primitive::kHalfDisc: return "halfdisc";
  }
  return "circle";
}

Primitive primitive_from_name(const std::string& name) {
  for (Primitive p :
       {Primitive::kCircle, Primitive::kRing, Primitive::kTriangle,
        Primitive::kSquare, Primitive::kDiamond, Primitive::kCross,
        Primitive::kStripes, Primitive::kHalfDisc}) {
    if (name == primitive_name(p)) return p;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown primitive: " + name);
}

const char* style_kind_name(StyleKind k) {
  switch (k) {
    case StyleKind::kPlainFill: return "plain-fill";
    case StyleKind::kOutline: return "outline-only";
    case StyleKind::kTexturedFill: return "textured-fill";
    case StyleKind::kHueShiftClutter: return "hue-shift-clutter";
  }
  return "plain-fill";
}

StyleKind style_kind_from_name(const std::string& name) {
  for (StyleKind k :
       {StyleKind::kPlainFill, StyleKind::kOutline, StyleKind::kTexturedFill,
        StyleKind::kHueShiftClutter}) {
    if (name == style_kind_name(k)) return k;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown domain style: " + name);
}

BenchmarkConfig BenchmarkConfig::default_benchmark() {
  BenchmarkConfig cfg;

  const double nw = 0.25, ne = 0.75, c = 0.50;
  cfg.concepts = {
      {0, "circle-nw", Primitive::kCircle, nw, nw, 0.050},
      {1, "triangle-ne", Primitive::kTriangle, ne, nw, 0.055},
      {2, "square-sw", Primitive::kSquare, nw, ne, 0.050},
      {3, "diamond-se", Primitive::kDiamond, ne, ne, 0.055},
      {4, "ring-nw", Primitive::kRing, nw, nw, 0.050},
      {5, "cross-c", Primitive::kCross, c, c, 0.055},
      {6, "stripes-ne", Primitive::kStripes, ne, nw, 0.050},
      {7, "halfdisc-sw", Primitive::kHalfDisc, nw, ne, 0.050},
      {8, "ring-se", Primitive::kRing, ne, ne, 0.050},
  };

  // Classes alpha and bravo share two concepts and form the confusable pair.
  cfg.classes = {
      {0, "alpha", {0, 1, 2}, {0.02, 3}},
      {1, "bravo", {0, 1, 3}, {0.21, 5}},
      {2, "charlie", {3, 4, 5}, {0.40, 7}},
      {3, "delta", {5, 6, 7}, {0.60, 9}},
      {4, "echo", {2, 6, 8}, {0.80, 11}},
  };

  cfg.domains = {
      {0, "plain", StyleKind::kPlainFill, 101},
      {1, "outline", StyleKind::kOutline, 102},
      {2, "texture", StyleKind::kTexturedFill, 103},
      {3, "clutter", StyleKind::kHueShiftClutter, 104},
  };

  cfg.validate();
  return cfg;
}

void BenchmarkConfig::validate() const {
  if (classes.size() < 2) {
    throw Error(ErrorCode::kInvalidConfig, "benchmark needs >= 2 classes");
  }
  if (domains.size() < 2) {
    throw Error(ErrorCode::kInvalidConfig, "benchmark needs >= 2 domains");
  }
  if (train_per_class_per_domain < 1) {
    throw Error(ErrorCode::kInvalidConfig, "per-domain sample count must be >= 1");
  }
  if (image_size < mask_grid || mask_grid < 1) {
    throw Error(ErrorCode::kInvalidConfig, "bad image/mask resolution");
  }
  std::set<int> concept_ids;
  for (const auto& k : concepts) {
    if (!concept_ids.insert(k.id).second) {
      throw Error(ErrorCode::kInvalidConfig, "duplicate concept id");
    }
    if (k.area <= 0.0 || k.area > 0.25) {
      throw Error(ErrorCode::kInvalidConfig,
                  "concept area out of range: " + k.name);
    }
  }
  for (const auto& cls : classes) {
    if (cls.concept_ids.size() < 3 || cls.concept_ids.size() > 4) {
      throw Error(ErrorCode::kInvalidConfig,
                  "class must carry 3-4 concepts: " + cls.name);
    }
    for (int kid : cls.concept_ids) {
      if (!concept_ids.count(kid)) {
        throw Error(ErrorCode::kInvalidConfig,
                    "class references unknown concept: " + cls.name);
      }
    }
  }
  // Classes stay discriminative: any two share at most 2 concepts.
  for (size_t i = 0; i < classes.size(); ++i) {
    for (size_t j = i + 1; j < classes.size(); ++j) {
      int shared = 0;
      for (int a : classes[i].concept_ids) {
        for (int b : classes[j].concept_ids) {
          if (a == b) ++shared;
        }
      }
      if (shared > 2) {
        throw Error(ErrorCode::kInvalidConfig,
                    "classes " + classes[i].name + " and " + classes[j].name +
                        " share more than 2 concepts");
      }
    }
  }
}

}  // namespace tide::synthbench
