#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace tide::synthbench {

enum class Primitive {
  kCircle,
  kRing,
  kTriangle,
  kSquare,
  kDiamond,
  kCross,
  kStripes,
  kHalfDisc,
};

const char* primitive_name(Primitive p);
Primitive primitive_from_name(const std::string& name);

// A concept is a primitive at a fixed anchor with a fixed canvas-area
// fraction; per-sample layout jitter moves it slightly around the anchor.
struct ConceptSpec {
  int id = -1;
  std::string name;
  Primitive shape = Primitive::kCircle;
  double anchor_x = 0.5;  // unit-square coordinates
  double anchor_y = 0.5;
  double area = 0.05;     // fraction of canvas area
};

// Background clutter knobs; the plain-fill style renders these verbatim,
// which makes the background a class-correlated shortcut in that domain.
// All other styles randomize or drop them.
struct ClutterPolicy {
  double tint_hue = 0.0;  // background tint hue in [0,1)
  int dot_count = 4;
};

struct ClassSpec {
  int id = -1;
  std::string name;
  std::vector<int> concept_ids;  // 3-4 entries
  ClutterPolicy clutter;
};

enum class StyleKind { kPlainFill, kOutline, kTexturedFill, kHueShiftClutter };

const char* style_kind_name(StyleKind k);
StyleKind style_kind_from_name(const std::string& name);

struct DomainStyle {
  int id = -1;
  std::string name;
  StyleKind kind = StyleKind::kPlainFill;
  std::uint64_t param_seed = 0;
};

struct BenchmarkConfig {
  int image_size = 56;
  int mask_grid = 7;
  std::uint64_t seed = 42;
  int train_per_class_per_domain = 100;
  int test_per_class_per_domain = 40;
  double jitter = 0.03;          // anchor jitter, canvas fraction
  double area_jitter = 0.15;     // relative area jitter
  double overlap_tolerance = 0.05;  // max pairwise overlap / min area
  std::vector<ConceptSpec> concepts;
  std::vector<ClassSpec> classes;
  std::vector<DomainStyle> domains;

  // 9 concepts over 5 anchor sites, 5 classes sharing at most 2 concepts,
  // 4 domain styles. 500 train / 200 test samples per domain.
  static BenchmarkConfig default_benchmark();

  void validate() const;
};

}  // namespace tide::synthbench
