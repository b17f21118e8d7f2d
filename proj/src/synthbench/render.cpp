#include "synthbench/render.hpp"

#include <algorithm>
#include <cmath>

#include "util/rng.hpp"

namespace tide::synthbench {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRingInner = 0.55;  // inner/outer radius ratio

struct ShapeColor {
  double r, g, b;
};

// Fixed per-concept fill palette, indexed modulo its size.
const ShapeColor kPalette[] = {
    {0.85, 0.25, 0.25}, {0.25, 0.45, 0.85}, {0.20, 0.70, 0.35},
    {0.90, 0.60, 0.20}, {0.60, 0.30, 0.80}, {0.20, 0.70, 0.70},
    {0.85, 0.80, 0.25}, {0.80, 0.30, 0.60}, {0.60, 0.45, 0.25},
};

bool inside(Primitive shape, double dx, double dy, double area) {
  switch (shape) {
    case Primitive::kCircle: {
      double r2 = area / kPi;
      return dx * dx + dy * dy <= r2;
    }
    case Primitive::kRing: {
      double ro2 = area / (kPi * (1.0 - kRingInner * kRingInner));
      double ri2 = ro2 * kRingInner * kRingInner;
      double d2 = dx * dx + dy * dy;
      return d2 >= ri2 && d2 <= ro2;
    }
    case Primitive::kTriangle: {
      double hgt = std::sqrt(area / 0.55);
      double base = 1.1 * hgt;
      double top = -2.0 * hgt / 3.0;
      double bottom = hgt / 3.0;
      if (dy < top || dy > bottom) return false;
      double half_width = 0.5 * base * (dy - top) / hgt;
      return std::abs(dx) <= half_width;
    }
    case Primitive::kSquare:
    case Primitive::kStripes: {
      double half = 0.5 * std::sqrt(area);
      return std::abs(dx) <= half && std::abs(dy) <= half;
    }
    case Primitive::kDiamond: {
      double half = 0.5 * std::sqrt(2.0 * area);
      return std::abs(dx) + std::abs(dy) <= half;
    }
    case Primitive::kCross: {
      double len = std::sqrt(area / 0.5775);
      double wid = 0.35 * len;
      bool vertical = std::abs(dx) <= 0.5 * wid && std::abs(dy) <= 0.5 * len;
      bool horizontal = std::abs(dy) <= 0.5 * wid && std::abs(dx) <= 0.5 * len;
      return vertical || horizontal;
    }
    case Primitive::kHalfDisc: {
      double r2 = 2.0 * area / kPi;
      return dy >= 0.0 && dx * dx + dy * dy <= r2;
    }
  }
  return false;
}

std::vector<std::uint8_t> boundary_of(const std::vector<std::uint8_t>& occ,
                                      int n) {
  std::vector<std::uint8_t> edge(occ.size(), 0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      size_t i = static_cast<size_t>(y) * n + x;
      if (!occ[i]) continue;
      bool border = x == 0 || x == n - 1 || y == 0 || y == n - 1 ||
                    !occ[i - 1] || !occ[i + 1] || !occ[i - n] || !occ[i + n];
      if (border) edge[i] = 1;
    }
  }
  return edge;
}

void fill_pixel(core::Image& img, int x, int y, double r, double g, double b) {
  img.at(x, y, 0) = r;
  img.at(x, y, 1) = g;
  img.at(x, y, 2) = b;
}

void draw_dot(core::Image& img, double cx, double cy, double radius, double r,
              double g, double b) {
  int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  int x1 = std::min(img.w - 1, static_cast<int>(std::ceil(cx + radius)));
  int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  int y1 = std::min(img.h - 1, static_cast<int>(std::ceil(cy + radius)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= radius * radius) fill_pixel(img, x, y, r, g, b);
    }
  }
}

const ConceptSpec& concept_by_id(const BenchmarkConfig& cfg, int id) {
  for (const auto& k : cfg.concepts) {
    if (k.id == id) return k;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown concept id in layout");
}

}  // namespace

void hsv_to_rgb(double h, double s, double v, double& r, double& g,
                double& b) {
  h = h - std::floor(h);
  double c = v * s;
  double hp = h * 6.0;
  double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r1 = 0, g1 = 0, b1 = 0;
  if (hp < 1) { r1 = c; g1 = x; }
  else if (hp < 2) { r1 = x; g1 = c; }
  else if (hp < 3) { g1 = c; b1 = x; }
  else if (hp < 4) { g1 = x; b1 = c; }
  else if (hp < 5) { r1 = x; b1 = c; }
  else { r1 = c; b1 = x; }
  double m = v - c;
  r = r1 + m;
  g = g1 + m;
  b = b1 + m;
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s,
                double& v) {
  double mx = std::max({r, g, b});
  double mn = std::min({r, g, b});
  v = mx;
  double d = mx - mn;
  s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) {
    h = 0.0;
    return;
  }
  if (mx == r) h = std::fmod((g - b) / d, 6.0);
  else if (mx == g) h = (b - r) / d + 2.0;
  else h = (r - g) / d + 4.0;
  h /= 6.0;
  if (h < 0) h += 1.0;
}

std::vector<std::uint8_t> rasterize(Primitive shape, double cx, double cy,
                                    double area_px, int image_size) {
  std::vector<std::uint8_t> occ(static_cast<size_t>(image_size) * image_size,
                                0);
  for (int y = 0; y < image_size; ++y) {
    for (int x = 0; x < image_size; ++x) {
      double dx = x + 0.5 - cx;
      double dy = y + 0.5 - cy;
      if (inside(shape, dx, dy, area_px)) {
        occ[static_cast<size_t>(y) * image_size + x] = 1;
      }
    }
  }
  return occ;
}

double bounding_radius(Primitive shape, double area_px) {
  double s = std::sqrt(area_px);
  switch (shape) {
    case Primitive::kCircle: return 0.57 * s;
    case Primitive::kRing: return 0.68 * s;
    case Primitive::kTriangle: return 0.91 * s;
    case Primitive::kSquare:
    case Primitive::kStripes: return 0.71 * s;
    case Primitive::kDiamond: return 0.71 * s;
    case Primitive::kCross: return 0.70 * s;
    case Primitive::kHalfDisc: return 0.80 * s;
  }
  return s;
}

core::ConceptMask downsample_mask(const std::vector<std::uint8_t>& occupancy,
                                  int image_size, int grid, int concept_id) {
  core::ConceptMask mask(grid, grid, concept_id);
  const int block = image_size / grid;
  for (int gy = 0; gy < grid; ++gy) {
    for (int gx = 0; gx < grid; ++gx) {
      int on = 0, total = 0;
      for (int y = gy * block; y < (gy + 1) * block; ++y) {
        for (int x = gx * block; x < (gx + 1) * block; ++x) {
          on += occupancy[static_cast<size_t>(y) * image_size + x];
          ++total;
        }
      }
      mask.at(gx, gy) = (2 * on >= total) ? 1 : 0;
    }
  }
  return mask;
}

core::Image render_sample(const BenchmarkConfig& cfg, const ClassSpec& cls,
                          const DomainStyle& style,
                          const std::vector<PlacedConcept>& placed,
                          std::mt19937_64& rng) {
  const int n = cfg.image_size;
  core::Image img(n, n);

  // Background.
  switch (style.kind) {
    case StyleKind::kPlainFill: {
      // Class-tinted background: the intended shortcut feature of the
      // plain domain. Absent or randomized everywhere else.
      double r, g, b;
      hsv_to_rgb(cls.clutter.tint_hue, 0.35, 0.88, r, g, b);
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          double e = util::uniform(rng, -0.02, 0.02);
          fill_pixel(img, x, y, r + e, g + e, b + e);
        }
      }
      break;
    }
    case StyleKind::kOutline: {
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          double e = util::uniform(rng, -0.02, 0.02);
          fill_pixel(img, x, y, 0.10 + e, 0.10 + e, 0.10 + e);
        }
      }
      break;
    }
    case StyleKind::kTexturedFill: {
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          double e = util::uniform(rng, -0.03, 0.03);
          fill_pixel(img, x, y, 0.82 + e, 0.82 + e, 0.82 + e);
        }
      }
      break;
    }
    case StyleKind::kHueShiftClutter: {
      double hue = util::uniform(rng, 0.0, 1.0);
      double r, g, b;
      hsv_to_rgb(hue, 0.35, 0.85, r, g, b);
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          double e = util::uniform(rng, -0.02, 0.02);
          fill_pixel(img, x, y, r + e, g + e, b + e);
        }
      }
      break;
    }
  }

  // Clutter dots, behind the shapes.
  int dots = 0;
  bool neutral_dots = true;
  switch (style.kind) {
    case StyleKind::kPlainFill:
      dots = cls.clutter.dot_count;  // class-correlated count
      neutral_dots = false;
      break;
    case StyleKind::kOutline:
      dots = util::uniform_int(rng, 2, 4);
      break;
    case StyleKind::kTexturedFill:
      dots = util::uniform_int(rng, 3, 8);
      break;
    case StyleKind::kHueShiftClutter:
      dots = util::uniform_int(rng, 10, 16);
      break;
  }
  for (int i = 0; i < dots; ++i) {
    double cx = util::uniform(rng, 2.0, n - 2.0);
    double cy = util::uniform(rng, 2.0, n - 2.0);
    double radius = util::uniform(rng, 1.0, 2.5);
    double r, g, b;
    if (style.kind == StyleKind::kOutline) {
      double v = util::uniform(rng, 0.25, 0.45);
      r = g = b = v;
    } else {
      double sat = neutral_dots ? 0.55 : 0.35;
      hsv_to_rgb(util::uniform(rng, 0.0, 1.0), sat, 0.85, r, g, b);
    }
    draw_dot(img, cx, cy, radius, r, g, b);
  }

  // Shapes.
  for (const auto& pc : placed) {
    const ConceptSpec& spec = concept_by_id(cfg, pc.concept_id);
    const ShapeColor base =
        kPalette[static_cast<size_t>(pc.concept_id) %
                 (sizeof(kPalette) / sizeof(kPalette[0]))];
    auto edge = boundary_of(pc.occupancy, n);

    switch (style.kind) {
      case StyleKind::kPlainFill:
      case StyleKind::kHueShiftClutter: {
        int period = util::uniform_int(rng, 3, 5);
        int phase = util::uniform_int(rng, 0, period - 1);
        for (int y = 0; y < n; ++y) {
          for (int x = 0; x < n; ++x) {
            size_t i = static_cast<size_t>(y) * n + x;
            if (!pc.occupancy[i]) continue;
            double r = base.r, g = base.g, b = base.b;
            if (spec.shape == Primitive::kStripes &&
                ((x + y + phase) % period) * 2 < period) {
              r *= 0.55;
              g *= 0.55;
              b *= 0.55;
            }
            if (edge[i]) {
              r *= 0.55;
              g *= 0.55;
              b *= 0.55;
            }
            fill_pixel(img, x, y, r, g, b);
          }
        }
        break;
      }
      case StyleKind::kOutline: {
        for (int y = 0; y < n; ++y) {
          for (int x = 0; x < n; ++x) {
            size_t i = static_cast<size_t>(y) * n + x;
            bool stripe_line =
                spec.shape == Primitive::kStripes && pc.occupancy[i] &&
                ((x + y) % 4 == 0);
            if (edge[i] || stripe_line) fill_pixel(img, x, y, 0.92, 0.92, 0.92);
          }
        }
        break;
      }
      case StyleKind::kTexturedFill: {
        double h1 = util::uniform(rng, 0.0, 1.0);
        double h2 = util::uniform(rng, 0.0, 1.0);
        int cell = util::uniform_int(rng, 2, 3);
        double r1, g1, b1, r2, g2, b2;
        hsv_to_rgb(h1, 0.65, 0.80, r1, g1, b1);
        hsv_to_rgb(h2, 0.65, 0.55, r2, g2, b2);
        for (int y = 0; y < n; ++y) {
          for (int x = 0; x < n; ++x) {
            size_t i = static_cast<size_t>(y) * n + x;
            if (!pc.occupancy[i]) continue;
            bool a = ((x / cell) + (y / cell)) % 2 == 0;
            double r = a ? r1 : r2, g = a ? g1 : g2, b = a ? b1 : b2;
            if (edge[i]) { r = 0.20; g = 0.20; b = 0.20; }
            fill_pixel(img, x, y, r, g, b);
          }
        }
        break;
      }
    }
  }

  // Whole-image hue rotation last, so even shape colors shift.
  if (style.kind == StyleKind::kHueShiftClutter) {
    double theta = util::uniform(rng, 0.0, 1.0);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        double h, s, v;
        rgb_to_hsv(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2), h, s, v);
        double r, g, b;
        hsv_to_rgb(h + theta, s, v, r, g, b);
        fill_pixel(img, x, y, r, g, b);
      }
    }
  }

  core::quantize_to_8bit(img);
  return img;
}

}  // namespace tide::synthbench
