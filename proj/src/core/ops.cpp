#include "core/ops.hpp"

#include <algorithm>
#include <cmath>

namespace tide::core {

SaliencyMap normalize_map(const Map2D& raw) {
  if (raw.w < 1 || raw.h < 1) {
    throw Error(ErrorCode::kInvalidInput, "normalize_map: empty map");
  }
  for (double x : raw.v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidInput, "normalize_map: non-finite entry");
    }
  }
  auto [mn_it, mx_it] = std::minmax_element(raw.v.begin(), raw.v.end());
  const double mn = *mn_it;
  const double mx = *mx_it;

  SaliencyMap out;
  out.map = Map2D(raw.w, raw.h, 0.0);
  if (mx > mn) {
    const double inv = 1.0 / (mx - mn);
    for (size_t i = 0; i < raw.v.size(); ++i) {
      out.map.v[i] = (raw.v[i] - mn) * inv;
    }
  }
  return out;
}

ConceptMask binarize(const SaliencyMap& map, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "binarize: threshold must lie in (0,1)");
  }
  ConceptMask out(map.map.w, map.map.h, map.target_id);
  for (size_t i = 0; i < map.map.v.size(); ++i) {
    out.v[i] = map.map.v[i] >= threshold ? 1 : 0;
  }
  return out;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kInvalidInput, "cosine_distance: length mismatch");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kZeroNorm, "cosine_distance: zero-norm vector");
  }
  double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  sim = std::clamp(sim, -1.0, 1.0);
  return 1.0 - sim;
}

double euclidean_distance(std::span<const double> a,
                          std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "euclidean_distance: length mismatch");
  }
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace tide::core
