#include "correction/correct.hpp"

#include <algorithm>
#include <cmath>

#include "core/image.hpp"
#include "core/ops.hpp"
#include "saliency/gradcam.hpp"
#include "training/losses.hpp"

namespace tide::correction {

const char* outcome_name(CorrectionOutcome o) {
  switch (o) {
    case CorrectionOutcome::kNotFlagged: return "not-flagged";
    case CorrectionOutcome::kCorrected: return "corrected-at-t";
    case CorrectionOutcome::kExhaustedFallback: return "exhausted-fallback";
  }
  return "not-flagged";
}

double verification_distance(std::span<const double> feature,
                             std::span<const double> signature) {
  try {
    return core::cosine_distance(feature, signature);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kZeroNorm) return 2.0;
    throw;
  }
}

namespace {

std::vector<ConceptDistance> concept_distances(
    const core::ConceptModel& model, const core::FeatureVolume& features,
    int predicted_class, const saliency::ImportantConceptTable& table,
    const SignatureStore& store) {
  std::vector<ConceptDistance> out;
  for (int k : table.concepts_for(predicted_class)) {
    auto cam = saliency::concept_saliency(model, features, k);
    auto pooled = training::pooled_feature(features, cam.map.map);
    out.push_back({k, verification_distance(pooled, store.at(k).v)});
  }
  return out;
}

bool is_flagged(const std::vector<ConceptDistance>& distances,
                const CorrectionConfig& cfg) {
  if (distances.empty()) return false;
  if (cfg.flag_requires_all) {
    return std::all_of(distances.begin(), distances.end(),
                       [&](const ConceptDistance& d) {
                         return d.distance > cfg.delta;
                       });
  }
  return std::any_of(distances.begin(), distances.end(),
                     [&](const ConceptDistance& d) {
                       return d.distance > cfg.delta;
                     });
}

// Zeroes the suppressed feature-grid cells in the original image, with
// nearest-neighbor replication of the complement mask up to image size.
core::Image apply_suppression(const core::Image& original,
                              const core::ConceptMask& suppressed) {
  core::Image out = original;
  for (int y = 0; y < out.h; ++y) {
    int gy = std::min(suppressed.h - 1, y * suppressed.h / out.h);
    for (int x = 0; x < out.w; ++x) {
      int gx = std::min(suppressed.w - 1, x * suppressed.w / out.w);
      if (suppressed.at(gx, gy)) {
        out.at(x, y, 0) = 0.0;
        out.at(x, y, 1) = 0.0;
        out.at(x, y, 2) = 0.0;
      }
    }
  }
  return out;
}

}  // namespace

VerifyResult verify(const core::ConceptModel& model,
                    const core::FeatureVolume& features, int predicted_class,
                    const saliency::ImportantConceptTable& table,
                    const SignatureStore& store, const CorrectionConfig& cfg) {
  cfg.validate();
  VerifyResult out;
  out.distances =
      concept_distances(model, features, predicted_class, table, store);
  out.flagged = is_flagged(out.distances, cfg);
  return out;
}

CorrectionTrace correct(const core::ConceptModel& model,
                        const core::Image& image, int initial_class,
                        const saliency::ImportantConceptTable& table,
                        const SignatureStore& store,
                        const CorrectionConfig& cfg) {
  cfg.validate();
  CorrectionTrace trace;
  trace.initial = initial_class;
  trace.flagged = true;
  trace.final_class = initial_class;
  trace.outcome = CorrectionOutcome::kExhaustedFallback;

  auto features = model.features(image);
  auto class_cam = saliency::class_saliency(model, features, initial_class);

  core::ConceptMask suppressed(class_cam.map.map.w, class_cam.map.map.h, -1);
  const int total_cells = suppressed.w * suppressed.h;
  int current_class = initial_class;

  for (int t = 1; t <= cfg.max_iterations; ++t) {
    // Cumulative suppression: cells once masked stay masked.
    auto mask = core::binarize(class_cam.map, cfg.binarize_threshold);
    for (size_t i = 0; i < suppressed.v.size(); ++i) {
      suppressed.v[i] = suppressed.v[i] || mask.v[i] ? 1 : 0;
    }
    const int masked_cells = suppressed.count();
    if (masked_cells >= total_cells) {
      // Nothing left to look at; early exhaustion.
      trace.iterations.push_back({t, masked_cells, current_class, {}});
      break;
    }

    auto masked_image = apply_suppression(image, suppressed);
    auto masked_features = model.features(masked_image);
    auto logits = model.class_logits(masked_features);
    current_class = core::argmax_index(logits);
    class_cam = saliency::class_saliency(model, masked_features, current_class);

    IterationRecord rec;
    rec.t = t;
    rec.masked_cells = masked_cells;
    rec.prediction = current_class;
    rec.distances =
        concept_distances(model, masked_features, current_class, table, store);
    trace.iterations.push_back(rec);

    for (const auto& d : rec.distances) {
      if (d.distance <= cfg.delta) {
        trace.final_class = current_class;
        trace.outcome = CorrectionOutcome::kCorrected;
        trace.corrected_at = t;
        return trace;
      }
    }
  }
  return trace;
}

CorrectionTrace predict_with_correction(
    const core::ConceptModel& model, const core::Image& image,
    const saliency::ImportantConceptTable& table, const SignatureStore& store,
    const CorrectionConfig& cfg) {
  auto features = model.features(image);
  auto logits = model.class_logits(features);
  const int predicted = core::argmax_index(logits);

  auto vr = verify(model, features, predicted, table, store, cfg);
  if (!vr.flagged) {
    CorrectionTrace trace;
    trace.initial = predicted;
    trace.final_class = predicted;
    trace.flagged = false;
    trace.outcome = CorrectionOutcome::kNotFlagged;
    trace.verify_distances = std::move(vr.distances);
    return trace;
  }
  auto trace = correct(model, image, predicted, table, store, cfg);
  trace.verify_distances = std::move(vr.distances);
  return trace;
}

CorrectionReport correction_report(
    const std::vector<CorrectionTrace>& traces) {
  if (traces.empty()) {
    throw Error(ErrorCode::kEmptyReport, "no correction traces");
  }
  CorrectionReport r;
  r.total = static_cast<int>(traces.size());
  int unflagged_correct = 0;
  int flagged_converged = 0;
  int pre_correct = 0;
  int post_correct = 0;
  for (const auto& t : traces) {
    if (t.gt_class < 0) {
      throw Error(ErrorCode::kInvalidInput,
                  "correction_report needs ground-truth labels on traces");
    }
    const bool pre_ok = t.initial == t.gt_class;
    const bool post_ok = t.final_class == t.gt_class;
    pre_correct += pre_ok ? 1 : 0;
    post_correct += post_ok ? 1 : 0;
    if (!t.flagged) {
      ++r.unflagged;
      unflagged_correct += pre_ok ? 1 : 0;
    } else {
      ++r.flagged;
      flagged_converged += post_ok ? 1 : 0;
    }
  }
  r.fraction_unflagged = static_cast<double>(r.unflagged) / r.total;
  r.precision_unflagged =
      r.unflagged > 0
          ? static_cast<double>(unflagged_correct) / r.unflagged
          : 0.0;
  r.fraction_flagged_converged =
      r.flagged > 0 ? static_cast<double>(flagged_converged) / r.flagged : 0.0;
  r.accuracy_pre = static_cast<double>(pre_correct) / r.total;
  r.accuracy_post = static_cast<double>(post_correct) / r.total;
  return r;
}

}  // namespace tide::correction
