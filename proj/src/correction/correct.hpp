#pragma once

#include <string>
#include <vector>

#include "correction/signatures.hpp"
#include "core/model.hpp"
#include "saliency/discovery.hpp"

namespace tide::correction {

struct CorrectionConfig {
  double delta = 0.1;          // cosine-distance verification threshold
  int max_iterations = 10;     // T
  double binarize_threshold = 0.5;
  bool flag_requires_all = false;  // default: any concept over delta flags

  void validate() const {
    if (delta <= 0.0) {
      throw Error(ErrorCode::kInvalidConfig, "delta must be > 0");
    }
    if (max_iterations < 1) {
      throw Error(ErrorCode::kInvalidConfig, "max_iterations must be >= 1");
    }
    if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "binarize threshold must lie in (0,1)");
    }
  }
};

// Cosine distance treating zero-norm pooled features as maximally distant;
// a vanished concept is evidence of mismatch, never a division by zero.
double verification_distance(std::span<const double> feature,
                             std::span<const double> signature);

struct ConceptDistance {
  int concept_id = -1;
  double distance = 0.0;
};

struct VerifyResult {
  std::vector<ConceptDistance> distances;  // one per k in K_c
  bool flagged = false;
};

// Pools features with the predicted concept saliency maps (GT masks are not
// available at test time), compares against stored signatures.
VerifyResult verify(const core::ConceptModel& model,
                    const core::FeatureVolume& features, int predicted_class,
                    const saliency::ImportantConceptTable& table,
                    const SignatureStore& store, const CorrectionConfig& cfg);

enum class CorrectionOutcome { kNotFlagged, kCorrected, kExhaustedFallback };

const char* outcome_name(CorrectionOutcome o);

struct IterationRecord {
  int t = 0;
  int masked_cells = 0;  // cumulative suppressed feature-grid cells
  int prediction = -1;
  std::vector<ConceptDistance> distances;
};

struct CorrectionTrace {
  std::string sample_id;
  int gt_class = -1;  // optional, for evaluation-mode reports
  int initial = -1;
  int final_class = -1;
  bool flagged = false;
  CorrectionOutcome outcome = CorrectionOutcome::kNotFlagged;
  int corrected_at = -1;
  std::vector<ConceptDistance> verify_distances;
  std::vector<IterationRecord> iterations;
};

// Algorithm: cumulatively suppress the binarized class-saliency cells of
// the current prediction, re-predict on the masked image, and accept the
// first prediction whose concept features align with the signatures within
// delta. Falls back to the initial prediction after max_iterations (or as
// soon as every cell is suppressed).
CorrectionTrace correct(const core::ConceptModel& model,
                        const core::Image& image, int initial_class,
                        const saliency::ImportantConceptTable& table,
                        const SignatureStore& store,
                        const CorrectionConfig& cfg);

// Full pipeline for one image: predict, verify, correct when flagged.
// Unflagged predictions pass through untouched.
CorrectionTrace predict_with_correction(
    const core::ConceptModel& model, const core::Image& image,
    const saliency::ImportantConceptTable& table, const SignatureStore& store,
    const CorrectionConfig& cfg);

struct CorrectionReport {
  int total = 0;
  int unflagged = 0;
  double fraction_unflagged = 0.0;
  double precision_unflagged = 0.0;  // accuracy of unflagged predictions
  int flagged = 0;
  double fraction_flagged_converged = 0.0;  // flagged traces ending correct
  double accuracy_pre = 0.0;
  double accuracy_post = 0.0;
};

// Requires traces carrying ground-truth labels. Throws EmptyReport on an
// empty trace set.
CorrectionReport correction_report(const std::vector<CorrectionTrace>& traces);

}  // namespace tide::correction
