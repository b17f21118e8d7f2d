#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annotation/extractor.hpp"
#include "core/types.hpp"
#include "synthbench/manifest.hpp"

namespace tide::annotation {

// One annotated exemplar per class: its dense feature volume plus soft
// per-concept maps in [0,1].
struct ExemplarAnnotation {
  int class_id = -1;
  core::FeatureVolume features;
  std::map<int, core::Map2D> soft_maps;
};

// Exemplar soft-map cells at or above this value take part in the
// correspondence transfer.
constexpr double kExemplarSoftThreshold = 0.5;

// For every exemplar cell with soft value >= 0.5, finds the target cell
// with the highest cosine similarity of feature vectors (ties: row-major
// first occurrence) and returns the union of matched cells.
core::ConceptMask transfer_mask(const ExemplarAnnotation& exemplar,
                                int concept_id,
                                const core::FeatureVolume& target_features);

// Builds an exemplar from a dataset sample: features from the extractor,
// soft maps from the sample's masks.
ExemplarAnnotation make_exemplar(const synthbench::Sample& sample,
                                 const DenseFeatureExtractor& extractor);

struct AnnotationFailure {
  std::string sample_id;
  std::string error;
};

struct AnnotationReport {
  int annotated = 0;
  int cache_hits = 0;
  std::vector<AnnotationFailure> failures;
};

// Rewrites every sample's concept masks with masks transferred from its
// class exemplar, updating the manifest in place (checksums and
// annotation_source included). Per-sample failures are recorded and the
// run continues. Deterministic and idempotent; an optional cache directory
// short-circuits recomputation keyed by (exemplar, image, concept).
AnnotationReport annotate_corpus(
    const std::map<int, ExemplarAnnotation>& exemplars,
    synthbench::Manifest& manifest, const DenseFeatureExtractor& extractor,
    const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

}  // namespace tide::annotation
