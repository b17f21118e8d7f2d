#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "core/model.hpp"
#include "synthbench/manifest.hpp"

namespace tide::saliency {

struct ClassConcepts {
  int class_id = -1;
  std::vector<int> kept;                 // K_c, ascending concept id
  std::map<int, double> mean_overlap;    // every scored concept, kept or not
  bool fallback_used = false;            // empty K_c kept its top-1 concept
};

struct ImportantConceptTable {
  double tau = 0.5;
  int source_domain = -1;
  std::map<int, ClassConcepts> classes;

  const std::vector<int>& concepts_for(int class_id) const;
  std::vector<int> all_concepts() const;  // union of K_c, ascending

  void save(const std::filesystem::path& path) const;
  static ImportantConceptTable load(const std::filesystem::path& path);
};

// Scores mean class-saliency/GT-mask overlap per (class, concept) over the
// given samples and keeps concepts with mean > tau. Samples lacking a mask
// for a concept contribute zero overlap for it. A class whose K_c comes out
// empty keeps its single best concept so downstream losses never see an
// empty set.
ImportantConceptTable discover_concepts(
    const core::ConceptModel& model,
    const std::vector<const synthbench::SampleRecord*>& records,
    const synthbench::Manifest& manifest, double tau);

}  // namespace tide::saliency
