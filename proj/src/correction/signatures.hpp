#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "core/model.hpp"
#include "synthbench/manifest.hpp"

namespace tide::correction {

// Concept signatures: per concept, the mean of GT-mask-pooled feature
// vectors over the source-domain samples containing the concept. Immutable
// after construction.
struct SignatureStore {
  std::map<int, core::Signature> signatures;
  int source_domain = -1;
  std::string model_hash;
  std::string config_hash;

  const core::Signature& at(int concept_id) const;

  void save(const std::filesystem::path& path) const;
  static SignatureStore load(const std::filesystem::path& path);
};

// Builds signatures for `concepts` from the given samples. Throws
// MissingConceptSupport if some requested concept never occurs.
SignatureStore build_signatures(
    const core::ConceptModel& model,
    const std::vector<const synthbench::SampleRecord*>& records,
    const synthbench::Manifest& manifest, const std::vector<int>& concepts);

}  // namespace tide::correction
