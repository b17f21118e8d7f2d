#pragma once

#include <filesystem>
#include <random>

#include "synthbench/manifest.hpp"
#include "synthbench/render.hpp"
#include "synthbench/spec.hpp"

namespace tide::synthbench {

// Writes the benchmark to out_dir (images, masks, index.json) and returns
// the manifest. Deterministic given cfg.seed: running twice produces
// byte-identical trees. The index file is written last, atomically.
Manifest generate_dataset(const BenchmarkConfig& cfg,
                          const std::filesystem::path& out_dir);

// Layout for one (class, sample) pair; shared by every domain so masks are
// domain-invariant. Throws GenerationError if primitives cannot be placed
// within the overlap tolerance.
std::vector<PlacedConcept> place_concepts(const BenchmarkConfig& cfg,
                                          const ClassSpec& cls,
                                          std::mt19937_64& layout_rng);

}  // namespace tide::synthbench
