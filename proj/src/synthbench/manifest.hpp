#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/types.hpp"
#include "synthbench/spec.hpp"

namespace tide::synthbench {

// On-disk dataset layout:
//   <dir>/index.json           manifest (schema below)
//   <dir>/images/<...>.ppm     one lossless 8-bit PPM per sample
//   <dir>/masks/<...>.pgm      one {0,255} PGM per (sample, concept)
//
// index.json fields: format, version, seed, image_size, mask_grid,
// annotation_source, concepts[], classes[], domains[], samples[].
// Sample records: id, domain, class, split, concepts[], image,
// image_checksum, masks{concept->path}, mask_checksums{concept->checksum}.

struct SampleRecord {
  std::string id;
  int domain = -1;
  int class_id = -1;
  std::string split;  // "train" | "test"
  std::vector<int> concepts;
  std::string image_path;  // relative to the dataset dir
  std::string image_checksum;
  std::map<int, std::string> mask_paths;
  std::map<int, std::string> mask_checksums;
};

// A fully loaded sample.
struct Sample {
  std::string id;
  int domain = -1;
  int class_id = -1;
  std::string split;
  std::vector<int> concepts;
  core::Image image;
  std::map<int, core::ConceptMask> masks;
};

struct Manifest {
  int version = 1;
  std::uint64_t seed = 0;
  int image_size = 0;
  int mask_grid = 0;
  std::string annotation_source = "generator";
  std::vector<ConceptSpec> concepts;
  std::vector<ClassSpec> classes;
  std::vector<DomainStyle> domains;
  std::vector<SampleRecord> records;
  std::filesystem::path dir;  // set on load/save; not serialized

  static Manifest load(const std::filesystem::path& dir);
  void save() const;  // writes index.json atomically (temp + rename)

  const ClassSpec& class_spec(int class_id) const;
  const ConceptSpec& concept_spec(int concept_id) const;
  const DomainStyle& domain_style(int domain_id) const;
  std::optional<int> domain_id_by_name(const std::string& name) const;

  // Records in index order, optionally restricted by domain and/or split.
  std::vector<const SampleRecord*> select(
      std::optional<int> domain = std::nullopt,
      std::optional<std::string> split = std::nullopt) const;
};

// Loads one sample, verifying file checksums against the manifest.
Sample load_sample(const Manifest& m, const SampleRecord& rec);

// Lazy iteration in index order with optional domain/split filters.
void for_each_sample(const Manifest& m,
                     const std::function<void(const Sample&)>& fn,
                     std::optional<int> domain = std::nullopt,
                     std::optional<std::string> split = std::nullopt);

}  // namespace tide::synthbench
