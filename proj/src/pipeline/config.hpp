#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "annotation/extractor.hpp"
#include "annotation/provider.hpp"
#include "correction/correct.hpp"
#include "synthbench/spec.hpp"
#include "training/trainer.hpp"

namespace tide::pipeline {

// One structured config drives every stage; science parameters live here,
// command-line flags only override paths, seeds, and ablation toggles.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string out_dir = "runs/default";
  std::string dataset_dir;  // defaults to <out_dir>/dataset

  synthbench::BenchmarkConfig benchmark =
      synthbench::BenchmarkConfig::default_benchmark();

  annotation::ProviderConfig provider;
  annotation::ExtractorConfig extractor;
  bool annotation_cache = true;
  int exemplar_domain = 0;

  double tau = 0.5;
  training::TrainConfig discovery_train;  // weights are forced to class-only

  training::ModelConfig model;  // class/concept counts filled per dataset
  training::TrainConfig train;
  std::vector<int> source_domains = {0};

  correction::CorrectionConfig correction;

  std::string eval_split = "test";
  std::vector<int> target_domains;  // empty: all non-source domains
  std::string export_pooling = "mask";  // "mask" | "saliency"

  static RunConfig defaults();
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  void validate() const;
  std::string hash() const;

  std::filesystem::path dataset_path() const;
  std::filesystem::path run_dir(int source_domain,
                                const std::string& ablation_suffix = "") const;

  // Writes the fully resolved config next to the outputs.
  void write_resolved() const;
};

// Applies "--ablate k|csa|lcc" toggles to the training weights.
void apply_ablations(RunConfig& cfg, const std::vector<std::string>& ablate);

}  // namespace tide::pipeline
