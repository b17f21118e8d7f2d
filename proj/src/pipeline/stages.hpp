#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pipeline/config.hpp"

namespace tide::pipeline {

// Each stage returns a JSON summary (the CLI prints it) and writes its
// artifacts under the run's output directory.

nlohmann::json run_generate(const RunConfig& cfg);
nlohmann::json run_annotate(const RunConfig& cfg);
nlohmann::json run_discover(const RunConfig& cfg);
nlohmann::json run_train(const RunConfig& cfg);
nlohmann::json run_evaluate(const RunConfig& cfg, bool with_correction);
nlohmann::json run_correct(const RunConfig& cfg);
nlohmann::json run_overlay(const RunConfig& cfg,
                           const std::vector<std::string>& sample_ids);
nlohmann::json run_export_features(const RunConfig& cfg,
                                   const std::string& split);
nlohmann::json run_report(const RunConfig& cfg,
                          const std::string& traces_path);

// The ablation suffix ("" for the full objective) naming a run directory.
std::string ablation_suffix(const training::LossWeights& weights);

}  // namespace tide::pipeline
