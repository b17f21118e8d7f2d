#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "saliency/discovery.hpp"
#include "synthbench/augment.hpp"
#include "synthbench/manifest.hpp"
#include "training/losses.hpp"
#include "training/model.hpp"

namespace tide::training {

struct LossWeights {
  double w_class = 1.0;
  double w_concept = 1.0;
  double w_csa = 1.0;
  double w_lcc = 1.0;
  double margin = 1.0;

  void validate() const {
    if (w_class < 0 || w_concept < 0 || w_csa < 0 || w_lcc < 0) {
      throw Error(ErrorCode::kInvalidConfig, "loss weights must be >= 0");
    }
    if (w_class == 0 && w_concept == 0 && w_csa == 0 && w_lcc == 0) {
      throw Error(ErrorCode::kInvalidConfig,
                  "at least one loss weight must be positive");
    }
    if (margin <= 0) {
      throw Error(ErrorCode::kInvalidConfig, "margin must be positive");
    }
  }

  std::string ablation_label() const;
};

struct TrainConfig {
  LossWeights weights;
  int epochs = 20;
  int batch_size = 32;
  double lr = 1e-4;
  int warmup_steps = 1000;  // linear warm-up, then constant
  int checkpoint_every_epochs = 5;
  std::uint64_t seed = 42;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct StepLog {
  long step = 0;
  double lr = 0.0;
  double total = 0.0;
  double l_class = 0.0;
  double l_concept = 0.0;
  double l_csa = 0.0;
  double l_lcc = 0.0;
};

// Computes the full objective and its parameter gradient for one batch
// without touching optimizer state. Exposed separately so the finite-
// difference checks can drive the exact code path training uses.
struct BatchItem {
  const synthbench::Sample* anchor = nullptr;
  bool has_triplet = false;
  core::Image positive;
  const synthbench::Sample* negative = nullptr;
  int anchor_concept = -1;
  int negative_concept = -1;
};

struct BatchResult {
  double total = 0.0;
  double l_class = 0.0;
  double l_concept = 0.0;
  double l_csa = 0.0;
  double l_lcc = 0.0;
};

BatchResult batch_objective(const TideModel& model, const LossWeights& weights,
                            const saliency::ImportantConceptTable* table,
                            const std::vector<BatchItem>& batch,
                            std::vector<double>* grad /* nullable */);

class Trainer {
 public:
  Trainer(TideModel model, TrainConfig cfg,
          std::optional<saliency::ImportantConceptTable> table,
          std::vector<synthbench::Sample> train_samples,
          std::filesystem::path out_dir, std::string config_hash);

  // Fresh parameter init and RNG streams derived from cfg.seed.
  void init();

  // Runs the remaining epochs, appending one JSONL record per step to
  // <out_dir>/<log_name> and checkpointing to <out_dir>/checkpoint*.json.
  void run(const std::string& log_name,
           const std::function<void(const StepLog&)>& on_step = nullptr);

  void save_checkpoint(const std::filesystem::path& path) const;
  static Trainer load_checkpoint(const std::filesystem::path& path,
                                 std::vector<synthbench::Sample> train_samples,
                                 std::filesystem::path out_dir);

  const TideModel& model() const { return model_; }
  TideModel& model() { return model_; }
  const TrainConfig& config() const { return cfg_; }
  const std::optional<saliency::ImportantConceptTable>& table() const {
    return table_;
  }
  long step() const { return step_; }
  int epoch() const { return epoch_; }
  const std::string& config_hash() const { return config_hash_; }

  double learning_rate(long step) const;

 private:
  void train_epoch(std::ostream& log,
                   const std::function<void(const StepLog&)>& on_step);
  std::vector<BatchItem> assemble_batch(const std::vector<size_t>& indices);
  void adam_step(const std::vector<double>& grad);
  void dump_diagnostics(const std::vector<BatchItem>& batch,
                        const BatchResult& result) const;

  TideModel model_;
  TrainConfig cfg_;
  std::optional<saliency::ImportantConceptTable> table_;
  std::vector<synthbench::Sample> samples_;
  std::filesystem::path out_dir_;
  std::string config_hash_;

  std::vector<double> adam_m_;
  std::vector<double> adam_v_;
  long adam_t_ = 0;
  long step_ = 0;
  int epoch_ = 0;
  std::mt19937_64 data_rng_;
  std::mt19937_64 aug_rng_;
};

// Loads just the model (plus its concept table) from a checkpoint, for
// evaluation and correction.
struct LoadedModel {
  TideModel model;
  saliency::ImportantConceptTable table;
  std::string config_hash;
  LossWeights weights;
};
LoadedModel load_model(const std::filesystem::path& checkpoint_path);

}  // namespace tide::training
