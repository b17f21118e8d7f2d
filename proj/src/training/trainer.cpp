#include "training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace tide::training {

using nlohmann::json;

std::string LossWeights::ablation_label() const {
  std::string label;
  if (w_class > 0) label += "Lc";
  if (w_concept > 0) label += label.empty() ? "Lk" : "+Lk";
  if (w_csa > 0) label += label.empty() ? "Lcsa" : "+Lcsa";
  if (w_lcc > 0) label += label.empty() ? "Llcc" : "+Llcc";
  return label;
}

namespace {

// CSA forward/backward for one concept: the saliency map is recomputed from
// the concept head row each step and gradients flow through both the ReLU
// and the min-max normalization, reaching the features and the head row.
struct CsaConceptResult {
  double squared_error = 0.0;
};

CsaConceptResult csa_concept_pass(const TideModel& model,
                                  const core::FeatureVolume& feat, int concept,
                                  const core::ConceptMask& mask,
                                  double upstream_scale,
                                  core::FeatureVolume* d_feat,
                                  std::vector<double>* grad) {
  const int W = feat.w, H = feat.h, C = feat.c;
  const int cells = W * H;
  const double inv_cells = 1.0 / cells;
  const auto row = model.concept_head_row(concept);

  // Raw map A and rectified map R.
  std::vector<double> a(static_cast<size_t>(cells));
  std::vector<double> r(static_cast<size_t>(cells));
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double* fp = feat.cell(x, y);
      double acc = 0.0;
      for (int l = 0; l < C; ++l) acc += row[static_cast<size_t>(l)] * fp[l];
      const size_t i = static_cast<size_t>(y) * W + x;
      a[i] = acc * inv_cells;
      r[i] = std::max(0.0, a[i]);
    }
  }

  // First-min / last-max, matching std::minmax_element.
  size_t amin = 0, amax = 0;
  for (size_t i = 1; i < r.size(); ++i) {
    if (r[i] < r[amin]) amin = i;
    if (r[i] >= r[amax]) amax = i;
  }
  const double m = r[amin], M = r[amax];
  const bool degenerate = !(M > m);

  std::vector<double> s(static_cast<size_t>(cells), 0.0);
  if (!degenerate) {
    const double inv_range = 1.0 / (M - m);
    for (size_t i = 0; i < s.size(); ++i) s[i] = (r[i] - m) * inv_range;
  }

  CsaConceptResult out;
  for (size_t i = 0; i < s.size(); ++i) {
    const double d = s[i] - (mask.v[i] ? 1.0 : 0.0);
    out.squared_error += d * d;
  }

  if (!d_feat || !grad || degenerate) return out;

  // dL/dS, then back through normalization: for the min cell subtract the
  // total upstream sum, for the max cell subtract the S-weighted sum.
  std::vector<double> u(s.size());
  double u_sum = 0.0, us_sum = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    u[i] = upstream_scale * 2.0 * (s[i] - (mask.v[i] ? 1.0 : 0.0));
    u_sum += u[i];
    us_sum += u[i] * s[i];
  }
  const double inv_range = 1.0 / (M - m);
  std::vector<double> dr(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    double d = u[i];
    if (i == amax) d -= us_sum;
    if (i == amin) d -= u_sum - us_sum;
    dr[i] = d * inv_range;
  }

  // Through the ReLU, then into features and the concept head row.
  double* grow = grad->data() + model.concept_head_row_offset(concept);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const size_t i = static_cast<size_t>(y) * W + x;
      if (a[i] <= 0.0) continue;
      const double da = dr[i] * inv_cells;
      if (da == 0.0) continue;
      const double* fp = feat.cell(x, y);
      double* dfp = d_feat->cell(x, y);
      for (int l = 0; l < C; ++l) {
        dfp[l] += da * row[static_cast<size_t>(l)];
        grow[l] += da * fp[l];
      }
    }
  }
  return out;
}

std::vector<int> csa_concepts_for(const saliency::ImportantConceptTable& table,
                                  const synthbench::Sample& sample) {
  std::vector<int> out;
  auto it = table.classes.find(sample.class_id);
  if (it == table.classes.end()) return out;
  for (int k : it->second.kept) {
    if (sample.masks.count(k)) out.push_back(k);
  }
  return out;
}

}  // namespace

BatchResult batch_objective(const TideModel& model, const LossWeights& weights,
                            const saliency::ImportantConceptTable* table,
                            const std::vector<BatchItem>& batch,
                            std::vector<double>* grad) {
  if (batch.empty()) {
    throw Error(ErrorCode::kInvalidInput, "empty batch");
  }
  if ((weights.w_csa > 0 || weights.w_lcc > 0) && table == nullptr) {
    throw Error(ErrorCode::kInvalidConfig,
                "CSA/LCC losses require a discovery table");
  }
  const size_t P = model.param_count();
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  struct PerSample {
    BatchResult r;
    std::vector<double> grad;
  };
  std::vector<PerSample> partials(batch.size());

#pragma omp parallel for schedule(dynamic)
  for (long bi = 0; bi < static_cast<long>(batch.size()); ++bi) {
    const BatchItem& item = batch[static_cast<size_t>(bi)];
    const synthbench::Sample& anchor = *item.anchor;
    PerSample ps;
    if (grad) ps.grad.assign(P, 0.0);

    auto fc = model.forward(anchor.image);
    core::FeatureVolume d_feat(fc.feat.w, fc.feat.h, fc.feat.c, 0.0);
    std::vector<double> d_class;
    std::vector<double> d_concept;

    if (weights.w_class > 0) {
      auto cl = class_loss_grad(fc.class_logits, anchor.class_id);
      ps.r.l_class = cl.loss;
      if (grad) {
        d_class = std::move(cl.d_logits);
        for (double& g : d_class) g *= weights.w_class * inv_b;
      }
    }

    if (weights.w_concept > 0) {
      std::vector<std::uint8_t> presence(
          static_cast<size_t>(model.num_concepts()), 0);
      for (int k : anchor.concepts) presence[static_cast<size_t>(k)] = 1;
      auto kl = concept_loss_grad(fc.concept_logits, presence);
      ps.r.l_concept = kl.loss;
      if (grad) {
        d_concept = std::move(kl.d_scores);
        for (double& g : d_concept) g *= weights.w_concept * inv_b;
      }
    }

    if (weights.w_csa > 0) {
      auto kset = csa_concepts_for(*table, anchor);
      if (!kset.empty()) {
        const double inv_k = 1.0 / static_cast<double>(kset.size());
        double sq_total = 0.0;
        for (int k : kset) {
          auto res = csa_concept_pass(
              model, fc.feat, k, anchor.masks.at(k),
              weights.w_csa * inv_b * inv_k, grad ? &d_feat : nullptr,
              grad ? &ps.grad : nullptr);
          sq_total += res.squared_error;
        }
        ps.r.l_csa = sq_total * inv_k;
      }
    }

    if (weights.w_lcc > 0 && item.has_triplet) {
      auto fc_pos = model.forward(item.positive);
      auto fc_neg = model.forward(item.negative->image);
      const auto& g_anchor = anchor.masks.at(item.anchor_concept);
      const auto& g_neg = item.negative->masks.at(item.negative_concept);
      auto f_a = concept_feature(fc.feat, g_anchor);
      auto f_p = concept_feature(fc_pos.feat, g_anchor);
      auto f_n = concept_feature(fc_neg.feat, g_neg);
      auto lg = lcc_loss_grad(f_a.v, f_p.v, f_n.v, weights.margin);
      ps.r.l_lcc = lg.loss;
      if (grad && lg.loss > 0.0) {
        const double scale = weights.w_lcc * inv_b;
        core::FeatureVolume d_pos(fc.feat.w, fc.feat.h, fc.feat.c, 0.0);
        core::FeatureVolume d_neg(fc.feat.w, fc.feat.h, fc.feat.c, 0.0);
        for (int y = 0; y < fc.feat.h; ++y) {
          for (int x = 0; x < fc.feat.w; ++x) {
            if (g_anchor.at(x, y)) {
              double* da = d_feat.cell(x, y);
              double* dp = d_pos.cell(x, y);
              for (int l = 0; l < fc.feat.c; ++l) {
                da[l] += scale * lg.d_anchor[static_cast<size_t>(l)];
                dp[l] += scale * lg.d_positive[static_cast<size_t>(l)];
              }
            }
            if (g_neg.at(x, y)) {
              double* dn = d_neg.cell(x, y);
              for (int l = 0; l < fc.feat.c; ++l) {
                dn[l] += scale * lg.d_negative[static_cast<size_t>(l)];
              }
            }
          }
        }
        model.backward(fc_pos, d_pos, {}, {}, ps.grad);
        model.backward(fc_neg, d_neg, {}, {}, ps.grad);
      }
    }

    if (grad) {
      model.backward(fc, d_feat, d_class, d_concept, ps.grad);
    }
    partials[static_cast<size_t>(bi)] = std::move(ps);
  }

  // Deterministic reduction in batch order regardless of thread schedule.
  BatchResult total;
  if (grad) grad->assign(P, 0.0);
  for (const auto& ps : partials) {
    total.l_class += ps.r.l_class * inv_b;
    total.l_concept += ps.r.l_concept * inv_b;
    total.l_csa += ps.r.l_csa * inv_b;
    total.l_lcc += ps.r.l_lcc * inv_b;
    if (grad) {
      for (size_t i = 0; i < P; ++i) (*grad)[i] += ps.grad[i];
    }
  }
  total.total = weights.w_class * total.l_class +
                weights.w_concept * total.l_concept +
                weights.w_csa * total.l_csa + weights.w_lcc * total.l_lcc;
  return total;
}

Trainer::Trainer(TideModel model, TrainConfig cfg,
                 std::optional<saliency::ImportantConceptTable> table,
                 std::vector<synthbench::Sample> train_samples,
                 std::filesystem::path out_dir, std::string config_hash)
    : model_(std::move(model)),
      cfg_(cfg),
      table_(std::move(table)),
      samples_(std::move(train_samples)),
      out_dir_(std::move(out_dir)),
      config_hash_(std::move(config_hash)) {
  cfg_.weights.validate();
  if (cfg_.batch_size < 1 || cfg_.epochs < 0 || cfg_.lr <= 0 ||
      cfg_.warmup_steps < 1) {
    throw Error(ErrorCode::kInvalidConfig, "bad training configuration");
  }
  if ((cfg_.weights.w_csa > 0 || cfg_.weights.w_lcc > 0) && !table_) {
    throw Error(ErrorCode::kInvalidConfig,
                "CSA/LCC training requires a discovery table");
  }
  if (cfg_.weights.w_csa > 0 || cfg_.weights.w_lcc > 0) {
    for (const auto& s : samples_) {
      if (s.masks.empty()) {
        throw Error(ErrorCode::kInvalidConfig,
                    "CSA/LCC training requires GT masks; sample " + s.id +
                        " has none");
      }
    }
  }
  adam_m_.assign(model_.param_count(), 0.0);
  adam_v_.assign(model_.param_count(), 0.0);
}

void Trainer::init() {
  auto init_rng = util::rng_stream(cfg_.seed, {0x494e4954ull});
  model_.init_params(init_rng);
  data_rng_ = util::rng_stream(cfg_.seed, {0x44415441ull});
  aug_rng_ = util::rng_stream(cfg_.seed, {0x41554731ull});
  adam_m_.assign(model_.param_count(), 0.0);
  adam_v_.assign(model_.param_count(), 0.0);
  adam_t_ = 0;
  step_ = 0;
  epoch_ = 0;
}

double Trainer::learning_rate(long step) const {
  const double warm =
      std::min(1.0, static_cast<double>(step + 1) / cfg_.warmup_steps);
  return cfg_.lr * warm;
}

std::vector<BatchItem> Trainer::assemble_batch(
    const std::vector<size_t>& indices) {
  std::vector<BatchItem> batch;
  batch.reserve(indices.size());
  for (size_t idx : indices) {
    BatchItem item;
    item.anchor = &samples_[idx];
    batch.push_back(std::move(item));
  }
  if (cfg_.weights.w_lcc <= 0) return batch;

  // Triplets are drawn sequentially in batch order so RNG consumption does
  // not depend on worker scheduling.
  for (size_t bi = 0; bi < batch.size(); ++bi) {
    BatchItem& item = batch[bi];
    const synthbench::Sample& anchor = *item.anchor;
    std::vector<int> candidates;
    if (table_) {
      candidates = csa_concepts_for(*table_, anchor);
    }
    if (candidates.empty()) continue;

    std::vector<const synthbench::Sample*> pool;
    for (size_t bj = 0; bj < batch.size(); ++bj) {
      if (bj != bi) pool.push_back(batch[bj].anchor);
    }
    try {
      auto t = synthbench::augment_triplet(anchor, pool, aug_rng_, candidates);
      item.has_triplet = true;
      item.positive = std::move(t.positive);
      item.negative = t.negative;
      item.anchor_concept = t.anchor_concept;
      item.negative_concept = t.negative_concept;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTripletExhausted) throw;
      // No in-batch negative this time; the anchor trains without LCC.
    }
  }
  return batch;
}

void Trainer::adam_step(const std::vector<double>& grad) {
  ++adam_t_;
  const double lr = learning_rate(step_);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, adam_t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, adam_t_);
  auto& p = model_.params();
  for (size_t i = 0; i < p.size(); ++i) {
    adam_m_[i] = cfg_.beta1 * adam_m_[i] + (1.0 - cfg_.beta1) * grad[i];
    adam_v_[i] = cfg_.beta2 * adam_v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    const double mhat = adam_m_[i] / bc1;
    const double vhat = adam_v_[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
  }
}

void Trainer::dump_diagnostics(const std::vector<BatchItem>& batch,
                               const BatchResult& result) const {
  json j;
  j["step"] = step_;
  j["epoch"] = epoch_;
  j["loss"] = {{"total", result.total},
               {"class", result.l_class},
               {"concept", result.l_concept},
               {"csa", result.l_csa},
               {"lcc", result.l_lcc}};
  j["batch"] = json::array();
  for (const auto& item : batch) {
    j["batch"].push_back(item.anchor->id);
  }
  std::ofstream out(out_dir_ / "diagnostic_dump.json");
  out << j.dump(1) << "\n";
}

void Trainer::train_epoch(std::ostream& log,
                          const std::function<void(const StepLog&)>& on_step) {
  std::vector<size_t> order(samples_.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), data_rng_);

  for (size_t start = 0; start < order.size(); start += cfg_.batch_size) {
    const size_t end =
        std::min(order.size(), start + static_cast<size_t>(cfg_.batch_size));
    std::vector<size_t> indices(order.begin() + static_cast<long>(start),
                                order.begin() + static_cast<long>(end));
    auto batch = assemble_batch(indices);

    std::vector<double> grad;
    auto result = batch_objective(model_, cfg_.weights,
                                  table_ ? &*table_ : nullptr, batch, &grad);
    if (!std::isfinite(result.total)) {
      dump_diagnostics(batch, result);
      throw Error(ErrorCode::kRuntime,
                  "non-finite loss at step " + std::to_string(step_) +
                      "; batch dumped to diagnostic_dump.json");
    }

    adam_step(grad);
    ++step_;

    StepLog sl{step_,        learning_rate(step_ - 1),
               result.total, result.l_class,
               result.l_concept, result.l_csa,
               result.l_lcc};
    json line{{"step", sl.step},   {"lr", sl.lr},
              {"loss", sl.total},  {"l_class", sl.l_class},
              {"l_concept", sl.l_concept}, {"l_csa", sl.l_csa},
              {"l_lcc", sl.l_lcc}};
    log << line.dump() << "\n";
    if (on_step) on_step(sl);
  }
  log.flush();
}

void Trainer::run(const std::string& log_name,
                  const std::function<void(const StepLog&)>& on_step) {
  std::filesystem::create_directories(out_dir_);
  std::ofstream log(out_dir_ / log_name, std::ios::app);
  if (!log) {
    throw Error(ErrorCode::kIo,
                "cannot open training log in " + out_dir_.string());
  }
  while (epoch_ < cfg_.epochs) {
    train_epoch(log, on_step);
    ++epoch_;
    const bool periodic = cfg_.checkpoint_every_epochs > 0 &&
                          epoch_ % cfg_.checkpoint_every_epochs == 0;
    if (periodic && epoch_ < cfg_.epochs) {
      save_checkpoint(out_dir_ /
                      ("checkpoint_e" + std::to_string(epoch_) + ".json"));
    }
  }
  save_checkpoint(out_dir_ / "checkpoint.json");
}

namespace {

std::string rng_to_string(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

std::mt19937_64 rng_from_string(const std::string& s) {
  std::mt19937_64 rng;
  std::istringstream is(s);
  is >> rng;
  return rng;
}

json weights_to_json(const LossWeights& w) {
  return json{{"class", w.w_class},
              {"concept", w.w_concept},
              {"csa", w.w_csa},
              {"lcc", w.w_lcc},
              {"margin", w.margin}};
}

LossWeights weights_from_json(const json& j) {
  LossWeights w;
  w.w_class = j.at("class").get<double>();
  w.w_concept = j.at("concept").get<double>();
  w.w_csa = j.at("csa").get<double>();
  w.w_lcc = j.at("lcc").get<double>();
  w.margin = j.at("margin").get<double>();
  return w;
}

json table_to_json(const saliency::ImportantConceptTable& t) {
  json classes = json::array();
  for (const auto& [cid, entry] : t.classes) {
    json overlaps = json::object();
    for (const auto& [k, v] : entry.mean_overlap) {
      overlaps[std::to_string(k)] = v;
    }
    classes.push_back(json{{"class", cid},
                           {"kept", entry.kept},
                           {"fallback_used", entry.fallback_used},
                           {"mean_overlap", overlaps}});
  }
  return json{{"tau", t.tau},
              {"source_domain", t.source_domain},
              {"classes", classes}};
}

saliency::ImportantConceptTable table_from_json(const json& j) {
  saliency::ImportantConceptTable t;
  t.tau = j.at("tau").get<double>();
  t.source_domain = j.at("source_domain").get<int>();
  for (const auto& cj : j.at("classes")) {
    saliency::ClassConcepts entry;
    entry.class_id = cj.at("class").get<int>();
    entry.kept = cj.at("kept").get<std::vector<int>>();
    entry.fallback_used = cj.at("fallback_used").get<bool>();
    for (auto it = cj.at("mean_overlap").begin();
         it != cj.at("mean_overlap").end(); ++it) {
      entry.mean_overlap[std::stoi(it.key())] = it.value().get<double>();
    }
    t.classes[entry.class_id] = std::move(entry);
  }
  return t;
}

json model_arch_json(const ModelConfig& mc) {
  json blocks = json::array();
  for (const auto& b : mc.blocks) {
    blocks.push_back(json{{"out", b.out_channels}, {"pool", b.pool}});
  }
  return json{{"image_size", mc.image_size},
              {"blocks", blocks},
              {"num_classes", mc.num_classes},
              {"num_concepts", mc.num_concepts}};
}

ModelConfig model_arch_from_json(const json& j) {
  ModelConfig mc;
  mc.image_size = j.at("image_size").get<int>();
  mc.blocks.clear();
  for (const auto& bj : j.at("blocks")) {
    mc.blocks.push_back(
        {bj.at("out").get<int>(), bj.at("pool").get<bool>()});
  }
  mc.num_classes = j.at("num_classes").get<int>();
  mc.num_concepts = j.at("num_concepts").get<int>();
  return mc;
}

json slices_to_json(const TideModel& model, const std::vector<double>& flat) {
  json out = json::object();
  for (const auto& slice : model.param_layout()) {
    out[slice.name] = std::vector<double>(
        flat.begin() + static_cast<long>(slice.offset),
        flat.begin() + static_cast<long>(slice.offset + slice.size));
  }
  return out;
}

void slices_from_json(const TideModel& model, const json& j,
                      std::vector<double>& flat) {
  for (const auto& slice : model.param_layout()) {
    auto values = j.at(slice.name).get<std::vector<double>>();
    if (values.size() != slice.size) {
      throw Error(ErrorCode::kInvalidInput,
                  "checkpoint slice size mismatch: " + slice.name);
    }
    std::copy(values.begin(), values.end(),
              flat.begin() + static_cast<long>(slice.offset));
  }
}

}  // namespace

void Trainer::save_checkpoint(const std::filesystem::path& path) const {
  json j;
  j["format"] = "tide-checkpoint";
  j["version"] = 1;
  j["config_hash"] = config_hash_;
  j["step"] = step_;
  j["epoch"] = epoch_;
  j["arch"] = model_arch_json(model_.config());
  j["train"] = {{"epochs", cfg_.epochs},
                {"batch_size", cfg_.batch_size},
                {"lr", cfg_.lr},
                {"warmup_steps", cfg_.warmup_steps},
                {"checkpoint_every_epochs", cfg_.checkpoint_every_epochs},
                {"seed", cfg_.seed},
                {"weights", weights_to_json(cfg_.weights)}};
  j["params"] = slices_to_json(model_, model_.params());
  j["adam"] = {{"t", adam_t_},
               {"m", slices_to_json(model_, adam_m_)},
               {"v", slices_to_json(model_, adam_v_)}};
  j["rng"] = {{"data", rng_to_string(data_rng_)},
              {"aug", rng_to_string(aug_rng_)}};
  if (table_) {
    j["concept_table"] = table_to_json(*table_);
  }

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << j.dump() << "\n";
    if (!out) throw Error(ErrorCode::kIo, "short write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

Trainer Trainer::load_checkpoint(const std::filesystem::path& path,
                                 std::vector<synthbench::Sample> train_samples,
                                 std::filesystem::path out_dir) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j;
  in >> j;
  if (j.at("format").get<std::string>() != "tide-checkpoint") {
    throw Error(ErrorCode::kInvalidInput, "not a checkpoint: " + path.string());
  }

  ModelConfig mc = model_arch_from_json(j.at("arch"));
  TideModel model(mc);
  slices_from_json(model, j.at("params"), model.params());

  TrainConfig cfg;
  const auto& tj = j.at("train");
  cfg.epochs = tj.at("epochs").get<int>();
  cfg.batch_size = tj.at("batch_size").get<int>();
  cfg.lr = tj.at("lr").get<double>();
  cfg.warmup_steps = tj.at("warmup_steps").get<int>();
  cfg.checkpoint_every_epochs = tj.at("checkpoint_every_epochs").get<int>();
  cfg.seed = tj.at("seed").get<std::uint64_t>();
  cfg.weights = weights_from_json(tj.at("weights"));

  std::optional<saliency::ImportantConceptTable> table;
  if (j.contains("concept_table")) {
    table = table_from_json(j.at("concept_table"));
  }

  Trainer t(std::move(model), cfg, std::move(table), std::move(train_samples),
            std::move(out_dir), j.at("config_hash").get<std::string>());
  slices_from_json(t.model_, j.at("adam").at("m"), t.adam_m_);
  slices_from_json(t.model_, j.at("adam").at("v"), t.adam_v_);
  t.adam_t_ = j.at("adam").at("t").get<long>();
  t.step_ = j.at("step").get<long>();
  t.epoch_ = j.at("epoch").get<int>();
  t.data_rng_ = rng_from_string(j.at("rng").at("data").get<std::string>());
  t.aug_rng_ = rng_from_string(j.at("rng").at("aug").get<std::string>());
  return t;
}

LoadedModel load_model(const std::filesystem::path& checkpoint_path) {
  Trainer t = Trainer::load_checkpoint(checkpoint_path, {}, ".");
  if (!t.table()) {
    throw Error(ErrorCode::kInvalidInput,
                "checkpoint lacks a concept table: " +
                    checkpoint_path.string());
  }
  return LoadedModel{t.model(), *t.table(), t.config_hash(),
                     t.config().weights};
}

}  // namespace tide::training
