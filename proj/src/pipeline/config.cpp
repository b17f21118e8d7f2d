#include "pipeline/config.hpp"

#include <fstream>

#include "util/hash.hpp"

namespace tide::pipeline {

using nlohmann::json;

namespace {

json benchmark_to_json(const synthbench::BenchmarkConfig& b) {
  json concepts = json::array();
  for (const auto& k : b.concepts) {
    concepts.push_back(json{{"id", k.id},
                            {"name", k.name},
                            {"shape", synthbench::primitive_name(k.shape)},
                            {"anchor", {k.anchor_x, k.anchor_y}},
                            {"area", k.area}});
  }
  json classes = json::array();
  for (const auto& c : b.classes) {
    classes.push_back(json{{"id", c.id},
                           {"name", c.name},
                           {"concepts", c.concept_ids},
                           {"clutter",
                            {{"tint_hue", c.clutter.tint_hue},
                             {"dot_count", c.clutter.dot_count}}}});
  }
  json domains = json::array();
  for (const auto& d : b.domains) {
    domains.push_back(json{{"id", d.id},
                           {"name", d.name},
                           {"style", synthbench::style_kind_name(d.kind)},
                           {"param_seed", d.param_seed}});
  }
  return json{{"image_size", b.image_size},
              {"mask_grid", b.mask_grid},
              {"seed", b.seed},
              {"train_per_class_per_domain", b.train_per_class_per_domain},
              {"test_per_class_per_domain", b.test_per_class_per_domain},
              {"jitter", b.jitter},
              {"area_jitter", b.area_jitter},
              {"overlap_tolerance", b.overlap_tolerance},
              {"concepts", concepts},
              {"classes", classes},
              {"domains", domains}};
}

synthbench::BenchmarkConfig benchmark_from_json(const json& j) {
  synthbench::BenchmarkConfig b = synthbench::BenchmarkConfig::default_benchmark();
  if (j.contains("image_size")) b.image_size = j.at("image_size").get<int>();
  if (j.contains("mask_grid")) b.mask_grid = j.at("mask_grid").get<int>();
  if (j.contains("seed")) b.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("train_per_class_per_domain")) {
    b.train_per_class_per_domain =
        j.at("train_per_class_per_domain").get<int>();
  }
  if (j.contains("test_per_class_per_domain")) {
    b.test_per_class_per_domain = j.at("test_per_class_per_domain").get<int>();
  }
  if (j.contains("jitter")) b.jitter = j.at("jitter").get<double>();
  if (j.contains("area_jitter")) {
    b.area_jitter = j.at("area_jitter").get<double>();
  }
  if (j.contains("overlap_tolerance")) {
    b.overlap_tolerance = j.at("overlap_tolerance").get<double>();
  }
  if (j.contains("concepts")) {
    b.concepts.clear();
    for (const auto& kj : j.at("concepts")) {
      synthbench::ConceptSpec k;
      k.id = kj.at("id").get<int>();
      k.name = kj.at("name").get<std::string>();
      k.shape = synthbench::primitive_from_name(kj.at("shape").get<std::string>());
      k.anchor_x = kj.at("anchor").at(0).get<double>();
      k.anchor_y = kj.at("anchor").at(1).get<double>();
      k.area = kj.at("area").get<double>();
      b.concepts.push_back(std::move(k));
    }
  }
  if (j.contains("classes")) {
    b.classes.clear();
    for (const auto& cj : j.at("classes")) {
      synthbench::ClassSpec c;
      c.id = cj.at("id").get<int>();
      c.name = cj.at("name").get<std::string>();
      c.concept_ids = cj.at("concepts").get<std::vector<int>>();
      if (cj.contains("clutter")) {
        c.clutter.tint_hue = cj.at("clutter").at("tint_hue").get<double>();
        c.clutter.dot_count = cj.at("clutter").at("dot_count").get<int>();
      }
      b.classes.push_back(std::move(c));
    }
  }
  if (j.contains("domains")) {
    b.domains.clear();
    for (const auto& dj : j.at("domains")) {
      synthbench::DomainStyle d;
      d.id = dj.at("id").get<int>();
      d.name = dj.at("name").get<std::string>();
      d.kind = synthbench::style_kind_from_name(dj.at("style").get<std::string>());
      d.param_seed = dj.at("param_seed").get<std::uint64_t>();
      b.domains.push_back(std::move(d));
    }
  }
  return b;
}

json train_to_json(const training::TrainConfig& t) {
  return json{{"epochs", t.epochs},
              {"batch_size", t.batch_size},
              {"lr", t.lr},
              {"warmup_steps", t.warmup_steps},
              {"checkpoint_every_epochs", t.checkpoint_every_epochs},
              {"weights",
               {{"class", t.weights.w_class},
                {"concept", t.weights.w_concept},
                {"csa", t.weights.w_csa},
                {"lcc", t.weights.w_lcc}}},
              {"margin", t.weights.margin}};
}

void train_from_json(const json& j, training::TrainConfig& t) {
  if (j.contains("epochs")) t.epochs = j.at("epochs").get<int>();
  if (j.contains("batch_size")) t.batch_size = j.at("batch_size").get<int>();
  if (j.contains("lr")) t.lr = j.at("lr").get<double>();
  if (j.contains("warmup_steps")) {
    t.warmup_steps = j.at("warmup_steps").get<int>();
  }
  if (j.contains("checkpoint_every_epochs")) {
    t.checkpoint_every_epochs = j.at("checkpoint_every_epochs").get<int>();
  }
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (w.contains("class")) t.weights.w_class = w.at("class").get<double>();
    if (w.contains("concept")) {
      t.weights.w_concept = w.at("concept").get<double>();
    }
    if (w.contains("csa")) t.weights.w_csa = w.at("csa").get<double>();
    if (w.contains("lcc")) t.weights.w_lcc = w.at("lcc").get<double>();
  }
  if (j.contains("margin")) t.weights.margin = j.at("margin").get<double>();
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  cfg.model.image_size = cfg.benchmark.image_size;
  cfg.extractor.grid = cfg.benchmark.mask_grid;
  // Paper-scale optimizer defaults; desk-scale presets override these.
  cfg.train.lr = 1e-4;
  cfg.train.warmup_steps = 1000;
  cfg.train.batch_size = 32;
  cfg.discovery_train.epochs = 6;
  cfg.discovery_train.lr = 1e-3;
  cfg.discovery_train.warmup_steps = 50;
  cfg.discovery_train.checkpoint_every_epochs = 0;
  return cfg;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg = defaults();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("dataset")) {
    const auto& dj = j.at("dataset");
    if (dj.contains("dir")) cfg.dataset_dir = dj.at("dir").get<std::string>();
    if (dj.contains("benchmark")) {
      cfg.benchmark = benchmark_from_json(dj.at("benchmark"));
      if (!dj.at("benchmark").contains("seed")) cfg.benchmark.seed = cfg.seed;
    } else {
      cfg.benchmark.seed = cfg.seed;
    }
  } else {
    cfg.benchmark.seed = cfg.seed;
  }
  if (j.contains("annotation")) {
    const auto& aj = j.at("annotation");
    if (aj.contains("provider")) {
      const auto& pj = aj.at("provider");
      if (pj.contains("kind")) {
        cfg.provider.kind = pj.at("kind").get<std::string>();
      }
      if (pj.contains("endpoint")) {
        cfg.provider.endpoint = pj.at("endpoint").get<std::string>();
      }
      if (pj.contains("path")) {
        cfg.provider.path = pj.at("path").get<std::string>();
      }
      if (pj.contains("auth_env")) {
        cfg.provider.auth_env = pj.at("auth_env").get<std::string>();
      }
      if (pj.contains("max_retries")) {
        cfg.provider.max_retries = pj.at("max_retries").get<int>();
      }
      if (pj.contains("backoff_base_ms")) {
        cfg.provider.backoff_base_ms = pj.at("backoff_base_ms").get<int>();
      }
      if (pj.contains("max_concurrency")) {
        cfg.provider.max_concurrency = pj.at("max_concurrency").get<int>();
      }
    }
    if (aj.contains("extractor")) {
      const auto& ej = aj.at("extractor");
      if (ej.contains("kind")) {
        cfg.extractor.kind = ej.at("kind").get<std::string>();
      }
      if (ej.contains("feature_dir")) {
        cfg.extractor.feature_dir = ej.at("feature_dir").get<std::string>();
      }
      if (ej.contains("channels")) {
        cfg.extractor.channels = ej.at("channels").get<int>();
      }
    }
    if (aj.contains("cache")) {
      cfg.annotation_cache = aj.at("cache").get<bool>();
    }
    if (aj.contains("exemplar_domain")) {
      cfg.exemplar_domain = aj.at("exemplar_domain").get<int>();
    }
  }
  if (j.contains("discovery")) {
    const auto& dj = j.at("discovery");
    if (dj.contains("tau")) cfg.tau = dj.at("tau").get<double>();
    train_from_json(dj, cfg.discovery_train);
  }
  if (j.contains("model")) {
    const auto& mj = j.at("model");
    if (mj.contains("image_size")) {
      cfg.model.image_size = mj.at("image_size").get<int>();
    }
    if (mj.contains("blocks")) {
      cfg.model.blocks.clear();
      for (const auto& bj : mj.at("blocks")) {
        cfg.model.blocks.push_back(
            {bj.at("out").get<int>(), bj.at("pool").get<bool>()});
      }
    }
  }
  if (j.contains("training")) {
    const auto& tj = j.at("training");
    train_from_json(tj, cfg.train);
    if (tj.contains("source_domains")) {
      cfg.source_domains = tj.at("source_domains").get<std::vector<int>>();
    }
  }
  if (j.contains("correction")) {
    const auto& cj = j.at("correction");
    if (cj.contains("delta")) {
      cfg.correction.delta = cj.at("delta").get<double>();
    }
    if (cj.contains("max_iterations")) {
      cfg.correction.max_iterations = cj.at("max_iterations").get<int>();
    }
    if (cj.contains("binarize_threshold")) {
      cfg.correction.binarize_threshold =
          cj.at("binarize_threshold").get<double>();
    }
    if (cj.contains("flag_requires_all")) {
      cfg.correction.flag_requires_all =
          cj.at("flag_requires_all").get<bool>();
    }
  }
  if (j.contains("evaluation")) {
    const auto& ej = j.at("evaluation");
    if (ej.contains("split")) {
      cfg.eval_split = ej.at("split").get<std::string>();
    }
    if (ej.contains("target_domains")) {
      cfg.target_domains = ej.at("target_domains").get<std::vector<int>>();
    }
    if (ej.contains("export_pooling")) {
      cfg.export_pooling = ej.at("export_pooling").get<std::string>();
    }
  }
  // Seeds for the two trainers follow the run seed.
  cfg.train.seed = cfg.seed;
  cfg.discovery_train.seed = cfg.seed ^ 0x444953435256ull;
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open config: " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("config is not valid JSON: ") + e.what());
  }
  try {
    auto cfg = from_json(j);
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("config schema mismatch: ") + e.what());
  }
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["dataset"] = {{"dir", dataset_dir},
                  {"benchmark", benchmark_to_json(benchmark)}};
  j["annotation"] = {
      {"provider",
       {{"kind", provider.kind},
        {"endpoint", provider.endpoint},
        {"path", provider.path},
        {"auth_env", provider.auth_env},
        {"max_retries", provider.max_retries},
        {"backoff_base_ms", provider.backoff_base_ms},
        {"max_concurrency", provider.max_concurrency}}},
      {"extractor",
       {{"kind", extractor.kind},
        {"feature_dir", extractor.feature_dir},
        {"channels", extractor.channels}}},
      {"cache", annotation_cache},
      {"exemplar_domain", exemplar_domain}};
  json dj = train_to_json(discovery_train);
  dj["tau"] = tau;
  j["discovery"] = dj;
  json blocks = json::array();
  for (const auto& b : model.blocks) {
    blocks.push_back(json{{"out", b.out_channels}, {"pool", b.pool}});
  }
  j["model"] = {{"image_size", model.image_size}, {"blocks", blocks}};
  json tj = train_to_json(train);
  tj["source_domains"] = source_domains;
  j["training"] = tj;
  j["correction"] = {{"delta", correction.delta},
                     {"max_iterations", correction.max_iterations},
                     {"binarize_threshold", correction.binarize_threshold},
                     {"flag_requires_all", correction.flag_requires_all}};
  j["evaluation"] = {{"split", eval_split},
                     {"target_domains", target_domains},
                     {"export_pooling", export_pooling}};
  return j;
}

void RunConfig::validate() const {
  benchmark.validate();
  train.weights.validate();
  correction.validate();
  if (model.image_size != benchmark.image_size) {
    throw Error(ErrorCode::kInvalidConfig,
                "model image_size must match the benchmark image_size");
  }
  if (model.grid() != benchmark.mask_grid) {
    throw Error(ErrorCode::kInvalidConfig,
                "model feature grid (" + std::to_string(model.grid()) +
                    ") must match the benchmark mask grid (" +
                    std::to_string(benchmark.mask_grid) + ")");
  }
  if (source_domains.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "need at least one source domain");
  }
  for (int s : source_domains) {
    bool known = false;
    for (const auto& d : benchmark.domains) known |= d.id == s;
    if (!known) {
      throw Error(ErrorCode::kInvalidConfig,
                  "unknown source domain id " + std::to_string(s));
    }
    for (int t : target_domains) {
      if (t == s) {
        throw Error(ErrorCode::kInvalidConfig,
                    "source and target domains overlap (domain " +
                        std::to_string(s) + ")");
      }
    }
  }
  if (eval_split != "train" && eval_split != "test") {
    throw Error(ErrorCode::kInvalidConfig, "eval split must be train|test");
  }
  if (export_pooling != "mask" && export_pooling != "saliency") {
    throw Error(ErrorCode::kInvalidConfig,
                "export_pooling must be mask|saliency");
  }
  if (tau < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "tau must be >= 0");
  }
}

std::string RunConfig::hash() const {
  return util::hex64(util::fnv1a64(to_json().dump()));
}

std::filesystem::path RunConfig::dataset_path() const {
  if (!dataset_dir.empty()) return dataset_dir;
  return std::filesystem::path(out_dir) / "dataset";
}

std::filesystem::path RunConfig::run_dir(
    int source_domain, const std::string& ablation_suffix) const {
  std::string name = "src-" + std::to_string(source_domain);
  for (const auto& d : benchmark.domains) {
    if (d.id == source_domain) name = "src-" + d.name;
  }
  if (!ablation_suffix.empty()) name += "-" + ablation_suffix;
  return std::filesystem::path(out_dir) / "runs" / name;
}

void RunConfig::write_resolved() const {
  std::filesystem::create_directories(out_dir);
  auto path = std::filesystem::path(out_dir) / "resolved_config.json";
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << to_json().dump(1) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

void apply_ablations(RunConfig& cfg, const std::vector<std::string>& ablate) {
  for (const auto& a : ablate) {
    if (a == "k") {
      cfg.train.weights.w_concept = 0.0;
    } else if (a == "csa") {
      cfg.train.weights.w_csa = 0.0;
    } else if (a == "lcc") {
      cfg.train.weights.w_lcc = 0.0;
    } else {
      throw Error(ErrorCode::kInvalidConfig,
                  "unknown ablation '" + a + "' (expected k, csa or lcc)");
    }
  }
}

}  // namespace tide::pipeline
