#include "pipeline/stages.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "core/image.hpp"
#include "correction/correct.hpp"
#include "correction/signatures.hpp"
#include "saliency/gradcam.hpp"
#include "synthbench/generate.hpp"
#include "annotation/transfer.hpp"
#include "util/hash.hpp"

namespace tide::pipeline {

using nlohmann::json;

namespace {

training::ModelConfig model_config_for(const RunConfig& cfg,
                                       const synthbench::Manifest& m) {
  training::ModelConfig mc = cfg.model;
  mc.num_classes = static_cast<int>(m.classes.size());
  mc.num_concepts = static_cast<int>(m.concepts.size());
  // Heads index classes/concepts by id; ids must be dense.
  for (const auto& c : m.classes) {
    if (c.id < 0 || c.id >= mc.num_classes) {
      throw Error(ErrorCode::kInvalidConfig,
                  "class ids must be dense 0..N-1");
    }
  }
  for (const auto& k : m.concepts) {
    if (k.id < 0 || k.id >= mc.num_concepts) {
      throw Error(ErrorCode::kInvalidConfig,
                  "concept ids must be dense 0..K-1");
    }
  }
  return mc;
}

std::vector<synthbench::Sample> load_split(
    const synthbench::Manifest& m, int domain, const std::string& split) {
  std::vector<synthbench::Sample> out;
  for (const auto* rec : m.select(domain, split)) {
    out.push_back(synthbench::load_sample(m, *rec));
  }
  return out;
}

std::vector<int> resolve_targets(const RunConfig& cfg, int source) {
  std::vector<int> targets = cfg.target_domains;
  if (targets.empty()) {
    for (const auto& d : cfg.benchmark.domains) {
      if (d.id != source) targets.push_back(d.id);
    }
  } else {
    for (int t : targets) {
      if (t == source) {
        throw Error(ErrorCode::kInvalidConfig,
                    "source and target domains overlap");
      }
    }
  }
  return targets;
}

json distances_to_json(const std::vector<correction::ConceptDistance>& ds) {
  json out = json::object();
  for (const auto& d : ds) {
    out[std::to_string(d.concept_id)] = d.distance;
  }
  return out;
}

json trace_to_json(const correction::CorrectionTrace& t) {
  json iterations = json::array();
  for (const auto& it : t.iterations) {
    iterations.push_back(json{{"t", it.t},
                              {"masked_cells", it.masked_cells},
                              {"prediction", it.prediction},
                              {"distances", distances_to_json(it.distances)}});
  }
  return json{{"sample", t.sample_id},
              {"gt", t.gt_class},
              {"initial", t.initial},
              {"final", t.final_class},
              {"flagged", t.flagged},
              {"outcome", correction::outcome_name(t.outcome)},
              {"corrected_at", t.corrected_at},
              {"verify_distances", distances_to_json(t.verify_distances)},
              {"iterations", iterations}};
}

json report_to_json(const correction::CorrectionReport& r) {
  return json{{"total", r.total},
              {"unflagged", r.unflagged},
              {"fraction_unflagged", r.fraction_unflagged},
              {"precision_unflagged", r.precision_unflagged},
              {"flagged", r.flagged},
              {"fraction_flagged_converged", r.fraction_flagged_converged},
              {"accuracy_pre", r.accuracy_pre},
              {"accuracy_post", r.accuracy_post}};
}

struct SourceArtifacts {
  std::filesystem::path dir;
  training::LoadedModel loaded;
  correction::SignatureStore store;
};

SourceArtifacts load_artifacts(const RunConfig& cfg, int source) {
  SourceArtifacts a{cfg.run_dir(source, ablation_suffix(cfg.train.weights)),
                    training::load_model(
                        cfg.run_dir(source, ablation_suffix(cfg.train.weights)) /
                        "checkpoint.json"),
                    {}};
  a.store = correction::SignatureStore::load(a.dir / "signatures.json");
  return a;
}

void write_json(const std::filesystem::path& path, const json& j,
                int indent = 1) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << j.dump(indent) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string ablation_suffix(const training::LossWeights& w) {
  std::string s;
  if (w.w_concept == 0) s += "k";
  if (w.w_csa == 0) s += s.empty() ? "csa" : "-csa";
  if (w.w_lcc == 0) s += s.empty() ? "lcc" : "-lcc";
  return s.empty() ? "" : "ablate-" + s;
}

json run_generate(const RunConfig& cfg) {
  cfg.validate();
  cfg.write_resolved();
  auto manifest = synthbench::generate_dataset(cfg.benchmark,
                                               cfg.dataset_path());
  json per_domain = json::object();
  for (const auto& d : manifest.domains) {
    per_domain[d.name] = manifest.select(d.id).size();
  }
  return json{{"stage", "generate"},
              {"dataset_dir", cfg.dataset_path().string()},
              {"samples", manifest.records.size()},
              {"per_domain", per_domain}};
}

json run_annotate(const RunConfig& cfg) {
  cfg.validate();
  cfg.write_resolved();
  auto manifest = synthbench::Manifest::load(cfg.dataset_path());

  auto provider = annotation::make_provider(cfg.provider);
  if (cfg.provider.kind == "mock") {
    // Seed the table with the dataset's own class vocabulary.
    auto* mock = dynamic_cast<annotation::MockConceptProvider*>(provider.get());
    for (const auto& cls : manifest.classes) {
      std::vector<std::string> names;
      for (int k : cls.concept_ids) {
        names.push_back(manifest.concept_spec(k).name);
      }
      mock->add_class(cls.name, std::move(names));
    }
  }

  annotation::ExtractorConfig ec = cfg.extractor;
  ec.grid = manifest.mask_grid;
  auto extractor = annotation::make_extractor(ec);

  // One exemplar per class from the configured exemplar domain, with the
  // concept list and prompt recorded the way the annotation pipeline
  // produces them.
  json prompts = json::object();
  std::map<int, annotation::ExemplarAnnotation> exemplars;
  for (const auto& cls : manifest.classes) {
    auto concepts = provider->list_concepts(cls.name);
    prompts[cls.name] = annotation::build_prompt(cls.name, concepts);
    const synthbench::SampleRecord* exemplar_rec = nullptr;
    for (const auto* rec : manifest.select(cfg.exemplar_domain, "train")) {
      if (rec->class_id == cls.id) {
        exemplar_rec = rec;
        break;
      }
    }
    if (!exemplar_rec) {
      throw Error(ErrorCode::kEmptyClass,
                  "no exemplar-domain training sample for class " + cls.name);
    }
    auto sample = synthbench::load_sample(manifest, *exemplar_rec);
    exemplars.emplace(cls.id, annotation::make_exemplar(sample, *extractor));
  }

  std::optional<std::filesystem::path> cache;
  if (cfg.annotation_cache) {
    cache = std::filesystem::path(cfg.out_dir) / "annotation_cache";
  }
  auto report = annotation::annotate_corpus(exemplars, manifest, *extractor,
                                            cache);

  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back(json{{"sample", f.sample_id}, {"error", f.error}});
  }
  json summary{{"stage", "annotate"},
               {"annotated", report.annotated},
               {"cache_hits", report.cache_hits},
               {"failures", failures},
               {"prompts", prompts},
               {"provider", provider->kind()},
               {"extractor", extractor->kind()}};
  std::filesystem::create_directories(cfg.out_dir);
  write_json(std::filesystem::path(cfg.out_dir) / "annotation_report.json",
             summary);
  return summary;
}

json run_discover(const RunConfig& cfg) {
  cfg.validate();
  cfg.write_resolved();
  auto manifest = synthbench::Manifest::load(cfg.dataset_path());
  json domains = json::array();
  for (int source : cfg.source_domains) {
    auto dir = cfg.run_dir(source);
    std::filesystem::create_directories(dir);

    auto samples = load_split(manifest, source, "train");
    training::TrainConfig dtc = cfg.discovery_train;
    dtc.weights = {};  // class cross-entropy only
    dtc.weights.w_class = 1.0;
    dtc.weights.w_concept = 0.0;
    dtc.weights.w_csa = 0.0;
    dtc.weights.w_lcc = 0.0;

    training::TideModel model(model_config_for(cfg, manifest));
    training::Trainer trainer(std::move(model), dtc, std::nullopt,
                              std::move(samples), dir, cfg.hash());
    trainer.init();
    trainer.run("discovery_train_log.jsonl");

    auto records = manifest.select(source, "train");
    auto table =
        saliency::discover_concepts(trainer.model(), records, manifest,
                                    cfg.tau);
    table.source_domain = source;
    table.save(dir / "discovery.json");

    json classes = json::object();
    for (const auto& [cid, entry] : table.classes) {
      classes[manifest.class_spec(cid).name] =
          json{{"kept", entry.kept}, {"fallback_used", entry.fallback_used}};
    }
    domains.push_back(json{{"source_domain", source},
                           {"table", (dir / "discovery.json").string()},
                           {"classes", classes}});
  }
  return json{{"stage", "discover"}, {"tau", cfg.tau}, {"domains", domains}};
}

json run_train(const RunConfig& cfg) {
  cfg.validate();
  cfg.write_resolved();
  auto manifest = synthbench::Manifest::load(cfg.dataset_path());

  const bool needs_masks =
      cfg.train.weights.w_csa > 0 || cfg.train.weights.w_lcc > 0;
  json domains = json::array();
  for (int source : cfg.source_domains) {
    auto table_path = cfg.run_dir(source) / "discovery.json";
    if (!std::filesystem::exists(table_path)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "discovery table missing (" + table_path.string() +
                      "); run the discover stage first");
    }
    auto table = saliency::ImportantConceptTable::load(table_path);

    auto dir = cfg.run_dir(source, ablation_suffix(cfg.train.weights));
    std::filesystem::create_directories(dir);

    auto samples = load_split(manifest, source, "train");
    if (needs_masks) {
      for (const auto& s : samples) {
        if (s.masks.empty()) {
          throw Error(ErrorCode::kInvalidConfig,
                      "training with CSA/LCC requires masks; sample " + s.id +
                          " has none");
        }
      }
    }

    training::TrainConfig tc = cfg.train;
    const auto checkpoint_path = dir / "checkpoint.json";
    long initial_step = 0;
    bool resumed = false;
    if (std::filesystem::exists(checkpoint_path)) {
      auto trainer = training::Trainer::load_checkpoint(
          checkpoint_path, std::move(samples), dir);
      resumed = true;
      initial_step = trainer.step();
      if (trainer.epoch() < trainer.config().epochs) {
        trainer.run("train_log.jsonl");
      }
      auto records = manifest.select(source, "train");
      auto store = correction::build_signatures(
          trainer.model(), records, manifest, trainer.table()->all_concepts());
      store.source_domain = source;
      store.model_hash = util::hex64(trainer.model().params_hash());
      store.config_hash = cfg.hash();
      store.save(dir / "signatures.json");
      domains.push_back(json{{"source_domain", source},
                             {"checkpoint", checkpoint_path.string()},
                             {"resumed", resumed},
                             {"initial_step", initial_step},
                             {"final_step", trainer.step()},
                             {"ablation", tc.weights.ablation_label()}});
      continue;
    }

    training::TideModel model(model_config_for(cfg, manifest));
    training::Trainer trainer(std::move(model), tc, table, std::move(samples),
                              dir, cfg.hash());
    trainer.init();
    trainer.run("train_log.jsonl");

    auto records = manifest.select(source, "train");
    auto store = correction::build_signatures(trainer.model(), records,
                                              manifest, table.all_concepts());
    store.source_domain = source;
    store.model_hash = util::hex64(trainer.model().params_hash());
    store.config_hash = cfg.hash();
    store.save(dir / "signatures.json");

    domains.push_back(json{{"source_domain", source},
                           {"checkpoint", checkpoint_path.string()},
                           {"resumed", false},
                           {"final_step", trainer.step()},
                           {"ablation", tc.weights.ablation_label()}});
  }
  return json{{"stage", "train"}, {"domains", domains}};
}

json run_evaluate(const RunConfig& cfg, bool with_correction) {
  cfg.validate();
  cfg.write_resolved();
  auto manifest = synthbench::Manifest::load(cfg.dataset_path());

  json reports = json::array();
  for (int source : cfg.source_domains) {
    auto artifacts = load_artifacts(cfg, source);
    const auto& model = artifacts.loaded.model;
    const auto& table = artifacts.loaded.table;
    auto targets = resolve_targets(cfg, source);

    struct SampleEval {
      std::string id;
      int domain = -1;
      int gt = -1;
      int pre = -1;
      int post = -1;
      double overlap_sum = 0.0;
      int overlap_count = 0;
      std::map<int, double> concept_overlaps;
      correction::CorrectionTrace trace;
    };

    std::vector<const synthbench::SampleRecord*> records;
    for (int t : targets) {
      auto sel = manifest.select(t, cfg.eval_split);
      records.insert(records.end(), sel.begin(), sel.end());
    }
    std::vector<SampleEval> evals(records.size());

#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(records.size()); ++i) {
      auto sample =
          synthbench::load_sample(manifest, *records[static_cast<size_t>(i)]);
      SampleEval ev;
      ev.id = sample.id;
      ev.domain = sample.domain;
      ev.gt = sample.class_id;

      auto features = model.features(sample.image);
      auto logits = model.class_logits(features);
      ev.pre = core::argmax_index(logits);
      ev.post = ev.pre;

      // Concept localization quality against GT masks.
      for (const auto& [k, mask] : sample.masks) {
        auto cam = saliency::concept_saliency(model, features, k);
        const double o = saliency::overlap(cam.map, mask);
        ev.concept_overlaps[k] = o;
        ev.overlap_sum += o;
        ev.overlap_count += 1;
      }

      if (with_correction) {
        auto trace = correction::predict_with_correction(
            model, sample.image, table, artifacts.store, cfg.correction);
        trace.sample_id = sample.id;
        trace.gt_class = sample.class_id;
        ev.post = trace.final_class;
        ev.trace = std::move(trace);
      }
      evals[static_cast<size_t>(i)] = std::move(ev);
    }

    // Per-domain accuracies; the average is the mean of per-domain values.
    json domain_rows = json::array();
    double avg_pre = 0.0, avg_post = 0.0;
    for (int t : targets) {
      long n = 0, pre_ok = 0, post_ok = 0;
      for (const auto& ev : evals) {
        if (ev.domain != t) continue;
        ++n;
        pre_ok += ev.pre == ev.gt ? 1 : 0;
        post_ok += ev.post == ev.gt ? 1 : 0;
      }
      const double acc_pre = n ? static_cast<double>(pre_ok) / n : 0.0;
      const double acc_post = n ? static_cast<double>(post_ok) / n : 0.0;
      avg_pre += acc_pre / targets.size();
      avg_post += acc_post / targets.size();
      json row{{"domain", t},
               {"domain_name", manifest.domain_style(t).name},
               {"n", n},
               {"accuracy", acc_pre}};
      if (with_correction) row["accuracy_corrected"] = acc_post;
      domain_rows.push_back(std::move(row));
    }

    double overlap_sum = 0.0;
    long overlap_count = 0;
    std::map<int, std::pair<double, long>> per_concept;
    for (const auto& ev : evals) {
      overlap_sum += ev.overlap_sum;
      overlap_count += ev.overlap_count;
      for (const auto& [k, o] : ev.concept_overlaps) {
        per_concept[k].first += o;
        per_concept[k].second += 1;
      }
    }
    json per_concept_json = json::object();
    for (const auto& [k, agg] : per_concept) {
      per_concept_json[manifest.concept_spec(k).name] =
          agg.second ? agg.first / agg.second : 0.0;
    }

    json report{{"stage", "evaluate"},
                {"source_domain", source},
                {"ablation", artifacts.loaded.weights.ablation_label()},
                {"domains", domain_rows},
                {"average_target_accuracy", avg_pre},
                {"mean_concept_overlap",
                 overlap_count ? overlap_sum / overlap_count : 0.0},
                {"per_concept_overlap", per_concept_json},
                {"split", cfg.eval_split}};
    if (with_correction) {
      report["average_target_accuracy_corrected"] = avg_post;
      std::vector<correction::CorrectionTrace> traces;
      traces.reserve(evals.size());
      for (const auto& ev : evals) traces.push_back(ev.trace);
      report["correction"] = report_to_json(correction::correction_report(traces));

      std::ofstream traces_out(artifacts.dir / "traces.jsonl");
      for (const auto& t : traces) {
        traces_out << trace_to_json(t).dump() << "\n";
      }
    }

    write_json(artifacts.dir / "eval_report.json", report);
    reports.push_back(std::move(report));
  }
  return json{{"stage", "evaluate"}, {"reports", reports}};
}

json run_correct(const RunConfig& cfg) {
  auto result = run_evaluate(cfg, true);
  json out{{"stage", "correct"}, {"reports", json::array()}};
  for (const auto& r : result.at("reports")) {
    out["reports"].push_back(json{
        {"source_domain", r.at("source_domain")},
        {"correction", r.at("correction")},
        {"average_target_accuracy", r.at("average_target_accuracy")},
        {"average_target_accuracy_corrected",
         r.at("average_target_accuracy_corrected")}});
  }
  return out;
}

json run_overlay(const RunConfig& cfg,
                 const std::vector<std::string>& sample_ids) {
  cfg.validate();
  cfg.write_resolved();
  auto manifest = synthbench::Manifest::load(cfg.dataset_path());
  const int source = cfg.source_domains.front();
  auto artifacts = load_artifacts(cfg, source);
  const auto& model = artifacts.loaded.model;

  auto overlay_dir = artifacts.dir / "overlays";
  std::filesystem::create_directories(overlay_dir);

  auto blend = [](const core::Image& img, const core::Map2D& heat) {
    core::Image out = img;
    auto up = core::upsample_nearest(heat, img.w, img.h);
    const double alpha = 0.55;
    for (int y = 0; y < img.h; ++y) {
      for (int x = 0; x < img.w; ++x) {
        const double v = up.at(x, y);
        const double r = v;
        const double g = 0.15 * v;
        const double b = 1.0 - v;
        out.at(x, y, 0) = (1 - alpha * v) * out.at(x, y, 0) + alpha * v * r;
        out.at(x, y, 1) = (1 - alpha * v) * out.at(x, y, 1) + alpha * v * g;
        out.at(x, y, 2) = (1 - alpha * v) * out.at(x, y, 2) + alpha * v * b;
      }
    }
    core::quantize_to_8bit(out);
    return out;
  };

  json written = json::array();
  json unknown = json::array();
  json degenerate = json::array();
  for (const auto& id : sample_ids) {
    const synthbench::SampleRecord* rec = nullptr;
    for (const auto& r : manifest.records) {
      if (r.id == id) rec = &r;
    }
    if (!rec) {
      unknown.push_back(id);
      continue;
    }
    auto sample = synthbench::load_sample(manifest, *rec);
    auto features = model.features(sample.image);
    auto logits = model.class_logits(features);
    const int pred = core::argmax_index(logits);

    auto class_cam = saliency::class_saliency(model, features, pred);
    if (class_cam.degenerate) degenerate.push_back(id + ":class");
    auto class_path = overlay_dir / (id + "_class.ppm");
    core::write_ppm(blend(sample.image, class_cam.map.map), class_path);
    written.push_back(class_path.string());

    for (int k : sample.concepts) {
      auto cam = saliency::concept_saliency(model, features, k);
      if (cam.degenerate) {
        degenerate.push_back(id + ":" + manifest.concept_spec(k).name);
      }
      auto path =
          overlay_dir / (id + "_" + manifest.concept_spec(k).name + ".ppm");
      core::write_ppm(blend(sample.image, cam.map.map), path);
      written.push_back(path.string());
    }
  }
  return json{{"stage", "overlay"},
              {"written", written},
              {"unknown_samples", unknown},
              {"degenerate_maps", degenerate}};
}

json run_export_features(const RunConfig& cfg, const std::string& split) {
  cfg.validate();
  cfg.write_resolved();
  auto manifest = synthbench::Manifest::load(cfg.dataset_path());
  const int source = cfg.source_domains.front();
  auto artifacts = load_artifacts(cfg, source);
  const auto& model = artifacts.loaded.model;

  auto records = manifest.select(std::nullopt, split);
  struct Row {
    std::string id;
    int domain;
    int concept;
    std::vector<double> values;
  };
  std::vector<std::vector<Row>> per_sample(records.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(records.size()); ++i) {
    auto sample =
        synthbench::load_sample(manifest, *records[static_cast<size_t>(i)]);
    auto features = model.features(sample.image);
    std::vector<Row> rows;
    for (int k : sample.concepts) {
      Row row{sample.id, sample.domain, k, {}};
      if (cfg.export_pooling == "mask") {
        row.values = training::concept_feature(features, sample.masks.at(k)).v;
      } else {
        auto cam = saliency::concept_saliency(model, features, k);
        row.values = training::pooled_feature(features, cam.map.map);
      }
      rows.push_back(std::move(row));
    }
    per_sample[static_cast<size_t>(i)] = std::move(rows);
  }

  auto csv_path = artifacts.dir / ("features_" + split + ".csv");
  std::ofstream out(csv_path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + csv_path.string());
  const int C = model.config().feature_channels();
  out << "sample_id,domain,concept_id";
  for (int l = 0; l < C; ++l) out << ",f" << l;
  out << "\n";
  long rows = 0;
  out.precision(17);
  for (const auto& sample_rows : per_sample) {
    for (const auto& row : sample_rows) {
      out << row.id << "," << row.domain << "," << row.concept;
      for (double v : row.values) out << "," << v;
      out << "\n";
      ++rows;
    }
  }
  return json{{"stage", "export-features"},
              {"path", csv_path.string()},
              {"rows", rows},
              {"columns", C + 3},
              {"pooling", cfg.export_pooling}};
}

json run_report(const RunConfig& cfg, const std::string& traces_path) {
  std::filesystem::path path = traces_path;
  if (traces_path.empty()) {
    const int source = cfg.source_domains.front();
    path = cfg.run_dir(source, ablation_suffix(cfg.train.weights)) /
           "traces.jsonl";
  }
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open traces: " + path.string());
  }
  std::vector<correction::CorrectionTrace> traces;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kInvalidInput,
                  "traces file holds invalid JSON: " + path.string());
    }
    correction::CorrectionTrace t;
    t.sample_id = j.at("sample").get<std::string>();
    t.gt_class = j.at("gt").get<int>();
    t.initial = j.at("initial").get<int>();
    t.final_class = j.at("final").get<int>();
    t.flagged = j.at("flagged").get<bool>();
    traces.push_back(std::move(t));
  }
  auto report = correction::correction_report(traces);
  return json{{"stage", "report"},
              {"traces", path.string()},
              {"report", report_to_json(report)}};
}

}  // namespace tide::pipeline
