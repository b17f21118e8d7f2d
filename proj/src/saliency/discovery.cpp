#include "saliency/discovery.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "saliency/gradcam.hpp"

namespace tide::saliency {

using nlohmann::json;

const std::vector<int>& ImportantConceptTable::concepts_for(
    int class_id) const {
  auto it = classes.find(class_id);
  if (it == classes.end()) {
    throw Error(ErrorCode::kUnknownClass,
                "concept table has no class " + std::to_string(class_id));
  }
  return it->second.kept;
}

std::vector<int> ImportantConceptTable::all_concepts() const {
  std::vector<int> out;
  for (const auto& [cid, entry] : classes) {
    for (int k : entry.kept) {
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ImportantConceptTable::save(const std::filesystem::path& path) const {
  json j;
  j["format"] = "tide-concept-table";
  j["version"] = 1;
  j["tau"] = tau;
  j["source_domain"] = source_domain;
  j["classes"] = json::array();
  for (const auto& [cid, entry] : classes) {
    json cj{{"class", cid},
            {"kept", entry.kept},
            {"fallback_used", entry.fallback_used}};
    json overlaps = json::object();
    for (const auto& [k, v] : entry.mean_overlap) {
      overlaps[std::to_string(k)] = v;
    }
    cj["mean_overlap"] = overlaps;
    j["classes"].push_back(std::move(cj));
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << j.dump(1) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

ImportantConceptTable ImportantConceptTable::load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j;
  try {
    in >> j;
    ImportantConceptTable t;
    if (j.at("format").get<std::string>() != "tide-concept-table") {
      throw Error(ErrorCode::kInvalidInput, "not a concept table file");
    }
    t.tau = j.at("tau").get<double>();
    t.source_domain = j.at("source_domain").get<int>();
    for (const auto& cj : j.at("classes")) {
      ClassConcepts entry;
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
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput,
                std::string("concept table schema mismatch: ") + e.what());
  }
}

ImportantConceptTable discover_concepts(
    const core::ConceptModel& model,
    const std::vector<const synthbench::SampleRecord*>& records,
    const synthbench::Manifest& manifest, double tau) {
  struct Contribution {
    std::string sample_id;
    int class_id;
    std::map<int, double> overlaps;
  };
  std::vector<Contribution> contributions(records.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(records.size()); ++i) {
    auto sample = synthbench::load_sample(manifest, *records[static_cast<size_t>(i)]);
    auto features = model.features(sample.image);
    auto cam = class_saliency(model, features, sample.class_id);
    Contribution c;
    c.sample_id = sample.id;
    c.class_id = sample.class_id;
    for (const auto& [k, mask] : sample.masks) {
      c.overlaps[k] = overlap(cam.map, mask);
    }
    contributions[static_cast<size_t>(i)] = std::move(c);
  }

  // Canonical reduction order: results do not depend on the order the
  // caller enumerated the dataset in.
  std::sort(contributions.begin(), contributions.end(),
            [](const Contribution& a, const Contribution& b) {
              return a.sample_id < b.sample_id;
            });

  std::map<int, int> class_counts;
  std::map<int, std::map<int, double>> sums;
  for (const auto& c : contributions) {
    class_counts[c.class_id] += 1;
    for (const auto& [k, v] : c.overlaps) {
      sums[c.class_id][k] += v;
    }
  }

  ImportantConceptTable table;
  table.tau = tau;
  for (const auto& cls : manifest.classes) {
    auto count_it = class_counts.find(cls.id);
    if (count_it == class_counts.end() || count_it->second == 0) {
      throw Error(ErrorCode::kEmptyClass,
                  "class " + cls.name + " has no samples for discovery");
    }
    const double n_c = count_it->second;
    ClassConcepts entry;
    entry.class_id = cls.id;
    for (const auto& [k, sum] : sums[cls.id]) {
      double mean = sum / n_c;
      entry.mean_overlap[k] = mean;
      if (mean > tau) entry.kept.push_back(k);
    }
    std::sort(entry.kept.begin(), entry.kept.end());
    if (entry.kept.empty() && !entry.mean_overlap.empty()) {
      // Downstream losses and the correction loop iterate K_c; keep the
      // single strongest concept instead of an empty set.
      int best = -1;
      double best_mean = -1.0;
      for (const auto& [k, mean] : entry.mean_overlap) {
        if (mean > best_mean) {
          best_mean = mean;
          best = k;
        }
      }
      entry.kept.push_back(best);
      entry.fallback_used = true;
    }
    table.classes[cls.id] = std::move(entry);
  }
  return table;
}

}  // namespace tide::saliency
