#include "correction/signatures.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "training/losses.hpp"

namespace tide::correction {

using nlohmann::json;

const core::Signature& SignatureStore::at(int concept_id) const {
  auto it = signatures.find(concept_id);
  if (it == signatures.end()) {
    throw Error(ErrorCode::kMissingConceptSupport,
                "no signature for concept " + std::to_string(concept_id));
  }
  return it->second;
}

void SignatureStore::save(const std::filesystem::path& path) const {
  json j;
  j["format"] = "tide-signatures";
  j["version"] = 1;
  j["source_domain"] = source_domain;
  j["model_hash"] = model_hash;
  j["config_hash"] = config_hash;
  json sig = json::object();
  for (const auto& [k, s] : signatures) {
    sig[std::to_string(k)] = json{{"support_count", s.support_count},
                                  {"values", s.v}};
  }
  j["signatures"] = sig;
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << j.dump() << "\n";
  }
  std::filesystem::rename(tmp, path);
}

SignatureStore SignatureStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j;
  try {
    in >> j;
    if (j.at("format").get<std::string>() != "tide-signatures") {
      throw Error(ErrorCode::kInvalidInput, "not a signature store");
    }
    SignatureStore store;
    store.source_domain = j.at("source_domain").get<int>();
    store.model_hash = j.at("model_hash").get<std::string>();
    store.config_hash = j.at("config_hash").get<std::string>();
    for (auto it = j.at("signatures").begin(); it != j.at("signatures").end();
         ++it) {
      core::Signature s;
      s.concept_id = std::stoi(it.key());
      s.support_count = it.value().at("support_count").get<int>();
      s.v = it.value().at("values").get<std::vector<double>>();
      store.signatures[s.concept_id] = std::move(s);
    }
    return store;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput,
                std::string("signature store schema mismatch: ") + e.what());
  }
}

SignatureStore build_signatures(
    const core::ConceptModel& model,
    const std::vector<const synthbench::SampleRecord*>& records,
    const synthbench::Manifest& manifest, const std::vector<int>& concepts) {
  struct Contribution {
    std::string sample_id;
    std::map<int, std::vector<double>> vectors;
  };
  std::vector<Contribution> contributions(records.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(records.size()); ++i) {
    auto sample =
        synthbench::load_sample(manifest, *records[static_cast<size_t>(i)]);
    auto features = model.features(sample.image);
    Contribution c;
    c.sample_id = sample.id;
    for (const auto& [k, mask] : sample.masks) {
      c.vectors[k] = training::concept_feature(features, mask).v;
    }
    contributions[static_cast<size_t>(i)] = std::move(c);
  }

  // Canonical order: the mean does not depend on enumeration order.
  std::sort(contributions.begin(), contributions.end(),
            [](const Contribution& a, const Contribution& b) {
              return a.sample_id < b.sample_id;
            });

  SignatureStore store;
  for (int k : concepts) {
    core::Signature sig;
    sig.concept_id = k;
    for (const auto& c : contributions) {
      auto it = c.vectors.find(k);
      if (it == c.vectors.end()) continue;
      if (sig.v.empty()) sig.v.assign(it->second.size(), 0.0);
      for (size_t l = 0; l < it->second.size(); ++l) sig.v[l] += it->second[l];
      ++sig.support_count;
    }
    if (sig.support_count == 0) {
      throw Error(ErrorCode::kMissingConceptSupport,
                  "no sample contains concept " + std::to_string(k));
    }
    for (double& x : sig.v) x /= sig.support_count;
    store.signatures[k] = std::move(sig);
  }
  return store;
}

}  // namespace tide::correction
