#include "synthbench/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "util/hash.hpp"

namespace tide::synthbench {

using nlohmann::json;

namespace {

json concept_to_json(const ConceptSpec& k) {
  return json{{"id", k.id},
              {"name", k.name},
              {"shape", primitive_name(k.shape)},
              {"anchor", {k.anchor_x, k.anchor_y}},
              {"area", k.area}};
}

ConceptSpec concept_from_json(const json& j) {
  ConceptSpec k;
  k.id = j.at("id").get<int>();
  k.name = j.at("name").get<std::string>();
  k.shape = primitive_from_name(j.at("shape").get<std::string>());
  k.anchor_x = j.at("anchor").at(0).get<double>();
  k.anchor_y = j.at("anchor").at(1).get<double>();
  k.area = j.at("area").get<double>();
  return k;
}

json class_to_json(const ClassSpec& c) {
  return json{{"id", c.id},
              {"name", c.name},
              {"concepts", c.concept_ids},
              {"clutter", {{"tint_hue", c.clutter.tint_hue},
                           {"dot_count", c.clutter.dot_count}}}};
}

ClassSpec class_from_json(const json& j) {
  ClassSpec c;
  c.id = j.at("id").get<int>();
  c.name = j.at("name").get<std::string>();
  c.concept_ids = j.at("concepts").get<std::vector<int>>();
  c.clutter.tint_hue = j.at("clutter").at("tint_hue").get<double>();
  c.clutter.dot_count = j.at("clutter").at("dot_count").get<int>();
  return c;
}

json domain_to_json(const DomainStyle& d) {
  return json{{"id", d.id},
              {"name", d.name},
              {"style", style_kind_name(d.kind)},
              {"param_seed", d.param_seed}};
}

DomainStyle domain_from_json(const json& j) {
  DomainStyle d;
  d.id = j.at("id").get<int>();
  d.name = j.at("name").get<std::string>();
  d.kind = style_kind_from_name(j.at("style").get<std::string>());
  d.param_seed = j.at("param_seed").get<std::uint64_t>();
  return d;
}

}  // namespace

Manifest Manifest::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "index.json");
  if (!in) {
    throw Error(ErrorCode::kIo,
                "cannot open manifest: " + (dir / "index.json").string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptDataset,
                std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest m;
  m.dir = dir;
  try {
    if (j.at("format").get<std::string>() != "tide-dataset") {
      throw Error(ErrorCode::kCorruptDataset, "unexpected manifest format tag");
    }
    m.version = j.at("version").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.image_size = j.at("image_size").get<int>();
    m.mask_grid = j.at("mask_grid").get<int>();
    m.annotation_source = j.at("annotation_source").get<std::string>();
    for (const auto& cj : j.at("concepts")) {
      m.concepts.push_back(concept_from_json(cj));
    }
    for (const auto& cj : j.at("classes")) {
      m.classes.push_back(class_from_json(cj));
    }
    for (const auto& dj : j.at("domains")) {
      m.domains.push_back(domain_from_json(dj));
    }
    for (const auto& sj : j.at("samples")) {
      SampleRecord r;
      r.id = sj.at("id").get<std::string>();
      r.domain = sj.at("domain").get<int>();
      r.class_id = sj.at("class").get<int>();
      r.split = sj.at("split").get<std::string>();
      r.concepts = sj.at("concepts").get<std::vector<int>>();
      r.image_path = sj.at("image").get<std::string>();
      r.image_checksum = sj.at("image_checksum").get<std::string>();
      for (auto it = sj.at("masks").begin(); it != sj.at("masks").end();
           ++it) {
        r.mask_paths[std::stoi(it.key())] = it.value().get<std::string>();
      }
      for (auto it = sj.at("mask_checksums").begin();
           it != sj.at("mask_checksums").end(); ++it) {
        r.mask_checksums[std::stoi(it.key())] = it.value().get<std::string>();
      }
      // Masks must exist exactly for the sample's concept labels.
      for (int k : r.concepts) {
        if (!r.mask_paths.count(k)) {
          throw Error(ErrorCode::kCorruptDataset,
                      "sample " + r.id + " lacks a mask for concept " +
                          std::to_string(k));
        }
      }
      if (r.mask_paths.size() != r.concepts.size()) {
        throw Error(ErrorCode::kCorruptDataset,
                    "sample " + r.id + " carries masks outside its labels");
      }
      m.records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptDataset,
                std::string("manifest schema mismatch: ") + e.what());
  }
  return m;
}

void Manifest::save() const {
  json j;
  j["format"] = "tide-dataset";
  j["version"] = version;
  j["seed"] = seed;
  j["image_size"] = image_size;
  j["mask_grid"] = mask_grid;
  j["annotation_source"] = annotation_source;
  j["concepts"] = json::array();
  for (const auto& k : concepts) j["concepts"].push_back(concept_to_json(k));
  j["classes"] = json::array();
  for (const auto& c : classes) j["classes"].push_back(class_to_json(c));
  j["domains"] = json::array();
  for (const auto& d : domains) j["domains"].push_back(domain_to_json(d));
  j["samples"] = json::array();
  for (const auto& r : records) {
    json sj{{"id", r.id},          {"domain", r.domain},
            {"class", r.class_id}, {"split", r.split},
            {"concepts", r.concepts}, {"image", r.image_path},
            {"image_checksum", r.image_checksum}};
    json masks = json::object();
    json sums = json::object();
    for (const auto& [k, p] : r.mask_paths) masks[std::to_string(k)] = p;
    for (const auto& [k, s] : r.mask_checksums) sums[std::to_string(k)] = s;
    sj["masks"] = masks;
    sj["mask_checksums"] = sums;
    j["samples"].push_back(std::move(sj));
  }

  auto tmp = dir / "index.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) {
      throw Error(ErrorCode::kIo, "cannot write manifest: " + tmp.string());
    }
    out << j.dump(1) << "\n";
    if (!out) {
      throw Error(ErrorCode::kIo, "short write: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, dir / "index.json");
}

const ClassSpec& Manifest::class_spec(int class_id) const {
  for (const auto& c : classes) {
    if (c.id == class_id) return c;
  }
  throw Error(ErrorCode::kInvalidInput,
              "unknown class id: " + std::to_string(class_id));
}

const ConceptSpec& Manifest::concept_spec(int concept_id) const {
  for (const auto& k : concepts) {
    if (k.id == concept_id) return k;
  }
  throw Error(ErrorCode::kInvalidInput,
              "unknown concept id: " + std::to_string(concept_id));
}

const DomainStyle& Manifest::domain_style(int domain_id) const {
  for (const auto& d : domains) {
    if (d.id == domain_id) return d;
  }
  throw Error(ErrorCode::kInvalidInput,
              "unknown domain id: " + std::to_string(domain_id));
}

std::optional<int> Manifest::domain_id_by_name(const std::string& name) const {
  for (const auto& d : domains) {
    if (d.name == name) return d.id;
  }
  return std::nullopt;
}

std::vector<const SampleRecord*> Manifest::select(
    std::optional<int> domain, std::optional<std::string> split) const {
  std::vector<const SampleRecord*> out;
  for (const auto& r : records) {
    if (domain && r.domain != *domain) continue;
    if (split && r.split != *split) continue;
    out.push_back(&r);
  }
  return out;
}

Sample load_sample(const Manifest& m, const SampleRecord& rec) {
  Sample s;
  s.id = rec.id;
  s.domain = rec.domain;
  s.class_id = rec.class_id;
  s.split = rec.split;
  s.concepts = rec.concepts;

  auto img_path = m.dir / rec.image_path;
  std::uint64_t want = 0;
  if (!util::parse_checksum(rec.image_checksum, want)) {
    throw Error(ErrorCode::kCorruptDataset,
                "bad checksum notation for " + rec.id);
  }
  if (util::file_checksum(img_path.string()) != want) {
    throw Error(ErrorCode::kCorruptDataset,
                "image checksum mismatch for " + rec.id);
  }
  s.image = core::read_ppm(img_path);
  if (s.image.w != m.image_size || s.image.h != m.image_size) {
    throw Error(ErrorCode::kCorruptDataset,
                "image resolution mismatch for " + rec.id);
  }

  for (const auto& [k, rel] : rec.mask_paths) {
    auto mask_path = m.dir / rel;
    auto it = rec.mask_checksums.find(k);
    if (it == rec.mask_checksums.end() ||
        !util::parse_checksum(it->second, want)) {
      throw Error(ErrorCode::kCorruptDataset,
                  "missing mask checksum for " + rec.id);
    }
    if (util::file_checksum(mask_path.string()) != want) {
      throw Error(ErrorCode::kCorruptDataset,
                  "mask checksum mismatch for " + rec.id);
    }
    auto mask = core::read_mask_pgm(mask_path);
    mask.concept_id = k;
    if (mask.w != m.mask_grid || mask.h != m.mask_grid) {
      throw Error(ErrorCode::kCorruptDataset,
                  "mask resolution mismatch for " + rec.id);
    }
    s.masks.emplace(k, std::move(mask));
  }
  return s;
}

void for_each_sample(const Manifest& m,
                     const std::function<void(const Sample&)>& fn,
                     std::optional<int> domain,
                     std::optional<std::string> split) {
  for (const SampleRecord* rec : m.select(domain, split)) {
    fn(load_sample(m, *rec));
  }
}

}  // namespace tide::synthbench
