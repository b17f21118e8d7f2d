#include "annotation/transfer.hpp"

#include <cmath>

#include "core/image.hpp"
#include "util/hash.hpp"
#include "util/rng.hpp"

namespace tide::annotation {

namespace {

std::vector<double> cell_norms(const core::FeatureVolume& f) {
  std::vector<double> norms(static_cast<size_t>(f.w) * f.h, 0.0);
  for (int y = 0; y < f.h; ++y) {
    for (int x = 0; x < f.w; ++x) {
      const double* p = f.cell(x, y);
      double s = 0.0;
      for (int l = 0; l < f.c; ++l) s += p[l] * p[l];
      norms[static_cast<size_t>(y) * f.w + x] = std::sqrt(s);
    }
  }
  return norms;
}

std::uint64_t exemplar_hash(const ExemplarAnnotation& e) {
  std::uint64_t h = util::fnv1a64(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(e.features.v.data()),
      e.features.v.size() * sizeof(double)));
  for (const auto& [k, m] : e.soft_maps) {
    h = util::mix64(h ^ static_cast<std::uint64_t>(k));
    h = util::fnv1a64(
        std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(m.v.data()),
            m.v.size() * sizeof(double)),
        h);
  }
  return h;
}

}  // namespace

core::ConceptMask transfer_mask(const ExemplarAnnotation& exemplar,
                                int concept_id,
                                const core::FeatureVolume& target_features) {
  auto it = exemplar.soft_maps.find(concept_id);
  if (it == exemplar.soft_maps.end()) {
    throw Error(ErrorCode::kInvalidInput,
                "exemplar has no soft map for concept " +
                    std::to_string(concept_id));
  }
  const auto& soft = it->second;
  const auto& ef = exemplar.features;
  if (ef.c != target_features.c) {
    throw Error(ErrorCode::kInvalidInput,
                "transfer_mask: feature channel mismatch");
  }
  if (soft.w != ef.w || soft.h != ef.h) {
    throw Error(ErrorCode::kInvalidInput,
                "transfer_mask: soft map / feature shape mismatch");
  }

  const auto target_norms = cell_norms(target_features);
  core::ConceptMask out(target_features.w, target_features.h, concept_id);

  for (int ey = 0; ey < ef.h; ++ey) {
    for (int ex = 0; ex < ef.w; ++ex) {
      if (soft.at(ex, ey) < kExemplarSoftThreshold) continue;
      const double* ev = ef.cell(ex, ey);
      double enorm = 0.0;
      for (int l = 0; l < ef.c; ++l) enorm += ev[l] * ev[l];
      enorm = std::sqrt(enorm);

      // Row-major scan; strict improvement keeps the first occurrence.
      int best_x = 0, best_y = 0;
      double best_sim = -2.0;
      for (int ty = 0; ty < target_features.h; ++ty) {
        for (int tx = 0; tx < target_features.w; ++tx) {
          const double tnorm =
              target_norms[static_cast<size_t>(ty) * target_features.w + tx];
          double sim = -2.0;
          if (enorm > 0.0 && tnorm > 0.0) {
            const double* tv = target_features.cell(tx, ty);
            double dot = 0.0;
            for (int l = 0; l < ef.c; ++l) dot += ev[l] * tv[l];
            sim = dot / (enorm * tnorm);
          }
          if (sim > best_sim) {
            best_sim = sim;
            best_x = tx;
            best_y = ty;
          }
        }
      }
      out.at(best_x, best_y) = 1;
    }
  }
  return out;
}

ExemplarAnnotation make_exemplar(const synthbench::Sample& sample,
                                 const DenseFeatureExtractor& extractor) {
  ExemplarAnnotation e;
  e.class_id = sample.class_id;
  e.features = extractor.extract(sample.image, sample.id);
  for (const auto& [k, mask] : sample.masks) {
    core::Map2D soft(mask.w, mask.h);
    for (size_t i = 0; i < mask.v.size(); ++i) {
      soft.v[i] = mask.v[i] ? 1.0 : 0.0;
    }
    e.soft_maps.emplace(k, std::move(soft));
  }
  return e;
}

AnnotationReport annotate_corpus(
    const std::map<int, ExemplarAnnotation>& exemplars,
    synthbench::Manifest& manifest, const DenseFeatureExtractor& extractor,
    const std::optional<std::filesystem::path>& cache_dir) {
  for (const auto& rec : manifest.records) {
    if (!exemplars.count(rec.class_id)) {
      throw Error(ErrorCode::kInvalidInput,
                  "no exemplar for class " + std::to_string(rec.class_id));
    }
  }
  if (cache_dir) {
    std::filesystem::create_directories(*cache_dir);
  }

  std::map<int, std::uint64_t> exemplar_hashes;
  std::uint64_t combined_hash = 0xcbf29ce484222325ull;
  for (const auto& [cid, e] : exemplars) {
    exemplar_hashes[cid] = exemplar_hash(e);
    combined_hash = util::mix64(combined_hash ^ exemplar_hashes[cid]);
  }

  AnnotationReport report;
  struct Update {
    bool ok = false;
    bool cache_hit = false;
    std::map<int, core::ConceptMask> masks;
    std::string error;
  };
  std::vector<Update> updates(manifest.records.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(manifest.records.size()); ++i) {
    const auto& rec = manifest.records[static_cast<size_t>(i)];
    Update& u = updates[static_cast<size_t>(i)];
    try {
      const auto& exemplar = exemplars.at(rec.class_id);
      const auto img_path = manifest.dir / rec.image_path;
      const std::uint64_t img_hash =
          util::file_checksum(img_path.string());

      bool all_cached = true;
      std::map<int, core::ConceptMask> cached;
      if (cache_dir) {
        for (int k : rec.concepts) {
          const auto key = util::hex64(util::mix64(
                               exemplar_hashes.at(rec.class_id) ^
                               util::mix64(img_hash ^
                                           static_cast<std::uint64_t>(k)))) +
                           ".pgm";
          const auto cache_path = *cache_dir / key;
          if (std::filesystem::exists(cache_path)) {
            auto mask = core::read_mask_pgm(cache_path);
            mask.concept_id = k;
            cached.emplace(k, std::move(mask));
          } else {
            all_cached = false;
          }
        }
      } else {
        all_cached = false;
      }

      if (all_cached && cached.size() == rec.concepts.size()) {
        u.masks = std::move(cached);
        u.cache_hit = true;
      } else {
        const auto image = core::read_ppm(img_path);
        const auto features = extractor.extract(image, rec.id);
        for (int k : rec.concepts) {
          auto mask = transfer_mask(exemplar, k, features);
          if (cache_dir) {
            const auto key = util::hex64(util::mix64(
                                 exemplar_hashes.at(rec.class_id) ^
                                 util::mix64(img_hash ^
                                             static_cast<std::uint64_t>(k)))) +
                             ".pgm";
            core::write_mask_pgm(mask, *cache_dir / key);
          }
          u.masks.emplace(k, std::move(mask));
        }
      }
      u.ok = true;
    } catch (const std::exception& e) {
      u.error = e.what();
    }
  }

  for (size_t i = 0; i < manifest.records.size(); ++i) {
    auto& rec = manifest.records[i];
    auto& u = updates[i];
    if (!u.ok) {
      report.failures.push_back({rec.id, u.error});
      continue;
    }
    for (auto& [k, mask] : u.masks) {
      const auto rel = rec.mask_paths.at(k);
      core::write_mask_pgm(mask, manifest.dir / rel);
      rec.mask_checksums[k] = util::checksum_string(
          util::file_checksum((manifest.dir / rel).string()));
    }
    ++report.annotated;
    if (u.cache_hit) ++report.cache_hits;
  }

  manifest.annotation_source = "transfer:" + util::hex64(combined_hash);
  manifest.save();
  return report;
}

}  // namespace tide::annotation
