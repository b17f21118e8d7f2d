#include "synthbench/generate.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "core/image.hpp"
#include "util/hash.hpp"
#include "util/rng.hpp"

namespace tide::synthbench {

namespace {

constexpr std::uint64_t kLayoutTag = 0x4c41594f55540001ull;
constexpr std::uint64_t kStyleTag = 0x5354594c45000001ull;

std::string zero_pad(int v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s = "0" + s;
  return s;
}

double pair_overlap(const std::vector<std::uint8_t>& a,
                    const std::vector<std::uint8_t>& b) {
  int both = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
    both += a[i] & b[i];
  }
  int mn = std::min(na, nb);
  if (mn == 0) return 0.0;
  return static_cast<double>(both) / mn;
}

}  // namespace

std::vector<PlacedConcept> place_concepts(const BenchmarkConfig& cfg,
                                          const ClassSpec& cls,
                                          std::mt19937_64& layout_rng) {
  const int n = cfg.image_size;
  const int max_attempts = 25;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<PlacedConcept> placed;
    for (int kid : cls.concept_ids) {
      const ConceptSpec* spec = nullptr;
      for (const auto& k : cfg.concepts) {
        if (k.id == kid) spec = &k;
      }
      if (!spec) {
        throw Error(ErrorCode::kInvalidConfig, "layout: unknown concept id");
      }
      PlacedConcept pc;
      pc.concept_id = kid;
      double area_frac =
          spec->area * util::uniform(layout_rng, 1.0 - cfg.area_jitter,
                                     1.0 + cfg.area_jitter);
      pc.area_px = area_frac * n * n;
      double br = bounding_radius(spec->shape, pc.area_px);
      double jx = util::uniform(layout_rng, -cfg.jitter, cfg.jitter);
      double jy = util::uniform(layout_rng, -cfg.jitter, cfg.jitter);
      // Keep the primitive fully on-canvas.
      pc.cx = std::clamp((spec->anchor_x + jx) * n, br + 1.0, n - br - 1.0);
      pc.cy = std::clamp((spec->anchor_y + jy) * n, br + 1.0, n - br - 1.0);
      pc.occupancy = rasterize(spec->shape, pc.cx, pc.cy, pc.area_px, n);
      placed.push_back(std::move(pc));
    }
    bool ok = true;
    for (size_t i = 0; i < placed.size() && ok; ++i) {
      for (size_t j = i + 1; j < placed.size() && ok; ++j) {
        if (pair_overlap(placed[i].occupancy, placed[j].occupancy) >
            cfg.overlap_tolerance) {
          ok = false;
        }
      }
    }
    if (ok) return placed;
  }
  throw Error(ErrorCode::kGeneration,
              "could not place concepts of class " + cls.name +
                  " within the overlap tolerance");
}

Manifest generate_dataset(const BenchmarkConfig& cfg,
                          const std::filesystem::path& out_dir) {
  cfg.validate();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorCode::kIo,
                "cannot create dataset directory: " + out_dir.string());
  }
  for (const auto& d : cfg.domains) {
    std::filesystem::create_directories(out_dir / "images" / d.name, ec);
    std::filesystem::create_directories(out_dir / "masks" / d.name, ec);
    if (ec) {
      throw Error(ErrorCode::kIo, "cannot create dataset subdirectories");
    }
  }

  Manifest m;
  m.dir = out_dir;
  m.seed = cfg.seed;
  m.image_size = cfg.image_size;
  m.mask_grid = cfg.mask_grid;
  m.concepts = cfg.concepts;
  m.classes = cfg.classes;
  m.domains = cfg.domains;

  struct Job {
    int domain_idx;
    int class_idx;
    int sample_idx;  // within (class, domain), over train+test
  };
  std::vector<Job> jobs;
  const int per_cd =
      cfg.train_per_class_per_domain + cfg.test_per_class_per_domain;
  for (size_t d = 0; d < cfg.domains.size(); ++d) {
    for (size_t c = 0; c < cfg.classes.size(); ++c) {
      for (int i = 0; i < per_cd; ++i) {
        jobs.push_back({static_cast<int>(d), static_cast<int>(c), i});
      }
    }
  }

  m.records.resize(jobs.size());
  struct Failure {
    bool failed = false;
    ErrorCode code = ErrorCode::kGeneration;
    std::string message;
  };
  std::vector<Failure> failures(jobs.size());

#pragma omp parallel for schedule(dynamic)
  for (long ji = 0; ji < static_cast<long>(jobs.size()); ++ji) {
    const Job& job = jobs[static_cast<size_t>(ji)];
    const auto& dom = cfg.domains[static_cast<size_t>(job.domain_idx)];
    const auto& cls = cfg.classes[static_cast<size_t>(job.class_idx)];
    try {
      bool is_train = job.sample_idx < cfg.train_per_class_per_domain;
      std::string split = is_train ? "train" : "test";
      int split_idx = is_train
                          ? job.sample_idx
                          : job.sample_idx - cfg.train_per_class_per_domain;
      std::string sid = dom.name + "_" + cls.name + "_" + split + "_" +
                        zero_pad(split_idx, 4);

      // Layout is derived from (seed, class, sample) only, never the
      // domain, so masks are identical across domain renderings.
      auto layout_rng = util::rng_stream(
          cfg.seed, {kLayoutTag, static_cast<std::uint64_t>(cls.id),
                     static_cast<std::uint64_t>(job.sample_idx)});
      auto placed = place_concepts(cfg, cls, layout_rng);

      auto style_rng = util::rng_stream(
          cfg.seed, {kStyleTag, dom.param_seed,
                     static_cast<std::uint64_t>(cls.id),
                     static_cast<std::uint64_t>(job.sample_idx)});
      core::Image img = render_sample(cfg, cls, dom, placed, style_rng);

      SampleRecord rec;
      rec.id = sid;
      rec.domain = dom.id;
      rec.class_id = cls.id;
      rec.split = split;
      rec.concepts = cls.concept_ids;

      rec.image_path = "images/" + dom.name + "/" + sid + ".ppm";
      core::write_ppm(img, out_dir / rec.image_path);
      rec.image_checksum = util::checksum_string(
          util::file_checksum((out_dir / rec.image_path).string()));

      for (const auto& pc : placed) {
        auto mask = downsample_mask(pc.occupancy, cfg.image_size,
                                    cfg.mask_grid, pc.concept_id);
        std::string rel = "masks/" + dom.name + "/" + sid + "_k" +
                          std::to_string(pc.concept_id) + ".pgm";
        core::write_mask_pgm(mask, out_dir / rel);
        rec.mask_paths[pc.concept_id] = rel;
        rec.mask_checksums[pc.concept_id] = util::checksum_string(
            util::file_checksum((out_dir / rel).string()));
      }
      m.records[static_cast<size_t>(ji)] = std::move(rec);
    } catch (const Error& e) {
      failures[static_cast<size_t>(ji)] = {true, e.code(), e.what()};
    } catch (const std::exception& e) {
      failures[static_cast<size_t>(ji)] = {true, ErrorCode::kGeneration,
                                           e.what()};
    }
  }

  for (const auto& f : failures) {
    if (f.failed) {
      throw Error(f.code, "generation failed: " + f.message);
    }
  }

  m.save();
  return m;
}

}  // namespace tide::synthbench
