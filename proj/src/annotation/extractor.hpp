#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "core/types.hpp"

namespace tide::annotation {

// Dense per-cell feature grids used for correspondence matching. The mock
// backend derives features from image content plus a positional code; the
// file backend ingests precomputed volumes from disk.
class DenseFeatureExtractor {
 public:
  virtual ~DenseFeatureExtractor() = default;
  virtual core::FeatureVolume extract(const core::Image& image,
                                      const std::string& sample_id) const = 0;
  virtual int channels() const = 0;
  virtual std::string kind() const = 0;
};

class MockDenseFeatureExtractor : public DenseFeatureExtractor {
 public:
  explicit MockDenseFeatureExtractor(int grid) : grid_(grid) {}
  core::FeatureVolume extract(const core::Image& image,
                              const std::string& sample_id) const override;
  int channels() const override { return 12; }
  std::string kind() const override { return "mock-deterministic"; }

 private:
  int grid_;
};

// Reads <dir>/<sample_id>.tfv: magic "TFV1", int32 w,h,c (little endian),
// then w*h*c doubles in cell-major, channel-last order.
class FileFeatureExtractor : public DenseFeatureExtractor {
 public:
  FileFeatureExtractor(std::filesystem::path dir, int channels)
      : dir_(std::move(dir)), channels_(channels) {}
  core::FeatureVolume extract(const core::Image& image,
                              const std::string& sample_id) const override;
  int channels() const override { return channels_; }
  std::string kind() const override { return "external"; }

 private:
  std::filesystem::path dir_;
  int channels_;
};

void write_feature_volume(const core::FeatureVolume& f,
                          const std::filesystem::path& path);
core::FeatureVolume read_feature_volume(const std::filesystem::path& path);

struct ExtractorConfig {
  std::string kind = "mock";  // "mock" | "file"
  std::string feature_dir;
  int grid = 7;
  int channels = 12;
};

std::unique_ptr<DenseFeatureExtractor> make_extractor(
    const ExtractorConfig& cfg);

}  // namespace tide::annotation
