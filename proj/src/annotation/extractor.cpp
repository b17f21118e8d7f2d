#include "annotation/extractor.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "core/image.hpp"

namespace tide::annotation {

core::FeatureVolume MockDenseFeatureExtractor::extract(
    const core::Image& image, const std::string& /*sample_id*/) const {
  const int g = grid_;
  core::FeatureVolume f(g, g, channels());
  const int bx = image.w / g;
  const int by = image.h / g;
  constexpr double kPi = 3.14159265358979323846;
  constexpr double kPositionWeight = 0.25;

  for (int gy = 0; gy < g; ++gy) {
    for (int gx = 0; gx < g; ++gx) {
      double mean[3] = {0, 0, 0};
      double sq[3] = {0, 0, 0};
      double gx_abs = 0.0, gy_abs = 0.0;
      int n = 0;
      for (int y = gy * by; y < (gy + 1) * by; ++y) {
        for (int x = gx * bx; x < (gx + 1) * bx; ++x) {
          for (int ch = 0; ch < 3; ++ch) {
            const double v = image.at(x, y, ch);
            mean[ch] += v;
            sq[ch] += v * v;
          }
          const double lum = 0.299 * image.at(x, y, 0) +
                             0.587 * image.at(x, y, 1) +
                             0.114 * image.at(x, y, 2);
          if (x + 1 < image.w) {
            const double lum_r = 0.299 * image.at(x + 1, y, 0) +
                                 0.587 * image.at(x + 1, y, 1) +
                                 0.114 * image.at(x + 1, y, 2);
            gx_abs += std::abs(lum_r - lum);
          }
          if (y + 1 < image.h) {
            const double lum_d = 0.299 * image.at(x, y + 1, 0) +
                                 0.587 * image.at(x, y + 1, 1) +
                                 0.114 * image.at(x, y + 1, 2);
            gy_abs += std::abs(lum_d - lum);
          }
          ++n;
        }
      }
      double* cell = f.cell(gx, gy);
      for (int ch = 0; ch < 3; ++ch) {
        const double m = mean[ch] / n;
        cell[ch] = m;
        cell[3 + ch] = std::sqrt(std::max(0.0, sq[ch] / n - m * m));
      }
      cell[6] = gx_abs / n;
      cell[7] = gy_abs / n;
      const double u = g > 1 ? static_cast<double>(gx) / (g - 1) : 0.0;
      const double v = g > 1 ? static_cast<double>(gy) / (g - 1) : 0.0;
      cell[8] = kPositionWeight * std::sin(kPi * u);
      cell[9] = kPositionWeight * std::cos(kPi * u);
      cell[10] = kPositionWeight * std::sin(kPi * v);
      cell[11] = kPositionWeight * std::cos(kPi * v);
    }
  }
  return f;
}

void write_feature_volume(const core::FeatureVolume& f,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write("TFV1", 4);
  const std::int32_t dims[3] = {f.w, f.h, f.c};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!out) throw Error(ErrorCode::kIo, "short write " + path.string());
}

core::FeatureVolume read_feature_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "TFV1") {
    throw Error(ErrorCode::kInvalidInput,
                "not a feature volume: " + path.string());
  }
  std::int32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || dims[0] < 1 || dims[1] < 1 || dims[2] < 1) {
    throw Error(ErrorCode::kInvalidInput,
                "bad feature volume header: " + path.string());
  }
  core::FeatureVolume f(dims[0], dims[1], dims[2]);
  in.read(reinterpret_cast<char*>(f.v.data()),
          static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!in) throw Error(ErrorCode::kIo, "short read " + path.string());
  return f;
}

core::FeatureVolume FileFeatureExtractor::extract(
    const core::Image& /*image*/, const std::string& sample_id) const {
  return read_feature_volume(dir_ / (sample_id + ".tfv"));
}

std::unique_ptr<DenseFeatureExtractor> make_extractor(
    const ExtractorConfig& cfg) {
  if (cfg.kind == "mock") {
    return std::make_unique<MockDenseFeatureExtractor>(cfg.grid);
  }
  if (cfg.kind == "file") {
    if (cfg.feature_dir.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "file extractor needs feature_dir");
    }
    return std::make_unique<FileFeatureExtractor>(cfg.feature_dir,
                                                  cfg.channels);
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown extractor kind: " + cfg.kind);
}

}  // namespace tide::annotation
