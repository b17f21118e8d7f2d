#include "core/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

namespace tide::core {

namespace {

void write_file(const std::filesystem::path& path, const std::string& header,
                const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot open for write: " + path.string());
  }
  out << header;
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, "short write: " + path.string());
  }
}

struct PnmHeader {
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  std::streampos data_start;
};

PnmHeader read_header(std::ifstream& in, const std::filesystem::path& path) {
  PnmHeader hd;
  in >> hd.magic >> hd.w >> hd.h >> hd.maxval;
  if (!in || hd.w <= 0 || hd.h <= 0 || hd.maxval != 255) {
    throw Error(ErrorCode::kIo, "bad PNM header: " + path.string());
  }
  in.get();  // single whitespace byte terminating the header
  hd.data_start = in.tellg();
  return hd;
}

}  // namespace

void quantize_to_8bit(Image& img) {
  for (double& x : img.v) {
    double q = std::round(std::min(1.0, std::max(0.0, x)) * 255.0);
    x = q / 255.0;
  }
}

void write_ppm(const Image& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(img.v.size());
  for (size_t i = 0; i < img.v.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(
        std::round(std::min(1.0, std::max(0.0, img.v[i])) * 255.0));
  }
  write_file(path,
             "P6\n" + std::to_string(img.w) + " " + std::to_string(img.h) +
                 "\n255\n",
             bytes);
}

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open: " + path.string());
  PnmHeader hd = read_header(in, path);
  if (hd.magic != "P6") {
    throw Error(ErrorCode::kIo, "expected P6: " + path.string());
  }
  Image img(hd.w, hd.h);
  std::vector<std::uint8_t> bytes(img.v.size());
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!in) throw Error(ErrorCode::kIo, "short read: " + path.string());
  for (size_t i = 0; i < bytes.size(); ++i) {
    img.v[i] = bytes[i] / 255.0;
  }
  return img;
}

void write_mask_pgm(const ConceptMask& mask,
                    const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(mask.v.size());
  for (size_t i = 0; i < mask.v.size(); ++i) {
    bytes[i] = mask.v[i] ? 255 : 0;
  }
  write_file(path,
             "P5\n" + std::to_string(mask.w) + " " + std::to_string(mask.h) +
                 "\n255\n",
             bytes);
}

ConceptMask read_mask_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open: " + path.string());
  PnmHeader hd = read_header(in, path);
  if (hd.magic != "P5") {
    throw Error(ErrorCode::kIo, "expected P5: " + path.string());
  }
  ConceptMask mask(hd.w, hd.h, -1);
  std::vector<std::uint8_t> bytes(mask.v.size());
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!in) throw Error(ErrorCode::kIo, "short read: " + path.string());
  for (size_t i = 0; i < bytes.size(); ++i) {
    mask.v[i] = bytes[i] >= 128 ? 1 : 0;
  }
  return mask;
}

Map2D upsample_nearest(const Map2D& grid, int out_w, int out_h) {
  Map2D out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    int gy = std::min(grid.h - 1, y * grid.h / out_h);
    for (int x = 0; x < out_w; ++x) {
      int gx = std::min(grid.w - 1, x * grid.w / out_w);
      out.at(x, y) = grid.at(gx, gy);
    }
  }
  return out;
}

Map2D to_gray(const Image& img) {
  Map2D g(img.w, img.h);
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      g.at(x, y) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                   0.114 * img.at(x, y, 2);
    }
  }
  return g;
}

}  // namespace tide::core
