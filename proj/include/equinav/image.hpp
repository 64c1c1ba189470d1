#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "equinav/core.hpp"

namespace equinav {

// 8-bit grayscale image. Training code consumes the normalized [0,1] view.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
  bool degenerate = false;           // blank-sky fallback was rendered

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(std::size_t(w) * h, 0) {}

  std::uint8_t& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
  std::uint8_t at(int x, int y) const {
    return pixels[std::size_t(y) * width + x];
  }

  void set_norm(int x, int y, double v) {
    v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    at(x, y) = static_cast<std::uint8_t>(v * 255.0 + 0.5);
  }

  std::vector<float> normalized() const {
    std::vector<float> out(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i)
      out[i] = float(pixels[i]) / 255.0f;
    return out;
  }

  bool operator==(const Image& o) const {
    return width == o.width && height == o.height && pixels == o.pixels;
  }
};

// Binary PGM (P5), the on-disk image format for dataset manifests.
inline void write_pgm(const Image& img, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), "cannot open for write: " + path.string());
  f << "P5\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.pixels.data()),
          std::streamsize(img.pixels.size()));
  require(f.good(), "write failed: " + path.string());
}

inline Image read_pgm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open: " + path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  f >> magic >> w >> h >> maxval;
  require(magic == "P5" && maxval == 255 && w > 0 && h > 0,
          "not an 8-bit P5 PGM: " + path.string());
  f.get();  // single whitespace after header
  Image img(w, h);
  f.read(reinterpret_cast<char*>(img.pixels.data()),
         std::streamsize(img.pixels.size()));
  require(f.gcount() == std::streamsize(img.pixels.size()),
          "truncated PGM: " + path.string());
  return img;
}

}  // namespace equinav
