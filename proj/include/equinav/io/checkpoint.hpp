#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "equinav/nn/layers.hpp"

namespace equinav {

// Checkpoint layout: magic + version, an entry table (name, rows, cols,
// payload offset), then all tensors as contiguous little-endian float32 in
// column-major storage order. Round-trips are bit-exact for float models.
namespace ckpt_detail {

constexpr char kMagic[8] = {'E', 'Q', 'N', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename V>
void put(std::ofstream& f, const V& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <typename V>
V get(std::ifstream& f) {
  V v;
  f.read(reinterpret_cast<char*>(&v), sizeof(V));
  require(f.good(), "checkpoint: truncated file");
  return v;
}

}  // namespace ckpt_detail

inline void save_checkpoint(const std::filesystem::path& path,
                            const std::vector<ParamRef<float>>& params) {
  namespace d = ckpt_detail;
  // Write to a temporary name and rename, so readers never see a torn file.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    require(f.good(), "cannot open for write: " + tmp.string());
    f.write(d::kMagic, sizeof(d::kMagic));
    d::put(f, d::kVersion);
    d::put(f, std::uint32_t(params.size()));
    std::uint64_t offset = 0;
    for (const auto& p : params) {
      d::put(f, std::uint32_t(p.name.size()));
      f.write(p.name.data(), std::streamsize(p.name.size()));
      d::put(f, std::uint32_t(p.value->rows()));
      d::put(f, std::uint32_t(p.value->cols()));
      d::put(f, offset);
      offset += std::uint64_t(p.value->size()) * sizeof(float);
    }
    for (const auto& p : params)
      f.write(reinterpret_cast<const char*>(p.value->data()),
              std::streamsize(std::size_t(p.value->size()) * sizeof(float)));
    require(f.good(), "checkpoint: write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// Loads into an existing parameter list; every entry must match by name,
// shape, and order.
inline void load_checkpoint(const std::filesystem::path& path,
                            const std::vector<ParamRef<float>>& params) {
  namespace d = ckpt_detail;
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open checkpoint: " + path.string());
  char magic[8];
  f.read(magic, sizeof(magic));
  require(f.good() && std::memcmp(magic, d::kMagic, sizeof(magic)) == 0,
          "not a checkpoint file: " + path.string());
  require(d::get<std::uint32_t>(f) == d::kVersion,
          "unsupported checkpoint version in " + path.string());
  const auto n = d::get<std::uint32_t>(f);
  require(n == params.size(),
          "checkpoint entry count does not match the model: " +
              path.string());
  for (const auto& p : params) {
    const auto name_len = d::get<std::uint32_t>(f);
    std::string name(name_len, '\0');
    f.read(name.data(), name_len);
    require(f.good() && name == p.name,
            "checkpoint entry mismatch: expected " + p.name + ", found " +
                name);
    const auto rows = d::get<std::uint32_t>(f);
    const auto cols = d::get<std::uint32_t>(f);
    require(rows == std::uint32_t(p.value->rows()) &&
                cols == std::uint32_t(p.value->cols()),
            "checkpoint shape mismatch for " + p.name);
    d::get<std::uint64_t>(f);  // offset, implied by entry order
  }
  for (const auto& p : params) {
    f.read(reinterpret_cast<char*>(p.value->data()),
           std::streamsize(std::size_t(p.value->size()) * sizeof(float)));
    require(f.good(), "checkpoint: truncated payload in " + path.string());
  }
}

}  // namespace equinav
