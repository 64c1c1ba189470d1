#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace equinav {

#if defined(__GLIBC__)
namespace detail {
// Training churns through multi-megabyte temporaries; with default malloc
// tunables each one becomes a fresh mmap/munmap cycle and the page-fault
// cost dwarfs the arithmetic. Keep large blocks on the heap for reuse.
inline const bool malloc_tuned = [] {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  return true;
}();
}  // namespace detail
#endif

// FNV-1a, used for artifact/config hashes and parameter freeze checks.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a(s.data(), s.size(), h);
}

// String literals would otherwise decay to void* and bind the length
// parameter, so give them their own exact-match overload.
inline std::uint64_t fnv1a(const char* s,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a(s, std::char_traits<char>::length(s), h);
}

// Per-episode RNG streams are derived as master_seed ^ episode_index.
inline std::uint64_t split_seed(std::uint64_t master_seed,
                                std::uint64_t stream_index) {
  return master_seed ^ stream_index;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

struct EquinavError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw EquinavError(msg);
}

}  // namespace equinav
