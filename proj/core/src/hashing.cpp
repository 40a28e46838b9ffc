#include "skewjoin/hashing.hpp"

namespace skewjoin {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t HashFamily::key(std::uint64_t residual, std::string_view attribute) const {
  return mix64(seed_ ^ mix64(residual * 0x9e3779b97f4a7c15ULL + fnv1a64(attribute)));
}

std::uint64_t HashFamily::bucket(std::uint64_t key, std::string_view value, std::uint64_t share) const {
  if (share <= 1) return 0;
  return mix64(fnv1a64(value) ^ key) % share;
}

}  // namespace skewjoin
