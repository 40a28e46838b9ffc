#pragma once

#include <cstdint>
#include <string_view>

namespace skewjoin {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seeded per-(residual join, attribute) hash functions h: value -> [0, share).
/// Deterministic given the seed; different (residual, attribute) pairs use
/// independent keys.
class HashFamily {
 public:
  explicit HashFamily(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t key(std::uint64_t residual, std::string_view attribute) const;
  std::uint64_t bucket(std::uint64_t key, std::string_view value, std::uint64_t share) const;
  std::uint64_t bucket(std::uint64_t residual, std::string_view attribute, std::string_view value,
                       std::uint64_t share) const {
    return bucket(key(residual, attribute), value, share);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace skewjoin
