#pragma once

// Versioned on-disk cache of class sets, keyed by (p, g).

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ssg/hermitian.hpp"

namespace ssg {

inline constexpr int kCacheFormatVersion = 1;

/// Raised when a cache file exists but cannot be trusted.
class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json class_set_to_json(const PolarizedClassSet& cs);
/// Rebuilds lattices and automorphism groups and re-checks every stored
/// invariant; throws CacheError on any mismatch.
PolarizedClassSet class_set_from_json(const nlohmann::json& j);

std::string cache_file(const std::string& dir, long p, std::size_t g);
/// nullopt when the file does not exist.
std::optional<PolarizedClassSet> load_cache(const std::string& dir, long p, std::size_t g);
void store_cache(const std::string& dir, const PolarizedClassSet& cs);

/// Smallest prime different from p.
long auxiliary_prime(long p);

/// Loads from `dir` when possible, otherwise computes (with an auxiliary
/// prime) and stores. An empty `dir` disables caching.
PolarizedClassSet cached_class_set(const std::string& dir, long p, std::size_t g);

}  // namespace ssg
