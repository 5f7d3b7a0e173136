#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pparse/token.h"
#include "pparse/tree.h"

namespace pparse {

struct Configuration;  // transition.h

// Hashed feature space of size 2^dimension_log2; template_set_version names
// the template inventory (see docs/feature-templates.md).
struct FeatureConfig {
  int dimension_log2 = 23;
  std::string template_set_version = "v1";

  size_t dimension() const { return size_t{1} << dimension_log2; }
  void validate() const;  // throws DataError outside [16, 30] / unknown version
};

// Sparse index -> count vector, stored as sorted unique (index, count) pairs.
class FeatureVector {
 public:
  FeatureVector() = default;
  // consumes a raw (possibly duplicated) index list
  static FeatureVector from_indices(std::vector<uint32_t> raw);

  const std::vector<std::pair<uint32_t, int32_t>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  long total_count() const;

  double dot(std::span<const double> weights) const;
  void add_to(std::unordered_map<uint32_t, double>& acc, double scale) const;
  FeatureVector& operator+=(const FeatureVector& other);
  FeatureVector& subtract(const FeatureVector& other);

  bool operator==(const FeatureVector& other) const = default;

 private:
  std::vector<std::pair<uint32_t, int32_t>> entries_;
};

// 64-bit FNV-1a over the template bytes; fixed and seedless so indices are
// identical across runs and platforms for a given template set version.
uint64_t fnv1a(const unsigned char* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL);

constexpr int kNullSibling = -1;

class FeatureExtractor {
 public:
  explicit FeatureExtractor(FeatureConfig cfg);

  const FeatureConfig& config() const { return cfg_; }

  // raw-index emitters (hot path; duplicates mean counts)
  void arc_indices(const Sentence& s, int h, int m, std::vector<uint32_t>& out) const;
  void sibling_indices(const Sentence& s, int h, int m, int sib,
                       std::vector<uint32_t>& out) const;
  void action_indices(const Configuration& c, const Sentence& s,
                      std::vector<uint32_t>& out) const;

  FeatureVector arc_features(const Sentence& s, int h, int m) const;
  FeatureVector sibling_features(const Sentence& s, int h, int m, int sib) const;
  FeatureVector action_features(const Configuration& c, const Sentence& s) const;
  // all arc factors plus adjacent-sibling factors (null sibling for each
  // first child per side)
  FeatureVector tree_features(const Sentence& s, const DepTree& tree) const;
  void tree_indices(const Sentence& s, const std::vector<int>& heads,
                    std::vector<uint32_t>& out) const;

 private:
  FeatureConfig cfg_;
  uint64_t mask_;
};

// Distance bins: 1, 2, 3, 4, 5, 6-10, >10 (signed by direction where used).
int distance_bin(int dist);

// Per-action weight slot: the action id is mixed into the hashed index so one
// dense weight vector scores every (configuration, action) pair.
inline uint32_t action_slot(uint32_t index, int action, uint64_t mask) {
  uint64_t z = (uint64_t{index} << 3) + static_cast<uint64_t>(action) + 1;
  z *= 0x9e3779b97f4a7c15ULL;
  z ^= z >> 29;
  return static_cast<uint32_t>(z & mask);
}

}  // namespace pparse
