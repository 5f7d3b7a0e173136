#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pparse {

// Validation outcome: empty optional means valid, otherwise a diagnostic.
using TreeDiagnostic = std::optional<std::string>;

// heads[m-1] is the head of token m (0 = root).  Always a valid projective
// single-root tree; construction fails otherwise.
class DepTree {
 public:
  static DepTree from_heads(std::vector<int> heads);  // throws DataError
  static TreeDiagnostic validate(const std::vector<int>& heads);

  int size() const { return static_cast<int>(heads_.size()); }
  int head(int m) const { return heads_[static_cast<size_t>(m - 1)]; }
  const std::vector<int>& heads() const { return heads_; }

  bool operator==(const DepTree& other) const = default;

  // children of h (0..n) in ascending position order
  std::vector<int> children(int h) const;

 private:
  explicit DepTree(std::vector<int> heads) : heads_(std::move(heads)) {}
  std::vector<int> heads_;
};

// heads[m-1] is the annotated head of token m, or -1 when unannotated.
// Specified arcs must be jointly extendable to at least one DepTree.
class PartialTree {
 public:
  static PartialTree from_heads(std::vector<int> heads);  // throws DataError
  static PartialTree empty(int n);
  static PartialTree from_tree(const DepTree& tree);
  static TreeDiagnostic validate(const std::vector<int>& heads);

  int size() const { return static_cast<int>(heads_.size()); }
  bool specified(int m) const { return heads_[static_cast<size_t>(m - 1)] >= 0; }
  int head(int m) const { return heads_[static_cast<size_t>(m - 1)]; }
  const std::vector<int>& heads() const { return heads_; }

  int specified_count() const;
  bool complete() const { return specified_count() == size(); }
  DepTree to_tree() const;  // requires complete()

  // true when `tree` agrees with every specified arc
  bool consistent_with(const DepTree& tree) const;

  bool operator==(const PartialTree& other) const = default;

 private:
  explicit PartialTree(std::vector<int> heads) : heads_(std::move(heads)) {}
  std::vector<int> heads_;
};

// Shared helpers (also used by the chart engines and the test oracles).
bool is_single_root(const std::vector<int>& heads);
bool is_acyclic(const std::vector<int>& heads);
bool is_projective(const std::vector<int>& heads);

}  // namespace pparse
