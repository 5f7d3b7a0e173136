#pragma once

#include <vector>

#include "pparse/tree.h"

namespace pparse {

// Per-modifier allowed-head sets over a length-n sentence (plus root 0).
// Defines the projective single-root forest {trees : head(m) in allowed(m)}.
class HeadCandidates {
 public:
  static HeadCandidates unconstrained(int n);
  static HeadCandidates from_partial(const PartialTree& partial);

  int size() const { return n_; }
  bool allowed(int h, int m) const { return allowed_[idx(h, m)] != 0; }
  void set(int h, int m, bool v) { allowed_[idx(h, m)] = v ? 1 : 0; }
  void restrict_to(int m, int h);  // singleton constraint

 private:
  explicit HeadCandidates(int n);
  size_t idx(int h, int m) const {
    return static_cast<size_t>(h) * (n_ + 1) + static_cast<size_t>(m);
  }
  int n_ = 0;
  std::vector<unsigned char> allowed_;
};

// True iff at least one projective single-root tree satisfies the candidate sets.
bool forest_satisfiable(const HeadCandidates& cands);

// reachable[h][m] == true iff some tree in the forest contains arc h -> m.
// Row-major (n+1) x (n+1), modifier column 0 unused.
std::vector<unsigned char> forest_arc_reachable(const HeadCandidates& cands);

// For each token m (1..n), the heads h such that some valid tree consistent
// with `partial` contains h -> m.  Throws DataError when the partial is
// unsatisfiable.  result[m-1] is sorted ascending.
std::vector<std::vector<int>> candidate_heads(const PartialTree& partial);

}  // namespace pparse
