#include "pparse/tree.h"

#include <algorithm>

#include "pparse/common.h"
#include "pparse/forest.h"

namespace pparse {

bool is_single_root(const std::vector<int>& heads) {
  int roots = 0;
  for (int h : heads) roots += (h == 0) ? 1 : 0;
  return roots == 1;
}

bool is_acyclic(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int m = 1; m <= n; ++m) {
    int cur = m;
    int steps = 0;
    while (cur != 0) {
      cur = heads[static_cast<size_t>(cur - 1)];
      if (++steps > n) return false;
    }
  }
  return true;
}

// Definition-true check: for every arc (h, m), each token strictly between
// h and m must be a descendant of h.
bool is_projective(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  auto descends_from = [&](int tok, int anc) {
    int cur = tok;
    int steps = 0;
    while (cur != 0) {
      if (cur == anc) return true;
      cur = heads[static_cast<size_t>(cur - 1)];
      if (++steps > n) return false;
    }
    return anc == 0;
  };
  for (int m = 1; m <= n; ++m) {
    int h = heads[static_cast<size_t>(m - 1)];
    int lo = std::min(h, m), hi = std::max(h, m);
    for (int k = lo + 1; k < hi; ++k) {
      if (!descends_from(k, h)) return false;
    }
  }
  return true;
}

TreeDiagnostic DepTree::validate(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) return "empty sentence";
  for (int m = 1; m <= n; ++m) {
    int h = heads[static_cast<size_t>(m - 1)];
    if (h < 0 || h > n) return "head index out of range for token " + std::to_string(m);
    if (h == m) return "token " + std::to_string(m) + " heads itself";
  }
  if (!is_single_root(heads)) return "tree must have exactly one root attachment";
  if (!is_acyclic(heads)) return "cycle among dependencies";
  if (!is_projective(heads)) return "non-projective tree";
  return std::nullopt;
}

DepTree DepTree::from_heads(std::vector<int> heads) {
  if (auto err = validate(heads)) throw DataError(*err);
  return DepTree(std::move(heads));
}

std::vector<int> DepTree::children(int h) const {
  std::vector<int> out;
  for (int m = 1; m <= size(); ++m) {
    if (head(m) == h) out.push_back(m);
  }
  return out;
}

PartialTree PartialTree::empty(int n) {
  return PartialTree(std::vector<int>(static_cast<size_t>(n), -1));
}

PartialTree PartialTree::from_tree(const DepTree& tree) {
  return PartialTree(tree.heads());
}

int PartialTree::specified_count() const {
  int c = 0;
  for (int h : heads_) c += (h >= 0) ? 1 : 0;
  return c;
}

DepTree PartialTree::to_tree() const {
  if (!complete()) throw DataError("annotation is not complete");
  return DepTree::from_heads(heads_);
}

bool PartialTree::consistent_with(const DepTree& tree) const {
  if (tree.size() != size()) return false;
  for (int m = 1; m <= size(); ++m) {
    if (specified(m) && head(m) != tree.head(m)) return false;
  }
  return true;
}

TreeDiagnostic PartialTree::validate(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) return "empty sentence";
  int roots = 0;
  for (int m = 1; m <= n; ++m) {
    int h = heads[static_cast<size_t>(m - 1)];
    if (h < -1 || h > n) return "head index out of range for token " + std::to_string(m);
    if (h == m) return "token " + std::to_string(m) + " heads itself";
    roots += (h == 0) ? 1 : 0;
  }
  if (roots > 1) return "more than one root attachment";
  // cycle among specified arcs
  for (int m = 1; m <= n; ++m) {
    int cur = heads[static_cast<size_t>(m - 1)];
    int steps = 0;
    while (cur > 0) {
      if (cur == m) return "cycle among specified dependencies";
      cur = heads[static_cast<size_t>(cur - 1)];
      if (++steps > n) break;
    }
  }
  // crossing specified arcs: spans strictly interleave
  for (int a = 1; a <= n; ++a) {
    int ha = heads[static_cast<size_t>(a - 1)];
    if (ha < 0) continue;
    int alo = std::min(ha, a), ahi = std::max(ha, a);
    for (int b = a + 1; b <= n; ++b) {
      int hb = heads[static_cast<size_t>(b - 1)];
      if (hb < 0) continue;
      int blo = std::min(hb, b), bhi = std::max(hb, b);
      if ((alo < blo && blo < ahi && ahi < bhi) ||
          (blo < alo && alo < bhi && bhi < ahi)) {
        return "crossing specified dependencies";
      }
    }
  }
  // extendability: some projective single-root tree must contain the arcs
  PartialTree probe{heads};
  if (!forest_satisfiable(HeadCandidates::from_partial(probe))) {
    return "specified dependencies admit no projective single-root tree";
  }
  return std::nullopt;
}

PartialTree PartialTree::from_heads(std::vector<int> heads) {
  if (auto err = validate(heads)) throw DataError(*err);
  return PartialTree(std::move(heads));
}

}  // namespace pparse
