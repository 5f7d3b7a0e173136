#include <algorithm>

#include "pparse/common.h"
#include "pparse/graph.h"

namespace pparse {

FactorScores::FactorScores(int n)
    : n_(n),
      arc_(static_cast<size_t>(n + 1) * (n + 1), 0.0),
      sib_(static_cast<size_t>(n + 1) * (n + 1) * (n + 1), 0.0) {}

namespace {

// Enumerates every (h, m, s) sibling-factor slot the chart can use; s == h is
// the null-sibling slot.  The root takes exactly one dependent, so h == 0 has
// only null-sibling slots.
template <typename Fn>
void for_each_sibling_slot(int n, Fn&& fn) {
  for (int h = 0; h <= n; ++h) {
    for (int m = h + 1; m <= n; ++m) {  // right dependents
      fn(h, m, h);
      if (h >= 1) {
        for (int s = h + 1; s < m; ++s) fn(h, m, s);
      }
    }
    for (int m = 1; m < h; ++m) {  // left dependents
      fn(h, m, h);
      for (int s = m + 1; s < h; ++s) fn(h, m, s);
    }
  }
}

}  // namespace

FactorScores score_factors(const Sentence& s, const FeatureExtractor& fx,
                           std::span<const double> weights) {
  const int n = s.size();
  FactorScores sc(n);
  std::vector<uint32_t> scratch;
  auto dot = [&](const std::vector<uint32_t>& idxs) {
    double v = 0.0;
    for (uint32_t i : idxs) v += weights[i];
    return v;
  };
  for (int m = 1; m <= n; ++m) {
    for (int h = 0; h <= n; ++h) {
      if (h == m) continue;
      scratch.clear();
      fx.arc_indices(s, h, m, scratch);
      sc.arc(h, m) = dot(scratch);
    }
  }
  for_each_sibling_slot(n, [&](int h, int m, int sb) {
    scratch.clear();
    fx.sibling_indices(s, h, m, sb == h ? kNullSibling : sb, scratch);
    sc.sib(h, m, sb) = dot(scratch);
  });
  return sc;
}

FactorScores score_factors_cached(const Sentence& s, const FeatureExtractor& fx,
                                  std::span<const double> weights,
                                  FactorFeatureCache& cache) {
  const int n = s.size();
  FactorScores sc(n);
  cache.n = n;
  cache.arc.assign(static_cast<size_t>(n + 1) * (n + 1), {});
  cache.sib.assign(static_cast<size_t>(n + 1) * (n + 1) * (n + 1), {});
  auto dot = [&](const std::vector<uint32_t>& idxs) {
    double v = 0.0;
    for (uint32_t i : idxs) v += weights[i];
    return v;
  };
  for (int m = 1; m <= n; ++m) {
    for (int h = 0; h <= n; ++h) {
      if (h == m) continue;
      auto& lst = cache.arc[static_cast<size_t>(h) * (n + 1) + m];
      fx.arc_indices(s, h, m, lst);
      sc.arc(h, m) = dot(lst);
    }
  }
  for_each_sibling_slot(n, [&](int h, int m, int sb) {
    auto& lst = cache.sib[(static_cast<size_t>(h) * (n + 1) + m) * (n + 1) + sb];
    fx.sibling_indices(s, h, m, sb == h ? kNullSibling : sb, lst);
    sc.sib(h, m, sb) = dot(lst);
  });
  return sc;
}

ConstraintMask ConstraintMask::none(int n) {
  return ConstraintMask(HeadCandidates::unconstrained(n));
}

ConstraintMask ConstraintMask::from_partial(const PartialTree& partial) {
  HeadCandidates cand = HeadCandidates::from_partial(partial);
  if (!forest_satisfiable(cand)) {
    throw DataError("partial annotation admits no projective single-root tree");
  }
  return ConstraintMask(std::move(cand));
}

namespace {

// Max-score second-order chart with backpointers.
//   cr/cl: complete spans headed at the left/right end
//   ir/il: spans whose covering arc (left->right / right->left) is built
//   sb:    two adjacent siblings plus the material between them
// Rules per span width: sb from smaller complete pairs; ir/il by first-child
// or adjacent-sibling combination; cr/cl by attaching a complete span to an
// arc item.  The root item ir[0][j] is derived only by the first-child rule,
// which forces exactly one dependent of 0 in any full derivation.
struct MaxChart {
  int n;
  std::vector<double> cr, cl, ir, il, sb;
  std::vector<int> bcr, bcl, bir, bil, bsb;  // argmax split / sibling (-1 = first child)

  explicit MaxChart(int n_)
      : n(n_),
        cr(cells(), kNegInf),
        cl(cells(), kNegInf),
        ir(cells(), kNegInf),
        il(cells(), kNegInf),
        sb(cells(), kNegInf),
        bcr(cells(), -2),
        bcl(cells(), -2),
        bir(cells(), -2),
        bil(cells(), -2),
        bsb(cells(), -2) {}

  size_t cells() const { return static_cast<size_t>(n + 1) * (n + 1); }
  size_t at(int i, int j) const {
    return static_cast<size_t>(i) * (n + 1) + static_cast<size_t>(j);
  }
};

void run_max(const FactorScores& scores, const ConstraintMask& mask, MaxChart& ch) {
  const int n = ch.n;
  for (int i = 0; i <= n; ++i) {
    ch.cr[ch.at(i, i)] = 0.0;
    ch.cl[ch.at(i, i)] = 0.0;
  }
  auto relax = [](double& best, int& bp, double cand, int arg) {
    if (cand > best) {
      best = cand;
      bp = arg;
    }
  };
  for (int d = 1; d <= n; ++d) {
    for (int i = 0; i + d <= n; ++i) {
      const int j = i + d;
      const size_t ij = ch.at(i, j);
      if (i >= 1) {
        for (int r = i; r < j; ++r) {
          const double v = ch.cr[ch.at(i, r)] + ch.cl[ch.at(r + 1, j)];
          relax(ch.sb[ij], ch.bsb[ij], v, r);
        }
      }
      if (mask.allowed(i, j)) {
        const double arc = scores.arc(i, j);
        relax(ch.ir[ij], ch.bir[ij],
              ch.cl[ch.at(i + 1, j)] + arc + scores.sib(i, j, i), -1);
        if (i >= 1) {
          for (int s = i + 1; s < j; ++s) {
            const double v =
                ch.ir[ch.at(i, s)] + ch.sb[ch.at(s, j)] + arc + scores.sib(i, j, s);
            relax(ch.ir[ij], ch.bir[ij], v, s);
          }
        }
      }
      if (i >= 1 && mask.allowed(j, i)) {
        const double arc = scores.arc(j, i);
        relax(ch.il[ij], ch.bil[ij],
              ch.cr[ch.at(i, j - 1)] + arc + scores.sib(j, i, j), -1);
        for (int s = i + 1; s < j; ++s) {
          const double v =
              ch.sb[ch.at(i, s)] + ch.il[ch.at(s, j)] + arc + scores.sib(j, i, s);
          relax(ch.il[ij], ch.bil[ij], v, s);
        }
      }
      for (int m = i + 1; m <= j; ++m) {
        const double v = ch.ir[ch.at(i, m)] + ch.cr[ch.at(m, j)];
        relax(ch.cr[ij], ch.bcr[ij], v, m);
      }
      if (i >= 1) {
        for (int m = i; m < j; ++m) {
          const double v = ch.cl[ch.at(i, m)] + ch.il[ch.at(m, j)];
          relax(ch.cl[ij], ch.bcl[ij], v, m);
        }
      }
    }
  }
}

struct Extractor {
  const MaxChart& ch;
  std::vector<int>& heads;

  void cr(int i, int j) const {
    if (i == j) return;
    const int m = ch.bcr[ch.at(i, j)];
    ir(i, m);
    cr(m, j);
  }
  void cl(int i, int j) const {
    if (i == j) return;
    const int m = ch.bcl[ch.at(i, j)];
    cl(i, m);
    il(m, j);
  }
  void ir(int i, int j) const {
    heads[static_cast<size_t>(j)] = i;
    const int s = ch.bir[ch.at(i, j)];
    if (s < 0) {
      cl(i + 1, j);
    } else {
      ir(i, s);
      sb(s, j);
    }
  }
  void il(int i, int j) const {
    heads[static_cast<size_t>(i)] = j;
    const int s = ch.bil[ch.at(i, j)];
    if (s < 0) {
      cr(i, j - 1);
    } else {
      sb(i, s);
      il(s, j);
    }
  }
  void sb(int i, int j) const {
    const int r = ch.bsb[ch.at(i, j)];
    cr(i, r);
    cl(r + 1, j);
  }
};

}  // namespace

DepTree decode(const FactorScores& scores, const ConstraintMask& mask) {
  const int n = scores.size();
  MaxChart ch(n);
  run_max(scores, mask, ch);
  if (!is_finite_score(ch.cr[ch.at(0, n)])) {
    throw DataError("no projective single-root tree satisfies the constraints");
  }
  std::vector<int> heads(static_cast<size_t>(n) + 1, -1);
  heads[0] = 0;
  Extractor{ch, heads}.cr(0, n);
  return DepTree::from_heads(std::vector<int>(heads.begin() + 1, heads.end()));
}

double score_tree(const FactorScores& scores, const DepTree& tree) {
  const int n = tree.size();
  double total = 0.0;
  for (int m = 1; m <= n; ++m) total += scores.arc(tree.head(m), m);
  std::vector<std::vector<int>> kids(static_cast<size_t>(n) + 1);
  for (int m = 1; m <= n; ++m) kids[static_cast<size_t>(tree.head(m))].push_back(m);
  for (int h = 0; h <= n; ++h) {
    const auto& ch = kids[static_cast<size_t>(h)];
    int prev = -1;
    for (int m : ch) {
      if (m < h) continue;
      total += scores.sib(h, m, prev < 0 ? h : prev);
      prev = m;
    }
    prev = -1;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) {
      if (*it > h) continue;
      total += scores.sib(h, *it, prev < 0 ? h : prev);
      prev = *it;
    }
  }
  return total;
}

}  // namespace pparse
