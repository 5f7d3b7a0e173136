#include "pparse/forest.h"

#include "pparse/common.h"

namespace pparse {

HeadCandidates::HeadCandidates(int n)
    : n_(n), allowed_(static_cast<size_t>(n + 1) * (n + 1), 0) {}

HeadCandidates HeadCandidates::unconstrained(int n) {
  HeadCandidates c(n);
  for (int m = 1; m <= n; ++m) {
    for (int h = 0; h <= n; ++h) {
      if (h != m) c.set(h, m, true);
    }
  }
  return c;
}

HeadCandidates HeadCandidates::from_partial(const PartialTree& partial) {
  HeadCandidates c = unconstrained(partial.size());
  for (int m = 1; m <= partial.size(); ++m) {
    if (partial.specified(m)) c.restrict_to(m, partial.head(m));
  }
  return c;
}

void HeadCandidates::restrict_to(int m, int h) {
  for (int x = 0; x <= n_; ++x) set(x, m, x == h);
}

namespace {

// First-order projective chart in the boolean semiring, single-root rule
// built in: the root's incomplete item is derived only by the first-child
// combination, so exactly one token attaches to 0.
struct BoolChart {
  int n;
  std::vector<unsigned char> cr, cl, ir, il;

  explicit BoolChart(int n_)
      : n(n_),
        cr(cells(), 0),
        cl(cells(), 0),
        ir(cells(), 0),
        il(cells(), 0) {}

  size_t cells() const { return static_cast<size_t>(n + 1) * (n + 1); }
  size_t at(int i, int j) const {
    return static_cast<size_t>(i) * (n + 1) + static_cast<size_t>(j);
  }
};

BoolChart run_inside(const HeadCandidates& cands) {
  const int n = cands.size();
  BoolChart ch(n);
  for (int i = 0; i <= n; ++i) {
    ch.cr[ch.at(i, i)] = 1;
    ch.cl[ch.at(i, i)] = 1;
  }
  for (int d = 1; d <= n; ++d) {
    for (int i = 0; i + d <= n; ++i) {
      const int j = i + d;
      if (i == 0) {
        if (cands.allowed(0, j) && ch.cl[ch.at(1, j)]) ch.ir[ch.at(0, j)] = 1;
      } else {
        bool join = false;
        for (int r = i; r < j && !join; ++r) {
          join = ch.cr[ch.at(i, r)] && ch.cl[ch.at(r + 1, j)];
        }
        if (join) {
          if (cands.allowed(i, j)) ch.ir[ch.at(i, j)] = 1;
          if (cands.allowed(j, i)) ch.il[ch.at(i, j)] = 1;
        }
      }
      for (int m = i + 1; m <= j; ++m) {
        if (ch.ir[ch.at(i, m)] && ch.cr[ch.at(m, j)]) {
          ch.cr[ch.at(i, j)] = 1;
          break;
        }
      }
      if (i >= 1) {
        for (int m = i; m < j; ++m) {
          if (ch.cl[ch.at(i, m)] && ch.il[ch.at(m, j)]) {
            ch.cl[ch.at(i, j)] = 1;
            break;
          }
        }
      }
    }
  }
  return ch;
}

}  // namespace

bool forest_satisfiable(const HeadCandidates& cands) {
  const int n = cands.size();
  if (n == 0) return false;
  BoolChart ch = run_inside(cands);
  return ch.cr[ch.at(0, n)] != 0;
}

std::vector<unsigned char> forest_arc_reachable(const HeadCandidates& cands) {
  const int n = cands.size();
  BoolChart in = run_inside(cands);
  BoolChart out(n);
  std::vector<unsigned char> reach(static_cast<size_t>(n + 1) * (n + 1), 0);
  if (!in.cr[in.at(0, n)]) return reach;
  out.cr[out.at(0, n)] = 1;
  // reverse topological order: wide spans first; complete items before
  // incomplete ones within a width (cr[i][j] feeds ir[i][j] via m == j)
  for (int d = n; d >= 1; --d) {
    for (int i = 0; i + d <= n; ++i) {
      const int j = i + d;
      if (out.cr[out.at(i, j)]) {
        for (int m = i + 1; m <= j; ++m) {
          if (in.ir[in.at(i, m)] && in.cr[in.at(m, j)]) {
            out.ir[out.at(i, m)] = 1;
            out.cr[out.at(m, j)] = 1;
          }
        }
      }
      if (i >= 1 && out.cl[out.at(i, j)]) {
        for (int m = i; m < j; ++m) {
          if (in.cl[in.at(i, m)] && in.il[in.at(m, j)]) {
            out.cl[out.at(i, m)] = 1;
            out.il[out.at(m, j)] = 1;
          }
        }
      }
      if (out.ir[out.at(i, j)] && in.ir[in.at(i, j)]) {
        if (i == 0) {
          out.cl[out.at(1, j)] = 1;
        } else {
          for (int r = i; r < j; ++r) {
            if (in.cr[in.at(i, r)] && in.cl[in.at(r + 1, j)]) {
              out.cr[out.at(i, r)] = 1;
              out.cl[out.at(r + 1, j)] = 1;
            }
          }
        }
      }
      if (i >= 1 && out.il[out.at(i, j)] && in.il[in.at(i, j)]) {
        for (int r = i; r < j; ++r) {
          if (in.cr[in.at(i, r)] && in.cl[in.at(r + 1, j)]) {
            out.cr[out.at(i, r)] = 1;
            out.cl[out.at(r + 1, j)] = 1;
          }
        }
      }
    }
  }
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (in.ir[in.at(i, j)] && out.ir[out.at(i, j)]) {
        reach[static_cast<size_t>(i) * (n + 1) + j] = 1;
      }
      if (i >= 1 && in.il[in.at(i, j)] && out.il[out.at(i, j)]) {
        reach[static_cast<size_t>(j) * (n + 1) + i] = 1;
      }
    }
  }
  return reach;
}

std::vector<std::vector<int>> candidate_heads(const PartialTree& partial) {
  const int n = partial.size();
  HeadCandidates cands = HeadCandidates::from_partial(partial);
  std::vector<unsigned char> reach = forest_arc_reachable(cands);
  std::vector<std::vector<int>> out(static_cast<size_t>(n));
  for (int m = 1; m <= n; ++m) {
    for (int h = 0; h <= n; ++h) {
      if (reach[static_cast<size_t>(h) * (n + 1) + m]) {
        out[static_cast<size_t>(m - 1)].push_back(h);
      }
    }
    if (out[static_cast<size_t>(m - 1)].empty()) {
      throw DataError("partial annotation admits no projective single-root tree");
    }
  }
  return out;
}

}  // namespace pparse
