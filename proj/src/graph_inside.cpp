#include "pparse/common.h"
#include "pparse/graph.h"

namespace pparse {

namespace {

// Log-semiring counterpart of the max chart in graph_decode.cpp, plus an
// outside pass.  Outside processing runs wide-to-narrow; within one width the
// complete items must be expanded first because cr[i][j] feeds ir[i][j] (the
// m == j split) and cl[i][j] feeds il[i][j] (the m == i split).
struct LogChart {
  int n;
  std::vector<double> cr, cl, ir, il, sb;
  std::vector<double> ocr, ocl, oir, oil, osb;

  explicit LogChart(int n_)
      : n(n_),
        cr(cells(), kNegInf),
        cl(cells(), kNegInf),
        ir(cells(), kNegInf),
        il(cells(), kNegInf),
        sb(cells(), kNegInf),
        ocr(cells(), kNegInf),
        ocl(cells(), kNegInf),
        oir(cells(), kNegInf),
        oil(cells(), kNegInf),
        osb(cells(), kNegInf) {}

  size_t cells() const { return static_cast<size_t>(n + 1) * (n + 1); }
  size_t at(int i, int j) const {
    return static_cast<size_t>(i) * (n + 1) + static_cast<size_t>(j);
  }

  void run_inside(const FactorScores& scores, const ConstraintMask& mask) {
    for (int i = 0; i <= n; ++i) {
      cr[at(i, i)] = 0.0;
      cl[at(i, i)] = 0.0;
    }
    for (int d = 1; d <= n; ++d) {
      for (int i = 0; i + d <= n; ++i) {
        const int j = i + d;
        const size_t ij = at(i, j);
        if (i >= 1) {
          for (int r = i; r < j; ++r) {
            sb[ij] = log_add(sb[ij], cr[at(i, r)] + cl[at(r + 1, j)]);
          }
        }
        if (mask.allowed(i, j)) {
          const double arc = scores.arc(i, j);
          ir[ij] = log_add(ir[ij], cl[at(i + 1, j)] + arc + scores.sib(i, j, i));
          if (i >= 1) {
            for (int s = i + 1; s < j; ++s) {
              ir[ij] = log_add(ir[ij],
                               ir[at(i, s)] + sb[at(s, j)] + arc + scores.sib(i, j, s));
            }
          }
        }
        if (i >= 1 && mask.allowed(j, i)) {
          const double arc = scores.arc(j, i);
          il[ij] = log_add(il[ij], cr[at(i, j - 1)] + arc + scores.sib(j, i, j));
          for (int s = i + 1; s < j; ++s) {
            il[ij] = log_add(il[ij],
                             sb[at(i, s)] + il[at(s, j)] + arc + scores.sib(j, i, s));
          }
        }
        for (int m = i + 1; m <= j; ++m) {
          cr[ij] = log_add(cr[ij], ir[at(i, m)] + cr[at(m, j)]);
        }
        if (i >= 1) {
          for (int m = i; m < j; ++m) {
            cl[ij] = log_add(cl[ij], cl[at(i, m)] + il[at(m, j)]);
          }
        }
      }
    }
  }

  void run_outside(const FactorScores& scores, const ConstraintMask& mask) {
    if (!is_finite_score(cr[at(0, n)])) return;
    ocr[at(0, n)] = 0.0;
    auto bump = [](double& slot, double v) { slot = log_add(slot, v); };
    for (int d = n; d >= 1; --d) {
      for (int i = 0; i + d <= n; ++i) {
        const int j = i + d;
        const size_t ij = at(i, j);
        if (is_finite_score(ocr[ij])) {
          for (int m = i + 1; m <= j; ++m) {
            if (!is_finite_score(ir[at(i, m)]) || !is_finite_score(cr[at(m, j)])) continue;
            bump(oir[at(i, m)], ocr[ij] + cr[at(m, j)]);
            bump(ocr[at(m, j)], ocr[ij] + ir[at(i, m)]);
          }
        }
        if (i >= 1 && is_finite_score(ocl[ij])) {
          for (int m = i; m < j; ++m) {
            if (!is_finite_score(cl[at(i, m)]) || !is_finite_score(il[at(m, j)])) continue;
            bump(ocl[at(i, m)], ocl[ij] + il[at(m, j)]);
            bump(oil[at(m, j)], ocl[ij] + cl[at(i, m)]);
          }
        }
        if (is_finite_score(oir[ij]) && mask.allowed(i, j)) {
          const double arc = scores.arc(i, j);
          bump(ocl[at(i + 1, j)], oir[ij] + arc + scores.sib(i, j, i));
          if (i >= 1) {
            for (int s = i + 1; s < j; ++s) {
              if (!is_finite_score(ir[at(i, s)]) || !is_finite_score(sb[at(s, j)])) continue;
              const double w = arc + scores.sib(i, j, s);
              bump(oir[at(i, s)], oir[ij] + sb[at(s, j)] + w);
              bump(osb[at(s, j)], oir[ij] + ir[at(i, s)] + w);
            }
          }
        }
        if (i >= 1 && is_finite_score(oil[ij]) && mask.allowed(j, i)) {
          const double arc = scores.arc(j, i);
          bump(ocr[at(i, j - 1)], oil[ij] + arc + scores.sib(j, i, j));
          for (int s = i + 1; s < j; ++s) {
            if (!is_finite_score(sb[at(i, s)]) || !is_finite_score(il[at(s, j)])) continue;
            const double w = arc + scores.sib(j, i, s);
            bump(osb[at(i, s)], oil[ij] + il[at(s, j)] + w);
            bump(oil[at(s, j)], oil[ij] + sb[at(i, s)] + w);
          }
        }
        if (i >= 1 && is_finite_score(osb[ij])) {
          for (int r = i; r < j; ++r) {
            if (!is_finite_score(cr[at(i, r)]) || !is_finite_score(cl[at(r + 1, j)])) continue;
            bump(ocr[at(i, r)], osb[ij] + cl[at(r + 1, j)]);
            bump(ocl[at(r + 1, j)], osb[ij] + cr[at(i, r)]);
          }
        }
      }
    }
  }

  double log_z() const { return cr[at(0, n)]; }
};

}  // namespace

double log_partition(const FactorScores& scores, const ConstraintMask& mask) {
  LogChart ch(scores.size());
  ch.run_inside(scores, mask);
  return ch.log_z();
}

InsideOutsideResult inside_outside(const FactorScores& scores, const ConstraintMask& mask) {
  const int n = scores.size();
  LogChart ch(n);
  ch.run_inside(scores, mask);
  ch.run_outside(scores, mask);
  InsideOutsideResult res;
  res.n = n;
  res.log_partition = ch.log_z();
  res.arc_marginal.assign(static_cast<size_t>(n + 1) * (n + 1), 0.0);
  if (!is_finite_score(res.log_partition)) {
    throw DataError("no projective single-root tree satisfies the constraints");
  }
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const size_t ij = ch.at(i, j);
      if (is_finite_score(ch.ir[ij]) && is_finite_score(ch.oir[ij])) {
        res.arc_marginal[static_cast<size_t>(i) * (n + 1) + j] =
            std::exp(ch.ir[ij] + ch.oir[ij] - res.log_partition);
      }
      if (i >= 1 && is_finite_score(ch.il[ij]) && is_finite_score(ch.oil[ij])) {
        res.arc_marginal[static_cast<size_t>(j) * (n + 1) + i] =
            std::exp(ch.il[ij] + ch.oil[ij] - res.log_partition);
      }
    }
  }
  return res;
}

double forest_log_prob(const FactorScores& scores, const PartialTree& partial) {
  const ConstraintMask full = ConstraintMask::none(partial.size());
  const ConstraintMask constrained = ConstraintMask::from_partial(partial);
  return log_partition(scores, constrained) - log_partition(scores, full);
}

void accumulate_expected_features(const FactorScores& scores, const ConstraintMask& mask,
                                  const FactorFeatureCache& cache, double scale,
                                  std::unordered_map<uint32_t, double>& acc) {
  const int n = scores.size();
  LogChart ch(n);
  ch.run_inside(scores, mask);
  ch.run_outside(scores, mask);
  const double log_z = ch.log_z();
  if (!is_finite_score(log_z)) {
    throw DataError("no projective single-root tree satisfies the constraints");
  }
  auto add = [&](const std::vector<uint32_t>& idxs, double p) {
    if (p == 0.0) return;
    for (uint32_t ix : idxs) acc[ix] += scale * p;
  };
  // every rule instance contributes its probability mass to the factor
  // features attached to it: arc features on the arc item, sibling features
  // on the specific (first-child / adjacent-sibling) combination
  for (int d = 1; d <= n; ++d) {
    for (int i = 0; i + d <= n; ++i) {
      const int j = i + d;
      const size_t ij = ch.at(i, j);
      if (mask.allowed(i, j) && is_finite_score(ch.oir[ij]) &&
          is_finite_score(ch.ir[ij])) {
        const double arc = scores.arc(i, j);
        add(cache.arc_at(i, j), std::exp(ch.ir[ij] + ch.oir[ij] - log_z));
        const double p_first =
            std::exp(ch.oir[ij] + ch.cl[ch.at(i + 1, j)] + arc + scores.sib(i, j, i) -
                     log_z);
        add(cache.sib_at(i, j, i), p_first);
        if (i >= 1) {
          for (int s = i + 1; s < j; ++s) {
            if (!is_finite_score(ch.ir[ch.at(i, s)]) ||
                !is_finite_score(ch.sb[ch.at(s, j)]))
              continue;
            const double p = std::exp(ch.oir[ij] + ch.ir[ch.at(i, s)] +
                                      ch.sb[ch.at(s, j)] + arc + scores.sib(i, j, s) -
                                      log_z);
            add(cache.sib_at(i, j, s), p);
          }
        }
      }
      if (i >= 1 && mask.allowed(j, i) && is_finite_score(ch.oil[ij]) &&
          is_finite_score(ch.il[ij])) {
        const double arc = scores.arc(j, i);
        add(cache.arc_at(j, i), std::exp(ch.il[ij] + ch.oil[ij] - log_z));
        const double p_first =
            std::exp(ch.oil[ij] + ch.cr[ch.at(i, j - 1)] + arc + scores.sib(j, i, j) -
                     log_z);
        add(cache.sib_at(j, i, j), p_first);
        for (int s = i + 1; s < j; ++s) {
          if (!is_finite_score(ch.sb[ch.at(i, s)]) ||
              !is_finite_score(ch.il[ch.at(s, j)]))
            continue;
          const double p = std::exp(ch.oil[ij] + ch.sb[ch.at(i, s)] +
                                    ch.il[ch.at(s, j)] + arc + scores.sib(j, i, s) -
                                    log_z);
          add(cache.sib_at(j, i, s), p);
        }
      }
    }
  }
}

}  // namespace pparse
