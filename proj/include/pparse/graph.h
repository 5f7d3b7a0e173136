#pragma once

#include <span>
#include <vector>

#include "pparse/features.h"
#include "pparse/forest.h"
#include "pparse/token.h"
#include "pparse/tree.h"

namespace pparse {

// Dense factor scores for one sentence: arc (h, m) and adjacent-sibling
// (h, m, s) log-scores.  The sibling slot with s == h holds the null-sibling
// score used when m is the innermost dependent of h on its side.
class FactorScores {
 public:
  explicit FactorScores(int n);

  int size() const { return n_; }
  double& arc(int h, int m) { return arc_[idx2(h, m)]; }
  double arc(int h, int m) const { return arc_[idx2(h, m)]; }
  double& sib(int h, int m, int s) { return sib_[idx3(h, m, s)]; }
  double sib(int h, int m, int s) const { return sib_[idx3(h, m, s)]; }

 private:
  size_t idx2(int h, int m) const {
    return static_cast<size_t>(h) * (n_ + 1) + static_cast<size_t>(m);
  }
  size_t idx3(int h, int m, int s) const {
    return (static_cast<size_t>(h) * (n_ + 1) + static_cast<size_t>(m)) *
               (n_ + 1) +
           static_cast<size_t>(s);
  }
  int n_;
  std::vector<double> arc_;
  std::vector<double> sib_;
};

// Computes all factor scores for a sentence under the given weights.
FactorScores score_factors(const Sentence& s, const FeatureExtractor& fx,
                           std::span<const double> weights);

// Per-(h, m) feature index lists cached for expectation accumulation.
struct FactorFeatureCache {
  int n = 0;
  std::vector<std::vector<uint32_t>> arc;  // (n+1)^2, by h*(n+1)+m
  std::vector<std::vector<uint32_t>> sib;  // (n+1)^3

  const std::vector<uint32_t>& arc_at(int h, int m) const {
    return arc[static_cast<size_t>(h) * (n + 1) + static_cast<size_t>(m)];
  }
  const std::vector<uint32_t>& sib_at(int h, int m, int s) const {
    return sib[(static_cast<size_t>(h) * (n + 1) + static_cast<size_t>(m)) * (n + 1) +
               static_cast<size_t>(s)];
  }
};

// Builds the cache and the corresponding scores in one pass.
FactorScores score_factors_cached(const Sentence& s, const FeatureExtractor& fx,
                                  std::span<const double> weights,
                                  FactorFeatureCache& cache);

// Allowed-arc mask for constrained parsing.  Construction from a partial
// annotation throws DataError when no projective single-root tree fits.
class ConstraintMask {
 public:
  static ConstraintMask none(int n);
  static ConstraintMask from_partial(const PartialTree& partial);

  int size() const { return cand_.size(); }
  bool allowed(int h, int m) const { return cand_.allowed(h, m); }
  const HeadCandidates& candidates() const { return cand_; }

 private:
  explicit ConstraintMask(HeadCandidates cand) : cand_(std::move(cand)) {}
  HeadCandidates cand_;
};

// Highest-scoring projective single-root tree over allowed arcs
// (second-order sibling decomposition, O(n^3) dynamic program).
DepTree decode(const FactorScores& scores, const ConstraintMask& mask);

struct InsideOutsideResult {
  double log_partition = 0.0;
  // p(h -> m | x), flattened h*(n+1)+m
  std::vector<double> arc_marginal;
  int n = 0;

  double arc(int h, int m) const {
    return arc_marginal[static_cast<size_t>(h) * (n + 1) + static_cast<size_t>(m)];
  }
};

InsideOutsideResult inside_outside(const FactorScores& scores, const ConstraintMask& mask);

double log_partition(const FactorScores& scores, const ConstraintMask& mask);

// log [ Z(constrained) / Z(unconstrained) ]; exactly 0 for an empty partial.
double forest_log_prob(const FactorScores& scores, const PartialTree& partial);

// Sum of factor scores of one tree (same decomposition as decode).
double score_tree(const FactorScores& scores, const DepTree& tree);

// Expected feature counts under the distribution restricted by `mask`,
// accumulated into `acc` with `scale`.  Uses the cache built by
// score_factors_cached.
void accumulate_expected_features(const FactorScores& scores, const ConstraintMask& mask,
                                  const FactorFeatureCache& cache, double scale,
                                  std::unordered_map<uint32_t, double>& acc);

}  // namespace pparse
