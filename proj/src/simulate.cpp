#include "pparse/simulate.h"

#include <algorithm>
#include <cmath>

#include "pparse/common.h"
#include "pparse/graph.h"
#include "pparse/rng.h"
#include "pparse/trainer.h"

namespace pparse {

const char* sim_setting_name(SimSetting s) {
  switch (s) {
    case SimSetting::kRandom: return "random";
    case SimSetting::kUncertain: return "uncertain";
    case SimSetting::kDivergence: return "divergence";
  }
  return "?";
}

SimSetting sim_setting_from_name(const std::string& name) {
  if (name == "random") return SimSetting::kRandom;
  if (name == "uncertain") return SimSetting::kUncertain;
  if (name == "divergence") return SimSetting::kDivergence;
  throw DataError("unknown simulation setting: " + name);
}

namespace {

int keep_count(double alpha, int non_punct) {
  if (alpha <= 0.0 || non_punct == 0) return 0;
  const int k = static_cast<int>(std::ceil(alpha * non_punct / 100.0));
  return std::min(k, non_punct);
}

std::vector<int> non_punct_tokens(const Sentence& s) {
  std::vector<int> out;
  for (int i = 1; i <= s.size(); ++i) {
    if (!s.is_punct(i)) out.push_back(i);
  }
  return out;
}

TreebankEntry keep_subset(const TreebankEntry& gold, const std::vector<int>& tokens) {
  const DepTree tree = gold.tree();
  std::vector<int> heads(static_cast<size_t>(tree.size()), -1);
  for (int m : tokens) heads[static_cast<size_t>(m - 1)] = tree.head(m);
  return TreebankEntry{gold.sentence, PartialTree::from_heads(std::move(heads))};
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.0) || !(alpha <= 100.0)) {
    throw DataError("alpha must lie in [0, 100]");
  }
}

}  // namespace

Treebank simulate_random(const Treebank& gold, double alpha, uint64_t seed) {
  require_alpha(alpha);
  Treebank out;
  out.reserve(gold.size());
  for (size_t i = 0; i < gold.size(); ++i) {
    const TreebankEntry& e = gold[i];
    const std::vector<int> pool = non_punct_tokens(e.sentence);
    const int k = keep_count(alpha, static_cast<int>(pool.size()));
    Rng rng(mix_seed(seed, i));
    const std::vector<int> pick =
        rng.sample_without_replacement(static_cast<int>(pool.size()), k);
    std::vector<int> tokens;
    tokens.reserve(pick.size());
    for (int ix : pick) tokens.push_back(pool[static_cast<size_t>(ix)]);
    out.push_back(keep_subset(e, tokens));
  }
  return out;
}

Treebank simulate_uncertain(const Treebank& gold, double alpha,
                            const WeightModel& model) {
  require_alpha(alpha);
  if (model.kind() != ParserKind::kLlgpar) {
    throw DataError("uncertainty simulation requires an llgpar model");
  }
  const FeatureExtractor fx(model.feature_config());
  const std::vector<double> w = model.averaged();
  Treebank out;
  out.reserve(gold.size());
  for (const TreebankEntry& e : gold) {
    const int n = e.sentence.size();
    const FactorScores scores = score_factors(e.sentence, fx, w);
    const InsideOutsideResult io = inside_outside(scores, ConstraintMask::none(n));
    std::vector<std::pair<double, int>> ranked;  // (gap, token)
    for (int m : non_punct_tokens(e.sentence)) {
      double best = 0.0, second = 0.0;
      for (int h = 0; h <= n; ++h) {
        if (h == m) continue;
        const double p = io.arc(h, m);
        if (p > best) {
          second = best;
          best = p;
        } else if (p > second) {
          second = p;
        }
      }
      ranked.emplace_back(best - second, m);
    }
    std::sort(ranked.begin(), ranked.end());
    const int k = keep_count(alpha, static_cast<int>(ranked.size()));
    std::vector<int> tokens;
    for (int i = 0; i < k; ++i) tokens.push_back(ranked[static_cast<size_t>(i)].second);
    out.push_back(keep_subset(e, tokens));
  }
  return out;
}

Treebank simulate_divergence(const Treebank& gold, const WeightModel& llg,
                             const WeightModel& lg, const WeightModel& lt,
                             int beam_size) {
  struct Parser {
    const WeightModel* model;
    FeatureExtractor fx;
    std::vector<double> w;
  };
  std::vector<Parser> parsers;
  for (const WeightModel* m : {&llg, &lg, &lt}) {
    parsers.push_back({m, FeatureExtractor(m->feature_config()), m->averaged()});
  }
  Treebank out;
  out.reserve(gold.size());
  for (const TreebankEntry& e : gold) {
    std::vector<DepTree> preds;
    for (const Parser& p : parsers) {
      preds.push_back(predict_with_weights(p.model->kind(), p.fx, p.w, e.sentence,
                                           nullptr, beam_size));
    }
    std::vector<int> tokens;
    for (int m : non_punct_tokens(e.sentence)) {
      const int h0 = preds[0].head(m);
      if (h0 != preds[1].head(m) || h0 != preds[2].head(m)) tokens.push_back(m);
    }
    out.push_back(keep_subset(e, tokens));
  }
  return out;
}

}  // namespace pparse
