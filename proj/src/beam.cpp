#include "pparse/beam.h"

#include <algorithm>

#include "pparse/common.h"

namespace pparse {

namespace {

struct BeamState {
  const Sentence& s;
  const FeatureExtractor& fx;
  std::span<const double> weights;
  int beam_size;
  const ConstraintContext& ctx;
  ViabilityCache cache;
  std::vector<uint32_t> scratch;

  bool expand(std::vector<BeamItem>& items, const std::vector<Action>* reference);
};

// One synchronized step; returns false once every item is finished.
bool BeamState::expand(std::vector<BeamItem>& items, const std::vector<Action>* reference) {
  const uint64_t mask = fx.config().dimension() - 1;
  bool any_live = false;
  std::vector<BeamItem> next;
  next.reserve(items.size() * 2);
  for (const BeamItem& item : items) {
    if (item.config.terminal()) {
      next.push_back(item);  // finished items stay and compete by total score
      continue;
    }
    any_live = true;
    const std::vector<Action> acts = constrained_legal_actions(item.config, ctx, &cache);
    if (acts.empty()) {
      throw TrainError("no legal action in a non-terminal configuration");
    }
    scratch.clear();
    fx.action_indices(item.config, s, scratch);
    for (Action a : acts) {
      double delta = 0.0;
      for (uint32_t ix : scratch) {
        delta += weights[action_slot(ix, static_cast<int>(a), mask)];
      }
      BeamItem child;
      child.config = item.config;
      child.config.apply(a);
      child.history = item.history;
      child.history.push_back(a);
      child.score = item.score + delta;
      if (reference != nullptr) {
        const size_t pos = item.history.size();
        child.is_reference =
            item.is_reference && pos < reference->size() && (*reference)[pos] == a;
      }
      next.push_back(std::move(child));
    }
  }
  if (!any_live) return false;
  std::stable_sort(next.begin(), next.end(),
                   [](const BeamItem& a, const BeamItem& b) { return a.score > b.score; });
  if (static_cast<int>(next.size()) > beam_size) {
    next.resize(static_cast<size_t>(beam_size));
  }
  items = std::move(next);
  return true;
}

}  // namespace

BeamResult beam_decode(const Sentence& s, const FeatureExtractor& fx,
                       std::span<const double> weights, int beam_size,
                       const ConstraintContext& ctx) {
  const int n = s.size();
  BeamState st{s, fx, weights, beam_size, ctx, {}, {}};
  std::vector<BeamItem> items(1);
  items[0].config = Configuration::initial(n);
  if (!viable_constrained(items[0].config, ctx, &st.cache)) {
    throw DataError("partial annotation admits no projective single-root tree");
  }
  for (int step = 0; step < 2 * n; ++step) {
    if (!st.expand(items, nullptr)) break;
  }
  return BeamResult{items[0].config.to_tree(), items[0].history, items[0].score};
}

ReferenceBeamResult beam_decode_with_reference(const Sentence& s,
                                               const FeatureExtractor& fx,
                                               std::span<const double> weights,
                                               int beam_size,
                                               const std::vector<Action>& reference) {
  const int n = s.size();
  const ConstraintContext ctx = ConstraintContext::unconstrained(n);
  BeamState st{s, fx, weights, beam_size, ctx, {}, {}};
  std::vector<BeamItem> items(1);
  items[0].config = Configuration::initial(n);
  items[0].is_reference = true;
  ReferenceBeamResult res;
  for (int step = 1; step <= 2 * n; ++step) {
    if (!st.expand(items, &reference)) break;
    const bool ref_alive =
        std::any_of(items.begin(), items.end(),
                    [](const BeamItem& it) { return it.is_reference; });
    if (!ref_alive) {
      res.early_stop_step = step;
      res.best_actions = items[0].history;
      res.best_score = items[0].score;
      return res;
    }
  }
  res.best_actions = items[0].history;
  res.best_score = items[0].score;
  res.best_equals_reference = items[0].history == reference;
  return res;
}

std::vector<uint32_t> action_sequence_slots(const Sentence& s,
                                            const FeatureExtractor& fx,
                                            const std::vector<Action>& actions,
                                            size_t count) {
  const uint64_t mask = fx.config().dimension() - 1;
  Configuration c = Configuration::initial(s.size());
  std::vector<uint32_t> out;
  std::vector<uint32_t> scratch;
  count = std::min(count, actions.size());
  for (size_t t = 0; t < count; ++t) {
    scratch.clear();
    fx.action_indices(c, s, scratch);
    for (uint32_t ix : scratch) {
      out.push_back(action_slot(ix, static_cast<int>(actions[t]), mask));
    }
    c.apply(actions[t]);
  }
  return out;
}

}  // namespace pparse
