#include "pparse/trainer.h"

#include <algorithm>
#include <optional>
#include <cmath>

#include "pparse/beam.h"
#include "pparse/common.h"
#include "pparse/eval.h"
#include "pparse/graph.h"
#include "pparse/rng.h"

namespace pparse {

namespace {

std::vector<TrainingInstance> to_instances(const Treebank& tb, Origin origin) {
  std::vector<TrainingInstance> out;
  out.reserve(tb.size());
  for (const TreebankEntry& e : tb) {
    if (origin == Origin::kFullyAnnotated && !e.annotation.complete()) {
      throw DataError("fully annotated treebank contains unspecified heads");
    }
    out.push_back({e.sentence, e.annotation, origin});
  }
  return out;
}

double eval_dev(ParserKind kind, const FeatureExtractor& fx,
                std::span<const double> weights, const Treebank& dev, int beam_size) {
  EvalResult total;
  for (const TreebankEntry& e : dev) {
    const DepTree pred = predict_with_weights(kind, fx, weights, e.sentence, nullptr,
                                              beam_size);
    total += evaluate_uas(e.sentence, pred, e.tree());
  }
  return total.uas();
}

// Shared outer loop: per-iteration instance selection (all fully annotated
// items plus a fresh random subset of the partially annotated pool), a
// shuffle, one pass of `process`, then dev evaluation with snapshotting of
// the best weights and patience-based early stopping.
template <typename Process, typename Effective>
TrainResult run_training_loop(ParserKind kind, const Treebank& fa, const Treebank& pa,
                              const Treebank& dev, const TrainConfig& tcfg,
                              const FeatureConfig& fcfg, const FeatureExtractor& fx,
                              Process process, Effective effective,
                              TrainStats& stats) {
  const std::vector<TrainingInstance> fa_inst = to_instances(fa, Origin::kFullyAnnotated);
  const std::vector<TrainingInstance> pa_inst =
      to_instances(pa, Origin::kPartiallyAnnotated);
  Rng rng(mix_seed(tcfg.rng_seed, 0x747261696eULL));

  std::vector<double> best_w;
  uint64_t best_count = 0;
  for (int iter = 0; iter < tcfg.max_iterations; ++iter) {
    std::vector<const TrainingInstance*> work;
    work.reserve(fa_inst.size() + pa_inst.size());
    for (const auto& inst : fa_inst) work.push_back(&inst);
    if (static_cast<int>(pa_inst.size()) > tcfg.per_iter_pa_subset) {
      const std::vector<int> pick = rng.sample_without_replacement(
          static_cast<int>(pa_inst.size()), tcfg.per_iter_pa_subset);
      for (int ix : pick) work.push_back(&pa_inst[static_cast<size_t>(ix)]);
    } else {
      for (const auto& inst : pa_inst) work.push_back(&inst);
    }
    rng.shuffle(work);

    process(work, iter);
    ++stats.iterations_run;

    const std::vector<double> wvec = effective();
    const double uas = dev.empty() ? 0.0
                                   : eval_dev(kind, fx, wvec, dev, tcfg.beam_size);
    stats.dev_uas_curve.push_back(uas * 100.0);
    const bool improved = dev.empty() || uas > stats.best_dev_uas ||
                          stats.best_iteration < 0;
    if (improved) {
      stats.best_dev_uas = uas;
      stats.best_iteration = iter;
      best_w = wvec;
      best_count = 0;
    }
    if (iter - stats.best_iteration >= tcfg.patience) break;
  }
  if (best_w.empty()) best_w.assign(fcfg.dimension(), 0.0);
  stats.best_dev_uas *= 100.0;

  WeightModel model(fcfg, kind);
  model.materialize(std::move(best_w), best_count);
  return TrainResult{std::move(model), stats};
}

void apply_update(WeightModel& model, const std::vector<uint32_t>& plus,
                  const std::vector<uint32_t>& minus) {
  FeatureVector diff = FeatureVector::from_indices(plus);
  diff.subtract(FeatureVector::from_indices(minus));
  for (const auto& [idx, c] : diff.entries()) {
    model.add(idx, static_cast<double>(c));
  }
}

TrainResult train_llgpar(const Treebank& fa, const Treebank& pa, const Treebank& dev,
                         const TrainConfig& tcfg, const FeatureConfig& fcfg) {
  FeatureExtractor fx(fcfg);
  TrainStats stats;
  std::vector<double> w(fcfg.dimension(), 0.0);

  auto process = [&](const std::vector<const TrainingInstance*>& work, int iter) {
    const double eta = tcfg.sgd_step / (1.0 + iter / tcfg.sgd_decay);
    const double total = static_cast<double>(work.size());
    std::unordered_map<uint32_t, double> grad;
    for (size_t start = 0; start < work.size();
         start += static_cast<size_t>(tcfg.batch_size)) {
      const size_t stop =
          std::min(work.size(), start + static_cast<size_t>(tcfg.batch_size));
      grad.clear();
      for (size_t i = start; i < stop; ++i) {
        const TrainingInstance& inst = *work[i];
        if (inst.annotation.specified_count() == 0) continue;  // exact no-op
        FactorFeatureCache cache;
        const FactorScores scores =
            score_factors_cached(inst.sentence, fx, w, cache);
        ConstraintMask full = ConstraintMask::none(inst.sentence.size());
        try {
          const ConstraintMask constrained =
              ConstraintMask::from_partial(inst.annotation);
          accumulate_expected_features(scores, full, cache, 1.0, grad);
          accumulate_expected_features(scores, constrained, cache, -1.0, grad);
        } catch (const DataError&) {
          ++stats.skipped_instances;
        }
      }
      const double decay =
          1.0 - eta * (static_cast<double>(stop - start) / total) / tcfg.l2_sigma2;
      for (double& v : w) v *= decay;
      for (const auto& [ix, g] : grad) w[ix] -= eta * g;
    }
  };
  auto effective = [&]() { return w; };
  return run_training_loop(ParserKind::kLlgpar, fa, pa, dev, tcfg, fcfg, fx, process,
                           effective, stats);
}

TrainResult train_lgpar(const Treebank& fa, const Treebank& pa, const Treebank& dev,
                        const TrainConfig& tcfg, const FeatureConfig& fcfg) {
  FeatureExtractor fx(fcfg);
  TrainStats stats;
  WeightModel model(fcfg, ParserKind::kLgpar);

  auto process = [&](const std::vector<const TrainingInstance*>& work, int) {
    for (const TrainingInstance* inst : work) {
      model.begin_instance();
      const int n = inst->sentence.size();
      const FactorScores scores = score_factors(inst->sentence, fx, model.weights());
      const DepTree d_minus = decode(scores, ConstraintMask::none(n));
      DepTree d_plus = d_minus;
      if (inst->annotation.complete()) {
        d_plus = inst->annotation.to_tree();
      } else {
        if (inst->annotation.specified_count() == 0) continue;
        try {
          d_plus = decode(scores, ConstraintMask::from_partial(inst->annotation));
        } catch (const DataError&) {
          ++stats.skipped_instances;
          continue;
        }
      }
      if (d_plus.heads() == d_minus.heads()) continue;
      std::vector<uint32_t> plus, minus;
      fx.tree_indices(inst->sentence, d_plus.heads(), plus);
      fx.tree_indices(inst->sentence, d_minus.heads(), minus);
      apply_update(model, plus, minus);
    }
  };
  auto effective = [&]() { return model.averaged(); };
  return run_training_loop(ParserKind::kLgpar, fa, pa, dev, tcfg, fcfg, fx, process,
                           effective, stats);
}

TrainResult train_ltpar(const Treebank& fa, const Treebank& pa, const Treebank& dev,
                        const TrainConfig& tcfg, const FeatureConfig& fcfg) {
  FeatureExtractor fx(fcfg);
  TrainStats stats;
  WeightModel model(fcfg, ParserKind::kLtpar);

  auto process = [&](const std::vector<const TrainingInstance*>& work, int) {
    for (const TrainingInstance* inst : work) {
      model.begin_instance();
      if (inst->annotation.specified_count() == 0) continue;
      std::optional<BeamResult> constrained;
      try {
        const ConstraintContext ctx = ConstraintContext::from_partial(inst->annotation);
        constrained = beam_decode(inst->sentence, fx, model.weights(), tcfg.beam_size,
                                  ctx);
      } catch (const DataError&) {
        ++stats.skipped_instances;
        continue;
      }
      const ReferenceBeamResult ref = beam_decode_with_reference(
          inst->sentence, fx, model.weights(), tcfg.beam_size, constrained->actions);
      std::vector<uint32_t> plus, minus;
      if (ref.early_stop_step >= 0) {
        plus = action_sequence_slots(inst->sentence, fx, constrained->actions,
                                     static_cast<size_t>(ref.early_stop_step));
        minus = action_sequence_slots(inst->sentence, fx, ref.best_actions,
                                      ref.best_actions.size());
      } else if (!ref.best_equals_reference) {
        plus = action_sequence_slots(inst->sentence, fx, constrained->actions,
                                     constrained->actions.size());
        minus = action_sequence_slots(inst->sentence, fx, ref.best_actions,
                                      ref.best_actions.size());
      } else {
        continue;
      }
      apply_update(model, plus, minus);
    }
  };
  auto effective = [&]() { return model.averaged(); };
  return run_training_loop(ParserKind::kLtpar, fa, pa, dev, tcfg, fcfg, fx, process,
                           effective, stats);
}

}  // namespace

DepTree predict_with_weights(ParserKind kind, const FeatureExtractor& fx,
                             std::span<const double> weights, const Sentence& s,
                             const PartialTree* partial, int beam_size) {
  if (kind == ParserKind::kLtpar) {
    const ConstraintContext ctx = partial != nullptr
                                      ? ConstraintContext::from_partial(*partial)
                                      : ConstraintContext::unconstrained(s.size());
    return beam_decode(s, fx, weights, beam_size, ctx).tree;
  }
  const FactorScores scores = score_factors(s, fx, weights);
  const ConstraintMask mask = partial != nullptr ? ConstraintMask::from_partial(*partial)
                                                 : ConstraintMask::none(s.size());
  return decode(scores, mask);
}

TrainResult train_parser(ParserKind kind, const Treebank& fa, const Treebank& pa,
                         const Treebank& dev, const TrainConfig& tcfg,
                         const FeatureConfig& fcfg) {
  fcfg.validate();
  switch (kind) {
    case ParserKind::kLlgpar: return train_llgpar(fa, pa, dev, tcfg, fcfg);
    case ParserKind::kLgpar: return train_lgpar(fa, pa, dev, tcfg, fcfg);
    case ParserKind::kLtpar: return train_ltpar(fa, pa, dev, tcfg, fcfg);
  }
  throw TrainError("unknown parser kind");
}

BatchObjective llgpar_objective_and_gradient(std::span<const TrainingInstance> batch,
                                             std::span<const double> weights,
                                             const FeatureExtractor& fx, double sigma2,
                                             double reg_scale) {
  BatchObjective out;
  for (const TrainingInstance& inst : batch) {
    if (inst.annotation.specified_count() == 0) continue;  // log prob exactly 0
    FactorFeatureCache cache;
    const FactorScores scores = score_factors_cached(inst.sentence, fx, weights, cache);
    const ConstraintMask full = ConstraintMask::none(inst.sentence.size());
    try {
      const ConstraintMask constrained = ConstraintMask::from_partial(inst.annotation);
      const double log_zf = log_partition(scores, full);
      const double log_zc = log_partition(scores, constrained);
      out.loss += log_zf - log_zc;
      accumulate_expected_features(scores, full, cache, 1.0, out.gradient);
      accumulate_expected_features(scores, constrained, cache, -1.0, out.gradient);
    } catch (const DataError&) {
      ++out.skipped;
    }
  }
  double sq = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double v = weights[i];
    if (v != 0.0) {
      sq += v * v;
      out.gradient[static_cast<uint32_t>(i)] += reg_scale * v / sigma2;
    }
  }
  out.loss += reg_scale * sq / (2.0 * sigma2);
  return out;
}

DepTree predict(const WeightModel& model, const Sentence& s, const PartialTree* partial,
                int beam_size) {
  const FeatureExtractor fx(model.feature_config());
  const std::vector<double> w = model.averaged();
  return predict_with_weights(model.kind(), fx, w, s, partial, beam_size);
}

}  // namespace pparse
