#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "pparse/conll.h"
#include "pparse/token.h"
#include "pparse/tree.h"
#include "pparse/weights.h"

namespace pparse {

struct TrainConfig {
  int beam_size = 64;
  double sgd_step = 0.1;    // eta_0; iteration t uses eta_0 / (1 + t / sgd_decay)
  double sgd_decay = 10.0;
  double l2_sigma2 = 1.0;
  int batch_size = 32;
  int patience = 30;        // stop after this many iterations without dev gain
  int max_iterations = 100;
  int per_iter_pa_subset = 10000;
  uint64_t rng_seed = 1;
};

enum class Origin { kFullyAnnotated, kPartiallyAnnotated };

struct TrainingInstance {
  Sentence sentence;
  PartialTree annotation;
  Origin origin = Origin::kFullyAnnotated;
};

struct TrainStats {
  std::vector<double> dev_uas_curve;  // one entry per completed iteration
  int best_iteration = -1;
  double best_dev_uas = 0.0;
  int iterations_run = 0;
  long skipped_instances = 0;  // unsatisfiable annotations
};

struct TrainResult {
  WeightModel model;  // best-dev snapshot, averaging state materialized
  TrainStats stats;
};

TrainResult train_parser(ParserKind kind, const Treebank& fully_annotated,
                         const Treebank& partially_annotated, const Treebank& dev,
                         const TrainConfig& tcfg, const FeatureConfig& fcfg);

struct BatchObjective {
  double loss = 0.0;
  std::unordered_map<uint32_t, double> gradient;
  int skipped = 0;
};

// Regularized negative log-likelihood of the annotated forests in `batch`
// and its exact gradient: sum_i [log Z_full(i) - log Z_constrained(i)]
// plus reg_scale * ||w||^2 / (2 sigma2).
BatchObjective llgpar_objective_and_gradient(std::span<const TrainingInstance> batch,
                                             std::span<const double> weights,
                                             const FeatureExtractor& fx, double sigma2,
                                             double reg_scale);

// Parse with the model's effective (averaged) weights; `partial`, when
// given, constrains the output to trees extending it.
DepTree predict(const WeightModel& model, const Sentence& s,
                const PartialTree* partial = nullptr, int beam_size = 64);

// Same, with the effective weight vector already materialized (avoids one
// O(dimension) copy per sentence when parsing a whole treebank).
DepTree predict_with_weights(ParserKind kind, const FeatureExtractor& fx,
                             std::span<const double> weights, const Sentence& s,
                             const PartialTree* partial = nullptr, int beam_size = 64);

}  // namespace pparse
