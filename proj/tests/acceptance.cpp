// Acceptance gate: end-to-end checks of the chart engines, the constrained
// transition system, the trainers, the annotation simulators, and the CLI.
// Each check prints exactly one PASS/FAIL line on stdout; the exit code is
// the number of failures.  Pass check names as arguments to run a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "pparse/beam.h"
#include "pparse/common.h"
#include "pparse/conll.h"
#include "pparse/eval.h"
#include "pparse/features.h"
#include "pparse/graph.h"
#include "pparse/pipeline.h"
#include "pparse/rng.h"
#include "pparse/simulate.h"
#include "pparse/trainer.h"
#include "pparse/transition.h"
#include "pparse/tree.h"
#include "pparse/weights.h"

using namespace pparse;

namespace {

// pinned tolerances
constexpr double kMarginalTol = 1e-8;   // arc marginals vs enumeration
constexpr double kForestTol = 1e-8;     // forest log probability vs enumeration
constexpr double kEmptyForestTol = 1e-12;  // |log p| of an empty annotation
constexpr double kGradRelTol = 1e-4;    // finite-difference relative error
constexpr double kBeamScoreTol = 1e-9;  // beam vs exhaustive sequence score
constexpr double kTrendTol = 0.001;     // 0.1 UAS percentage points, as a fraction

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// ---------------------------------------------------------------- check 1

Outcome check_chart_decode() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(11);
  double max_marg_err = 0.0;
  const int instances = 500;
  for (int rep = 0; rep < instances; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_below(6));
    const FactorScores sc = testutil::random_scores(n, rng);
    const std::vector<int> no_partial(static_cast<size_t>(n), -1);
    const testutil::BruteForest brute = testutil::brute_forest(sc, no_partial);

    const DepTree best = decode(sc, ConstraintMask::none(n));
    if (best.heads() != brute.best_heads) {
      return {false, "decode differs from the enumeration argmax at rep " +
                         std::to_string(rep)};
    }
    const InsideOutsideResult io = inside_outside(sc, ConstraintMask::none(n));
    for (int h = 0; h <= n; ++h) {
      for (int m = 1; m <= n; ++m) {
        if (m == h) continue;
        max_marg_err = std::max(
            max_marg_err, std::abs(io.arc(h, m) - brute.arc(h, m, n)));
      }
    }

    if (n >= 2) {  // the same checks under a constraining annotation
      const auto& trees = testutil::enumerate_trees(n);
      const std::vector<int>& anchor = trees[rng.next_below(trees.size())];
      const std::vector<int> partial = testutil::random_partial(anchor, rng, 0.5);
      const testutil::BruteForest cbrute = testutil::brute_forest(sc, partial);
      const ConstraintMask mask = ConstraintMask::from_partial(
          PartialTree::from_heads(partial));
      const DepTree cbest = decode(sc, mask);
      if (cbest.heads() != cbrute.best_heads) {
        return {false, "constrained decode differs from enumeration at rep " +
                           std::to_string(rep)};
      }
      const InsideOutsideResult cio = inside_outside(sc, mask);
      for (int h = 0; h <= n; ++h) {
        for (int m = 1; m <= n; ++m) {
          if (m == h) continue;
          max_marg_err = std::max(
              max_marg_err, std::abs(cio.arc(h, m) - cbrute.arc(h, m, n)));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = max_marg_err <= kMarginalTol && secs <= 60.0;
  return {pass, std::to_string(instances) + " instances, max marginal err " +
                    fmt("%.2e", max_marg_err) + ", " + fmt("%.1f", secs) + "s"};
}

// ---------------------------------------------------------------- check 2

Outcome check_forest_probability() {
  Rng rng(12);
  double max_err = 0.0;
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_below(5));
    const FactorScores sc = testutil::random_scores(n, rng);
    const auto& trees = testutil::enumerate_trees(n);
    const std::vector<int>& anchor = trees[rng.next_below(trees.size())];
    const std::vector<int> partial = testutil::random_partial(anchor, rng, 0.5);

    const std::vector<int> none(static_cast<size_t>(n), -1);
    const testutil::BruteForest full = testutil::brute_forest(sc, none);
    const testutil::BruteForest cons = testutil::brute_forest(sc, partial);
    const double want = cons.log_partition - full.log_partition;
    const double got = forest_log_prob(sc, PartialTree::from_heads(partial));
    max_err = std::max(max_err, std::abs(got - want));
  }
  double max_empty = 0.0;
  for (int n = 1; n <= 7; ++n) {
    const FactorScores sc = testutil::random_scores(n, rng);
    max_empty = std::max(
        max_empty, std::abs(forest_log_prob(sc, PartialTree::empty(n))));
  }
  const bool pass = max_err <= kForestTol && max_empty <= kEmptyForestTol;
  return {pass, "max err " + fmt("%.2e", max_err) + ", empty annotation " +
                    fmt("%.2e", max_empty)};
}

// ---------------------------------------------------------------- check 3

Outcome check_gradient() {
  const FeatureConfig fcfg{16, "v1"};
  const FeatureExtractor fx(fcfg);
  Rng rng(13);
  double max_rel = 0.0;
  int tested = 0;
  const int instances = 24;
  for (int rep = 0; rep < instances; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_below(4));  // 2..5
    Sentence s = testutil::make_sentence(n, rng);
    const auto& trees = testutil::enumerate_trees(n);
    const auto& gold = trees[rng.next_below(trees.size())];
    std::vector<int> partial = testutil::random_partial(gold, rng, 0.6);
    if (rep % 3 == 0) partial = gold;
    std::vector<TrainingInstance> batch;
    batch.push_back({std::move(s), PartialTree::from_heads(partial),
                     Origin::kPartiallyAnnotated});

    std::vector<double> w(fcfg.dimension(), 0.0);
    const BatchObjective probe =
        llgpar_objective_and_gradient(batch, w, fx, 1.0, 0.4);
    std::vector<uint32_t> touched;
    for (const auto& [ix, g] : probe.gradient) touched.push_back(ix);
    std::sort(touched.begin(), touched.end());
    for (uint32_t ix : touched) w[ix] = rng.next_double() - 0.5;
    for (int i = 0; i < 30; ++i)
      w[rng.next_below(fcfg.dimension())] = rng.next_double() - 0.5;

    const BatchObjective at = llgpar_objective_and_gradient(batch, w, fx, 1.0, 0.4);
    const double eps = 1e-5;
    const size_t stride = std::max<size_t>(1, touched.size() / 12);
    for (size_t k = 0; k < touched.size(); k += stride) {
      const uint32_t ix = touched[k];
      const double g = at.gradient.count(ix) ? at.gradient.at(ix) : 0.0;
      const double saved = w[ix];
      w[ix] = saved + eps;
      const double up = llgpar_objective_and_gradient(batch, w, fx, 1.0, 0.4).loss;
      w[ix] = saved - eps;
      const double dn = llgpar_objective_and_gradient(batch, w, fx, 1.0, 0.4).loss;
      w[ix] = saved;
      const double fd = (up - dn) / (2 * eps);
      max_rel = std::max(max_rel,
                         std::abs(g - fd) / (std::abs(g) + std::abs(fd) + 1e-8));
      ++tested;
    }
  }
  const bool pass = max_rel <= kGradRelTol && tested >= 20 * 10;
  return {pass, std::to_string(instances) + " instances, " + std::to_string(tested) +
                    " coordinates, max rel err " + fmt("%.2e", max_rel)};
}

// ---------------------------------------------------------------- check 4

Outcome check_beam_containment() {
  Rng rng(14);
  long decodes = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_below(7));  // 2..8
    Sentence s = testutil::make_sentence(n, rng, 0.1);
    const FactorScores sc = testutil::random_scores(n, rng);
    const DepTree tree = decode(sc, ConstraintMask::none(n));
    const std::vector<int> partial = testutil::random_partial(tree.heads(), rng, 0.5);
    const PartialTree pt = PartialTree::from_heads(partial);
    const ConstraintContext ctx = ConstraintContext::from_partial(pt);

    const FeatureConfig fcfg{16, "v1"};
    static const FeatureExtractor fx(fcfg);
    static std::vector<double> w;
    if (w.empty()) {
      Rng wr(140);
      w.resize(fcfg.dimension());
      for (auto& v : w) v = wr.next_double() - 0.5;
    }
    for (int beam : {1, 8, 64}) {
      try {
        const BeamResult res = beam_decode(s, fx, w, beam, ctx);
        ++decodes;
        if (!pt.consistent_with(res.tree)) {
          return {false, "a specified arc is missing from the output at rep " +
                             std::to_string(rep) + " beam " + std::to_string(beam)};
        }
      } catch (const TrainError& e) {
        return {false, std::string("decode dead-ended: ") + e.what()};
      }
    }
  }
  return {true, std::to_string(decodes) + " constrained decodes, all outputs "
                "contain their annotation, no dead ends"};
}

// ---------------------------------------------------------------- check 5

Outcome check_transition_oracle() {
  Rng rng(15);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_below(7));  // 1..7
    const auto& trees = testutil::enumerate_trees(n);
    const DepTree gold = DepTree::from_heads(trees[rng.next_below(trees.size())]);
    Configuration c = Configuration::initial(n);
    int steps = 0;
    while (!c.terminal()) {
      if (++steps > 2 * n) return {false, "oracle did not terminate"};
      const Action a = static_oracle(c, gold);
      const std::vector<Action> legal = legal_actions(c);
      if (std::find(legal.begin(), legal.end(), a) == legal.end()) {
        return {false, "oracle proposed an illegal action at rep " +
                           std::to_string(rep)};
      }
      c.apply(a);
    }
    if (c.to_tree().heads() != gold.heads()) {
      return {false, "oracle round trip lost the tree at rep " + std::to_string(rep)};
    }
  }

  // with a beam at least as wide as the number of complete action sequences,
  // beam search must return the exhaustive argmax
  const FeatureConfig fcfg{16, "v1"};
  const FeatureExtractor fx(fcfg);
  std::vector<double> w(fcfg.dimension());
  for (auto& v : w) v = rng.next_double() - 0.5;
  double max_err = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_below(4));  // 1..4
    Sentence s = testutil::make_sentence(n, rng);
    const testutil::SequenceSearch oracle = testutil::exhaustive_sequences(s, fx, w);
    const int beam = static_cast<int>(oracle.sequence_count) + 1;
    const BeamResult res =
        beam_decode(s, fx, w, beam, ConstraintContext::unconstrained(n));
    max_err = std::max(max_err, std::abs(res.score - oracle.best_score));
    if (res.tree.heads() != oracle.best_heads) {
      return {false, "wide beam missed the exhaustive argmax at rep " +
                         std::to_string(rep)};
    }
  }
  const bool pass = max_err <= kBeamScoreTol;
  return {pass, "1000 round trips exact, wide-beam score err " + fmt("%.2e", max_err)};
}

// ---------------------------------------------------------------- check 6

double corpus_uas(const WeightModel& model, const Treebank& tb, int beam) {
  const FeatureExtractor fx(model.feature_config());
  const std::vector<double> w = model.averaged();
  EvalResult total;
  for (const TreebankEntry& e : tb) {
    const DepTree pred = predict_with_weights(model.kind(), fx, w, e.sentence,
                                              nullptr, beam);
    total += evaluate_uas(e.sentence, pred, e.tree());
  }
  return total.uas();
}

Outcome check_separable_training() {
  const auto t0 = std::chrono::steady_clock::now();
  const Treebank tb = load_treebank(PPARSE_SOURCE_DIR "/data/separable.conll",
                                    AnnotationMode::kFull, nullptr);
  const FeatureConfig fcfg{18, "v1"};
  TrainConfig tcfg;
  tcfg.beam_size = 8;

  tcfg.max_iterations = 50;
  tcfg.patience = 50;
  const double llg = corpus_uas(
      train_parser(ParserKind::kLlgpar, tb, {}, tb, tcfg, fcfg).model, tb, 8);
  const double lg = corpus_uas(
      train_parser(ParserKind::kLgpar, tb, {}, tb, tcfg, fcfg).model, tb, 8);
  tcfg.max_iterations = 100;
  tcfg.patience = 100;
  const double lt = corpus_uas(
      train_parser(ParserKind::kLtpar, tb, {}, tb, tcfg, fcfg).model, tb, 8);

  const double secs = seconds_since(t0);
  const bool pass = llg == 1.0 && lg == 1.0 && lt >= 0.95 && secs <= 120.0;
  return {pass, "train UAS llgpar " + fmt("%.2f", llg * 100) + ", lgpar " +
                    fmt("%.2f", lg * 100) + ", ltpar " + fmt("%.2f", lt * 100) +
                    ", " + fmt("%.1f", secs) + "s"};
}

// ---------------------------------------------------------------- check 7

Outcome check_annotation_trends() {
  const auto t0 = std::chrono::steady_clock::now();
  const Treebank train_all = load_treebank(PPARSE_SOURCE_DIR "/data/trend_train.conll",
                                           AnnotationMode::kFull, nullptr);
  const Treebank dev = load_treebank(PPARSE_SOURCE_DIR "/data/trend_dev.conll",
                                     AnnotationMode::kFull, nullptr);
  const Treebank test = load_treebank(PPARSE_SOURCE_DIR "/data/trend_test.conll",
                                      AnnotationMode::kFull, nullptr);
  const std::vector<Treebank> parts = split_by_counts(train_all, {200, -1});
  const Treebank& seed = parts[0];
  const Treebank& pool = parts[1];

  const FeatureConfig fcfg{22, "v1"};
  TrainConfig tcfg;
  tcfg.beam_size = 32;
  tcfg.max_iterations = 25;
  tcfg.patience = 8;
  // forest gradients on partial trees are noisier than full-tree ones; the
  // default schedule stalls the partial arms before their plateau
  tcfg.sgd_step = 0.05;
  tcfg.sgd_decay = 30;

  auto arm = [&](const char* name, ParserKind kind, const Treebank& fa,
                 const Treebank& pa) {
    const auto a0 = std::chrono::steady_clock::now();
    TrainResult res = train_parser(kind, fa, pa, dev, tcfg, fcfg);
    const double uas = corpus_uas(res.model, test, tcfg.beam_size);
    std::fprintf(stderr, "  [trend] %-18s test UAS %.2f  (%.0fs, best iter %d)\n",
                 name, uas * 100, seconds_since(a0), res.stats.best_iteration);
    return std::make_pair(std::move(res), uas);
  };

  // equal nominal budgets over the pool: per-sentence partial annotation
  // versus fully annotating a same-share subset of the sentences
  const Treebank pa30 = simulate_random(pool, 30.0, 7);
  auto [model_a, uas_pa] = arm("llg fa+pa30", ParserKind::kLlgpar, seed, pa30);

  Rng subset_rng(7);
  const std::vector<int> pick = subset_rng.sample_without_replacement(
      static_cast<int>(pool.size()),
      static_cast<int>(std::ceil(0.3 * static_cast<double>(pool.size()))));
  Treebank fa_subset = seed;
  for (int ix : pick) fa_subset.push_back(pool[static_cast<size_t>(ix)]);
  auto [model_b, uas_fa] = arm("llg fa+subset30", ParserKind::kLlgpar, fa_subset, {});

  // coarse seed-only model; its uncertainty picks the annotation targets
  auto [model_c, uas_seed_only] = arm("llg fa-only", ParserKind::kLlgpar, seed, {});
  const Treebank unc15 = simulate_uncertain(pool, 15.0, model_c.model);
  auto [model_d, uas_llg] = arm("llg fa+unc15", ParserKind::kLlgpar, seed, unc15);
  auto [model_e, uas_lg] = arm("lg  fa+unc15", ParserKind::kLgpar, seed, unc15);
  auto [model_f, uas_lt] = arm("lt  fa+unc15", ParserKind::kLtpar, seed, unc15);

  // completing the same partial pool: trained-with-the-annotation forest
  // model versus the seed-only model
  const double comp_fine =
      complete_treebank(model_a.model, pa30, &pool, tcfg.beam_size).eval.uas();
  const double comp_coarse =
      complete_treebank(model_c.model, pa30, &pool, tcfg.beam_size).eval.uas();
  std::fprintf(stderr, "  [trend] completion fine %.2f coarse %.2f\n",
               comp_fine * 100, comp_coarse * 100);

  const double secs = seconds_since(t0);
  const bool partial_beats_subset = uas_pa >= uas_fa;
  const bool family_order =
      uas_llg + kTrendTol >= uas_lg && uas_lg + kTrendTol >= uas_lt;
  const bool fine_completion = comp_fine > comp_coarse;
  const bool pass =
      partial_beats_subset && family_order && fine_completion && secs <= 3600.0;
  std::ostringstream detail;
  detail << "pa30 " << fmt("%.2f", uas_pa * 100) << (partial_beats_subset ? " >= " : " < ")
         << fmt("%.2f", uas_fa * 100) << " fa-subset; unc15 llg "
         << fmt("%.2f", uas_llg * 100) << " lg " << fmt("%.2f", uas_lg * 100) << " lt "
         << fmt("%.2f", uas_lt * 100) << (family_order ? " ordered" : " NOT ordered")
         << "; completion " << fmt("%.2f", comp_fine * 100)
         << (fine_completion ? " > " : " <= ") << fmt("%.2f", comp_coarse * 100) << "; "
         << fmt("%.0f", secs) << "s";
  return {pass, detail.str()};
}

// ---------------------------------------------------------------- check 8

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// Runs every CLI command twice with the identical command line and demands
// byte-identical artifacts (written files, stdout, stderr) from the rerun.
Outcome check_cli_determinism() {
  namespace fs = std::filesystem;
  const std::string bin = PPARSE_BINARY_DIR "/pparse";
  if (!fs::exists(bin)) return {false, "CLI binary not found at " + bin};
  const fs::path dir = fs::current_path() / "acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string();
  const std::string src = PPARSE_SOURCE_DIR;
  std::ofstream(dir / "plan.txt")
      << "fa: " << d << "/fa.conll\npa_source: " << d << "/pa.conll\n"
      << "dev: " << d << "/fa.conll\ntest: " << d << "/fa.conll\n"
      << "parser: llgpar\nregime: direct\nsetting: preset\n"
      << "max_iterations: 2\npatience: 2\ndimension_log2: 16\nbeam_size: 4\n";
  const std::vector<std::string> cmds = {
      bin + " split --input " + src + "/data/trend_train.conll --output " + d +
          "/fa.conll:12 --output " + d + "/pool.conll:30 --output " + d +
          "/rest.conll:rest > " + d + "/split.out 2> " + d + "/split.err",
      bin + " simulate --input " + d + "/pool.conll --setting random --alpha 30" +
          " --seed 7 --output " + d + "/pa.conll > " + d + "/sim.out 2> " + d +
          "/sim.err",
      bin + " train --parser llgpar --fa " + d + "/fa.conll --pa " + d +
          "/pa.conll --dev " + d + "/fa.conll --model-out " + d +
          "/model.bin --iterations 2 --dim 16 > " + d + "/train.out 2> " + d +
          "/train.err",
      bin + " parse --model " + d + "/model.bin --input " + d +
          "/pool.conll --output " + d + "/pred.conll > " + d + "/parse.out 2> " +
          d + "/parse.err",
      bin + " evaluate --gold " + d + "/pool.conll --pred " + d +
          "/pred.conll > " + d + "/eval.out 2> " + d + "/eval.err",
      bin + " experiment --plan " + d + "/plan.txt --report " + d +
          "/report.tsv > " + d + "/exp.out 2> " + d + "/exp.err",
  };
  const std::vector<std::string> artifacts = {
      "fa.conll",  "pool.conll", "rest.conll", "pa.conll",   "model.bin",
      "model.bin.meta.json",     "pred.conll", "report.tsv", "split.out",
      "sim.out",   "train.out",  "parse.out",  "eval.out",   "exp.out",
      "split.err", "sim.err",    "train.err",  "parse.err",  "eval.err",
      "exp.err"};

  auto run_all = [&]() -> std::string {
    for (size_t i = 0; i < cmds.size(); ++i) {
      const int rc = std::system(cmds[i].c_str());
      if (rc != 0) {
        return "command " + std::to_string(i + 1) + " exited with " +
               std::to_string(rc) + ": " + slurp(dir / "split.err") +
               slurp(dir / "train.err") + slurp(dir / "exp.err");
      }
    }
    return "";
  };

  const std::string err1 = run_all();
  if (!err1.empty()) return {false, err1};
  std::vector<std::string> first;
  for (const std::string& a : artifacts) first.push_back(slurp(dir / a));
  const std::string err2 = run_all();  // identical command lines, same paths
  if (!err2.empty()) return {false, err2};

  int compared = 0;
  for (size_t i = 0; i < artifacts.size(); ++i) {
    const bool may_be_empty = artifacts[i] == "split.out" ||
                              artifacts[i] == "parse.out" ||
                              artifacts[i].ends_with(".err");
    if (first[i].empty() && !may_be_empty) {
      return {false, "artifact " + artifacts[i] + " is missing or empty"};
    }
    if (slurp(dir / artifacts[i]) != first[i]) {
      return {false, "artifact " + artifacts[i] + " differs between reruns"};
    }
    ++compared;
  }
  return {true, std::to_string(compared) + " artifacts byte-identical across reruns"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"chart-decode-and-marginals", check_chart_decode},
      {"forest-probability", check_forest_probability},
      {"gradient-finite-difference", check_gradient},
      {"constrained-beam-containment", check_beam_containment},
      {"transition-oracle-roundtrip", check_transition_oracle},
      {"separable-training", check_separable_training},
      {"annotation-trend-study", check_annotation_trends},
      {"cli-determinism", check_cli_determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, fn] : checks) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), name) == only.end()) {
      continue;
    }
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    std::printf("%s  %-30s %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", name.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures;
}
