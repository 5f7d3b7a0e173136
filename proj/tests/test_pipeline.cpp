#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "pparse/common.h"
#include "pparse/pipeline.h"
#include "pparse/rng.h"

using namespace pparse;

namespace {

std::filesystem::path fixture_dir() {
  static const std::filesystem::path dir = [] {
    auto p = std::filesystem::temp_directory_path() / "pparse_pipeline_tests";
    std::filesystem::create_directories(p);
    return p;
  }();
  return dir;
}

std::string fixture_file(const std::string& name, const Treebank& tb) {
  const std::string path = (fixture_dir() / name).string();
  write_treebank_file(path, tb);
  return path;
}

// four tiny aligned treebanks derived from the separable sample
struct Corpus {
  std::string fa, dev, test, pool;
};

Corpus small_corpus() {
  static const Corpus c = [] {
    const Treebank all = load_treebank(PPARSE_SOURCE_DIR "/data/separable.conll",
                                       AnnotationMode::kFull, nullptr);
    REQUIRE(all.size() >= 22);
    const std::vector<Treebank> parts = split_by_counts(all, {6, 4, 4, 8});
    return Corpus{fixture_file("fa.conll", parts[0]), fixture_file("dev.conll", parts[1]),
                  fixture_file("test.conll", parts[2]),
                  fixture_file("pool.conll", parts[3])};
  }();
  return c;
}

}  // namespace

TEST_CASE("plan files parse into a full experiment description") {
  std::istringstream in(
      "# seed experiment\n"
      "fa: seed.conll\n"
      "pa_source: pool.conll   # simulated below\n"
      "dev: dev.conll\n"
      "test: test.conll\n"
      "parser: ltpar\n"
      "regime: complete-then-train\n"
      "completer: coarse-self\n"
      "setting: uncertain\n"
      "alpha: 17.5\n"
      "seed: 42\n"
      "beam_size: 16\n"
      "sgd_step: 0.05\n"
      "sgd_decay: 8\n"
      "l2_sigma2: 2.5\n"
      "batch_size: 16\n"
      "patience: 7\n"
      "max_iterations: 21\n"
      "per_iter_pa_subset: 500\n"
      "rng_seed: 13\n"
      "dimension_log2: 17\n"
      "template_set_version: v1\n");
  const ExperimentPlan plan = parse_plan(in);
  CHECK(plan.fa_path == "seed.conll");
  CHECK(plan.pa_source_path == "pool.conll");
  CHECK(plan.dev_path == "dev.conll");
  CHECK(plan.test_path == "test.conll");
  CHECK(plan.parser == ParserKind::kLtpar);
  CHECK(plan.regime == Regime::kCompleteThenTrain);
  CHECK(plan.completer == Completer::kCoarseSelf);
  REQUIRE(plan.setting.has_value());
  CHECK(*plan.setting == SimSetting::kUncertain);
  CHECK(plan.alpha == doctest::Approx(17.5));
  CHECK(plan.seed == 42);
  CHECK(plan.train.beam_size == 16);
  CHECK(plan.train.sgd_step == doctest::Approx(0.05));
  CHECK(plan.train.sgd_decay == doctest::Approx(8.0));
  CHECK(plan.train.l2_sigma2 == doctest::Approx(2.5));
  CHECK(plan.train.batch_size == 16);
  CHECK(plan.train.patience == 7);
  CHECK(plan.train.max_iterations == 21);
  CHECK(plan.train.per_iter_pa_subset == 500);
  CHECK(plan.train.rng_seed == 13);
  CHECK(plan.features.dimension_log2 == 17);
  CHECK(plan.features.template_set_version == "v1");
}

TEST_CASE("plan parsing rejects malformed input") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_plan(in);
  };
  const std::string base = "fa: a\ndev: b\ntest: c\n";
  CHECK_NOTHROW(parse(base));
  CHECK_THROWS_AS(parse(base + "mystery: 1\n"), DataError);
  CHECK_THROWS_AS(parse(base + "just a line without a separator\n"), DataError);
  CHECK_THROWS_AS(parse(base + "alpha: thirty\n"), DataError);
  CHECK_THROWS_AS(parse(base + "patience: 3.5\n"), DataError);
  CHECK_THROWS_AS(parse(base + "parser: cyk\n"), DataError);
  CHECK_THROWS_AS(parse(base + "setting: oracle\n"), DataError);
  CHECK_THROWS_AS(parse(base + "regime: retrain\n"), DataError);
  CHECK_THROWS_AS(parse(base + "dimension_log2: 4\n"), DataError);
  CHECK_THROWS_AS(parse("dev: b\ntest: c\n"), DataError);  // missing fa
  CHECK_THROWS_AS(parse("fa: a\ntest: c\n"), DataError);   // missing dev
  CHECK_THROWS_AS(parse("fa: a\ndev: b\n"), DataError);    // missing test
  // unset setting keeps the pa_source as preset partial annotation
  std::istringstream in(base + "setting: preset\n");
  CHECK(!parse_plan(in).setting.has_value());
}

TEST_CASE("treebank splitting slices by counts with an optional rest") {
  const Treebank all = load_treebank(PPARSE_SOURCE_DIR "/data/separable.conll",
                                     AnnotationMode::kFull, nullptr);
  REQUIRE(all.size() >= 10);

  const auto parts = split_by_counts(all, {2, 3});
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].size() == 2);
  CHECK(parts[1].size() == 3);
  CHECK(parts[0][0].annotation == all[0].annotation);
  CHECK(parts[1][0].annotation == all[2].annotation);

  const auto with_rest = split_by_counts(all, {4, -1});
  REQUIRE(with_rest.size() == 2);
  CHECK(with_rest[0].size() == 4);
  CHECK(with_rest[1].size() == all.size() - 4);
  CHECK(with_rest[1].back().annotation == all.back().annotation);

  const auto empty_slice = split_by_counts(all, {0, 1});
  CHECK(empty_slice[0].empty());
  CHECK(empty_slice[1].size() == 1);

  CHECK_THROWS_AS(split_by_counts(all, {-1, 2}), DataError);
  CHECK_THROWS_AS(split_by_counts(all, {static_cast<long>(all.size()) + 1}), DataError);
  CHECK_THROWS_AS(split_by_counts(all, {static_cast<long>(all.size()), 1}), DataError);
}

TEST_CASE("reports are sorted and formatted as percentages") {
  ReportRow a{"ltpar", "direct", "random", 30.0, 0.8512, 0.8449, std::nullopt};
  ReportRow b{"llgpar", "direct", "random", 30.0, 0.9001, 0.89995, std::nullopt};
  ReportRow c{"llgpar", "direct", "random", 5.0, 0.5, 0.512345, 0.753};
  ReportRow d{"llgpar", "direct", "divergence", 0.0, 1.0, 0.0, std::nullopt};

  std::ostringstream tsv;
  emit_report(tsv, {a, b, c, d}, ReportFormat::kTsv);
  CHECK(tsv.str() ==
        "parser\tregime\tsetting\talpha\tdev_uas\ttest_uas\tcompletion_uas\n"
        "llgpar\tdirect\tdivergence\t0\t100.00\t0.00\t-\n"
        "llgpar\tdirect\trandom\t5\t50.00\t51.23\t75.30\n"
        "llgpar\tdirect\trandom\t30\t90.01\t90.00\t-\n"
        "ltpar\tdirect\trandom\t30\t85.12\t84.49\t-\n");

  std::ostringstream md;
  emit_report(md, {c}, ReportFormat::kMarkdown);
  CHECK(md.str() ==
        "| parser | regime | setting | alpha | dev_uas | test_uas | completion_uas |\n"
        "| --- | --- | --- | --- | --- | --- | --- |\n"
        "| llgpar | direct | random | 5 | 50.00 | 51.23 | 75.30 |\n");
}

TEST_CASE("completion keeps every given arc and scores against gold") {
  const FeatureConfig fcfg{16, "v1"};
  const Corpus files = small_corpus();
  const Treebank fa = load_treebank(files.fa, AnnotationMode::kFull, nullptr);
  const Treebank pool = load_treebank(files.pool, AnnotationMode::kFull, nullptr);
  TrainConfig tcfg;
  tcfg.max_iterations = 8;
  tcfg.beam_size = 8;
  const TrainResult trained =
      train_parser(ParserKind::kLlgpar, fa, {}, fa, tcfg, fcfg);

  SUBCASE("fully specified partials are returned verbatim") {
    CompletionResult res = complete_treebank(trained.model, pool, &pool, 8);
    CHECK(res.skipped == 0);
    REQUIRE(res.completed.size() == pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
      CHECK(res.completed[i].annotation == pool[i].annotation);
    }
    CHECK(res.eval.uas() == doctest::Approx(1.0));
  }

  SUBCASE("empty partials reduce to plain parsing") {
    Treebank empty;
    for (const TreebankEntry& e : pool) {
      empty.push_back({e.sentence, PartialTree::empty(e.sentence.size())});
    }
    CompletionResult res = complete_treebank(trained.model, empty, &pool, 8);
    CHECK(res.skipped == 0);
    const FeatureExtractor fx(fcfg);
    const std::vector<double> w = trained.model.averaged();
    EvalResult manual;
    for (size_t i = 0; i < pool.size(); ++i) {
      const DepTree plain = predict_with_weights(ParserKind::kLlgpar, fx, w,
                                                 pool[i].sentence, nullptr, 8);
      CHECK(res.completed[i].annotation == PartialTree::from_tree(plain));
      manual += evaluate_uas(pool[i].sentence, plain, pool[i].tree());
    }
    CHECK(res.eval.uas() == doctest::Approx(manual.uas()));
  }

  SUBCASE("partial constraints survive into the completed trees") {
    Rng rng(411);
    Treebank partial;
    for (const TreebankEntry& e : pool) {
      partial.push_back(
          {e.sentence,
           PartialTree::from_heads(testutil::random_partial(e.annotation.heads(), rng, 0.5))});
    }
    CompletionResult res = complete_treebank(trained.model, partial, &pool, 8);
    CHECK(res.skipped == 0);
    REQUIRE(res.completed.size() == pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
      CHECK(partial[i].annotation.consistent_with(res.completed[i].tree()));
    }
  }

  SUBCASE("misaligned gold is rejected") {
    Treebank shorter(pool.begin(), pool.begin() + 2);
    CHECK_THROWS_AS(complete_treebank(trained.model, pool, &shorter, 8), DataError);
  }
}

TEST_CASE("direct experiments reproduce row for row") {
  const Corpus files = small_corpus();
  ExperimentPlan plan;
  plan.fa_path = files.fa;
  plan.pa_source_path = files.pool;
  plan.dev_path = files.dev;
  plan.test_path = files.test;
  plan.parser = ParserKind::kLlgpar;
  plan.regime = Regime::kDirect;
  plan.setting = SimSetting::kRandom;
  plan.alpha = 40.0;
  plan.seed = 5;
  plan.features = FeatureConfig{16, "v1"};
  plan.train.max_iterations = 4;
  plan.train.patience = 6;
  plan.train.beam_size = 4;

  const ExperimentResult r1 = run_experiment(plan);
  const ExperimentResult r2 = run_experiment(plan);
  CHECK(r1.row.parser == "llgpar");
  CHECK(r1.row.regime == "direct");
  CHECK(r1.row.setting == "random");
  CHECK(r1.row.alpha == 40.0);
  CHECK(r1.row.dev_uas >= 0.0);
  CHECK(r1.row.dev_uas <= 1.0);
  CHECK(!r1.row.completion_uas.has_value());
  CHECK(r1.row.dev_uas == doctest::Approx(r2.row.dev_uas).epsilon(1e-15));
  CHECK(r1.row.test_uas == doctest::Approx(r2.row.test_uas).epsilon(1e-15));
  CHECK(r1.stats.dev_uas_curve == r2.stats.dev_uas_curve);

  std::ostringstream o1, o2;
  emit_report(o1, {r1.row}, ReportFormat::kTsv);
  emit_report(o2, {r2.row}, ReportFormat::kTsv);
  CHECK(o1.str() == o2.str());
}

TEST_CASE("completion regimes retrain on densified data") {
  const Corpus files = small_corpus();
  ExperimentPlan plan;
  plan.fa_path = files.fa;
  plan.pa_source_path = files.pool;
  plan.dev_path = files.dev;
  plan.test_path = files.test;
  plan.parser = ParserKind::kLgpar;
  plan.regime = Regime::kCompleteThenTrain;
  plan.setting = SimSetting::kRandom;
  plan.alpha = 50.0;
  plan.seed = 5;
  plan.features = FeatureConfig{16, "v1"};
  plan.train.max_iterations = 4;
  plan.train.patience = 6;
  plan.train.beam_size = 4;

  SUBCASE("the target parser completes for itself") {
    plan.completer = Completer::kCoarseSelf;
    const ExperimentResult r = run_experiment(plan);
    CHECK(r.row.regime == "complete-then-train:coarse-self");
    REQUIRE(r.row.completion_uas.has_value());
    CHECK(*r.row.completion_uas >= 0.0);
    CHECK(*r.row.completion_uas <= 1.0);
    CHECK(r.completion_skipped == 0);
  }
  SUBCASE("a forest model completes for the target parser") {
    plan.completer = Completer::kFineLlgpar;
    const ExperimentResult r = run_experiment(plan);
    CHECK(r.row.regime == "complete-then-train:fine-llgpar");
    REQUIRE(r.row.completion_uas.has_value());
    CHECK(r.completion_skipped == 0);
  }
}
