#include "pparse/cli.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pparse/common.h"
#include "pparse/conll.h"
#include "pparse/eval.h"
#include "pparse/pipeline.h"
#include "pparse/simulate.h"
#include "pparse/trainer.h"
#include "pparse/weights.h"

namespace pparse::cli {
namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

Treebank load_or_throw(const std::string& path, AnnotationMode mode) {
  return load_treebank(path, mode, &std::cerr);
}

// "PATH:COUNT" or "PATH:rest"; throws DataError on malformed specs.
std::pair<std::string, long> parse_split_spec(const std::string& spec) {
  auto pos = spec.rfind(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 == spec.size())
    throw DataError("split output must be PATH:COUNT or PATH:rest, got '" + spec + "'");
  std::string path = spec.substr(0, pos);
  std::string count = spec.substr(pos + 1);
  if (count == "rest") return {path, -1};
  try {
    size_t used = 0;
    long v = std::stol(count, &used);
    if (used != count.size() || v <= 0) throw std::invalid_argument(count);
    return {path, v};
  } catch (const std::exception&) {
    throw DataError("bad sentence count '" + count + "' in split output '" + spec + "'");
  }
}

int run_split(const std::string& input, const std::vector<std::string>& outputs) {
  std::vector<std::string> paths;
  std::vector<long> counts;
  for (const auto& spec : outputs) {
    auto [path, count] = parse_split_spec(spec);
    paths.push_back(path);
    counts.push_back(count);
  }
  Treebank tb = load_or_throw(input, AnnotationMode::kPartial);
  std::vector<Treebank> parts = split_by_counts(tb, counts);
  for (size_t i = 0; i < parts.size(); ++i) {
    write_treebank_file(paths[i], parts[i]);
    std::cout << paths[i] << "\t" << parts[i].size() << " sentences\n";
  }
  return 0;
}

int run_simulate(const std::string& input, const std::string& setting_name, double alpha,
                 uint64_t seed, const std::vector<std::string>& model_paths,
                 const std::string& output, int beam) {
  SimSetting setting = sim_setting_from_name(setting_name);
  size_t want = setting == SimSetting::kRandom      ? 0
                : setting == SimSetting::kUncertain ? 1
                                                    : 3;
  if (model_paths.size() != want) {
    std::cerr << "simulate --setting " << setting_name << " needs " << want
              << " --model argument(s), got " << model_paths.size() << "\n";
    return 1;
  }
  Treebank gold = load_or_throw(input, AnnotationMode::kFull);
  Treebank out;
  switch (setting) {
    case SimSetting::kRandom:
      out = simulate_random(gold, alpha, seed);
      break;
    case SimSetting::kUncertain: {
      WeightModel model = WeightModel::load(model_paths[0]);
      out = simulate_uncertain(gold, alpha, model);
      break;
    }
    case SimSetting::kDivergence: {
      WeightModel llg = WeightModel::load(model_paths[0]);
      WeightModel lg = WeightModel::load(model_paths[1]);
      WeightModel lt = WeightModel::load(model_paths[2]);
      out = simulate_divergence(gold, llg, lg, lt, beam);
      break;
    }
  }
  write_treebank_file(output, out);
  long kept = 0, total = 0;
  for (const auto& e : out) {
    kept += e.annotation.specified_count();
    total += e.annotation.size();
  }
  std::cout << "kept " << kept << " of " << total << " heads over " << out.size()
            << " sentences\n";
  return 0;
}

struct TrainFlags {
  std::string fa, pa, dev, parser = "llgpar", model_out;
  TrainConfig tcfg;
  FeatureConfig fcfg;
};

int run_train(const TrainFlags& f) {
  ParserKind kind = parser_kind_from_name(f.parser);
  f.fcfg.validate();
  Treebank fa = load_or_throw(f.fa, AnnotationMode::kFull);
  Treebank pa;
  if (!f.pa.empty()) pa = load_or_throw(f.pa, AnnotationMode::kPartial);
  Treebank dev = load_or_throw(f.dev, AnnotationMode::kFull);

  TrainResult result = train_parser(kind, fa, pa, dev, f.tcfg, f.fcfg);
  result.model.save(f.model_out);

  nlohmann::json meta;
  meta["parser"] = parser_kind_name(kind);
  meta["dimension_log2"] = f.fcfg.dimension_log2;
  meta["template_set_version"] = f.fcfg.template_set_version;
  meta["iterations_run"] = result.stats.iterations_run;
  meta["best_iteration"] = result.stats.best_iteration;
  meta["best_dev_uas"] = result.stats.best_dev_uas;
  meta["skipped_instances"] = result.stats.skipped_instances;
  meta["dev_uas_curve"] = result.stats.dev_uas_curve;
  std::ofstream mf(f.model_out + ".meta.json");
  if (!mf) throw DataError("cannot write " + f.model_out + ".meta.json");
  mf << meta.dump(2) << "\n";

  std::cout << "trained " << parser_kind_name(kind) << ": best dev UAS "
            << fmt2(result.stats.best_dev_uas) << " at iteration "
            << result.stats.best_iteration << " (" << result.stats.iterations_run
            << " iterations, " << result.stats.skipped_instances
            << " instances skipped)\n";
  return 0;
}

int run_complete(const std::string& model_path, const std::string& input,
                 const std::string& output, const std::string& gold_path, int beam) {
  WeightModel model = WeightModel::load(model_path);
  Treebank partial = load_or_throw(input, AnnotationMode::kPartial);
  std::optional<Treebank> gold;
  if (!gold_path.empty()) gold = load_or_throw(gold_path, AnnotationMode::kFull);

  CompletionResult res =
      complete_treebank(model, partial, gold ? &*gold : nullptr, beam);
  write_treebank_file(output, res.completed);
  std::cout << "completed " << res.completed.size() << " sentences, skipped "
            << res.skipped << "\n";
  if (gold) std::cout << "completion UAS\t" << fmt2(res.eval.uas_percent()) << "\n";
  return 0;
}

int run_parse(const std::string& model_path, const std::string& input,
              const std::string& output, bool constrained, int beam) {
  WeightModel model = WeightModel::load(model_path);
  Treebank in = load_or_throw(input, AnnotationMode::kPartial);
  FeatureExtractor fx(model.feature_config());
  std::vector<double> weights = model.averaged();

  Treebank out;
  out.reserve(in.size());
  for (const auto& entry : in) {
    const PartialTree* constraint =
        constrained && entry.annotation.specified_count() > 0 ? &entry.annotation
                                                              : nullptr;
    DepTree tree = predict_with_weights(model.kind(), fx, weights, entry.sentence,
                                        constraint, beam);
    out.push_back({entry.sentence, PartialTree::from_tree(tree)});
  }
  write_treebank_file(output, out);
  std::cout << "parsed " << out.size() << " sentences\n";
  return 0;
}

int run_evaluate(const std::string& gold_path, const std::string& pred_path) {
  Treebank gold = load_or_throw(gold_path, AnnotationMode::kFull);
  Treebank pred = load_or_throw(pred_path, AnnotationMode::kFull);
  if (gold.size() != pred.size())
    throw DataError("sentence count mismatch: gold has " + std::to_string(gold.size()) +
                    ", predictions have " + std::to_string(pred.size()));
  EvalResult total;
  for (size_t i = 0; i < gold.size(); ++i)
    total += evaluate_uas(gold[i].sentence, pred[i].tree(), gold[i].tree());
  std::cout << "UAS\t" << fmt2(total.uas_percent()) << "\n"
            << "correct\t" << total.correct << "\n"
            << "scored\t" << total.scored << "\n";
  return 0;
}

int run_experiment_cmd(const std::string& plan_path, const std::string& report_path,
                       const std::string& format_name) {
  std::ifstream pf(plan_path);
  if (!pf) throw DataError("cannot read plan file " + plan_path);
  ExperimentPlan plan = parse_plan(pf);
  ExperimentResult result = run_experiment(plan);

  ReportFormat fmt = report_format_from_name(format_name);
  std::vector<ReportRow> rows{result.row};
  if (!report_path.empty()) {
    std::ofstream rf(report_path);
    if (!rf) throw DataError("cannot write report file " + report_path);
    emit_report(rf, rows, fmt);
  }
  emit_report(std::cout, rows, fmt);
  if (result.completion_skipped > 0)
    std::cerr << "completion skipped " << result.completion_skipped
              << " unsatisfiable sentences\n";
  return 0;
}

}  // namespace

int run(std::vector<std::string> args) {
  CLI::App app{"Dependency parsing from full and partial annotation"};
  app.require_subcommand(1);

  // split
  auto* split = app.add_subcommand("split", "Carve a treebank into consecutive slices");
  std::string split_input;
  std::vector<std::string> split_outputs;
  split->add_option("--input", split_input, "Treebank to slice")->required();
  split->add_option("--output", split_outputs,
                    "Slice spec PATH:COUNT (last may be PATH:rest); repeatable")
      ->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Reduce gold trees to partial annotation");
  std::string sim_input, sim_setting = "random", sim_output;
  double sim_alpha = 0.0;
  uint64_t sim_seed = 1;
  int sim_beam = 64;
  std::vector<std::string> sim_models;
  sim->add_option("--input", sim_input, "Gold treebank")->required();
  sim->add_option("--setting", sim_setting, "random | uncertain | divergence");
  sim->add_option("--alpha", sim_alpha, "Percent of non-punctuation heads to keep");
  sim->add_option("--seed", sim_seed, "Random setting seed");
  sim->add_option("--model", sim_models,
                  "Model file(s): 1 for uncertain, 3 for divergence");
  sim->add_option("--beam", sim_beam, "Beam size for divergence parsing");
  sim->add_option("--output", sim_output, "Partial treebank to write")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a parser");
  TrainFlags tf;
  train->add_option("--fa", tf.fa, "Fully annotated treebank")->required();
  train->add_option("--pa", tf.pa, "Partially annotated treebank (optional)");
  train->add_option("--dev", tf.dev, "Development treebank")->required();
  train->add_option("--parser", tf.parser, "llgpar | lgpar | ltpar");
  train->add_option("--model-out", tf.model_out, "Model file to write")->required();
  train->add_option("--iterations", tf.tcfg.max_iterations, "Max training iterations");
  train->add_option("--patience", tf.tcfg.patience, "Early-stop patience");
  train->add_option("--beam", tf.tcfg.beam_size, "Beam size (ltpar)");
  train->add_option("--batch-size", tf.tcfg.batch_size, "SGD batch size (llgpar)");
  train->add_option("--step", tf.tcfg.sgd_step, "SGD initial step size (llgpar)");
  train->add_option("--decay", tf.tcfg.sgd_decay, "SGD step decay (llgpar)");
  train->add_option("--sigma2", tf.tcfg.l2_sigma2, "L2 regularizer sigma^2 (llgpar)");
  train->add_option("--pa-subset", tf.tcfg.per_iter_pa_subset,
                    "Partially annotated sentences sampled per iteration");
  train->add_option("--seed", tf.tcfg.rng_seed, "Shuffle/sample seed");
  train->add_option("--dim", tf.fcfg.dimension_log2, "log2 of the feature space size");

  // complete
  auto* complete = app.add_subcommand("complete", "Complete partial trees into full trees");
  std::string cm_model, cm_input, cm_output, cm_gold;
  int cm_beam = 64;
  complete->add_option("--model", cm_model, "Completer model file")->required();
  complete->add_option("--input", cm_input, "Partial treebank")->required();
  complete->add_option("--output", cm_output, "Completed treebank to write")->required();
  complete->add_option("--gold", cm_gold, "Gold treebank for completion UAS (optional)");
  complete->add_option("--beam", cm_beam, "Beam size (ltpar models)");

  // parse
  auto* parse = app.add_subcommand("parse", "Parse sentences with a trained model");
  std::string ps_model, ps_input, ps_output;
  bool ps_constrained = false;
  int ps_beam = 64;
  parse->add_option("--model", ps_model, "Model file")->required();
  parse->add_option("--input", ps_input, "Input treebank")->required();
  parse->add_option("--output", ps_output, "Parsed treebank to write")->required();
  parse->add_flag("--constrained", ps_constrained,
                  "Force output trees to contain the input's annotated arcs");
  parse->add_option("--beam", ps_beam, "Beam size (ltpar models)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Unlabeled attachment score");
  std::string ev_gold, ev_pred;
  eval->add_option("--gold", ev_gold, "Gold treebank")->required();
  eval->add_option("--pred", ev_pred, "Predicted treebank")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a plan file end to end");
  std::string ex_plan, ex_report, ex_format = "tsv";
  exp->add_option("--plan", ex_plan, "Plan file")->required();
  exp->add_option("--report", ex_report, "Report file to write (optional)");
  exp->add_option("--format", ex_format, "tsv | markdown");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(split)) return run_split(split_input, split_outputs);
    if (app.got_subcommand(sim))
      return run_simulate(sim_input, sim_setting, sim_alpha, sim_seed, sim_models,
                          sim_output, sim_beam);
    if (app.got_subcommand(train)) return run_train(tf);
    if (app.got_subcommand(complete))
      return run_complete(cm_model, cm_input, cm_output, cm_gold, cm_beam);
    if (app.got_subcommand(parse))
      return run_parse(ps_model, ps_input, ps_output, ps_constrained, ps_beam);
    if (app.got_subcommand(eval)) return run_evaluate(ev_gold, ev_pred);
    if (app.got_subcommand(exp))
      return run_experiment_cmd(ex_plan, ex_report, ex_format);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const TrainError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace pparse::cli
