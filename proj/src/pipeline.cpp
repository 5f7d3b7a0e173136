#include "pparse/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>

#include "pparse/common.h"

namespace pparse {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::kDirect: return "direct";
    case Regime::kCompleteThenTrain: return "complete-then-train";
  }
  return "?";
}

Regime regime_from_name(const std::string& name) {
  if (name == "direct") return Regime::kDirect;
  if (name == "complete-then-train") return Regime::kCompleteThenTrain;
  throw DataError("unknown regime: " + name);
}

const char* completer_name(Completer c) {
  switch (c) {
    case Completer::kCoarseSelf: return "coarse-self";
    case Completer::kFineLlgpar: return "fine-llgpar";
  }
  return "?";
}

Completer completer_from_name(const std::string& name) {
  if (name == "coarse-self") return Completer::kCoarseSelf;
  if (name == "fine-llgpar") return Completer::kFineLlgpar;
  throw DataError("unknown completer: " + name);
}

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "tsv") return ReportFormat::kTsv;
  if (name == "markdown") return ReportFormat::kMarkdown;
  throw DataError("unknown report format: " + name);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long out = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw DataError("plan key '" + key + "': not an integer: " + v);
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw DataError("plan key '" + key + "': not a number: " + v);
  }
}

}  // namespace

ExperimentPlan parse_plan(std::istream& in) {
  ExperimentPlan plan;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t colon = line.find(':');
    if (colon == std::string::npos) {
      throw DataError("plan line " + std::to_string(lineno) + ": expected 'key: value'");
    }
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "fa") {
      plan.fa_path = value;
    } else if (key == "pa_source") {
      plan.pa_source_path = value;
    } else if (key == "dev") {
      plan.dev_path = value;
    } else if (key == "test") {
      plan.test_path = value;
    } else if (key == "parser") {
      plan.parser = parser_kind_from_name(value);
    } else if (key == "regime") {
      plan.regime = regime_from_name(value);
    } else if (key == "completer") {
      plan.completer = completer_from_name(value);
    } else if (key == "setting") {
      if (value == "preset") {
        plan.setting.reset();
      } else {
        plan.setting = sim_setting_from_name(value);
      }
    } else if (key == "alpha") {
      plan.alpha = parse_double(key, value);
    } else if (key == "seed") {
      plan.seed = static_cast<uint64_t>(parse_long(key, value));
    } else if (key == "beam_size") {
      plan.train.beam_size = static_cast<int>(parse_long(key, value));
    } else if (key == "sgd_step") {
      plan.train.sgd_step = parse_double(key, value);
    } else if (key == "sgd_decay") {
      plan.train.sgd_decay = parse_double(key, value);
    } else if (key == "l2_sigma2") {
      plan.train.l2_sigma2 = parse_double(key, value);
    } else if (key == "batch_size") {
      plan.train.batch_size = static_cast<int>(parse_long(key, value));
    } else if (key == "patience") {
      plan.train.patience = static_cast<int>(parse_long(key, value));
    } else if (key == "max_iterations") {
      plan.train.max_iterations = static_cast<int>(parse_long(key, value));
    } else if (key == "per_iter_pa_subset") {
      plan.train.per_iter_pa_subset = static_cast<int>(parse_long(key, value));
    } else if (key == "rng_seed") {
      plan.train.rng_seed = static_cast<uint64_t>(parse_long(key, value));
    } else if (key == "dimension_log2") {
      plan.features.dimension_log2 = static_cast<int>(parse_long(key, value));
    } else if (key == "template_set_version") {
      plan.features.template_set_version = value;
    } else {
      throw DataError("plan line " + std::to_string(lineno) + ": unknown key '" + key +
                      "'");
    }
  }
  if (plan.fa_path.empty()) throw DataError("plan is missing required key 'fa'");
  if (plan.dev_path.empty()) throw DataError("plan is missing required key 'dev'");
  if (plan.test_path.empty()) throw DataError("plan is missing required key 'test'");
  plan.features.validate();
  return plan;
}

Treebank load_treebank(const std::string& path, AnnotationMode mode,
                       std::ostream* diag) {
  ReadResult rr = read_treebank_file(path, mode);
  if (diag != nullptr) {
    for (const SentenceDiagnostic& d : rr.rejected) {
      *diag << path << ": sentence " << (d.sentence_index + 1) << " (line " << d.line
            << "): " << d.message << "\n";
    }
  }
  return std::move(rr.items);
}

std::vector<Treebank> split_by_counts(const Treebank& tb,
                                      const std::vector<long>& counts) {
  std::vector<Treebank> out;
  size_t pos = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    const long c = counts[i];
    if (c == -1) {
      if (i + 1 != counts.size()) {
        throw DataError("'rest' split is only allowed as the final slice");
      }
      out.emplace_back(tb.begin() + static_cast<long>(pos), tb.end());
      pos = tb.size();
      continue;
    }
    if (c < 0 || pos + static_cast<size_t>(c) > tb.size()) {
      throw DataError("split count " + std::to_string(c) + " exceeds remaining " +
                      std::to_string(tb.size() - pos) + " sentences");
    }
    out.emplace_back(tb.begin() + static_cast<long>(pos),
                     tb.begin() + static_cast<long>(pos) + c);
    pos += static_cast<size_t>(c);
  }
  return out;
}

CompletionResult complete_treebank(const WeightModel& model, const Treebank& partial,
                                   const Treebank* gold, int beam_size) {
  if (gold != nullptr && gold->size() != partial.size()) {
    throw DataError("gold treebank does not align with the partial treebank");
  }
  const FeatureExtractor fx(model.feature_config());
  const std::vector<double> w = model.averaged();
  CompletionResult res;
  res.completed.reserve(partial.size());
  for (size_t i = 0; i < partial.size(); ++i) {
    const TreebankEntry& e = partial[i];
    DepTree tree = DepTree::from_heads({0});
    try {
      tree = predict_with_weights(model.kind(), fx, w, e.sentence, &e.annotation,
                                  beam_size);
    } catch (const DataError&) {
      ++res.skipped;
      continue;
    }
    if (!e.annotation.consistent_with(tree)) {
      throw TrainError("completion dropped a specified arc");
    }
    res.completed.push_back({e.sentence, PartialTree::from_tree(tree)});
    if (gold != nullptr) {
      res.eval += evaluate_uas(e.sentence, tree, (*gold)[i].tree());
    }
  }
  return res;
}

namespace {

double corpus_uas(ParserKind kind, const FeatureExtractor& fx,
                  std::span<const double> w, const Treebank& tb, int beam_size) {
  EvalResult total;
  for (const TreebankEntry& e : tb) {
    const DepTree pred =
        predict_with_weights(kind, fx, w, e.sentence, nullptr, beam_size);
    total += evaluate_uas(e.sentence, pred, e.tree());
  }
  return total.uas();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  const Treebank fa = load_treebank(plan.fa_path, AnnotationMode::kFull, nullptr);
  const Treebank dev = load_treebank(plan.dev_path, AnnotationMode::kFull, nullptr);
  const Treebank test = load_treebank(plan.test_path, AnnotationMode::kFull, nullptr);

  Treebank pool_gold;  // gold trees of the pool (only when simulating)
  Treebank pa;
  if (!plan.pa_source_path.empty()) {
    if (plan.setting.has_value()) {
      pool_gold = load_treebank(plan.pa_source_path, AnnotationMode::kFull, nullptr);
      switch (*plan.setting) {
        case SimSetting::kRandom:
          pa = simulate_random(pool_gold, plan.alpha, plan.seed);
          break;
        case SimSetting::kUncertain: {
          const TrainResult seed_model = train_parser(
              ParserKind::kLlgpar, fa, Treebank{}, dev, plan.train, plan.features);
          pa = simulate_uncertain(pool_gold, plan.alpha, seed_model.model);
          break;
        }
        case SimSetting::kDivergence: {
          const TrainResult llg = train_parser(ParserKind::kLlgpar, fa, Treebank{}, dev,
                                               plan.train, plan.features);
          const TrainResult lg = train_parser(ParserKind::kLgpar, fa, Treebank{}, dev,
                                              plan.train, plan.features);
          const TrainResult lt = train_parser(ParserKind::kLtpar, fa, Treebank{}, dev,
                                              plan.train, plan.features);
          pa = simulate_divergence(pool_gold, llg.model, lg.model, lt.model,
                                   plan.train.beam_size);
          break;
        }
      }
    } else {
      pa = load_treebank(plan.pa_source_path, AnnotationMode::kPartial, nullptr);
    }
  }

  ExperimentResult out;
  out.row.parser = parser_kind_name(plan.parser);
  out.row.setting = plan.setting.has_value() ? sim_setting_name(*plan.setting) : "preset";
  out.row.alpha = plan.alpha;

  const FeatureExtractor fx(plan.features);
  TrainResult final_result{WeightModel(plan.features, plan.parser), {}};
  if (plan.regime == Regime::kDirect) {
    out.row.regime = regime_name(plan.regime);
    final_result = train_parser(plan.parser, fa, pa, dev, plan.train, plan.features);
  } else {
    out.row.regime =
        std::string(regime_name(plan.regime)) + ":" + completer_name(plan.completer);
    TrainResult completer =
        plan.completer == Completer::kCoarseSelf
            ? train_parser(plan.parser, fa, Treebank{}, dev, plan.train, plan.features)
            : train_parser(ParserKind::kLlgpar, fa, pa, dev, plan.train, plan.features);
    const CompletionResult comp =
        complete_treebank(completer.model, pa,
                          pool_gold.empty() ? nullptr : &pool_gold,
                          plan.train.beam_size);
    if (!pool_gold.empty()) out.row.completion_uas = comp.eval.uas();
    out.completion_skipped = comp.skipped;
    Treebank train_fa = fa;
    train_fa.insert(train_fa.end(), comp.completed.begin(), comp.completed.end());
    final_result =
        train_parser(plan.parser, train_fa, Treebank{}, dev, plan.train, plan.features);
  }

  out.stats = final_result.stats;
  const std::vector<double> w = final_result.model.averaged();
  out.row.dev_uas = corpus_uas(plan.parser, fx, w, dev, plan.train.beam_size);
  out.row.test_uas = corpus_uas(plan.parser, fx, w, test, plan.train.beam_size);
  return out;
}

namespace {

std::string format_uas(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

std::string format_alpha(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

}  // namespace

void emit_report(std::ostream& out, std::vector<ReportRow> rows, ReportFormat fmt) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.parser != b.parser) return a.parser < b.parser;
    if (a.setting != b.setting) return a.setting < b.setting;
    return a.alpha < b.alpha;
  });
  const char* cols[] = {"parser", "regime",  "setting",  "alpha",
                        "dev_uas", "test_uas", "completion_uas"};
  if (fmt == ReportFormat::kTsv) {
    for (size_t i = 0; i < 7; ++i) out << (i ? "\t" : "") << cols[i];
    out << "\n";
    for (const ReportRow& r : rows) {
      out << r.parser << "\t" << r.regime << "\t" << r.setting << "\t"
          << format_alpha(r.alpha) << "\t" << format_uas(r.dev_uas) << "\t"
          << format_uas(r.test_uas) << "\t"
          << (r.completion_uas ? format_uas(*r.completion_uas) : std::string("-"))
          << "\n";
    }
    return;
  }
  out << "|";
  for (const char* c : cols) out << " " << c << " |";
  out << "\n|";
  for (size_t i = 0; i < 7; ++i) out << " --- |";
  out << "\n";
  for (const ReportRow& r : rows) {
    out << "| " << r.parser << " | " << r.regime << " | " << r.setting << " | "
        << format_alpha(r.alpha) << " | " << format_uas(r.dev_uas) << " | "
        << format_uas(r.test_uas) << " | "
        << (r.completion_uas ? format_uas(*r.completion_uas) : std::string("-"))
        << " |\n";
  }
}

}  // namespace pparse
