#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pparse/conll.h"
#include "pparse/eval.h"
#include "pparse/simulate.h"
#include "pparse/trainer.h"
#include "pparse/weights.h"

namespace pparse {

enum class Regime { kDirect, kCompleteThenTrain };
enum class Completer { kCoarseSelf, kFineLlgpar };
enum class ReportFormat { kTsv, kMarkdown };

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& name);          // throws DataError
const char* completer_name(Completer c);
Completer completer_from_name(const std::string& name);    // throws DataError
ReportFormat report_format_from_name(const std::string& name);

// One experiment cell: data paths, annotation simulation, training regime.
struct ExperimentPlan {
  std::string fa_path;         // seed treebank, fully annotated
  std::string pa_source_path;  // pool treebank (gold when simulating; may be empty)
  std::string dev_path;
  std::string test_path;
  ParserKind parser = ParserKind::kLlgpar;
  Regime regime = Regime::kDirect;
  // nullopt: pa_source is already partially annotated ("preset")
  std::optional<SimSetting> setting = SimSetting::kRandom;
  double alpha = 0.0;
  uint64_t seed = 1;
  Completer completer = Completer::kFineLlgpar;
  TrainConfig train;
  FeatureConfig features;
};

// Flat "key: value" lines; '#' starts a comment; unknown keys are errors.
ExperimentPlan parse_plan(std::istream& in);  // throws DataError

struct ReportRow {
  std::string parser;
  std::string regime;
  std::string setting;
  double alpha = 0.0;
  double dev_uas = 0.0;   // fractions in [0, 1]
  double test_uas = 0.0;
  std::optional<double> completion_uas;
};

struct ExperimentResult {
  ReportRow row;
  TrainStats stats;
  long completion_skipped = 0;
};

ExperimentResult run_experiment(const ExperimentPlan& plan);

struct CompletionResult {
  Treebank completed;  // only the entries whose partials were satisfiable
  EvalResult eval;     // against gold, when provided
  long skipped = 0;
};

// Parses each sentence constrained by its partial annotation; the output
// trees contain every given arc.  Unsatisfiable partials are skipped.
CompletionResult complete_treebank(const WeightModel& model, const Treebank& partial,
                                   const Treebank* gold = nullptr, int beam_size = 64);

// Rows are sorted by (parser, setting, alpha); UAS columns are printed as
// percentages with two decimals.
void emit_report(std::ostream& out, std::vector<ReportRow> rows, ReportFormat fmt);

// Consecutive slices by sentence count; a final count of -1 means "the rest".
std::vector<Treebank> split_by_counts(const Treebank& tb,
                                      const std::vector<long>& counts);

// Reads a treebank file; per-sentence rejection diagnostics go to `diag`.
Treebank load_treebank(const std::string& path, AnnotationMode mode,
                       std::ostream* diag);

}  // namespace pparse
