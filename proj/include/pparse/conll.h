#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pparse/token.h"
#include "pparse/tree.h"

namespace pparse {

// One sentence with its (possibly partial) annotation.  A fully specified
// annotation is the FA case; tree() gives the DepTree view then.
struct TreebankEntry {
  Sentence sentence;
  PartialTree annotation;

  DepTree tree() const { return annotation.to_tree(); }
};

using Treebank = std::vector<TreebankEntry>;

struct SentenceDiagnostic {
  int sentence_index = 0;  // 0-based position in the file
  int line = 0;            // first line of the offending sentence
  std::string message;
};

struct ReadResult {
  Treebank items;
  std::vector<SentenceDiagnostic> rejected;
};

enum class AnnotationMode {
  kFull,     // every HEAD must be an integer
  kPartial,  // HEAD may be "_" (unannotated)
};

// Columns: ID FORM LEMMA CPOS POS FEATS HEAD DEPREL.  LEMMA/FEATS/DEPREL are
// ignored on input and emitted as "_".  Structurally invalid sentences are
// collected in `rejected` (cycle, crossing arcs, multiple roots, ...); a
// malformed file (bad column count, unparsable ID/HEAD) throws DataError.
ReadResult read_treebank(std::istream& in, AnnotationMode mode,
                         const PunctuationSet& punct = PunctuationSet());
ReadResult read_treebank_file(const std::string& path, AnnotationMode mode,
                              const PunctuationSet& punct = PunctuationSet());

void write_treebank(std::ostream& out, const Treebank& items);
void write_treebank_file(const std::string& path, const Treebank& items);

}  // namespace pparse
