#include "pparse/eval.h"

#include "pparse/common.h"

namespace pparse {

EvalResult evaluate_uas(const Sentence& sentence, const DepTree& pred, const DepTree& gold) {
  if (pred.size() != sentence.size() || gold.size() != sentence.size()) {
    throw DataError("prediction/gold length mismatch");
  }
  EvalResult r;
  for (int m = 1; m <= sentence.size(); ++m) {
    if (sentence.is_punct(m)) continue;
    ++r.scored;
    if (pred.head(m) == gold.head(m)) ++r.correct;
  }
  return r;
}

}  // namespace pparse
