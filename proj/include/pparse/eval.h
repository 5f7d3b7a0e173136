#pragma once

#include "pparse/token.h"
#include "pparse/tree.h"

namespace pparse {

// Counts are over non-punctuation tokens only.
struct EvalResult {
  long correct = 0;
  long scored = 0;

  double uas() const { return scored == 0 ? 0.0 : static_cast<double>(correct) / scored; }
  double uas_percent() const { return 100.0 * uas(); }

  EvalResult& operator+=(const EvalResult& other) {
    correct += other.correct;
    scored += other.scored;
    return *this;
  }
};

// Throws DataError when pred and gold sizes differ from the sentence.
EvalResult evaluate_uas(const Sentence& sentence, const DepTree& pred, const DepTree& gold);

}  // namespace pparse
