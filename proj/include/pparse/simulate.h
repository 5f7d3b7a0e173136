#pragma once

#include <string>

#include "pparse/conll.h"
#include "pparse/weights.h"

namespace pparse {

enum class SimSetting { kRandom, kUncertain, kDivergence };

const char* sim_setting_name(SimSetting s);
SimSetting sim_setting_from_name(const std::string& name);  // throws DataError

// All three settings keep a subset of the gold heads (never fabricating
// arcs), skip punctuation tokens, and leave everything else unannotated.
// Counted settings keep exactly ceil(alpha% * non-punct) heads per sentence.

// uniform token choice; the seed is partitioned per sentence index so the
// result is independent of processing order
Treebank simulate_random(const Treebank& gold, double alpha, uint64_t seed);

// keeps the tokens with the smallest gap between their two largest head
// marginals under `model` (ties by token index)
Treebank simulate_uncertain(const Treebank& gold, double alpha,
                            const WeightModel& model);

// keeps tokens on which the three parsers' predicted heads are not all equal
Treebank simulate_divergence(const Treebank& gold, const WeightModel& llg,
                             const WeightModel& lg, const WeightModel& lt,
                             int beam_size = 64);

}  // namespace pparse
