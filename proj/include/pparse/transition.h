#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "pparse/token.h"
#include "pparse/tree.h"

namespace pparse {

enum class Action : int { kShift = 0, kLeftArc = 1, kRightArc = 2, kReduce = 3 };

const char* action_name(Action a);

// Arc-eager configuration.  The stack holds token indices bottom-first with
// the root 0 at the bottom; buffer_front is the next unpushed token.
struct Configuration {
  int n = 0;
  std::vector<int> stack;
  int buffer_front = 1;
  std::vector<int> heads;               // heads[m], m in 1..n; -1 unset
  std::vector<unsigned char> on_stack;  // indexed by token
  int root_child = 0;                   // token attached to 0, if any
  // incrementally maintained context for action features
  std::vector<int> leftmost_child;   // 0 = none
  std::vector<int> rightmost_child;  // 0 = none
  std::vector<int> left_valency;
  std::vector<int> right_valency;

  static Configuration initial(int n);

  bool terminal() const { return buffer_front > n; }
  int buffer_size() const { return n - buffer_front + 1; }
  int stack_top() const { return stack.back(); }
  bool has_head(int t) const { return heads[static_cast<size_t>(t)] >= 0; }

  void apply(Action a);
  DepTree to_tree() const;  // requires terminal() and all heads assigned

  bool operator==(const Configuration& other) const = default;
};

// Specified-arc lookup tables for one partial annotation.
struct ConstraintContext {
  int n = 0;
  std::vector<int> spec_head;              // spec_head[m], -1 unspecified
  std::vector<std::vector<int>> spec_deps; // sorted dependents per head
  int root_spec = -1;                      // token whose specified head is 0
  int spec_count = 0;

  static ConstraintContext from_partial(const PartialTree& partial);
  static ConstraintContext unconstrained(int n);

  bool empty() const { return spec_count == 0; }
  // smallest specified dependent of t at or beyond `front`, or 0
  int first_pending_dep(int t, int front) const;
};

// Memoizes feasibility checks across configurations of one decode.
struct ViabilityCache {
  std::unordered_map<uint64_t, bool> memo;
};

// Standard arc-eager preconditions plus the guards needed so that every
// terminal configuration yields a valid projective single-root tree.
std::vector<Action> legal_actions(const Configuration& c);

// Subset of legal_actions keeping only actions after which every specified
// arc is still buildable.  Exact: cheap precondition rules plus a projective
// forest feasibility check on the successor (popped regions contracted).
std::vector<Action> constrained_legal_actions(const Configuration& c,
                                              const ConstraintContext& ctx,
                                              ViabilityCache* cache = nullptr);

// Canonical action producing `gold` from configuration c.
Action static_oracle(const Configuration& c, const DepTree& gold);

// Exposed for the certification tests.
bool viable_unconstrained(const Configuration& c);
bool viable_constrained(const Configuration& c, const ConstraintContext& ctx,
                        ViabilityCache* cache = nullptr);

}  // namespace pparse
