#include "pparse/transition.h"

#include <algorithm>
#include <cassert>

#include "pparse/common.h"
#include "pparse/features.h"
#include "pparse/forest.h"

namespace pparse {

const char* action_name(Action a) {
  switch (a) {
    case Action::kShift: return "SHIFT";
    case Action::kLeftArc: return "LEFT_ARC";
    case Action::kRightArc: return "RIGHT_ARC";
    case Action::kReduce: return "REDUCE";
  }
  return "?";
}

Configuration Configuration::initial(int n) {
  Configuration c;
  c.n = n;
  c.stack = {0};
  c.buffer_front = 1;
  c.heads.assign(static_cast<size_t>(n) + 1, -1);
  c.on_stack.assign(static_cast<size_t>(n) + 1, 0);
  c.on_stack[0] = 1;
  c.root_child = 0;
  c.leftmost_child.assign(static_cast<size_t>(n) + 1, 0);
  c.rightmost_child.assign(static_cast<size_t>(n) + 1, 0);
  c.left_valency.assign(static_cast<size_t>(n) + 1, 0);
  c.right_valency.assign(static_cast<size_t>(n) + 1, 0);
  return c;
}

void Configuration::apply(Action a) {
  const int b = buffer_front;
  switch (a) {
    case Action::kShift:
      assert(!terminal());
      stack.push_back(b);
      on_stack[static_cast<size_t>(b)] = 1;
      ++buffer_front;
      break;
    case Action::kLeftArc: {
      const int s = stack_top();
      assert(!terminal() && s != 0 && !has_head(s));
      heads[static_cast<size_t>(s)] = b;
      if (leftmost_child[static_cast<size_t>(b)] == 0 ||
          s < leftmost_child[static_cast<size_t>(b)]) {
        leftmost_child[static_cast<size_t>(b)] = s;
      }
      ++left_valency[static_cast<size_t>(b)];
      stack.pop_back();
      on_stack[static_cast<size_t>(s)] = 0;
      break;
    }
    case Action::kRightArc: {
      const int s = stack_top();
      assert(!terminal());
      heads[static_cast<size_t>(b)] = s;
      rightmost_child[static_cast<size_t>(s)] = b;
      ++right_valency[static_cast<size_t>(s)];
      if (s == 0) root_child = b;
      stack.push_back(b);
      on_stack[static_cast<size_t>(b)] = 1;
      ++buffer_front;
      break;
    }
    case Action::kReduce: {
      const int s = stack_top();
      assert(s != 0 && has_head(s));
      stack.pop_back();
      on_stack[static_cast<size_t>(s)] = 0;
      break;
    }
  }
}

DepTree Configuration::to_tree() const {
  if (!terminal()) throw TrainError("configuration is not terminal");
  std::vector<int> h(static_cast<size_t>(n));
  for (int m = 1; m <= n; ++m) {
    if (heads[static_cast<size_t>(m)] < 0) {
      throw TrainError("terminal configuration left token " + std::to_string(m) +
                       " unattached");
    }
    h[static_cast<size_t>(m - 1)] = heads[static_cast<size_t>(m)];
  }
  return DepTree::from_heads(h);
}

ConstraintContext ConstraintContext::from_partial(const PartialTree& partial) {
  ConstraintContext ctx;
  ctx.n = partial.size();
  ctx.spec_head.assign(static_cast<size_t>(ctx.n) + 1, -1);
  ctx.spec_deps.assign(static_cast<size_t>(ctx.n) + 1, {});
  for (int m = 1; m <= ctx.n; ++m) {
    if (!partial.specified(m)) continue;
    const int h = partial.head(m);
    ctx.spec_head[static_cast<size_t>(m)] = h;
    ctx.spec_deps[static_cast<size_t>(h)].push_back(m);
    if (h == 0) ctx.root_spec = m;
    ++ctx.spec_count;
  }
  return ctx;
}

ConstraintContext ConstraintContext::unconstrained(int n) {
  ConstraintContext ctx;
  ctx.n = n;
  ctx.spec_head.assign(static_cast<size_t>(n) + 1, -1);
  ctx.spec_deps.assign(static_cast<size_t>(n) + 1, {});
  return ctx;
}

int ConstraintContext::first_pending_dep(int t, int front) const {
  const auto& deps = spec_deps[static_cast<size_t>(t)];
  auto it = std::lower_bound(deps.begin(), deps.end(), front);
  return it == deps.end() ? 0 : *it;
}

namespace {

// Minimal successor descriptor: enough state to decide whether a
// configuration can still reach some valid terminal parse.
struct ConfigShape {
  int n = 0;
  int front = 1;
  int root_child = 0;
  std::vector<std::pair<int, unsigned char>> stack;  // (token, attached)
};

ConfigShape shape_of(const Configuration& c) {
  ConfigShape sh;
  sh.n = c.n;
  sh.front = c.buffer_front;
  sh.root_child = c.root_child;
  sh.stack.reserve(c.stack.size());
  for (int t : c.stack) {
    sh.stack.emplace_back(t, t != 0 && c.has_head(t) ? 1 : 0);
  }
  return sh;
}

ConfigShape shape_after(const Configuration& c, Action a) {
  ConfigShape sh = shape_of(c);
  switch (a) {
    case Action::kShift:
      sh.stack.emplace_back(sh.front, 0);
      ++sh.front;
      break;
    case Action::kLeftArc:
    case Action::kReduce:
      sh.stack.pop_back();
      break;
    case Action::kRightArc:
      if (sh.stack.back().first == 0) sh.root_child = sh.front;
      sh.stack.emplace_back(sh.front, 1);
      ++sh.front;
      break;
  }
  return sh;
}

// A terminal configuration is completable iff nothing headless remains; a
// non-terminal one iff the root arc is still free, or some attached non-root
// stack token sits below every headless one (that token anchors the future
// subtrees; a sealed root dependent strands everything still unattached).
bool shape_viable_unconstrained(const ConfigShape& sh) {
  if (sh.front > sh.n) {
    for (size_t i = 1; i < sh.stack.size(); ++i) {
      if (!sh.stack[i].second) return false;
    }
    return true;
  }
  if (sh.root_child == 0) return true;
  bool seen_attached = false;
  for (size_t i = 1; i < sh.stack.size(); ++i) {
    if (!sh.stack[i].second) return seen_attached;
    seen_attached = true;
  }
  return seen_attached;
}

uint64_t shape_key(const ConfigShape& sh) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](uint32_t v) {
    for (int k = 0; k < 4; ++k) {
      h ^= (v >> (8 * k)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<uint32_t>(sh.front));
  mix(static_cast<uint32_t>(sh.root_child));
  for (const auto& [tok, att] : sh.stack) {
    mix(static_cast<uint32_t>(tok) * 2u + att);
  }
  return h;
}

// Exact feasibility of completing the parse while building every still
// unbuilt specified arc.  Popped regions are contracted away: remaining
// choices live on the active tokens (root, stack, buffer), where
//   - an attached stack token is forced to its built head (the entry below),
//   - a headless stack token must take a buffer token (its specified head
//     if any),
//   - a buffer token may take the root (if free), any stack token, or any
//     other buffer token, narrowed to its specified head if it has one.
// A projective single-root tree over these candidate sets exists iff some
// action sequence from this configuration completes the parse: ordering
// obstructions (stack discipline) surface as crossings after contraction.
bool shape_feasible_constrained(const ConfigShape& sh, const ConstraintContext& ctx) {
  const int k = static_cast<int>(sh.stack.size()) - 1;  // non-root stack entries
  const int nbuf = sh.n - sh.front + 1;
  const int kk = k + nbuf;  // contracted sentence length
  if (kk == 0) return true;

  std::vector<int> stack_slot(static_cast<size_t>(sh.n) + 1, -1);
  for (int i = 1; i <= k; ++i) {
    stack_slot[static_cast<size_t>(sh.stack[static_cast<size_t>(i)].first)] = i;
  }
  auto buf_slot = [&](int t) { return k + 1 + (t - sh.front); };

  HeadCandidates cand = HeadCandidates::unconstrained(kk);
  for (int m = 1; m <= kk; ++m) {
    for (int h = 0; h <= kk; ++h) cand.set(h, m, false);
  }
  for (int i = 1; i <= k; ++i) {
    const auto [tok, attached] = sh.stack[static_cast<size_t>(i)];
    if (attached) {
      cand.set(i - 1, i, true);
      continue;
    }
    const int spec = ctx.spec_head[static_cast<size_t>(tok)];
    if (spec >= sh.front) {
      cand.set(buf_slot(spec), i, true);
    } else if (spec == -1) {
      for (int j = k + 1; j <= kk; ++j) cand.set(j, i, true);
    } else {
      return false;  // specified head already out of reach
    }
  }
  for (int t = sh.front; t <= sh.n; ++t) {
    const int j = buf_slot(t);
    const int spec = ctx.spec_head[static_cast<size_t>(t)];
    if (spec == -1) {
      if (sh.root_child == 0) cand.set(0, j, true);
      for (int i = 1; i <= k; ++i) cand.set(i, j, true);
      for (int j2 = k + 1; j2 <= kk; ++j2) {
        if (j2 != j) cand.set(j2, j, true);
      }
    } else if (spec == 0) {
      if (sh.root_child != 0) return false;
      cand.set(0, j, true);
    } else if (spec >= sh.front) {
      cand.set(buf_slot(spec), j, true);
    } else if (stack_slot[static_cast<size_t>(spec)] >= 0) {
      cand.set(stack_slot[static_cast<size_t>(spec)], j, true);
    } else {
      return false;  // specified head was popped
    }
  }
  return forest_satisfiable(cand);
}

bool shape_viable_constrained(const ConfigShape& sh, const ConstraintContext& ctx,
                              ViabilityCache* cache) {
  if (!shape_viable_unconstrained(sh)) return false;
  if (ctx.empty()) return true;
  // location rules: every unbuilt specified arc still needs both endpoints
  // in buildable positions
  if (sh.root_child != 0 && ctx.root_spec != -1 && ctx.root_spec != sh.root_child) {
    return false;
  }
  if (sh.front > sh.n) return true;  // terminal; nothing left to build
  for (size_t i = 1; i < sh.stack.size(); ++i) {
    const auto [tok, attached] = sh.stack[i];
    const int spec = ctx.spec_head[static_cast<size_t>(tok)];
    if (spec == -1) continue;
    if (attached) {
      if (spec != sh.stack[i - 1].first) return false;  // built arc conflicts
    } else if (spec < sh.front) {
      return false;  // future head must come from the buffer
    }
  }
  if (cache != nullptr) {
    const uint64_t key = shape_key(sh);
    auto it = cache->memo.find(key);
    if (it != cache->memo.end()) return it->second;
    const bool ok = shape_feasible_constrained(sh, ctx);
    cache->memo.emplace(key, ok);
    return ok;
  }
  return shape_feasible_constrained(sh, ctx);
}

// standard arc-eager preconditions only
bool precondition_ok(const Configuration& c, Action a) {
  if (c.terminal()) return false;
  const int s = c.stack_top();
  switch (a) {
    case Action::kShift:
      return true;
    case Action::kLeftArc:
      return s != 0 && !c.has_head(s);
    case Action::kRightArc:
      return s != 0 || c.root_child == 0;
    case Action::kReduce:
      return s != 0 && c.has_head(s);
  }
  return false;
}

constexpr Action kAllActions[] = {Action::kShift, Action::kLeftArc,
                                  Action::kRightArc, Action::kReduce};

}  // namespace

bool viable_unconstrained(const Configuration& c) {
  return shape_viable_unconstrained(shape_of(c));
}

bool viable_constrained(const Configuration& c, const ConstraintContext& ctx,
                        ViabilityCache* cache) {
  // built arcs must agree with the annotated heads (includes popped tokens)
  for (int m = 1; m <= c.n; ++m) {
    const int spec = ctx.spec_head[static_cast<size_t>(m)];
    if (spec != -1 && c.heads[static_cast<size_t>(m)] >= 0 &&
        c.heads[static_cast<size_t>(m)] != spec) {
      return false;
    }
  }
  return shape_viable_constrained(shape_of(c), ctx, cache);
}

std::vector<Action> legal_actions(const Configuration& c) {
  std::vector<Action> out;
  if (c.terminal()) return out;
  for (Action a : kAllActions) {
    if (!precondition_ok(c, a)) continue;
    if (!shape_viable_unconstrained(shape_after(c, a))) continue;
    out.push_back(a);
  }
  return out;
}

std::vector<Action> constrained_legal_actions(const Configuration& c,
                                              const ConstraintContext& ctx,
                                              ViabilityCache* cache) {
  if (ctx.empty()) return legal_actions(c);
  std::vector<Action> out;
  if (c.terminal()) return out;
  const int s = c.stack_top();
  const int b = c.buffer_front;
  for (Action a : kAllActions) {
    if (!precondition_ok(c, a)) continue;
    switch (a) {
      case Action::kShift: {
        const int spec = ctx.spec_head[static_cast<size_t>(b)];
        if (spec != -1 &&
            (spec == 0 || c.on_stack[static_cast<size_t>(spec)])) {
          continue;  // shifting buries b below its only chance at this head
        }
        break;
      }
      case Action::kLeftArc: {
        const int spec = ctx.spec_head[static_cast<size_t>(s)];
        if (spec != -1 && spec != b) continue;
        if (ctx.first_pending_dep(s, b) != 0) continue;  // s still owes arcs
        break;
      }
      case Action::kRightArc: {
        const int spec = ctx.spec_head[static_cast<size_t>(b)];
        if (spec != -1 && spec != s) continue;
        if (s == 0 && ctx.root_spec != -1 && ctx.root_spec != b) continue;
        break;
      }
      case Action::kReduce: {
        if (ctx.first_pending_dep(s, b) != 0) continue;
        break;
      }
    }
    if (!shape_viable_constrained(shape_after(c, a), ctx, cache)) continue;
    out.push_back(a);
  }
  return out;
}

Action static_oracle(const Configuration& c, const DepTree& gold) {
  const int s = c.stack_top();
  const int b = c.buffer_front;
  if (s != 0 && gold.head(s) == b) return Action::kLeftArc;
  if (gold.head(b) == s) return Action::kRightArc;
  if (s != 0 && c.has_head(s)) {
    for (size_t i = 0; i + 1 < c.stack.size(); ++i) {
      const int k = c.stack[i];
      if (gold.head(b) == k || (k != 0 && gold.head(k) == b)) {
        return Action::kReduce;
      }
    }
  }
  return Action::kShift;
}

}  // namespace pparse
