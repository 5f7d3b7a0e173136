// Synthetic treebank generator.
//
// `separable`: a tiny memorization corpus — every sentence has its own
// vocabulary, so a linear model can fit it exactly (used to verify that all
// three trainers drive training UAS to ~100%).
//
// `trend`: a ~2K-sentence corpus built from a template grammar whose only
// hard decisions are lexicalized attachment choices (PP attachment, noun
// compounds).  A parser must have seen a (head, dependent) lexeme pair to
// resolve it, so accuracy tracks annotation coverage — which is what the
// partial-annotation experiments need to differentiate.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pparse/conll.h"
#include "pparse/rng.h"
#include "pparse/token.h"
#include "pparse/tree.h"

namespace {

using namespace pparse;

std::string num_name(const char* stem, int id, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", stem, width, id);
  return buf;
}

// --- separable corpus ---

std::vector<int> random_projective_heads(Rng& rng, int n) {
  for (int attempt = 0; attempt < 20000; ++attempt) {
    std::vector<int> heads(static_cast<size_t>(n));
    int root = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
    for (int m = 1; m <= n; ++m) {
      if (m == root) {
        heads[static_cast<size_t>(m - 1)] = 0;
        continue;
      }
      int h = m;
      while (h == m) h = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
      heads[static_cast<size_t>(m - 1)] = h;
    }
    if (!DepTree::validate(heads)) return heads;
  }
  // fallback: left-headed chain
  std::vector<int> chain(static_cast<size_t>(n));
  for (int m = 1; m <= n; ++m) chain[static_cast<size_t>(m - 1)] = m - 1;
  return chain;
}

Treebank gen_separable(int sentences, uint64_t seed) {
  Treebank tb;
  for (int s = 0; s < sentences; ++s) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(s)));
    int n = 3 + static_cast<int>(rng.next_below(5));  // 3..7
    std::vector<Token> tokens;
    for (int j = 1; j <= n; ++j) {
      Token t;
      t.form = "w" + std::to_string(s) + "_" + std::to_string(j);
      t.pos = "P" + std::to_string(s) + "_" + std::to_string(j);
      tokens.push_back(t);
    }
    std::vector<int> heads = random_projective_heads(rng, n);
    tb.push_back({Sentence(std::move(tokens)), PartialTree::from_heads(heads)});
  }
  return tb;
}

// --- trend corpus ---

struct Lexicon {
  int nouns = 150, verbs = 60, preps = 12, adjs = 40, advs = 20;

  Token noun(int id) const { return {num_name("noun", id, 3), "NN", false}; }
  Token verb(int id) const { return {num_name("verb", id, 2), "VB", false}; }
  Token prep(int id) const { return {num_name("prep", id, 2), "IN", false}; }
  Token adj(int id) const { return {num_name("adj", id, 2), "JJ", false}; }
  Token adv(int id) const { return {num_name("adv", id, 2), "RB", false}; }
  Token det(Rng& rng) const { return {rng.next_below(2) ? "the" : "a", "DT", false}; }
  Token period() const { return {".", ".", true}; }
};

// Deterministic lexicalized attachment rules: resolvable only by a model
// that has evidence for the specific lexeme pair.
bool pp_attaches_to_verb(int verb_id, int prep_id) {
  return ((verb_id * 31 + prep_id * 17 + 3) % 2) == 0;
}
bool pp2_attaches_to_noun(int noun_id, int prep_id) {
  return ((noun_id * 13 + prep_id * 7) % 2) == 0;
}
bool noun_is_compound(int noun_id) { return (noun_id % 2) == 0; }

struct Builder {
  std::vector<Token> tokens;
  std::vector<int> heads;

  // returns the 1-based position
  int add(const Token& t, int head) {
    tokens.push_back(t);
    heads.push_back(head);
    return static_cast<int>(tokens.size());
  }
  void set_head(int pos, int head) { heads[static_cast<size_t>(pos - 1)] = head; }
};

TreebankEntry gen_trend_sentence(const Lexicon& lex, uint64_t seed, uint64_t index) {
  Rng rng(mix_seed(seed, index));
  double shape = rng.next_double();
  Builder b;

  auto draw_noun = [&] { return static_cast<int>(rng.next_below(lex.nouns)); };
  auto draw_verb = [&] { return static_cast<int>(rng.next_below(lex.verbs)); };
  auto draw_prep = [&] { return static_cast<int>(rng.next_below(lex.preps)); };

  // noun phrase [DT] [JJ] N; returns the noun position
  auto np = [&](double det_p, double adj_p, int noun_id) {
    int first = static_cast<int>(b.tokens.size()) + 1;
    int count = 0;
    if (rng.next_double() < det_p) {
      b.add(lex.det(rng), 0);
      ++count;
    }
    if (rng.next_double() < adj_p) {
      b.add(lex.adj(static_cast<int>(rng.next_below(lex.adjs))), 0);
      ++count;
    }
    int npos = b.add(lex.noun(noun_id), 0);
    for (int k = 0; k < count; ++k) b.set_head(first + k, npos);
    return npos;
  };

  if (shape < 0.55) {
    // transitive, optional PP on the object or the verb
    int subj = np(0.5, 0.35, draw_noun());
    int vid = draw_verb();
    int vpos = b.add(lex.verb(vid), 0);
    b.set_head(subj, vpos);
    int obj_id = draw_noun();
    int obj = np(0.5, 0.35, obj_id);
    b.set_head(obj, vpos);
    if (rng.next_double() < 0.65) {
      int pid = draw_prep();
      int ppos = b.add(lex.prep(pid), pp_attaches_to_verb(vid, pid) ? vpos : obj);
      int pn = np(0.4, 0.0, draw_noun());
      b.set_head(pn, ppos);
    }
    if (rng.next_double() < 0.5) b.add(lex.period(), vpos);
  } else if (shape < 0.75) {
    // compound or parallel pre-verbal nouns
    int mod_id = draw_noun();
    int mod = b.add(lex.noun(mod_id), 0);
    int subj = b.add(lex.noun(draw_noun()), 0);
    int vpos = b.add(lex.verb(draw_verb()), 0);
    b.set_head(mod, noun_is_compound(mod_id) ? subj : vpos);
    b.set_head(subj, vpos);
    if (rng.next_double() < 0.6) {
      int obj = np(0.4, 0.2, draw_noun());
      b.set_head(obj, vpos);
    }
    if (rng.next_double() < 0.5) b.add(lex.period(), vpos);
  } else if (shape < 0.9) {
    // intransitive with adverb
    int subj = np(0.5, 0.3, draw_noun());
    int vpos = b.add(lex.verb(draw_verb()), 0);
    b.set_head(subj, vpos);
    if (rng.next_double() < 0.7)
      b.add(lex.adv(static_cast<int>(rng.next_below(lex.advs))), vpos);
    if (rng.next_double() < 0.5) b.add(lex.period(), vpos);
  } else {
    // double PP chain
    int subj = b.add(lex.noun(draw_noun()), 0);
    int vid = draw_verb();
    int vpos = b.add(lex.verb(vid), 0);
    b.set_head(subj, vpos);
    int obj_id = draw_noun();
    int obj = b.add(lex.noun(obj_id), vpos);
    int p1 = draw_prep();
    int p1pos = b.add(lex.prep(p1), pp_attaches_to_verb(vid, p1) ? vpos : obj);
    int n1_id = draw_noun();
    int n1pos = b.add(lex.noun(n1_id), p1pos);
    int p2 = draw_prep();
    int p2pos = b.add(lex.prep(p2), pp2_attaches_to_noun(n1_id, p2) ? n1pos : vpos);
    int n2pos = b.add(lex.noun(draw_noun()), p2pos);
    (void)n2pos;
    if (rng.next_double() < 0.5) b.add(lex.period(), vpos);
  }

  // template output is projective by construction; from_heads re-validates
  return {Sentence(std::move(b.tokens)), PartialTree::from_heads(std::move(b.heads))};
}

Treebank gen_trend(const Lexicon& lex, int sentences, uint64_t seed, uint64_t index_base) {
  Treebank tb;
  for (int s = 0; s < sentences; ++s)
    tb.push_back(gen_trend_sentence(lex, seed, index_base + static_cast<uint64_t>(s)));
  return tb;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic treebank generator"};
  app.require_subcommand(1);

  auto* sep = app.add_subcommand("separable", "Per-sentence-vocabulary corpus");
  std::string sep_output;
  int sep_sentences = 40;
  uint64_t sep_seed = 5;
  sep->add_option("--output", sep_output)->required();
  sep->add_option("--sentences", sep_sentences);
  sep->add_option("--seed", sep_seed);

  auto* trend = app.add_subcommand("trend", "Lexicalized-attachment corpus");
  std::string tr_train, tr_dev, tr_test;
  int tr_train_n = 2000, tr_dev_n = 300, tr_test_n = 300;
  uint64_t tr_seed = 11;
  trend->add_option("--train", tr_train)->required();
  trend->add_option("--dev", tr_dev)->required();
  trend->add_option("--test", tr_test)->required();
  trend->add_option("--train-sentences", tr_train_n);
  trend->add_option("--dev-sentences", tr_dev_n);
  trend->add_option("--test-sentences", tr_test_n);
  trend->add_option("--seed", tr_seed);

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(sep)) {
    Treebank tb = gen_separable(sep_sentences, sep_seed);
    write_treebank_file(sep_output, tb);
    std::cout << sep_output << "\t" << tb.size() << " sentences\n";
  } else {
    Lexicon lex;
    Treebank train = gen_trend(lex, tr_train_n, tr_seed, 0);
    Treebank dev = gen_trend(lex, tr_dev_n, tr_seed, 100000);
    Treebank test = gen_trend(lex, tr_test_n, tr_seed, 200000);
    write_treebank_file(tr_train, train);
    write_treebank_file(tr_dev, dev);
    write_treebank_file(tr_test, test);
    std::cout << tr_train << "\t" << train.size() << " sentences\n"
              << tr_dev << "\t" << dev.size() << " sentences\n"
              << tr_test << "\t" << test.size() << " sentences\n";
  }
  return 0;
}
