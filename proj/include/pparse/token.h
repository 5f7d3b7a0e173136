#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace pparse {

struct Token {
  std::string form;
  std::string pos;
  bool is_punct = false;
};

// POS tags treated as punctuation: excluded from attachment scoring and from
// annotation-target selection (punctuation may still head other tokens).
class PunctuationSet {
 public:
  PunctuationSet() : PunctuationSet(default_tags()) {}
  explicit PunctuationSet(std::vector<std::string> tags)
      : tags_(tags.begin(), tags.end()) {}

  bool contains(const std::string& pos) const { return tags_.count(pos) > 0; }

  static std::vector<std::string> default_tags() {
    return {"``", "''", ",", ":", ".", "-LRB-", "-RRB-", "$", "#", "SYM", "PUNCT"};
  }

 private:
  std::unordered_set<std::string> tags_;
};

// Tokens are 1-based; index 0 is the artificial root (not stored).
class Sentence {
 public:
  Sentence() = default;
  explicit Sentence(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  int size() const { return static_cast<int>(tokens_.size()); }
  const Token& token(int i) const { return tokens_[static_cast<size_t>(i - 1)]; }
  Token& token(int i) { return tokens_[static_cast<size_t>(i - 1)]; }

  bool is_punct(int i) const { return token(i).is_punct; }
  const std::string& form(int i) const { return token(i).form; }
  const std::string& pos(int i) const { return token(i).pos; }

  int non_punct_count() const {
    int c = 0;
    for (const Token& t : tokens_) c += t.is_punct ? 0 : 1;
    return c;
  }

 private:
  std::vector<Token> tokens_;
};

}  // namespace pparse
