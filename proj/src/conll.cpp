#include "pparse/conll.h"

#include <fstream>
#include <sstream>

#include "pparse/common.h"

namespace pparse {

namespace {

std::vector<std::string> split_columns(const std::string& line) {
  std::vector<std::string> cols;
  size_t start = 0;
  while (start <= line.size()) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

int parse_int(const std::string& s, int line_no, const char* what) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  }
}

struct RawSentence {
  std::vector<std::string> forms, poss;
  std::vector<int> heads;  // -1 = unannotated
  int first_line = 0;
};

void flush_sentence(RawSentence& raw, AnnotationMode mode, const PunctuationSet& punct,
                    int index, ReadResult& result) {
  if (raw.forms.empty()) return;
  std::vector<Token> tokens;
  tokens.reserve(raw.forms.size());
  for (size_t i = 0; i < raw.forms.size(); ++i) {
    tokens.push_back({raw.forms[i], raw.poss[i], punct.contains(raw.poss[i])});
  }
  TreeDiagnostic err;
  if (mode == AnnotationMode::kFull) {
    bool all_specified = true;
    for (int h : raw.heads) all_specified = all_specified && h >= 0;
    if (!all_specified) {
      err = "unannotated head in full-annotation mode";
    } else {
      err = DepTree::validate(raw.heads);
    }
  } else {
    err = PartialTree::validate(raw.heads);
  }
  if (err) {
    result.rejected.push_back({index, raw.first_line, *err});
  } else {
    result.items.push_back({Sentence(std::move(tokens)),
                            PartialTree::from_heads(std::move(raw.heads))});
  }
  raw = RawSentence{};
}

}  // namespace

ReadResult read_treebank(std::istream& in, AnnotationMode mode, const PunctuationSet& punct) {
  ReadResult result;
  RawSentence raw;
  std::string line;
  int line_no = 0;
  int sentence_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!raw.forms.empty()) flush_sentence(raw, mode, punct, sentence_index++, result);
      continue;
    }
    std::vector<std::string> cols = split_columns(line);
    if (cols.size() != 8) {
      throw DataError("line " + std::to_string(line_no) + ": expected 8 columns, got " +
                      std::to_string(cols.size()));
    }
    if (raw.forms.empty()) raw.first_line = line_no;
    int id = parse_int(cols[0], line_no, "token id");
    if (id != static_cast<int>(raw.forms.size()) + 1) {
      throw DataError("line " + std::to_string(line_no) + ": token ids must count up from 1");
    }
    raw.forms.push_back(cols[1]);
    raw.poss.push_back(cols[4]);
    if (cols[6] == "_") {
      raw.heads.push_back(-1);
    } else {
      raw.heads.push_back(parse_int(cols[6], line_no, "head"));
    }
  }
  if (!raw.forms.empty()) flush_sentence(raw, mode, punct, sentence_index++, result);
  return result;
}

ReadResult read_treebank_file(const std::string& path, AnnotationMode mode,
                              const PunctuationSet& punct) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_treebank(in, mode, punct);
}

void write_treebank(std::ostream& out, const Treebank& items) {
  for (const TreebankEntry& entry : items) {
    const Sentence& s = entry.sentence;
    for (int i = 1; i <= s.size(); ++i) {
      out << i << '\t' << s.form(i) << "\t_\t" << s.pos(i) << '\t' << s.pos(i) << "\t_\t";
      if (entry.annotation.specified(i)) {
        out << entry.annotation.head(i);
      } else {
        out << '_';
      }
      out << "\t_\n";
    }
    out << '\n';
  }
}

void write_treebank_file(const std::string& path, const Treebank& items) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_treebank(out, items);
}

}  // namespace pparse
