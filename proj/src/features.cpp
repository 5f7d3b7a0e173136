#include "pparse/features.h"

#include <algorithm>
#include <cstring>

#include "pparse/common.h"
#include "pparse/transition.h"

namespace pparse {

uint64_t fnv1a(const unsigned char* data, size_t len, uint64_t h) {
  for (size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void FeatureConfig::validate() const {
  if (dimension_log2 < 16 || dimension_log2 > 30) {
    throw DataError("feature dimension_log2 out of range [16, 30]: " +
                    std::to_string(dimension_log2));
  }
  if (template_set_version != "v1") {
    throw DataError("unknown feature template set version: " + template_set_version);
  }
}

FeatureVector FeatureVector::from_indices(std::vector<uint32_t> raw) {
  std::sort(raw.begin(), raw.end());
  FeatureVector fv;
  fv.entries_.reserve(raw.size());
  for (size_t i = 0; i < raw.size();) {
    size_t j = i;
    while (j < raw.size() && raw[j] == raw[i]) ++j;
    fv.entries_.emplace_back(raw[i], static_cast<int32_t>(j - i));
    i = j;
  }
  return fv;
}

long FeatureVector::total_count() const {
  long t = 0;
  for (const auto& [idx, c] : entries_) t += c;
  return t;
}

double FeatureVector::dot(std::span<const double> weights) const {
  double s = 0.0;
  for (const auto& [idx, c] : entries_) s += weights[idx] * c;
  return s;
}

void FeatureVector::add_to(std::unordered_map<uint32_t, double>& acc, double scale) const {
  for (const auto& [idx, c] : entries_) acc[idx] += scale * c;
}

FeatureVector& FeatureVector::operator+=(const FeatureVector& other) {
  std::vector<std::pair<uint32_t, int32_t>> merged;
  merged.reserve(entries_.size() + other.entries_.size());
  size_t a = 0, b = 0;
  while (a < entries_.size() || b < other.entries_.size()) {
    if (b >= other.entries_.size() ||
        (a < entries_.size() && entries_[a].first < other.entries_[b].first)) {
      merged.push_back(entries_[a++]);
    } else if (a >= entries_.size() || other.entries_[b].first < entries_[a].first) {
      merged.push_back(other.entries_[b++]);
    } else {
      int32_t c = entries_[a].second + other.entries_[b].second;
      if (c != 0) merged.emplace_back(entries_[a].first, c);
      ++a;
      ++b;
    }
  }
  entries_ = std::move(merged);
  return *this;
}

FeatureVector& FeatureVector::subtract(const FeatureVector& other) {
  FeatureVector neg = other;
  for (auto& [idx, c] : neg.entries_) c = -c;
  return (*this += neg);
}

int distance_bin(int dist) {
  if (dist <= 5) return dist;
  if (dist <= 10) return 6;
  return 7;
}

namespace {

const std::string kRootForm = "<root>";
const std::string kBos = "<s>";
const std::string kEos = "</s>";
const std::string kNone = "<none>";
const std::string kNil = "<nil>";

const std::string& form_at(const Sentence& s, int i) {
  if (i == 0) return kRootForm;
  if (i < 0) return kBos;
  if (i > s.size()) return kEos;
  return s.form(i);
}

const std::string& pos_at(const Sentence& s, int i) {
  if (i == 0) return kRootForm;
  if (i < 0) return kBos;
  if (i > s.size()) return kEos;
  return s.pos(i);
}

// Incremental template hasher.  Fields are length-delimited so distinct
// field sequences never collide byte-wise; the final mix spreads FNV's
// weak low bits before masking.
struct TemplateHash {
  uint64_t h = 0xcbf29ce484222325ULL;

  void byte(unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  void tag(unsigned char t) {
    byte(0xff);
    byte(t);
  }
  void str(const std::string& v) {
    h = fnv1a(reinterpret_cast<const unsigned char*>(v.data()), v.size(), h);
    byte(0);
  }
  void num(int v) {
    auto u = static_cast<uint32_t>(v);
    byte(u & 0xff);
    byte((u >> 8) & 0xff);
    byte((u >> 16) & 0xff);
    byte((u >> 24) & 0xff);
  }
  uint32_t finish(uint64_t mask) const {
    uint64_t z = h;
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    return static_cast<uint32_t>(z & mask);
  }
};

}  // namespace

FeatureExtractor::FeatureExtractor(FeatureConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  mask_ = cfg_.dimension() - 1;
}

void FeatureExtractor::arc_indices(const Sentence& s, int h, int m,
                                   std::vector<uint32_t>& out) const {
  const std::string& hf = form_at(s, h);
  const std::string& hp = pos_at(s, h);
  const std::string& mf = form_at(s, m);
  const std::string& mp = pos_at(s, m);
  const int dir = h < m ? 1 : 2;
  const int bin = distance_bin(h < m ? m - h : h - m);

  // every template is emitted bare and decorated with (direction, distance)
  auto emit2 = [&](TemplateHash base) {
    out.push_back(base.finish(mask_));
    base.byte(0xd);
    base.num(dir);
    base.num(bin);
    out.push_back(base.finish(mask_));
  };
  auto t1 = [&](unsigned char tag, const std::string& a) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    emit2(th);
  };
  auto t2 = [&](unsigned char tag, const std::string& a, const std::string& b) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    th.str(b);
    emit2(th);
  };
  auto t3 = [&](unsigned char tag, const std::string& a, const std::string& b,
                const std::string& c) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    th.str(b);
    th.str(c);
    emit2(th);
  };
  auto t4 = [&](unsigned char tag, const std::string& a, const std::string& b,
                const std::string& c, const std::string& d) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    th.str(b);
    th.str(c);
    th.str(d);
    emit2(th);
  };

  t1(1, hf);
  t1(2, hp);
  t2(3, hf, hp);
  t1(4, mf);
  t1(5, mp);
  t2(6, mf, mp);
  t2(7, hf, mf);
  t2(8, hp, mp);
  t3(9, hf, hp, mp);
  t3(10, hf, hp, mf);
  t3(11, hf, mf, mp);
  t3(12, hp, mf, mp);
  t4(13, hf, hp, mf, mp);

  const int lo = std::min(h, m), hi = std::max(h, m);
  for (int b = lo + 1; b < hi; ++b) t3(14, hp, pos_at(s, b), mp);

  t4(15, hp, pos_at(s, h + 1), pos_at(s, m - 1), mp);
  t4(16, pos_at(s, h - 1), hp, pos_at(s, m - 1), mp);
  t4(17, hp, pos_at(s, h + 1), mp, pos_at(s, m + 1));
  t4(18, pos_at(s, h - 1), hp, mp, pos_at(s, m + 1));
}

void FeatureExtractor::sibling_indices(const Sentence& s, int h, int m, int sib,
                                       std::vector<uint32_t>& out) const {
  const std::string& hp = pos_at(s, h);
  const std::string& mf = form_at(s, m);
  const std::string& mp = pos_at(s, m);
  const std::string& sf = sib == kNullSibling ? kNil : form_at(s, sib);
  const std::string& sp = sib == kNullSibling ? kNil : pos_at(s, sib);
  const int dir = h < m ? 1 : 2;
  const int bin = distance_bin(h < m ? m - h : h - m);

  auto emit2 = [&](TemplateHash base) {
    out.push_back(base.finish(mask_));
    base.byte(0xd);
    base.num(dir);
    base.num(bin);
    out.push_back(base.finish(mask_));
  };
  auto t2 = [&](unsigned char tag, const std::string& a, const std::string& b) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    th.str(b);
    emit2(th);
  };
  auto t3 = [&](unsigned char tag, const std::string& a, const std::string& b,
                const std::string& c) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    th.str(b);
    th.str(c);
    emit2(th);
  };

  t3(40, hp, mp, sp);
  t2(41, mp, sp);
  t2(42, hp, sp);
  t2(43, mf, sf);
  t2(44, mp, sf);
  t2(45, mf, sp);
}

void FeatureExtractor::action_indices(const Configuration& c, const Sentence& s,
                                      std::vector<uint32_t>& out) const {
  const int s0 = c.stack_top();
  const int b0 = c.buffer_front;  // caller guarantees non-terminal
  const int b1 = b0 + 1;
  const int b2 = b0 + 2;
  const int s0h = s0 > 0 ? c.heads[static_cast<size_t>(s0)] : -1;

  const std::string& s0f = form_at(s, s0);
  const std::string& s0p = pos_at(s, s0);
  const std::string& b0f = form_at(s, b0);
  const std::string& b0p = pos_at(s, b0);
  const std::string& b1f = form_at(s, b1);
  const std::string& b1p = pos_at(s, b1);
  const std::string& b2p = pos_at(s, b2);
  const std::string& s0hp = s0h >= 0 ? pos_at(s, s0h) : kNone;
  auto child_pos = [&](int t) -> const std::string& {
    return t == 0 ? kNone : pos_at(s, t);
  };
  const std::string& s0lp = child_pos(c.leftmost_child[static_cast<size_t>(s0)]);
  const std::string& s0rp = child_pos(c.rightmost_child[static_cast<size_t>(s0)]);
  const std::string& b0lp = child_pos(c.leftmost_child[static_cast<size_t>(b0)]);
  const int dist = distance_bin(b0 - s0);
  const int s0vl = std::min(c.left_valency[static_cast<size_t>(s0)], 5);
  const int s0vr = std::min(c.right_valency[static_cast<size_t>(s0)], 5);
  const int b0vl = std::min(c.left_valency[static_cast<size_t>(b0)], 5);

  auto emit = [&](TemplateHash th) { out.push_back(th.finish(mask_)); };
  auto t1 = [&](unsigned char tag, const std::string& a) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    emit(th);
  };
  auto t2 = [&](unsigned char tag, const std::string& a, const std::string& b) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    th.str(b);
    emit(th);
  };
  auto t3 = [&](unsigned char tag, const std::string& a, const std::string& b,
                const std::string& x) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    th.str(b);
    th.str(x);
    emit(th);
  };
  auto t4 = [&](unsigned char tag, const std::string& a, const std::string& b,
                const std::string& x, const std::string& y) {
    TemplateHash th;
    th.tag(tag);
    th.str(a);
    th.str(b);
    th.str(x);
    th.str(y);
    emit(th);
  };

  t1(80, s0f);
  t1(81, s0p);
  t2(82, s0f, s0p);
  t1(83, b0f);
  t1(84, b0p);
  t2(85, b0f, b0p);
  t1(86, b1f);
  t1(87, b1p);
  t1(88, b2p);
  t2(89, s0f, b0f);
  t2(90, s0p, b0p);
  t2(91, s0f, b0p);
  t2(92, s0p, b0f);
  t4(93, s0f, s0p, b0f, b0p);
  t3(94, s0p, b0p, b1p);
  t2(95, b1p, b2p);
  t3(96, s0hp, s0p, b0p);
  t3(97, s0p, s0lp, b0p);
  t3(98, s0p, s0rp, b0p);
  t3(99, s0p, b0p, b0lp);
  {
    TemplateHash th;
    th.tag(100);
    th.num(dist);
    th.str(s0p);
    th.str(b0p);
    emit(th);
  }
  {
    TemplateHash th;
    th.tag(101);
    th.num(dist);
    th.str(s0f);
    th.str(b0f);
    emit(th);
  }
  {
    TemplateHash th;
    th.tag(102);
    th.str(s0p);
    th.num(s0vl);
    th.num(s0vr);
    emit(th);
  }
  {
    TemplateHash th;
    th.tag(103);
    th.str(b0p);
    th.num(b0vl);
    emit(th);
  }
}

FeatureVector FeatureExtractor::arc_features(const Sentence& s, int h, int m) const {
  std::vector<uint32_t> raw;
  arc_indices(s, h, m, raw);
  return FeatureVector::from_indices(std::move(raw));
}

FeatureVector FeatureExtractor::sibling_features(const Sentence& s, int h, int m,
                                                 int sib) const {
  std::vector<uint32_t> raw;
  sibling_indices(s, h, m, sib, raw);
  return FeatureVector::from_indices(std::move(raw));
}

FeatureVector FeatureExtractor::action_features(const Configuration& c,
                                                const Sentence& s) const {
  std::vector<uint32_t> raw;
  action_indices(c, s, raw);
  return FeatureVector::from_indices(std::move(raw));
}

void FeatureExtractor::tree_indices(const Sentence& s, const std::vector<int>& heads,
                                    std::vector<uint32_t>& out) const {
  const int n = s.size();
  for (int m = 1; m <= n; ++m) arc_indices(s, heads[static_cast<size_t>(m - 1)], m, out);
  // adjacent-sibling factors, chains growing outward from each head
  std::vector<std::vector<int>> kids(static_cast<size_t>(n) + 1);
  for (int m = 1; m <= n; ++m)
    kids[static_cast<size_t>(heads[static_cast<size_t>(m - 1)])].push_back(m);
  for (int h = 0; h <= n; ++h) {
    const auto& ch = kids[static_cast<size_t>(h)];  // ascending
    // right chain: closest child first
    int prev = kNullSibling;
    for (int m : ch) {
      if (m < h) continue;
      sibling_indices(s, h, m, prev, out);
      prev = m;
    }
    // left chain: closest child first (descending positions)
    prev = kNullSibling;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) {
      if (*it > h) continue;
      sibling_indices(s, h, *it, prev, out);
      prev = *it;
    }
  }
}

FeatureVector FeatureExtractor::tree_features(const Sentence& s, const DepTree& tree) const {
  std::vector<uint32_t> raw;
  tree_indices(s, tree.heads(), raw);
  return FeatureVector::from_indices(std::move(raw));
}

}  // namespace pparse
