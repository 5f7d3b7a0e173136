#include "pparse/weights.h"

#include <cstring>
#include <fstream>

#include "pparse/common.h"

namespace pparse {

const char* parser_kind_name(ParserKind k) {
  switch (k) {
    case ParserKind::kLlgpar: return "llgpar";
    case ParserKind::kLgpar: return "lgpar";
    case ParserKind::kLtpar: return "ltpar";
  }
  return "?";
}

ParserKind parser_kind_from_name(const std::string& name) {
  if (name == "llgpar") return ParserKind::kLlgpar;
  if (name == "lgpar") return ParserKind::kLgpar;
  if (name == "ltpar") return ParserKind::kLtpar;
  throw DataError("unknown parser kind: " + name);
}

WeightModel::WeightModel(FeatureConfig cfg, ParserKind kind)
    : cfg_(cfg), kind_(kind) {
  cfg_.validate();
  w_.assign(cfg_.dimension(), 0.0);
  acc_.assign(cfg_.dimension(), 0.0);
}

void WeightModel::add(uint32_t index, double delta) {
  w_[index] += delta;
  // after T instances, averaged = w - acc / T equals the mean of the
  // post-instance snapshots; an update during instance t contributes to
  // T - t + 1 of them, hence the (t - 1) correction below
  acc_[index] += static_cast<double>(update_count_ - 1) * delta;
}

std::vector<double> WeightModel::averaged() const {
  std::vector<double> out = w_;
  if (update_count_ == 0) return out;
  const double t = static_cast<double>(update_count_);
  for (size_t i = 0; i < out.size(); ++i) out[i] -= acc_[i] / t;
  return out;
}

void WeightModel::materialize(std::vector<double> w, uint64_t update_count) {
  if (w.size() != cfg_.dimension()) {
    throw TrainError("weight vector size does not match the feature dimension");
  }
  w_ = std::move(w);
  acc_.assign(cfg_.dimension(), 0.0);
  update_count_ = update_count;
}

namespace {

constexpr char kMagic[4] = {'P', 'P', 'W', 'M'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DataError(std::string("truncated model file reading ") + what);
  return v;
}

}  // namespace

void WeightModel::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write model file: " + path);
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, static_cast<uint8_t>(kind_));
  put(os, static_cast<int32_t>(cfg_.dimension_log2));
  put(os, static_cast<uint32_t>(cfg_.template_set_version.size()));
  os.write(cfg_.template_set_version.data(),
           static_cast<std::streamsize>(cfg_.template_set_version.size()));
  put(os, update_count_);
  put(os, static_cast<uint64_t>(w_.size()));
  os.write(reinterpret_cast<const char*>(w_.data()),
           static_cast<std::streamsize>(w_.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(acc_.data()),
           static_cast<std::streamsize>(acc_.size() * sizeof(double)));
  if (!os) throw DataError("failed writing model file: " + path);
}

WeightModel WeightModel::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open model file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("not a weight model file: " + path);
  }
  const auto version = get<uint32_t>(is, "version");
  if (version != kVersion) {
    throw DataError("unsupported model file version " + std::to_string(version));
  }
  const auto kind_raw = get<uint8_t>(is, "parser kind");
  if (kind_raw > 2) throw DataError("corrupt model file: bad parser kind");
  FeatureConfig cfg;
  cfg.dimension_log2 = get<int32_t>(is, "dimension");
  const auto tlen = get<uint32_t>(is, "template version length");
  if (tlen > 64) throw DataError("corrupt model file: template version too long");
  std::string tver(tlen, '\0');
  is.read(tver.data(), tlen);
  if (!is) throw DataError("truncated model file reading template version");
  cfg.template_set_version = tver;
  cfg.validate();
  WeightModel m(cfg, static_cast<ParserKind>(kind_raw));
  m.update_count_ = get<uint64_t>(is, "update count");
  const auto dim = get<uint64_t>(is, "weight count");
  if (dim != m.w_.size()) throw DataError("corrupt model file: dimension mismatch");
  is.read(reinterpret_cast<char*>(m.w_.data()),
          static_cast<std::streamsize>(dim * sizeof(double)));
  is.read(reinterpret_cast<char*>(m.acc_.data()),
          static_cast<std::streamsize>(dim * sizeof(double)));
  if (!is) throw DataError("truncated model file: " + path);
  return m;
}

}  // namespace pparse
