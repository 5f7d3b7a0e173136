#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pparse/features.h"

namespace pparse {

enum class ParserKind : int { kLlgpar = 0, kLgpar = 1, kLtpar = 2 };

const char* parser_kind_name(ParserKind k);
ParserKind parser_kind_from_name(const std::string& name);  // throws DataError

// Dense weight vector plus the running accumulator used for perceptron
// averaging.  Convention: begin_instance() is called once at the start of
// every training instance (including ones that produce no update); add()
// then maintains acc so that averaged() equals the mean of the weight
// snapshots taken after each instance processed so far.
class WeightModel {
 public:
  WeightModel(FeatureConfig cfg, ParserKind kind);

  ParserKind kind() const { return kind_; }
  const FeatureConfig& feature_config() const { return cfg_; }
  uint64_t update_count() const { return update_count_; }

  std::span<const double> weights() const { return w_; }
  std::vector<double>& mutable_weights() { return w_; }

  void begin_instance() { ++update_count_; }
  void add(uint32_t index, double delta);
  std::vector<double> averaged() const;

  // replaces the raw vector with `w`, clearing the averaging state
  void materialize(std::vector<double> w, uint64_t update_count);

  void save(const std::string& path) const;
  static WeightModel load(const std::string& path);  // throws DataError

 private:
  FeatureConfig cfg_;
  ParserKind kind_;
  uint64_t update_count_ = 0;
  std::vector<double> w_;
  std::vector<double> acc_;
};

}  // namespace pparse
