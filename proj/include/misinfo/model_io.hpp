#pragma once

#include <string>

#include "misinfo/featurize.hpp"
#include "misinfo/model.hpp"

namespace misinfo {

// Self-describing on-disk artifact: vocabulary + fitted model + the n-gram
// configuration they were built with. Round-trip reproduces bit-identical
// predictions.
struct ModelBundle {
  static constexpr int kFormatVersion = 1;

  NGramConfig ngram;
  Vocabulary vocabulary;
  std::array<std::string, 2> label_names{"misinformation", "no-misinformation"};
  TrainedModel model;
};

void save_model_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model_bundle(const std::string& path);

}  // namespace misinfo
