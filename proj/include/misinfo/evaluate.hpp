#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "misinfo/corpus.hpp"
#include "misinfo/featurize.hpp"
#include "misinfo/model.hpp"

namespace misinfo {

struct FoldAssignment {
  std::vector<int> fold_of;  // per document, in 0..k-1
  int k = 0;
  std::uint64_t seed = 0;
};

// Per-label seeded shuffle, then round-robin assignment. Per-fold counts of
// each label differ by at most one. Errors when a label has < k instances.
FoldAssignment stratified_kfold(const std::vector<Label>& labels, int k, std::uint64_t seed);

struct ConfusionMatrix {
  // cell[true][predicted]
  std::array<std::array<std::uint64_t, 2>, 2> cell{};

  std::uint64_t total() const;
  std::uint64_t diagonal() const;
};

// Mann-Whitney AUROC as a percentage: fraction of (positive, negative) pairs
// where the positive outscores the negative, ties counting 1/2. Label index 0
// (misinformation) is the positive class. Errors when a class is absent.
double auroc(const std::vector<double>& positive_scores, const std::vector<Label>& labels);

double accuracy_percent(const ConfusionMatrix& cm);

// Support-weighted mean of one-vs-rest F1, as a percentage. A label with no
// actual and no predicted instances contributes F = 0.
double weighted_f_measure(const ConfusionMatrix& cm);

// One-vs-rest precision/recall/F1 per label, as percentages. Undefined ratios
// (zero denominators) report 0.
struct PerLabelMetrics {
  std::array<double, 2> precision{0.0, 0.0};
  std::array<double, 2> recall{0.0, 0.0};
  std::array<double, 2> f1{0.0, 0.0};
};

PerLabelMetrics per_label_metrics(const ConfusionMatrix& cm);

struct InstancePrediction {
  std::string doc_id;
  int fold = 0;
  Label truth = Label::misinformation;
  Label predicted = Label::misinformation;
  double positive_score = 0.0;
};

struct MetricsReport {
  std::string name;       // experiment name (classifier column)
  std::string spec_json;  // serialized ModelSpec echo
  double accuracy = 0.0;
  double auroc = 0.0;
  double f_measure = 0.0;
  PerLabelMetrics per_label;
  ConfusionMatrix cm;
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<InstancePrediction> predictions;  // pooled, dataset order
};

struct CvOptions {
  bool whole_corpus_vocab = false;
  std::string name;  // report name; defaults to the learner kind
};

// Stratified k-fold protocol: per fold the vocabulary is rebuilt from the
// training folds only (unless whole_corpus_vocab), both partitions are
// vectorized, the model is trained per spec and scores the test fold. Metrics
// are computed once on the pooled test-fold predictions. Deterministic given
// the seed. Expects cleaned document text.
MetricsReport cross_validate(const ModelSpec& spec, const LabeledDataset& ds,
                             const NGramConfig& ngram, int k, std::uint64_t seed,
                             const CvOptions& options = {});

// Columns Classifier,Accuracy,AUROC,F-Measure at two decimals.
std::string render_results_table_csv(const std::vector<MetricsReport>& reports);
std::string render_results_table_text(const std::vector<MetricsReport>& reports);

// CSV: doc_id,fold,true_label,predicted_label,positive_score.
std::string render_prediction_csv(const MetricsReport& report);

}  // namespace misinfo
