#include "misinfo/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "misinfo/error.hpp"
#include "misinfo/rng.hpp"

namespace misinfo {

FoldAssignment stratified_kfold(const std::vector<Label>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("stratified_kfold: k must be >= 2");
  FoldAssignment fa;
  fa.fold_of.assign(labels.size(), -1);
  fa.k = k;
  fa.seed = seed;

  Rng rng(seed);
  for (int c = 0; c < kNumLabels; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (static_cast<int>(labels[i]) == c) idx.push_back(i);
    if (idx.size() < static_cast<std::size_t>(k))
      throw ValidationError(std::string("stratified_kfold: label \"") +
                            to_string(static_cast<Label>(c)) + "\" has " +
                            std::to_string(idx.size()) + " instances, fewer than k=" +
                            std::to_string(k));
    rng.shuffle(idx);
    for (std::size_t t = 0; t < idx.size(); ++t)
      fa.fold_of[idx[t]] = static_cast<int>(t % static_cast<std::size_t>(k));
  }
  return fa;
}

std::uint64_t ConfusionMatrix::total() const {
  return cell[0][0] + cell[0][1] + cell[1][0] + cell[1][1];
}

std::uint64_t ConfusionMatrix::diagonal() const { return cell[0][0] + cell[1][1]; }

double auroc(const std::vector<double>& positive_scores, const std::vector<Label>& labels) {
  if (positive_scores.size() != labels.size())
    throw ValidationError("auroc: scores and labels sizes differ");
  std::size_t n_pos = 0, n_neg = 0;
  for (Label l : labels) (l == Label::misinformation ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    throw ValidationError("auroc: both labels must be present");

  // Midrank formulation of the Mann-Whitney statistic. Midranks are
  // half-integers, so the accumulated sums below are exact in doubles and the
  // result matches an all-pairs count bit for bit.
  std::vector<std::size_t> order(positive_scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return positive_scores[a] < positive_scores[b];
  });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           positive_scores[order[j + 1]] == positive_scores[order[i]])
      ++j;
    // 1-based positions i+1 .. j+1 share the midrank.
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t)
      if (labels[order[t]] == Label::misinformation) rank_sum_pos += midrank;
    i = j + 1;
  }

  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return 100.0 * (u / (np * nn));
}

double accuracy_percent(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw ValidationError("accuracy_percent: empty confusion matrix");
  return 100.0 * static_cast<double>(cm.diagonal()) / static_cast<double>(total);
}

PerLabelMetrics per_label_metrics(const ConfusionMatrix& cm) {
  PerLabelMetrics m;
  for (int c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(cm.cell[c][c]);
    const double fp = static_cast<double>(cm.cell[1 - c][c]);
    const double fn = static_cast<double>(cm.cell[c][1 - c]);
    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.precision[c] = 100.0 * precision;
    m.recall[c] = 100.0 * recall;
    m.f1[c] = 100.0 * f1;
  }
  return m;
}

double weighted_f_measure(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw ValidationError("weighted_f_measure: empty confusion matrix");
  const PerLabelMetrics m = per_label_metrics(cm);
  double weighted = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double support = static_cast<double>(cm.cell[c][0] + cm.cell[c][1]);
    weighted += support * m.f1[c];
  }
  return weighted / static_cast<double>(total);
}

MetricsReport cross_validate(const ModelSpec& spec, const LabeledDataset& ds,
                             const NGramConfig& ngram, int k, std::uint64_t seed,
                             const CvOptions& options) {
  spec.validate();
  ngram.validate();
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!ds.documents[i].label)
      throw ValidationError("cross_validate: document " + ds.documents[i].id + " is unlabeled");

  const std::vector<Label> labels = ds.labels();
  const FoldAssignment fa = stratified_kfold(labels, k, seed);

  Vocabulary whole_vocab;
  if (options.whole_corpus_vocab) {
    std::vector<std::string> texts;
    texts.reserve(ds.size());
    for (const auto& d : ds.documents) texts.push_back(d.text);
    whole_vocab = build_vocabulary(texts, ngram);
  }

  std::vector<InstancePrediction> pooled(ds.size());
  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < ds.size(); ++i)
      (fa.fold_of[i] == fold ? test_idx : train_idx).push_back(i);

    try {
      // Leakage-safe default: the vocabulary sees training folds only.
      Vocabulary vocab;
      if (options.whole_corpus_vocab) {
        vocab = whole_vocab;
      } else {
        std::vector<std::string> train_texts;
        train_texts.reserve(train_idx.size());
        for (std::size_t i : train_idx) train_texts.push_back(ds.documents[i].text);
        vocab = build_vocabulary(train_texts, ngram);
      }

      FeatureMatrix Xtr;
      Xtr.dim = vocab.size();
      Xtr.rows.reserve(train_idx.size());
      std::vector<Label> ytr;
      ytr.reserve(train_idx.size());
      for (std::size_t i : train_idx) {
        Xtr.rows.push_back(vectorize(ds.documents[i].text, vocab));
        ytr.push_back(labels[i]);
      }

      TrainedModel model =
          train_model(spec, Xtr, ytr, Rng::derive(seed, static_cast<std::uint64_t>(fold)));

      for (std::size_t i : test_idx) {
        const SparseVector x = vectorize(ds.documents[i].text, vocab);
        const Prediction p = model->predict(x);
        pooled[i] = InstancePrediction{ds.documents[i].id, fold, labels[i], p.label,
                                       p.scores[0]};
      }
    } catch (const Error& e) {
      throw Error("fold " + std::to_string(fold) + ": " + e.what());
    }
  }

  MetricsReport report;
  report.name = options.name.empty() ? to_string(spec.kind) : options.name;
  report.spec_json = spec_to_json(spec).dump();
  report.folds = k;
  report.seed = seed;
  report.predictions = std::move(pooled);

  std::vector<double> scores;
  scores.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const InstancePrediction& p = report.predictions[i];
    report.cm.cell[static_cast<int>(p.truth)][static_cast<int>(p.predicted)] += 1;
    scores.push_back(p.positive_score);
  }
  report.accuracy = accuracy_percent(report.cm);
  report.auroc = auroc(scores, labels);
  report.f_measure = weighted_f_measure(report.cm);
  report.per_label = per_label_metrics(report.cm);
  return report;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_results_table_csv(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw ValidationError("render_results_table: no reports");
  std::string out = "Classifier,Accuracy,AUROC,F-Measure\n";
  for (const auto& r : reports) {
    out += csv_escape(r.name);
    out += ',';
    out += fixed2(r.accuracy);
    out += ',';
    out += fixed2(r.auroc);
    out += ',';
    out += fixed2(r.f_measure);
    out += '\n';
  }
  return out;
}

std::string render_results_table_text(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw ValidationError("render_results_table: no reports");
  std::size_t name_width = std::string("Classifier").size();
  for (const auto& r : reports) name_width = std::max(name_width, r.name.size());
  std::ostringstream out;
  char buf[256];
  if (name_width > 180) name_width = 180;
  std::snprintf(buf, sizeof buf, "%-*s  %9s  %9s  %9s\n", static_cast<int>(name_width),
                "Classifier", "Accuracy", "AUROC", "F-Measure");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-*s  %9.2f  %9.2f  %9.2f\n", static_cast<int>(name_width),
                  r.name.c_str(), r.accuracy, r.auroc, r.f_measure);
    out << buf;
  }
  return out.str();
}

std::string render_prediction_csv(const MetricsReport& report) {
  std::string out = "doc_id,fold,true_label,predicted_label,positive_score\n";
  char buf[64];
  for (const auto& p : report.predictions) {
    out += csv_escape(p.doc_id);
    out += ',';
    out += std::to_string(p.fold);
    out += ',';
    out += to_string(p.truth);
    out += ',';
    out += to_string(p.predicted);
    out += ',';
    std::snprintf(buf, sizeof buf, "%.17g", p.positive_score);
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace misinfo
