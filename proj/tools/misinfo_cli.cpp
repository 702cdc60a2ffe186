#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "misinfo/corpus.hpp"
#include "misinfo/error.hpp"
#include "misinfo/evaluate.hpp"
#include "misinfo/featurize.hpp"
#include "misinfo/model.hpp"
#include "misinfo/model_io.hpp"
#include "misinfo/preprocess.hpp"
#include "misinfo/rng.hpp"
#include "misinfo/topics.hpp"

namespace fs = std::filesystem;
using namespace misinfo;
using nlohmann::json;

namespace {

void write_file(const std::string& path, const std::string& content) {
  const fs::path dir = fs::path(path).parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  out << content;
  if (!out) throw IoError("failed writing \"" + path + "\"");
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  return (fs::path(out_dir) / name).string();
}

std::string slugify(const std::string& name) {
  std::string slug;
  for (char c : name) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))
      slug += c;
    else if (!slug.empty() && slug.back() != '_')
      slug += '_';
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  return slug.empty() ? "run" : slug;
}

// Cleans every document with the full rule set; documents whose text becomes
// empty are dropped (logged to stderr) since downstream stages require tokens.
LabeledDataset load_and_clean(const std::string& dataset_path) {
  LabeledDataset ds = load_dataset(dataset_path);
  const CleaningConfig config = CleaningConfig::all_rules_on();
  LabeledDataset cleaned;
  cleaned.label_names = ds.label_names;
  std::size_t dropped = 0;
  for (Document& doc : ds.documents) {
    doc.text = clean_text(doc.text, config);
    if (doc.text.empty()) {
      ++dropped;
      continue;
    }
    cleaned.documents.push_back(std::move(doc));
  }
  if (dropped > 0)
    std::fprintf(stderr, "note: dropped %zu document(s) with no text left after cleaning\n",
                 dropped);
  return cleaned;
}

std::vector<std::string> stopword_filtered_texts(const LabeledDataset& ds,
                                                 const StopwordList& stopwords) {
  std::vector<std::string> texts;
  texts.reserve(ds.size());
  for (const Document& doc : ds.documents) {
    const std::vector<std::string> kept = remove_stopwords(tokenize(doc.text), stopwords);
    std::string joined;
    for (const std::string& tok : kept) {
      if (!joined.empty()) joined += ' ';
      joined += tok;
    }
    texts.push_back(std::move(joined));
  }
  return texts;
}

ModelSpec default_spec(const std::string& learner) {
  const auto kind = learner_kind_from_string(learner);
  if (!kind) throw ValidationError("unknown learner kind \"" + learner + "\"");
  ModelSpec spec;
  spec.kind = *kind;
  if (spec.kind == LearnerKind::bagging || spec.kind == LearnerKind::adaboost_m1) {
    spec.base = std::make_shared<ModelSpec>();
    spec.base->kind = LearnerKind::dmnb;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// stats

int run_stats(const std::string& dataset, const std::string& out_dir) {
  const LabeledDataset ds = load_dataset(dataset);
  const DatasetStats st = compute_stats(ds);
  const std::string text = render_stats_text(st);
  std::fputs(text.c_str(), stdout);
  if (!out_dir.empty()) {
    write_file(out_path(out_dir, "stats.txt"), text);
    write_file(out_path(out_dir, "stats.csv"), render_stats_csv(st));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// preprocess

int run_preprocess(const std::string& dataset, const std::string& out) {
  const LabeledDataset cleaned = load_and_clean(dataset);
  save_dataset(cleaned, out);
  std::fprintf(stderr, "wrote %zu cleaned documents to %s\n", cleaned.size(), out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// featurize

int run_featurize(const std::string& dataset, const std::string& stopword_path, int max_n,
                  int min_doc_frequency, bool counts, const std::string& out_dir) {
  const LabeledDataset ds = load_and_clean(dataset);
  std::vector<std::string> texts;
  if (!stopword_path.empty()) {
    texts = stopword_filtered_texts(ds, load_stopwords(stopword_path));
  } else {
    texts.reserve(ds.size());
    for (const Document& doc : ds.documents) texts.push_back(doc.text);
  }

  NGramConfig config;
  config.max_n = max_n;
  config.min_doc_frequency = min_doc_frequency;
  config.binary_features = !counts;
  const Vocabulary vocab = build_vocabulary(texts, config);

  std::string features;
  char buf[64];
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const SparseVector v = vectorize(texts[i], vocab);
    features += std::to_string(static_cast<int>(*ds.documents[i].label));
    for (const auto& [index, value] : v.entries) {
      std::snprintf(buf, sizeof buf, " %u:%.17g", index, value);
      features += buf;
    }
    features += '\n';
  }

  write_file(out_path(out_dir, "vocabulary.csv"), vocab.to_csv());
  write_file(out_path(out_dir, "features.txt"), features);
  std::fprintf(stderr, "vocabulary: %u n-grams (max_n=%d) over %zu documents\n", vocab.size(),
               max_n, ds.size());
  return 0;
}

// ---------------------------------------------------------------------------
// cv

struct ExperimentEntry {
  std::string name;
  ModelSpec spec;
};

struct ExperimentSetting {
  std::string name;
  NGramConfig ngram;
  std::vector<ExperimentEntry> experiments;
};

struct ExperimentConfig {
  std::string dataset;
  int folds = 10;
  std::uint64_t seed = 1;
  std::vector<ExperimentSetting> settings;
};

// Declarative experiment suite; relative paths resolve against the config
// file's own directory.
ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("experiment config \"" + path + "\": " + e.what());
  }

  ExperimentConfig config;
  try {
    config.dataset = j.at("dataset").get<std::string>();
    config.folds = j.value("folds", 10);
    config.seed = j.value("seed", std::uint64_t{1});
    for (const json& js : j.at("settings")) {
      ExperimentSetting setting;
      setting.name = js.at("name").get<std::string>();
      setting.ngram.max_n = js.value("ngrams", 1);
      setting.ngram.min_doc_frequency = js.value("min_doc_frequency", 1);
      setting.ngram.binary_features = js.value("binary_features", true);
      setting.ngram.validate();
      for (const json& je : js.at("experiments"))
        setting.experiments.push_back(
            {je.at("name").get<std::string>(), spec_from_json(je.at("spec"))});
      config.settings.push_back(std::move(setting));
    }
  } catch (const json::exception& e) {
    throw ParseError("experiment config \"" + path + "\": " + e.what());
  }

  if (config.settings.empty())
    throw ValidationError("experiment config \"" + path + "\": no settings");
  for (const ExperimentSetting& setting : config.settings) {
    if (setting.experiments.empty())
      throw ValidationError("experiment config \"" + path + "\": setting \"" + setting.name +
                            "\" has no experiments");
    std::unordered_set<std::string> names;
    for (const ExperimentEntry& e : setting.experiments)
      if (!names.insert(e.name).second)
        throw ValidationError("experiment config \"" + path + "\": duplicate experiment name \"" +
                              e.name + "\" in setting \"" + setting.name + "\"");
  }

  const fs::path base = fs::path(path).parent_path();
  if (!config.dataset.empty() && fs::path(config.dataset).is_relative() && !base.empty())
    config.dataset = (base / config.dataset).string();
  return config;
}

int run_cv_suite(const ExperimentConfig& config, const std::string& out_dir,
                 bool whole_corpus_vocab) {
  const LabeledDataset ds = load_and_clean(config.dataset);
  int failures = 0;
  for (const ExperimentSetting& setting : config.settings) {
    std::vector<MetricsReport> reports;
    for (const ExperimentEntry& entry : setting.experiments) {
      std::fprintf(stderr, "[%s] %s: running %d-fold cv...\n", setting.name.c_str(),
                   entry.name.c_str(), config.folds);
      try {
        CvOptions options;
        options.whole_corpus_vocab = whole_corpus_vocab;
        options.name = entry.name;
        MetricsReport report =
            cross_validate(entry.spec, ds, setting.ngram, config.folds, config.seed, options);
        std::fprintf(stderr, "[%s] %s: accuracy %.2f auroc %.2f f %.2f\n", setting.name.c_str(),
                     entry.name.c_str(), report.accuracy, report.auroc, report.f_measure);
        if (!out_dir.empty())
          write_file(out_path(out_dir, "predictions_" + slugify(setting.name) + "_" +
                                           slugify(entry.name) + ".csv"),
                     render_prediction_csv(report));
        reports.push_back(std::move(report));
      } catch (const Error& e) {
        ++failures;
        std::fprintf(stderr, "[%s] %s: FAILED: %s\n", setting.name.c_str(), entry.name.c_str(),
                     e.what());
      }
    }
    if (!reports.empty()) {
      const std::string text = render_results_table_text(reports);
      std::fprintf(stdout, "=== %s ===\n%s", setting.name.c_str(), text.c_str());
      if (!out_dir.empty()) {
        write_file(out_path(out_dir, "results_" + slugify(setting.name) + ".csv"),
                   render_results_table_csv(reports));
        write_file(out_path(out_dir, "results_" + slugify(setting.name) + ".txt"), text);
      }
    }
  }
  if (failures > 0) std::fprintf(stderr, "%d experiment(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

int run_cv_single(const std::string& dataset, const std::string& learner, int max_n, int folds,
                  std::uint64_t seed, const std::string& out_dir, bool whole_corpus_vocab) {
  ExperimentConfig config;
  config.dataset = dataset;
  config.folds = folds;
  config.seed = seed;
  ExperimentSetting setting;
  setting.name = max_n == 1 ? "uni" : max_n == 2 ? "bi" : "tri";
  setting.ngram.max_n = max_n;
  setting.experiments.push_back({learner, default_spec(learner)});
  config.settings.push_back(std::move(setting));
  return run_cv_suite(config, out_dir, whole_corpus_vocab);
}

// ---------------------------------------------------------------------------
// topics

int run_topics(const std::string& dataset, const std::string& stopword_path,
               const std::string& source, int num_topics, int iterations, std::uint64_t seed,
               int words_per_topic, const std::string& out_dir) {
  LabeledDataset ds = load_and_clean(dataset);
  if (source != "all") {
    const auto want = source_from_string(source);
    if (!want) throw ValidationError("unknown source \"" + source + "\"");
    LabeledDataset filtered;
    filtered.label_names = ds.label_names;
    for (Document& doc : ds.documents)
      if (doc.source == *want) filtered.documents.push_back(std::move(doc));
    ds = std::move(filtered);
  }
  if (ds.size() == 0) throw ValidationError("no documents left for source \"" + source + "\"");

  StopwordList stopwords;
  if (!stopword_path.empty()) stopwords = load_stopwords(stopword_path);

  TokenizedDocs corpus;
  std::size_t dropped = 0;
  for (const Document& doc : ds.documents) {
    std::vector<std::string> tokens = remove_stopwords(tokenize(doc.text), stopwords);
    if (tokens.empty()) {
      ++dropped;
      continue;
    }
    corpus.push_back(std::move(tokens));
  }
  if (dropped > 0)
    std::fprintf(stderr, "note: dropped %zu document(s) left empty by stopword removal\n",
                 dropped);
  if (corpus.empty()) throw ValidationError("no tokens left after preprocessing");

  // Seeded 90/10 train/held-out split for the perplexity report.
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng(Rng::derive(seed, 0x5b17)).shuffle(order);
  const std::size_t heldout_count = corpus.size() / 10;
  TokenizedDocs train_docs, heldout_docs;
  for (std::size_t r = 0; r < order.size(); ++r)
    (r < heldout_count ? heldout_docs : train_docs).push_back(corpus[order[r]]);

  LdaConfig config;
  config.num_topics = num_topics;
  config.iterations = iterations;
  config.seed = seed;
  const TopicModel model = TopicModel::train(train_docs, config);
  model.check_invariants();

  char buf[256];
  std::string report;
  std::snprintf(buf, sizeof buf, "source: %s\ndocuments: %zu (train %zu, held-out %zu)\n",
                source.c_str(), corpus.size(), train_docs.size(), heldout_docs.size());
  report += buf;
  std::snprintf(buf, sizeof buf, "topics: %d\niterations: %d\nseed: %llu\n", num_topics,
                iterations, static_cast<unsigned long long>(seed));
  report += buf;
  std::snprintf(buf, sizeof buf, "training perplexity: %.4f\n", model.training_perplexity());
  report += buf;
  if (!heldout_docs.empty()) {
    std::snprintf(buf, sizeof buf, "held-out perplexity: %.4f\n",
                  model.heldout_perplexity(heldout_docs));
    report += buf;
  } else {
    report += "held-out perplexity: n/a (corpus too small to split)\n";
  }
  report +=
      "note: collapsed Gibbs inference; perplexities are not comparable to "
      "variational-inference values.\n";

  const std::string tag = slugify(source);
  std::fputs(report.c_str(), stdout);
  if (!out_dir.empty()) {
    write_file(out_path(out_dir, "perplexity_" + tag + ".txt"), report);
    write_file(out_path(out_dir, "topics_" + tag + ".csv"),
               render_topic_csv(model, words_per_topic));
    write_file(out_path(out_dir, "frequencies_" + tag + ".csv"),
               render_frequency_csv(word_frequencies(corpus)));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train / predict

int run_train(const std::string& dataset, const std::string& learner,
              const std::string& spec_path, int max_n, int min_doc_frequency,
              std::uint64_t seed, const std::string& out) {
  ModelSpec spec;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path, std::ios::binary);
    if (!in) throw IoError("cannot open \"" + spec_path + "\"");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParseError("spec file \"" + spec_path + "\": " + e.what());
    }
    spec = spec_from_json(j);
  } else {
    spec = default_spec(learner);
  }

  const LabeledDataset ds = load_and_clean(dataset);
  ModelBundle bundle;
  bundle.ngram.max_n = max_n;
  bundle.ngram.min_doc_frequency = min_doc_frequency;
  std::vector<std::string> texts;
  texts.reserve(ds.size());
  for (const Document& doc : ds.documents) texts.push_back(doc.text);
  bundle.vocabulary = build_vocabulary(texts, bundle.ngram);
  bundle.label_names = ds.label_names;

  FeatureMatrix X;
  X.dim = bundle.vocabulary.size();
  X.rows.reserve(ds.size());
  for (const std::string& t : texts) X.rows.push_back(vectorize(t, bundle.vocabulary));
  bundle.model = train_model(spec, X, ds.labels(), seed);

  save_model_bundle(bundle, out);
  std::fprintf(stderr, "trained %s on %zu documents (%u features), saved to %s\n",
               to_string(bundle.model->kind()), ds.size(), X.dim, out.c_str());
  return 0;
}

int run_predict(const std::string& model_path, const std::string& dataset,
                const std::string& out) {
  const ModelBundle bundle = load_model_bundle(model_path);
  const LabeledDataset ds = load_and_clean(dataset);

  std::string csv = "doc_id,true_label,predicted_label,positive_score\n";
  char buf[64];
  for (const Document& doc : ds.documents) {
    const Prediction p = bundle.model->predict(vectorize(doc.text, bundle.vocabulary));
    csv += doc.id;
    csv += ',';
    csv += doc.label ? bundle.label_names[static_cast<int>(*doc.label)] : "";
    csv += ',';
    csv += bundle.label_names[static_cast<int>(p.label)];
    std::snprintf(buf, sizeof buf, ",%.17g\n", p.scores[0]);
    csv += buf;
  }
  if (out.empty())
    std::fputs(csv.c_str(), stdout);
  else
    write_file(out, csv);
  return 0;
}

// ---------------------------------------------------------------------------
// convert

int run_convert(const std::string& input, const std::string& out, const FieldMapping& mapping) {
  const LabeledDataset ds = convert_dataset(input, mapping);
  save_dataset(ds, out);
  std::fprintf(stderr, "converted %zu records to %s\n", ds.size(), out.c_str());
  return 0;
}

std::vector<std::pair<std::string, std::string>> parse_map_entries(
    const std::vector<std::string>& entries, const std::string& flag) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const std::string& entry : entries) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ValidationError(flag + " expects raw=canonical, got \"" + entry + "\"");
    pairs.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return pairs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"code-mixed Luganda-English COVID-19 misinformation detection toolkit"};
  app.require_subcommand(1);

  std::string dataset, stopword_path, out_dir, out, config_path, model_path, input;
  std::string learner = "dmnb", source = "all", spec_path;
  int max_n = 1, min_doc_frequency = 1, folds = 10, num_topics = 10, iterations = 1000;
  int words_per_topic = 10;
  std::uint64_t seed = 1;
  bool counts = false, whole_corpus_vocab = false;
  FieldMapping mapping;
  std::vector<std::string> label_map_entries, source_map_entries;

  CLI::App* stats = app.add_subcommand("stats", "dataset statistics by source and label");
  stats->add_option("--dataset", dataset, "dataset JSON path")->required();
  stats->add_option("--out-dir", out_dir, "also write stats.txt and stats.csv here");

  CLI::App* preprocess = app.add_subcommand("preprocess", "apply the cleaning rules");
  preprocess->add_option("--dataset", dataset, "dataset JSON path")->required();
  preprocess->add_option("--out", out, "cleaned dataset JSON path")->required();

  CLI::App* featurize = app.add_subcommand("featurize", "emit vocabulary and sparse features");
  featurize->add_option("--dataset", dataset, "dataset JSON path")->required();
  featurize->add_option("--stopwords", stopword_path, "stopword list (token filter)");
  featurize->add_option("--ngrams", max_n, "max n-gram order")->check(CLI::Range(1, 3));
  featurize->add_option("--min-doc-frequency", min_doc_frequency, "vocabulary pruning threshold")
      ->check(CLI::PositiveNumber);
  featurize->add_flag("--counts", counts, "occurrence counts instead of binary presence");
  featurize->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* cv = app.add_subcommand("cv", "stratified cross-validation experiments");
  cv->add_option("--dataset", dataset, "dataset JSON path (overrides config)");
  cv->add_option("--config", config_path, "experiment suite config JSON");
  cv->add_option("--learner", learner, "learner kind for a single run (default dmnb)");
  cv->add_option("--ngrams", max_n, "max n-gram order for a single run")->check(CLI::Range(1, 3));
  cv->add_option("--folds", folds, "fold count")->check(CLI::Range(2, 1000));
  cv->add_option("--seed", seed, "master seed");
  cv->add_option("--out-dir", out_dir, "write results/prediction files here");
  cv->add_flag("--whole-corpus-vocab", whole_corpus_vocab,
               "build the vocabulary once on the whole corpus (compatibility mode)");

  CLI::App* topics = app.add_subcommand("topics", "LDA topic modeling and word frequencies");
  topics->add_option("--dataset", dataset, "dataset JSON path")->required();
  topics->add_option("--stopwords", stopword_path, "stopword list path");
  topics->add_option("--source", source, "corpus filter")
      ->check(CLI::IsMember({"twitter", "facebook", "all"}));
  topics->add_option("--topics", num_topics, "number of topics")->check(CLI::PositiveNumber);
  topics->add_option("--iterations", iterations, "Gibbs sweeps")->check(CLI::NonNegativeNumber);
  topics->add_option("--seed", seed, "sampler seed");
  topics->add_option("--words-per-topic", words_per_topic, "words per topic in the report")
      ->check(CLI::PositiveNumber);
  topics->add_option("--out-dir", out_dir, "write topic/frequency/perplexity files here");

  CLI::App* train = app.add_subcommand("train", "train one model and save a model bundle");
  train->add_option("--dataset", dataset, "dataset JSON path")->required();
  train->add_option("--learner", learner, "learner kind (default dmnb)");
  train->add_option("--spec", spec_path, "ModelSpec JSON file (overrides --learner)");
  train->add_option("--ngrams", max_n, "max n-gram order")->check(CLI::Range(1, 3));
  train->add_option("--min-doc-frequency", min_doc_frequency, "vocabulary pruning threshold")
      ->check(CLI::PositiveNumber);
  train->add_option("--seed", seed, "training seed");
  train->add_option("--out", out, "model bundle path")->required();

  CLI::App* predict = app.add_subcommand("predict", "score a dataset with a saved model bundle");
  predict->add_option("--model", model_path, "model bundle path")->required();
  predict->add_option("--dataset", dataset, "dataset JSON path")->required();
  predict->add_option("--out", out, "prediction CSV path (default stdout)");

  CLI::App* convert = app.add_subcommand("convert", "normalize an external file to the schema");
  convert->add_option("--input", input, "external JSON file")->required();
  convert->add_option("--out", out, "canonical dataset JSON path")->required();
  convert->add_option("--text-field", mapping.text_field, "field holding the text");
  convert->add_option("--label-field", mapping.label_field, "field holding the label");
  convert->add_option("--source-field", mapping.source_field, "field holding the source");
  convert->add_option("--id-field", mapping.id_field, "field holding the id");
  convert->add_option("--map-label", label_map_entries, "label value mapping raw=canonical");
  convert->add_option("--map-source", source_map_entries, "source value mapping raw=canonical");

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) return run_stats(dataset, out_dir);
    if (preprocess->parsed()) return run_preprocess(dataset, out);
    if (featurize->parsed())
      return run_featurize(dataset, stopword_path, max_n, min_doc_frequency, counts, out_dir);
    if (cv->parsed()) {
      if (!config_path.empty()) {
        ExperimentConfig config = load_experiment_config(config_path);
        if (!dataset.empty()) config.dataset = dataset;
        if (cv->count("--folds") > 0) config.folds = folds;
        if (cv->count("--seed") > 0) config.seed = seed;
        return run_cv_suite(config, out_dir, whole_corpus_vocab);
      }
      if (dataset.empty())
        throw ValidationError("cv needs --config or --dataset");
      return run_cv_single(dataset, learner, max_n, folds, seed, out_dir, whole_corpus_vocab);
    }
    if (topics->parsed())
      return run_topics(dataset, stopword_path, source, num_topics, iterations, seed,
                        words_per_topic, out_dir);
    if (train->parsed())
      return run_train(dataset, learner, spec_path, max_n, min_doc_frequency, seed, out);
    if (predict->parsed()) return run_predict(model_path, dataset, out);
    if (convert->parsed()) {
      mapping.label_map = parse_map_entries(label_map_entries, "--map-label");
      mapping.source_map = parse_map_entries(source_map_entries, "--map-source");
      return run_convert(input, out, mapping);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
