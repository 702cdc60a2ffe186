#include "misinfo/model_io.hpp"

#include <fstream>

#include "misinfo/error.hpp"

#include "json.hpp"

namespace misinfo {

using nlohmann::json;

void save_model_bundle(const ModelBundle& bundle, const std::string& path) {
  if (!bundle.model) throw ValidationError("save_model_bundle: no model");
  json j;
  j["format_version"] = ModelBundle::kFormatVersion;
  j["ngram"] = {{"max_n", bundle.ngram.max_n},
                {"min_doc_frequency", bundle.ngram.min_doc_frequency},
                {"binary_features", bundle.ngram.binary_features}};
  json ngrams = json::array();
  json dfs = json::array();
  for (std::uint32_t i = 0; i < bundle.vocabulary.size(); ++i) {
    ngrams.push_back(bundle.vocabulary.ngram(i));
    dfs.push_back(bundle.vocabulary.doc_frequency(i));
  }
  j["vocabulary"] = {{"ngrams", std::move(ngrams)}, {"doc_frequency", std::move(dfs)}};
  j["label_names"] = json::array({bundle.label_names[0], bundle.label_names[1]});
  j["model"] = bundle.model->to_json();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  out << j.dump(1, '\t') << '\n';
  if (!out) throw IoError("failed writing \"" + path + "\"");
}

ModelBundle load_model_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("model bundle \"" + path + "\": " + e.what());
  }
  const int version = j.value("format_version", -1);
  if (version != ModelBundle::kFormatVersion)
    throw ParseError("model bundle \"" + path + "\": unsupported format version " +
                     std::to_string(version));

  ModelBundle bundle;
  try {
    const json& ng = j.at("ngram");
    bundle.ngram.max_n = ng.at("max_n").get<int>();
    bundle.ngram.min_doc_frequency = ng.at("min_doc_frequency").get<int>();
    bundle.ngram.binary_features = ng.at("binary_features").get<bool>();
    bundle.ngram.validate();
    bundle.vocabulary =
        Vocabulary(j.at("vocabulary").at("ngrams").get<std::vector<std::string>>(),
                   j.at("vocabulary").at("doc_frequency").get<std::vector<std::uint32_t>>(),
                   bundle.ngram);
    const json& names = j.at("label_names");
    bundle.label_names = {names.at(0).get<std::string>(), names.at(1).get<std::string>()};
    bundle.model = model_from_json(j.at("model"));
  } catch (const json::exception& e) {
    throw ParseError("model bundle \"" + path + "\": " + e.what());
  }
  if (bundle.model->dim() != bundle.vocabulary.size())
    throw ValidationError("model bundle \"" + path +
                          "\": model dimensionality does not match vocabulary size");
  return bundle;
}

}  // namespace misinfo
