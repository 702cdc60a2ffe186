#include "misinfo/corpus.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "misinfo/error.hpp"

#include "json.hpp"

namespace misinfo {

using nlohmann::json;

const char* to_string(Source s) { return s == Source::twitter ? "twitter" : "facebook"; }

const char* to_string(Label l) {
  return l == Label::misinformation ? "misinformation" : "no-misinformation";
}

std::optional<Source> source_from_string(const std::string& s) {
  if (s == "twitter") return Source::twitter;
  if (s == "facebook") return Source::facebook;
  return std::nullopt;
}

std::optional<Label> label_from_string(const std::string& s) {
  if (s == "misinformation") return Label::misinformation;
  if (s == "no-misinformation") return Label::no_misinformation;
  return std::nullopt;
}

std::vector<Label> LabeledDataset::labels() const {
  std::vector<Label> out;
  out.reserve(documents.size());
  for (const auto& d : documents) out.push_back(*d.label);
  return out;
}

std::uint64_t DatasetStats::source_total(Source s) const {
  const auto& row = cell[static_cast<int>(s)];
  return row[0] + row[1];
}

std::uint64_t DatasetStats::label_total(Label l) const {
  return cell[0][static_cast<int>(l)] + cell[1][static_cast<int>(l)];
}

std::uint64_t DatasetStats::total() const {
  return cell[0][0] + cell[0][1] + cell[1][0] + cell[1][1];
}

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string synthesized_id(std::size_t record_index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", record_index);
  return buf;
}

Document document_from_record(const json& rec, std::size_t index, const std::string& origin) {
  const std::string where = origin + ", record " + std::to_string(index);
  if (!rec.is_object()) throw ValidationError(where + ": expected a JSON object");

  Document doc;
  if (!rec.contains("text") || !rec["text"].is_string())
    throw ValidationError(where + ": missing or non-string \"text\"");
  doc.text = rec["text"].get<std::string>();
  if (trimmed(doc.text).empty()) throw ValidationError(where + ": empty text");

  if (!rec.contains("label") || !rec["label"].is_string())
    throw ValidationError(where + ": missing or non-string \"label\"");
  const std::string label_str = rec["label"].get<std::string>();
  const auto label = label_from_string(label_str);
  if (!label) throw ValidationError(where + ": unknown label \"" + label_str + "\"");
  doc.label = *label;

  if (!rec.contains("source") || !rec["source"].is_string())
    throw ValidationError(where + ": missing or non-string \"source\"");
  const std::string source_str = rec["source"].get<std::string>();
  const auto source = source_from_string(source_str);
  if (!source) throw ValidationError(where + ": unknown source \"" + source_str + "\"");
  doc.source = *source;

  if (rec.contains("id")) {
    if (rec["id"].is_string())
      doc.id = rec["id"].get<std::string>();
    else if (rec["id"].is_number_integer())
      doc.id = std::to_string(rec["id"].get<long long>());
    else
      throw ValidationError(where + ": \"id\" must be a string or integer");
  }
  if (doc.id.empty()) doc.id = synthesized_id(index);
  return doc;
}

LabeledDataset finalize_dataset(std::vector<Document> docs, const std::string& origin) {
  std::unordered_set<std::string> seen;
  seen.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!seen.insert(docs[i].id).second)
      throw ValidationError(origin + ", record " + std::to_string(i) + ": duplicate id \"" +
                            docs[i].id + "\"");
  }
  LabeledDataset ds;
  ds.documents = std::move(docs);
  return ds;
}

}  // namespace

LabeledDataset dataset_from_json_text(const std::string& text, const std::string& origin) {
  // Canonical schema comes in two encodings: one JSON array, or one JSON
  // object per line.
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError(origin + ": empty dataset file");

  std::vector<Document> docs;
  if (text[first] == '[') {
    json root;
    try {
      root = json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError(origin + ": " + e.what());
    }
    if (!root.is_array()) throw ParseError(origin + ": expected a JSON array");
    docs.reserve(root.size());
    for (std::size_t i = 0; i < root.size(); ++i)
      docs.push_back(document_from_record(root[i], i, origin));
  } else {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0, index = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trimmed(line).empty()) continue;
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::exception& e) {
        throw ParseError(origin + ", line " + std::to_string(line_no) + ": " + e.what());
      }
      docs.push_back(document_from_record(rec, index, origin));
      ++index;
    }
  }
  return finalize_dataset(std::move(docs), origin);
}

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_from_json_text(buf.str(), path);
}

void save_dataset(const LabeledDataset& ds, const std::string& path) {
  json arr = json::array();
  for (const auto& d : ds.documents) {
    json rec;
    rec["id"] = d.id;
    rec["text"] = d.text;
    rec["source"] = to_string(d.source);
    if (d.label) rec["label"] = to_string(*d.label);
    arr.push_back(std::move(rec));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset file: " + path);
  out << arr.dump(1) << '\n';
}

DatasetStats compute_stats(const LabeledDataset& ds) {
  if (ds.documents.empty()) throw ValidationError("compute_stats: empty dataset");
  DatasetStats st;
  for (const auto& d : ds.documents)
    ++st.cell[static_cast<int>(d.source)][static_cast<int>(*d.label)];
  return st;
}

std::string render_stats_text(const DatasetStats& st) {
  char buf[256];
  std::ostringstream out;
  out << "Data                      Twitter   Facebook   Total\n";
  std::snprintf(buf, sizeof(buf), "%-24s %8llu %10llu %7llu\n", "Annotated data",
                static_cast<unsigned long long>(st.source_total(Source::twitter)),
                static_cast<unsigned long long>(st.source_total(Source::facebook)),
                static_cast<unsigned long long>(st.total()));
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-24s %8llu %10llu %7llu\n", "With misinformation",
                static_cast<unsigned long long>(st.cell[0][0]),
                static_cast<unsigned long long>(st.cell[1][0]),
                static_cast<unsigned long long>(st.label_total(Label::misinformation)));
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-24s %8llu %10llu %7llu\n", "Without misinformation",
                static_cast<unsigned long long>(st.cell[0][1]),
                static_cast<unsigned long long>(st.cell[1][1]),
                static_cast<unsigned long long>(st.label_total(Label::no_misinformation)));
  out << buf;
  return out.str();
}

std::string render_stats_csv(const DatasetStats& st) {
  std::ostringstream out;
  out << "source,label,count\n";
  for (int s = 0; s < kNumSources; ++s)
    for (int l = 0; l < kNumLabels; ++l)
      out << to_string(static_cast<Source>(s)) << ',' << to_string(static_cast<Label>(l)) << ','
          << st.cell[s][l] << '\n';
  return out.str();
}

namespace {

std::string mapped_value(const std::vector<std::pair<std::string, std::string>>& map,
                         const std::string& raw) {
  for (const auto& [from, to] : map)
    if (from == raw) return to;
  return raw;
}

}  // namespace

LabeledDataset convert_dataset(const std::string& path, const FieldMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }

  // Accept either a top-level array or an object wrapping one array value.
  const json* records = nullptr;
  if (root.is_array()) {
    records = &root;
  } else if (root.is_object()) {
    for (const auto& [key, value] : root.items()) {
      (void)key;
      if (value.is_array()) {
        records = &value;
        break;
      }
    }
  }
  if (!records) throw ParseError(path + ": no record array found");

  std::vector<Document> docs;
  docs.reserve(records->size());
  for (std::size_t i = 0; i < records->size(); ++i) {
    const json& rec = (*records)[i];
    json canonical;
    const std::string where = path + ", record " + std::to_string(i);
    if (!rec.is_object()) throw ValidationError(where + ": expected a JSON object");
    if (!rec.contains(mapping.text_field))
      throw ValidationError(where + ": missing field \"" + mapping.text_field + "\"");
    if (!rec.contains(mapping.label_field))
      throw ValidationError(where + ": missing field \"" + mapping.label_field + "\"");
    if (!rec.contains(mapping.source_field))
      throw ValidationError(where + ": missing field \"" + mapping.source_field + "\"");
    canonical["text"] = rec[mapping.text_field];
    const json& lab = rec[mapping.label_field];
    canonical["label"] =
        mapped_value(mapping.label_map, lab.is_string() ? lab.get<std::string>() : lab.dump());
    const json& src = rec[mapping.source_field];
    canonical["source"] =
        mapped_value(mapping.source_map, src.is_string() ? src.get<std::string>() : src.dump());
    if (rec.contains(mapping.id_field)) canonical["id"] = rec[mapping.id_field];
    docs.push_back(document_from_record(canonical, i, path));
  }
  return finalize_dataset(std::move(docs), path);
}

}  // namespace misinfo
