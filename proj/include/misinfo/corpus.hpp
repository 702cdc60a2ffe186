#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace misinfo {

enum class Source : std::uint8_t { twitter = 0, facebook = 1 };

// Binary task; index 0 is the positive class for ranking metrics.
enum class Label : std::uint8_t { misinformation = 0, no_misinformation = 1 };

inline constexpr int kNumSources = 2;
inline constexpr int kNumLabels = 2;

const char* to_string(Source s);
const char* to_string(Label l);
std::optional<Source> source_from_string(const std::string& s);
std::optional<Label> label_from_string(const std::string& s);

// One social-media post. `label` is absent only for unlabeled documents;
// everything loaded through load_dataset carries one.
struct Document {
  std::string id;
  std::string text;
  Source source = Source::twitter;
  std::optional<Label> label;
};

struct LabeledDataset {
  std::vector<Document> documents;
  std::array<std::string, 2> label_names{"misinformation", "no-misinformation"};

  std::size_t size() const { return documents.size(); }
  std::vector<Label> labels() const;
};

struct DatasetStats {
  // cell[source][label]
  std::array<std::array<std::uint64_t, 2>, 2> cell{};

  std::uint64_t source_total(Source s) const;
  std::uint64_t label_total(Label l) const;
  std::uint64_t total() const;
};

// Reads the canonical dataset schema: a JSON array (or newline-delimited JSON
// records) of objects with fields text, label, source and optional id.
// Missing ids are synthesized as the zero-padded record index. Throws
// ParseError on malformed input and ValidationError on bad records, both
// carrying the record index.
LabeledDataset load_dataset(const std::string& path);

// Same as load_dataset but from an in-memory buffer; `origin` names the
// source in error messages.
LabeledDataset dataset_from_json_text(const std::string& text, const std::string& origin);

void save_dataset(const LabeledDataset& ds, const std::string& path);

DatasetStats compute_stats(const LabeledDataset& ds);

std::string render_stats_text(const DatasetStats& st);

// CSV with header source,label,count.
std::string render_stats_csv(const DatasetStats& st);

// Field/value mapping used by the converter entry point to normalize an
// externally published file into the canonical schema.
struct FieldMapping {
  std::string text_field = "text";
  std::string label_field = "label";
  std::string source_field = "source";
  std::string id_field = "id";
  // Raw value -> canonical value ("misinformation"/"no-misinformation",
  // "twitter"/"facebook"). Unmapped values are tried verbatim.
  std::vector<std::pair<std::string, std::string>> label_map;
  std::vector<std::pair<std::string, std::string>> source_map;
};

LabeledDataset convert_dataset(const std::string& path, const FieldMapping& mapping);

}  // namespace misinfo
