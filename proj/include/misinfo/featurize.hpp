#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "misinfo/sparse.hpp"

namespace misinfo {

struct NGramConfig {
  int max_n = 1;              // in {1,2,3}
  int min_doc_frequency = 1;  // >= 1
  bool binary_features = true;

  void validate() const;  // throws ValidationError
};

// Dense n-gram -> index map built over a corpus scan. Indices follow
// first-occurrence order and every retained entry has document frequency
// >= min_doc_frequency.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> ngrams, std::vector<std::uint32_t> doc_frequency,
             NGramConfig config);

  std::uint32_t size() const { return static_cast<std::uint32_t>(ngrams_.size()); }
  std::optional<std::uint32_t> find(const std::string& ngram) const;
  const std::string& ngram(std::uint32_t index) const { return ngrams_[index]; }
  std::uint32_t doc_frequency(std::uint32_t index) const { return doc_frequency_[index]; }
  const NGramConfig& config() const { return config_; }

  std::string to_csv() const;  // header ngram,index,doc_frequency

 private:
  std::vector<std::string> ngrams_;
  std::vector<std::uint32_t> doc_frequency_;
  std::unordered_map<std::string, std::uint32_t> index_;
  NGramConfig config_;
};

// Whitespace split; hashtags stay single tokens. Expects cleaned text.
std::vector<std::string> tokenize(const std::string& text);

// All contiguous k-grams for k = 1..max_n, space-joined, grouped by k in
// left-to-right order.
std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens, int max_n);

Vocabulary build_vocabulary(const std::vector<std::string>& cleaned_texts,
                            const NGramConfig& config);

SparseVector vectorize(const std::string& cleaned_text, const Vocabulary& vocab);

}  // namespace misinfo
