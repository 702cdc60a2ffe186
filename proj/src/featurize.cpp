#include "misinfo/featurize.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "misinfo/error.hpp"

namespace misinfo {

void NGramConfig::validate() const {
  if (max_n < 1 || max_n > 3)
    throw ValidationError("NGramConfig: max_n must be in {1,2,3}, got " + std::to_string(max_n));
  if (min_doc_frequency < 1)
    throw ValidationError("NGramConfig: min_doc_frequency must be >= 1");
}

Vocabulary::Vocabulary(std::vector<std::string> ngrams, std::vector<std::uint32_t> doc_frequency,
                       NGramConfig config)
    : ngrams_(std::move(ngrams)), doc_frequency_(std::move(doc_frequency)), config_(config) {
  index_.reserve(ngrams_.size());
  for (std::uint32_t i = 0; i < ngrams_.size(); ++i) index_.emplace(ngrams_[i], i);
}

std::optional<std::uint32_t> Vocabulary::find(const std::string& ngram) const {
  auto it = index_.find(ngram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::to_csv() const {
  std::ostringstream out;
  out << "ngram,index,doc_frequency\n";
  for (std::uint32_t i = 0; i < size(); ++i) {
    // n-gram tokens contain no commas or quotes by construction (tokens are
    // whitespace-split runs of cleaned text, joined with single spaces).
    out << ngrams_[i] << ',' << i << ',' << doc_frequency_[i] << '\n';
  }
  return out.str();
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' ||
                               text[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n' &&
           text[j] != '\r')
      ++j;
    if (j > i) tokens.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens, int max_n) {
  if (max_n < 1) throw ValidationError("extract_ngrams: max_n must be >= 1");
  std::vector<std::string> grams;
  const std::size_t n = tokens.size();
  for (int k = 1; k <= max_n; ++k) {
    if (n < static_cast<std::size_t>(k)) break;
    for (std::size_t i = 0; i + k <= n; ++i) {
      std::string g = tokens[i];
      for (int j = 1; j < k; ++j) {
        g.push_back(' ');
        g += tokens[i + j];
      }
      grams.push_back(std::move(g));
    }
  }
  return grams;
}

Vocabulary build_vocabulary(const std::vector<std::string>& cleaned_texts,
                            const NGramConfig& config) {
  config.validate();
  if (cleaned_texts.empty()) throw ValidationError("build_vocabulary: empty corpus");

  // First-occurrence order over the corpus scan; document frequency counts
  // each n-gram once per document.
  std::unordered_map<std::string, std::uint32_t> df;
  std::vector<std::string> order;
  for (const auto& text : cleaned_texts) {
    const auto grams = extract_ngrams(tokenize(text), config.max_n);
    std::unordered_map<std::string, bool> seen_here;
    seen_here.reserve(grams.size() * 2);
    for (const auto& g : grams) {
      auto [it, inserted] = seen_here.emplace(g, true);
      (void)it;
      if (!inserted) continue;
      auto [df_it, fresh] = df.emplace(g, 1);
      if (fresh)
        order.push_back(g);
      else
        ++df_it->second;
    }
  }

  std::vector<std::string> kept;
  std::vector<std::uint32_t> freq;
  kept.reserve(order.size());
  freq.reserve(order.size());
  for (auto& g : order) {
    const std::uint32_t f = df[g];
    if (f >= static_cast<std::uint32_t>(config.min_doc_frequency)) {
      kept.push_back(std::move(g));
      freq.push_back(f);
    }
  }
  return Vocabulary(std::move(kept), std::move(freq), config);
}

SparseVector vectorize(const std::string& cleaned_text, const Vocabulary& vocab) {
  const auto grams = extract_ngrams(tokenize(cleaned_text), vocab.config().max_n);
  std::map<std::uint32_t, double> acc;
  for (const auto& g : grams) {
    if (auto idx = vocab.find(g)) acc[*idx] += 1.0;
  }
  SparseVector v;
  v.dim = vocab.size();
  v.entries.reserve(acc.size());
  const bool binary = vocab.config().binary_features;
  for (const auto& [idx, count] : acc) v.entries.emplace_back(idx, binary ? 1.0 : count);
  return v;
}

}  // namespace misinfo
