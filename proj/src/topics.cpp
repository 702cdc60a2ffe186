#include "misinfo/topics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "misinfo/error.hpp"
#include "misinfo/rng.hpp"

namespace misinfo {

void LdaConfig::validate() const {
  if (num_topics < 1) throw ValidationError("lda: num_topics must be >= 1");
  if (alpha > 0.0 && !(alpha < 1e9)) throw ValidationError("lda: alpha out of range");
  if (beta <= 0.0) throw ValidationError("lda: beta must be > 0");
  if (iterations < 0) throw ValidationError("lda: iterations must be >= 0");
}

TopicModel TopicModel::initialize(const TokenizedDocs& corpus, const LdaConfig& config) {
  config.validate();
  if (corpus.empty()) throw ValidationError("lda: empty corpus");

  TopicModel m;
  m.config_ = config;
  m.docs_.reserve(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    if (corpus[d].empty())
      throw ValidationError("lda: document " + std::to_string(d) + " has no tokens");
    std::vector<std::uint32_t> ids;
    ids.reserve(corpus[d].size());
    for (const std::string& tok : corpus[d]) {
      auto [it, inserted] = m.ids_.try_emplace(tok, static_cast<std::uint32_t>(m.words_.size()));
      if (inserted) m.words_.push_back(tok);
      ids.push_back(it->second);
    }
    m.docs_.push_back(std::move(ids));
  }
  m.gibbs_init();
  return m;
}

TopicModel TopicModel::train(const TokenizedDocs& corpus, const LdaConfig& config) {
  TopicModel m = initialize(corpus, config);
  m.run_sweeps(config.iterations);
  return m;
}

void TopicModel::gibbs_init() {
  const int K = config_.num_topics;
  const std::uint32_t V = vocab_size();
  topic_word_.assign(K, std::vector<std::int64_t>(V, 0));
  doc_topic_.assign(docs_.size(), std::vector<std::int64_t>(K, 0));
  topic_totals_.assign(K, 0);
  assignments_.clear();
  assignments_.reserve(docs_.size());
  total_tokens_ = 0;

  Rng rng(config_.seed);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    std::vector<std::int32_t> z(docs_[d].size());
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const int k = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(K)));
      z[i] = k;
      topic_word_[k][docs_[d][i]] += 1;
      doc_topic_[d][k] += 1;
      topic_totals_[k] += 1;
      total_tokens_ += 1;
    }
    assignments_.push_back(std::move(z));
  }
  sweep_rng_state_ = rng.state();
}

void TopicModel::run_sweeps(int sweeps) {
  if (sweeps < 0) throw ValidationError("lda: sweeps must be >= 0");
  const int K = config_.num_topics;
  const double alpha = config_.effective_alpha();
  const double beta = config_.beta;
  const double vbeta = beta * static_cast<double>(vocab_size());

  Rng rng(sweep_rng_state_);
  std::vector<double> cumulative(K);
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        const std::uint32_t w = docs_[d][i];
        const int old_k = assignments_[d][i];
        topic_word_[old_k][w] -= 1;
        doc_topic_[d][old_k] -= 1;
        topic_totals_[old_k] -= 1;

        double acc = 0.0;
        for (int k = 0; k < K; ++k) {
          acc += (static_cast<double>(doc_topic_[d][k]) + alpha) *
                 (static_cast<double>(topic_word_[k][w]) + beta) /
                 (static_cast<double>(topic_totals_[k]) + vbeta);
          cumulative[k] = acc;
        }
        const double u = rng.uniform01() * acc;
        int new_k = K - 1;
        for (int k = 0; k < K; ++k)
          if (u < cumulative[k]) {
            new_k = k;
            break;
          }

        assignments_[d][i] = new_k;
        topic_word_[new_k][w] += 1;
        doc_topic_[d][new_k] += 1;
        topic_totals_[new_k] += 1;
      }
    }
  }
  sweep_rng_state_ = rng.state();
}

double TopicModel::topic_word_prob(int topic, std::uint32_t word) const {
  if (topic < 0 || topic >= config_.num_topics)
    throw ValidationError("lda: topic index out of range");
  if (word >= vocab_size()) throw ValidationError("lda: word index out of range");
  const double beta = config_.beta;
  const double vbeta = beta * static_cast<double>(vocab_size());
  return (static_cast<double>(topic_word_[topic][word]) + beta) /
         (static_cast<double>(topic_totals_[topic]) + vbeta);
}

void TopicModel::check_invariants() const {
  std::int64_t grand = 0;
  for (int k = 0; k < config_.num_topics; ++k) {
    std::int64_t row = 0;
    for (std::uint32_t w = 0; w < vocab_size(); ++w) {
      if (topic_word_[k][w] < 0) throw Error("lda invariant: negative topic-word count");
      row += topic_word_[k][w];
    }
    if (row != topic_totals_[k]) throw Error("lda invariant: topic total mismatch");
    grand += row;
  }
  if (grand != total_tokens_) throw Error("lda invariant: token count not conserved");
  for (std::size_t d = 0; d < doc_topic_.size(); ++d) {
    std::int64_t row = 0;
    for (int k = 0; k < config_.num_topics; ++k) {
      if (doc_topic_[d][k] < 0) throw Error("lda invariant: negative document-topic count");
      row += doc_topic_[d][k];
    }
    if (d < docs_.size() && row != static_cast<std::int64_t>(docs_[d].size()))
      throw Error("lda invariant: document token count mismatch");
  }
}

double TopicModel::predictive_log_likelihood(
    const std::vector<std::vector<std::uint32_t>>& docs,
    const std::vector<std::vector<double>>& theta, std::int64_t* token_count) const {
  const int K = config_.num_topics;
  double ll = 0.0;
  std::int64_t n = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const std::uint32_t w : docs[d]) {
      double p = 0.0;
      for (int k = 0; k < K; ++k) p += theta[d][k] * topic_word_prob(k, w);
      ll += std::log(p);
      n += 1;
    }
  }
  if (token_count) *token_count = n;
  return ll;
}

double TopicModel::training_perplexity() const {
  if (docs_.empty()) throw ValidationError("lda: model holds no training documents");
  const int K = config_.num_topics;
  const double alpha = config_.effective_alpha();
  std::vector<std::vector<double>> theta(docs_.size(), std::vector<double>(K));
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const double denom = static_cast<double>(docs_[d].size()) + alpha * K;
    for (int k = 0; k < K; ++k)
      theta[d][k] = (static_cast<double>(doc_topic_[d][k]) + alpha) / denom;
  }
  std::int64_t n = 0;
  const double ll = predictive_log_likelihood(docs_, theta, &n);
  return std::exp(-ll / static_cast<double>(n));
}

double TopicModel::heldout_perplexity(const TokenizedDocs& heldout, int sweeps) const {
  if (heldout.empty()) throw ValidationError("lda: empty held-out corpus");
  if (sweeps < 0) throw ValidationError("lda: sweeps must be >= 0");
  const int K = config_.num_topics;
  const double alpha = config_.effective_alpha();

  // Out-of-vocabulary tokens are dropped before inference.
  std::vector<std::vector<std::uint32_t>> docs;
  docs.reserve(heldout.size());
  std::int64_t kept = 0;
  for (const auto& doc : heldout) {
    std::vector<std::uint32_t> ids;
    for (const std::string& tok : doc) {
      const auto it = ids_.find(tok);
      if (it != ids_.end()) ids.push_back(it->second);
    }
    kept += static_cast<std::int64_t>(ids.size());
    docs.push_back(std::move(ids));
  }
  if (kept == 0)
    throw ValidationError("lda: held-out corpus has no in-vocabulary tokens");

  // Document mixtures by Gibbs passes against frozen topic-word tables.
  Rng rng(Rng::derive(config_.seed, 0x6c0a));
  std::vector<std::vector<std::int64_t>> dt(docs.size(), std::vector<std::int64_t>(K, 0));
  std::vector<std::vector<std::int32_t>> z(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    z[d].resize(docs[d].size());
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      const int k = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(K)));
      z[d][i] = k;
      dt[d][k] += 1;
    }
  }
  std::vector<double> cumulative(K);
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const std::uint32_t w = docs[d][i];
        const int old_k = z[d][i];
        dt[d][old_k] -= 1;
        double acc = 0.0;
        for (int k = 0; k < K; ++k) {
          acc += (static_cast<double>(dt[d][k]) + alpha) * topic_word_prob(k, w);
          cumulative[k] = acc;
        }
        const double u = rng.uniform01() * acc;
        int new_k = K - 1;
        for (int k = 0; k < K; ++k)
          if (u < cumulative[k]) {
            new_k = k;
            break;
          }
        z[d][i] = new_k;
        dt[d][new_k] += 1;
      }
    }
  }

  std::vector<std::vector<double>> theta(docs.size(), std::vector<double>(K));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const double denom = static_cast<double>(docs[d].size()) + alpha * K;
    for (int k = 0; k < K; ++k)
      theta[d][k] = (static_cast<double>(dt[d][k]) + alpha) / denom;
  }
  std::int64_t n = 0;
  const double ll = predictive_log_likelihood(docs, theta, &n);
  return std::exp(-ll / static_cast<double>(n));
}

std::vector<std::pair<std::string, double>> TopicModel::top_words(int topic, int n) const {
  if (topic < 0 || topic >= config_.num_topics)
    throw ValidationError("lda: topic index out of range");
  if (n < 0) throw ValidationError("lda: n must be >= 0");
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(vocab_size());
  for (std::uint32_t w = 0; w < vocab_size(); ++w)
    ranked.emplace_back(words_[w], topic_word_prob(topic, w));
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(n)) ranked.resize(static_cast<std::size_t>(n));
  return ranked;
}

TopicModel TopicModel::from_tables(std::vector<std::string> words,
                                   std::vector<std::vector<std::int64_t>> topic_word,
                                   std::vector<std::vector<std::int64_t>> doc_topic,
                                   LdaConfig config) {
  config.validate();
  if (topic_word.size() != static_cast<std::size_t>(config.num_topics))
    throw ValidationError("lda: topic_word row count must equal num_topics");
  TopicModel m;
  m.config_ = config;
  m.words_ = std::move(words);
  for (std::uint32_t w = 0; w < m.words_.size(); ++w) m.ids_.emplace(m.words_[w], w);
  m.topic_word_ = std::move(topic_word);
  m.doc_topic_ = std::move(doc_topic);
  m.topic_totals_.assign(config.num_topics, 0);
  m.total_tokens_ = 0;
  for (int k = 0; k < config.num_topics; ++k) {
    if (m.topic_word_[k].size() != m.words_.size())
      throw ValidationError("lda: topic_word column count must equal vocabulary size");
    for (const std::int64_t c : m.topic_word_[k]) m.topic_totals_[k] += c;
    m.total_tokens_ += m.topic_totals_[k];
  }
  m.sweep_rng_state_ = config.seed;
  return m;
}

std::vector<std::pair<std::string, std::uint64_t>> word_frequencies(
    const TokenizedDocs& corpus) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& doc : corpus)
    for (const std::string& tok : doc) counts[tok] += 1;
  std::vector<std::pair<std::string, std::uint64_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::string render_topic_csv(const TopicModel& model, int words_per_topic) {
  std::string out = "topic,rank,word,probability\n";
  char buf[64];
  for (int k = 0; k < model.num_topics(); ++k) {
    const auto ranked = model.top_words(k, words_per_topic);
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      std::snprintf(buf, sizeof buf, "%d,%zu,", k, r + 1);
      out += buf;
      out += ranked[r].first;
      std::snprintf(buf, sizeof buf, ",%.6f\n", ranked[r].second);
      out += buf;
    }
  }
  return out;
}

std::string render_frequency_csv(
    const std::vector<std::pair<std::string, std::uint64_t>>& freqs) {
  std::string out = "word,count\n";
  for (const auto& [word, count] : freqs) {
    out += word;
    out += ',';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

}  // namespace misinfo
