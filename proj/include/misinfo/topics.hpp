#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace misinfo {

struct LdaConfig {
  int num_topics = 10;
  double alpha = -1.0;  // <= 0 means the 50/num_topics default
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 0;

  double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / num_topics; }
  void validate() const;
};

using TokenizedDocs = std::vector<std::vector<std::string>>;

// Collapsed Gibbs state: integer count tables plus the token-level topic
// assignments they summarize.
class TopicModel {
 public:
  TopicModel() = default;

  // Seeded random initialization followed by `config.iterations` sweeps.
  static TopicModel train(const TokenizedDocs& corpus, const LdaConfig& config);

  // Initialization only (zero sweeps); baseline for fit comparisons.
  static TopicModel initialize(const TokenizedDocs& corpus, const LdaConfig& config);

  void run_sweeps(int sweeps);

  int num_topics() const { return config_.num_topics; }
  std::uint32_t vocab_size() const { return static_cast<std::uint32_t>(words_.size()); }
  const LdaConfig& config() const { return config_; }
  const std::vector<std::string>& words() const { return words_; }

  const std::vector<std::vector<std::int64_t>>& topic_word() const { return topic_word_; }
  const std::vector<std::vector<std::int64_t>>& doc_topic() const { return doc_topic_; }
  const std::vector<std::int64_t>& topic_totals() const { return topic_totals_; }
  std::int64_t total_tokens() const { return total_tokens_; }

  // Smoothed phi_{k,w}.
  double topic_word_prob(int topic, std::uint32_t word) const;

  // Verifies nonnegativity and count conservation; throws Error on violation.
  void check_invariants() const;

  // exp(- mean per-token log-likelihood) on the training corpus, using the
  // model's own smoothed document mixtures.
  double training_perplexity() const;

  // Held-out docs get document mixtures from `sweeps` Gibbs passes with the
  // topic-word tables frozen; out-of-vocabulary tokens are dropped. Errors
  // when no in-vocabulary token remains.
  double heldout_perplexity(const TokenizedDocs& heldout, int sweeps = 50) const;

  // n highest-probability words of a topic, ties alphabetical.
  std::vector<std::pair<std::string, double>> top_words(int topic, int n) const;

  // Test hook: build a model directly from count tables.
  static TopicModel from_tables(std::vector<std::string> words,
                                std::vector<std::vector<std::int64_t>> topic_word,
                                std::vector<std::vector<std::int64_t>> doc_topic,
                                LdaConfig config);

 private:
  LdaConfig config_;
  std::vector<std::string> words_;                      // word id -> token
  std::unordered_map<std::string, std::uint32_t> ids_;  // token -> word id
  std::vector<std::vector<std::uint32_t>> docs_;        // token streams as word ids
  std::vector<std::vector<std::int64_t>> topic_word_;   // [topic][word]
  std::vector<std::vector<std::int64_t>> doc_topic_;    // [doc][topic]
  std::vector<std::int64_t> topic_totals_;              // [topic]
  std::vector<std::vector<std::int32_t>> assignments_;  // z per token
  std::int64_t total_tokens_ = 0;
  std::uint64_t sweep_rng_state_ = 0;

  void gibbs_init();
  double predictive_log_likelihood(const std::vector<std::vector<std::uint32_t>>& docs,
                                   const std::vector<std::vector<double>>& theta,
                                   std::int64_t* token_count) const;
};

// Descending count order, ties alphabetical.
std::vector<std::pair<std::string, std::uint64_t>> word_frequencies(const TokenizedDocs& corpus);

std::string render_topic_csv(const TopicModel& model, int words_per_topic);
std::string render_frequency_csv(
    const std::vector<std::pair<std::string, std::uint64_t>>& freqs);

}  // namespace misinfo
