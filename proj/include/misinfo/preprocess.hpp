#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace misinfo {

// Per-rule switches for clean_text. Construct through one of the factories
// (or explicit braced init) so every switch has a deliberate value.
struct CleaningConfig {
  bool lowercase = false;
  bool strip_urls = false;
  bool strip_emails = false;
  bool strip_mentions = false;
  bool strip_retweet_markers = false;
  bool strip_symbols = false;
  bool strip_non_ascii = false;
  // Consumed by the token-level stages (featurize/topics), not by clean_text.
  bool remove_stopwords = false;

  static CleaningConfig all_rules_on();
  static CleaningConfig none();
};

struct StopwordList {
  std::unordered_set<std::string> words;

  bool contains(const std::string& token) const { return words.count(token) != 0; }
  std::size_t size() const { return words.size(); }
};

// Applies the enabled rules in fixed order: lowercase, strip URLs, strip
// emails, strip mentions (@handle), strip standalone "rt" tokens, strip
// symbols (HTML entities first, then any char outside [a-z0-9_#]), strip
// non-ASCII, collapse whitespace. Stripped spans are replaced by a space so
// adjacent words never fuse; the result is trimmed. Idempotent.
std::string clean_text(const std::string& raw, const CleaningConfig& config);

// Order-preserving filter; expects lowercased tokens.
std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& list);

// One token per line, lines starting with '#' are comments; entries are
// lowercased and deduplicated.
StopwordList load_stopwords(const std::string& path);

}  // namespace misinfo
