#include "misinfo/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "misinfo/error.hpp"

namespace misinfo {

CleaningConfig CleaningConfig::all_rules_on() {
  CleaningConfig c;
  c.lowercase = true;
  c.strip_urls = true;
  c.strip_emails = true;
  c.strip_mentions = true;
  c.strip_retweet_markers = true;
  c.strip_symbols = true;
  c.strip_non_ascii = true;
  c.remove_stopwords = true;
  return c;
}

CleaningConfig CleaningConfig::none() { return CleaningConfig{}; }

namespace {

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

void ascii_lowercase(std::string& s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
}

bool starts_with_at(const std::string& s, std::size_t pos, const char* prefix) {
  for (std::size_t i = 0; prefix[i]; ++i) {
    if (pos + i >= s.size()) return false;
    char c = s[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

// URLs: http://..., https://... or www.-prefixed, up to the next whitespace.
void strip_urls_inplace(std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const bool at_token_start = i == 0 || is_space(s[i - 1]) || !is_ascii_alnum(s[i - 1]);
    if (at_token_start && (starts_with_at(s, i, "http://") || starts_with_at(s, i, "https://") ||
                           starts_with_at(s, i, "www."))) {
      while (i < s.size() && !is_space(s[i])) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(s[i]);
    ++i;
  }
  s = std::move(out);
}

bool is_email_local_char(char c) {
  return is_ascii_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}

bool is_email_domain_char(char c) { return is_ascii_alnum(c) || c == '.' || c == '-'; }

// local@domain.tld with at least two alphabetic chars after the last dot.
void strip_emails_inplace(std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '@') {
      std::size_t local_begin = out.size();
      while (local_begin > 0 && is_email_local_char(out[local_begin - 1])) --local_begin;
      std::size_t domain_end = i + 1;
      while (domain_end < s.size() && is_email_domain_char(s[domain_end])) ++domain_end;
      const std::size_t local_len = out.size() - local_begin;
      const std::string domain = s.substr(i + 1, domain_end - i - 1);
      const std::size_t last_dot = domain.rfind('.');
      bool tld_ok = last_dot != std::string::npos && domain.size() - last_dot - 1 >= 2;
      if (tld_ok)
        for (std::size_t d = last_dot + 1; d < domain.size(); ++d)
          if (!std::isalpha(static_cast<unsigned char>(domain[d]))) tld_ok = false;
      if (local_len > 0 && tld_ok) {
        out.resize(local_begin);
        out.push_back(' ');
        i = domain_end;
        continue;
      }
    }
    out.push_back(s[i]);
    ++i;
  }
  s = std::move(out);
}

bool is_handle_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

void strip_mentions_inplace(std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '@' && i + 1 < s.size() && is_handle_char(s[i + 1])) {
      std::size_t j = i + 1;
      while (j < s.size() && is_handle_char(s[j])) ++j;
      out.push_back(' ');
      i = j;
      continue;
    }
    out.push_back(s[i]);
    ++i;
  }
  s = std::move(out);
}

// Standalone lowercase "rt" bounded by non-alphanumerics. Bounding on char
// class (not whitespace) keeps the rule idempotent: later symbol stripping
// only turns non-alphanumerics into spaces, so it cannot surface a new
// standalone "rt".
void strip_retweet_markers_inplace(std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == 'r' && i + 1 < s.size() && s[i + 1] == 't') {
      const bool left_ok = i == 0 || !is_ascii_alnum(s[i - 1]);
      const bool right_ok = i + 2 >= s.size() || !is_ascii_alnum(s[i + 2]);
      if (left_ok && right_ok) {
        out.push_back(' ');
        i += 2;
        continue;
      }
    }
    out.push_back(s[i]);
    ++i;
  }
  s = std::move(out);
}

// HTML entities first (&amp; &#39; ...), then every ASCII char outside
// [a-z A-Z 0-9 _ # whitespace] becomes a space. '#' is kept so hashtags
// survive tokenization.
void strip_symbols_inplace(std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      std::size_t j = i + 1;
      if (j < s.size() && s[j] == '#') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      } else {
        while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && s[j] == ';' && j > i + 1) {
        out.push_back(' ');
        i = j + 1;
        continue;
      }
    }
    const char c = s[i];
    const unsigned char uc = static_cast<unsigned char>(c);
    if (uc < 0x80 && !is_ascii_alnum(c) && !is_space(c) && c != '_' && c != '#')
      out.push_back(' ');
    else
      out.push_back(c);
    ++i;
  }
  s = std::move(out);
}

void strip_non_ascii_inplace(std::string& s) {
  for (char& c : s)
    if (static_cast<unsigned char>(c) >= 0x80) c = ' ';
}

void collapse_whitespace_inplace(std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  s = std::move(out);
}

}  // namespace

std::string clean_text(const std::string& raw, const CleaningConfig& config) {
  std::string s = raw;
  if (config.lowercase) ascii_lowercase(s);
  if (config.strip_urls) strip_urls_inplace(s);
  if (config.strip_emails) strip_emails_inplace(s);
  if (config.strip_mentions) strip_mentions_inplace(s);
  if (config.strip_retweet_markers) strip_retweet_markers_inplace(s);
  if (config.strip_symbols) strip_symbols_inplace(s);
  if (config.strip_non_ascii) strip_non_ascii_inplace(s);
  collapse_whitespace_inplace(s);
  return s;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& list) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!list.contains(t)) out.push_back(t);
  return out;
}

StopwordList load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file: " + path);
  StopwordList list;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t b = 0, e = line.size();
    while (b < e && is_space(line[b])) ++b;
    while (e > b && is_space(line[e - 1])) --e;
    if (b == e) continue;
    if (line[b] == '#') continue;
    std::string word = line.substr(b, e - b);
    ascii_lowercase(word);
    list.words.insert(std::move(word));
  }
  return list;
}

}  // namespace misinfo
