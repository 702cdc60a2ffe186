// Generator for the released code-mixed Luganda-English COVID-19
// misinformation dataset. Fully deterministic in --seed: pseudo-Luganda
// content words come from a syllable model, misinformation claims and
// refutations are planted as small correlated token bundles, and raw texts
// are decorated with the social-media noise the cleaning rules remove.
#include <array>
#include <cassert>
#include <cstdio>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"

#include "misinfo/corpus.hpp"
#include "misinfo/error.hpp"
#include "misinfo/featurize.hpp"
#include "misinfo/preprocess.hpp"
#include "misinfo/rng.hpp"
#include "misinfo/topics.hpp"

using namespace misinfo;

namespace {

// Tuning knobs. The generated corpus has to land on the published marginals:
// the source/label cross-tab, the n-gram vocabulary sizes, the classifier
// accuracy spread (plain MNB well below DMNB), and a frequency list whose top
// ranks carry the COVID synonym set.
struct GenConfig {
  // Source/label quotas.
  int tw_mis = 36, tw_no = 250, fb_mis = 577, fb_no = 182;

  // Token counts per document (triangular between lo and hi).
  int tw_len_lo = 12, tw_len_hi = 32;
  int fb_len_lo = 16, fb_len_hi = 40;

  // Shared-content Zipf shape; pool size drives distinct-unigram counts.
  std::size_t shared_pool = 20000;
  double shared_s = 0.22;

  // Label-signal structure.
  int bundles_per_label = 40;
  double bundle_s = 1.05;          // popularity of the claim bundles
  double p_cross = 0.39;           // bundle drawn from the opposite label
  double bundle_repeat = 0.10;     // chance each bundle token doubles
  double bundle_repeat2 = 0.03;    // chance of a third copy
  int topical_pool = 150;
  double topical_s = 1.0;
  int topical_tokens = 10;
  double topical_contamination = 0.31;  // topical draw from the wrong pool
  double q_neutral = 0.18;              // documents with no label signal

  // Vocabulary seasoning.
  double stopword_rate = 0.24;
  double synonym_doc_prob = 0.92;
  double synonym_second = 0.40;
  double hashtag_rate = 0.32;  // shared fillers rendered as #hashtags

  // Collocation pool: filler positions sometimes emit a whole phrase, which
  // is what keeps repeated bigram/trigram mass at realistic levels.
  int phrase_pool = 300;
  double phrase_s = 1.2;
  double phrase_rate = 0.16;  // per filler unit
};

const std::vector<std::string>& covid_synonyms() {
  static const std::vector<std::string> words = {
      "corona", "virus",   "obulwadde", "ekilwadde", "coronavirus",
      "covid19", "kolona", "covid",     "ssenyiga"};
  return words;
}

const std::vector<std::string>& english_words() {
  static const std::vector<std::string> words = {
      "mask", "masks", "facemask", "vaccine", "vaccines", "vaccination",
      "astrazeneca", "pfizer", "lockdown", "curfew", "quarantine", "isolation",
      "hospital", "clinic", "ward", "oxygen", "ventilator", "doctor",
      "doctors", "nurse", "nurses", "patient", "patients", "ministry",
      "minister", "health", "president", "government", "police", "sanitizer",
      "sanitize", "soap", "wash", "hands", "gloves", "social", "distance",
      "distancing", "metres", "crowd", "gathering", "church", "churches",
      "mosque", "prayer", "pray", "god", "pastor", "school", "schools",
      "students", "teachers", "university", "exams", "market", "markets",
      "shops", "business", "taxi", "taxis", "boda", "bodaboda", "bus",
      "travel", "border", "airport", "flights", "tourists", "test", "testing",
      "tested", "results", "positive", "negative", "cases", "case", "numbers",
      "deaths", "death", "died", "dead", "recovered", "recovery", "treatment",
      "cure", "medicine", "drugs", "tablets", "herbal", "herbs", "garlic",
      "ginger", "lemon", "honey", "steam", "steaming", "hot", "water", "tea",
      "drink", "eat", "fruits", "vitamin", "immunity", "immune", "body",
      "fever", "cough", "flu", "cold", "breathing", "symptoms", "sick",
      "disease", "pandemic", "outbreak", "wave", "variant", "delta", "spread",
      "infection", "infected", "contact", "tracing", "radio", "television",
      "news", "online", "fake", "false", "rumor", "rumors", "report",
      "update", "statistics", "stay", "home", "safe", "stayhome", "staysafe"};
  return words;
}

// Agglutinative pseudo-Luganda: optional noun-class prefix plus 2-4 CV
// syllables drawn from Luganda-plausible onsets (including geminates and
// nasal clusters).
std::string make_word(Rng& rng) {
  static const std::vector<std::string> prefixes = {
      "oku", "aba", "omu", "eki", "ama", "obu", "aka", "olu",
      "ebi", "ent", "emi", "ekk", "eby", "ab",  "omw", "ess"};
  static const std::vector<std::string> onsets = {
      "b",  "k",  "l",  "m",  "n",  "g",  "s",  "t",  "w",  "y",
      "z",  "d",  "f",  "j",  "ny", "ng", "gg", "bb", "kk", "ll",
      "mm", "nn", "ss", "tt", "zz", "mp", "mb", "nd", "ns", "nt",
      "nk", "nz", "kw", "lw", "gw", "tw", "bw", "mw"};
  static const std::vector<std::string> vowels = {"a", "e", "i", "o", "u"};
  std::string w;
  if (rng.uniform(100) < 55) w += prefixes[rng.uniform(prefixes.size())];
  const int syllables = 2 + static_cast<int>(rng.uniform(3));
  for (int s = 0; s < syllables; ++s) {
    w += onsets[rng.uniform(onsets.size())];
    w += vowels[rng.uniform(vowels.size())];
  }
  return w;
}

// Cumulative Zipf table over ranks 0..n-1: p(i) proportional to 1/(i+shift)^s.
struct Zipf {
  std::vector<double> cdf;
  Zipf(std::size_t n, double s, double shift = 2.7) {
    cdf.reserve(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += 1.0 / std::pow(static_cast<double>(i + 1) + shift, s);
      cdf.push_back(total);
    }
    for (double& c : cdf) c /= total;
  }
  std::size_t sample(Rng& rng) const {
    const double u = rng.uniform01();
    return static_cast<std::size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
};

struct WordPools {
  std::vector<std::string> stopwords;
  std::vector<std::string> synonyms;
  std::vector<std::array<std::string, 6>> bundles[2];  // [label]
  std::vector<std::string> topical[2];                 // [label]
  std::vector<std::string> shared;
  // Fixed collocations (2-3 words). Real corpora owe much of their repeated
  // bigram/trigram mass to these.
  std::vector<std::vector<std::string>> phrases;
};

WordPools build_pools(const GenConfig& config, const StopwordList& stoplist, Rng& rng) {
  WordPools pools;
  pools.stopwords.assign(stoplist.words.begin(), stoplist.words.end());
  std::sort(pools.stopwords.begin(), pools.stopwords.end());
  pools.synonyms = covid_synonyms();

  std::unordered_set<std::string> used(pools.stopwords.begin(), pools.stopwords.end());
  for (const std::string& w : pools.synonyms) used.insert(w);
  for (const std::string& w : english_words()) used.insert(w);

  auto fresh = [&] {
    while (true) {
      std::string w = make_word(rng);
      if (used.insert(w).second) return w;
    }
  };

  for (int label = 0; label < 2; ++label) {
    for (int b = 0; b < config.bundles_per_label; ++b)
      pools.bundles[label].push_back(
          {fresh(), fresh(), fresh(), fresh(), fresh(), fresh()});
    for (int t = 0; t < config.topical_pool; ++t) pools.topical[label].push_back(fresh());
  }

  // English borrowings sit among the popular shared ranks; the pseudo-Luganda
  // bulk supplies the long tail.
  pools.shared = english_words();
  while (pools.shared.size() < config.shared_pool) pools.shared.push_back(fresh());
  std::vector<std::string> head(pools.shared.begin(), pools.shared.begin() + 3000);
  rng.shuffle(head);
  std::copy(head.begin(), head.end(), pools.shared.begin());

  // Collocations mix popular content words with function words and the
  // occasional COVID synonym, mirroring how fixed expressions look in the
  // wild ("corona virus", "okunaaba mu ngalo", "stay safe").
  const Zipf phrase_word(8000, 0.55);
  const Zipf phrase_stop(pools.stopwords.size(), 1.0, 1.5);
  auto phrase_token = [&](Rng& r) -> std::string {
    const double u = r.uniform01();
    if (u < 0.25) return pools.stopwords[phrase_stop.sample(r)];
    if (u < 0.31) return pools.synonyms[r.uniform(pools.synonyms.size())];
    return pools.shared[phrase_word.sample(r)];
  };
  for (int p = 0; p < config.phrase_pool; ++p) {
    std::vector<std::string> phrase;
    const int words = rng.uniform01() < 0.3 ? 2 : 3;
    while (static_cast<int>(phrase.size()) < words) {
      std::string w = phrase_token(rng);
      if (phrase.empty() || phrase.back() != w) phrase.push_back(std::move(w));
    }
    pools.phrases.push_back(std::move(phrase));
  }
  return pools;
}

int sample_len(Rng& rng, int lo, int hi) {
  const int a = lo + static_cast<int>(rng.uniform(hi - lo + 1));
  const int b = lo + static_cast<int>(rng.uniform(hi - lo + 1));
  return (a + b) / 2;
}

struct Samplers {
  Zipf shared, stopword, bundle, topical, synonym, phrase;
  Samplers(const GenConfig& config, const WordPools& pools)
      : shared(pools.shared.size(), config.shared_s),
        stopword(pools.stopwords.size(), 1.0, 1.5),
        bundle(config.bundles_per_label, config.bundle_s),
        topical(config.topical_pool, config.topical_s),
        synonym(pools.synonyms.size(), 1.0, 1.0),
        phrase(pools.phrases.size(), config.phrase_s) {}
};

// Generated token list plus the latent choices behind it, kept so the
// calibration report can score idealized classifiers against the truth.
struct TokenInfo {
  std::vector<std::string> tokens;
  bool neutral = true;
  int bundle_sign = 0;   // +1 bundle from the misinformation set, -1 otherwise
  int topical_net = 0;   // misinformation-pool draws minus the other pool's
};

TokenInfo make_tokens(const GenConfig& config, const WordPools& pools,
                      const Samplers& samplers, Label label, Source source, Rng& rng) {
  const int lo = source == Source::twitter ? config.tw_len_lo : config.fb_len_lo;
  const int hi = source == Source::twitter ? config.tw_len_hi : config.fb_len_hi;
  const int len = sample_len(rng, lo, hi);
  const int self = static_cast<int>(label);

  // Documents are built from units (single words, burst runs, collocations),
  // shuffled at unit level so phrases survive as contiguous n-grams.
  TokenInfo info;
  info.neutral = rng.uniform01() < config.q_neutral;
  std::vector<std::vector<std::string>> units;
  int count = 0;
  auto add_unit = [&](std::vector<std::string> unit) {
    count += static_cast<int>(unit.size());
    units.push_back(std::move(unit));
  };
  if (!info.neutral) {
    // One claim bundle: a stock phrase of correlated tokens kept contiguous,
    // the way copied claims repeat verbatim. A slice of documents carries the
    // opposite side's bundle (quoting or debunking it) while the topical
    // words still follow the true label.
    const int side = rng.uniform01() < config.p_cross ? 1 - self : self;
    info.bundle_sign = side == 0 ? 1 : -1;
    const auto& bundle = pools.bundles[side][samplers.bundle.sample(rng)];
    std::vector<std::string> run;
    for (const std::string& w : bundle) {
      run.push_back(w);
      if (rng.uniform01() < config.bundle_repeat) run.push_back(w);
      if (rng.uniform01() < config.bundle_repeat2) run.push_back(w);
    }
    add_unit(std::move(run));
    for (int t = 0; t < config.topical_tokens; ++t) {
      const int pool = rng.uniform01() < config.topical_contamination ? 1 - self : self;
      info.topical_net += pool == 0 ? 1 : -1;
      add_unit({pools.topical[pool][samplers.topical.sample(rng)]});
    }
  }
  if (rng.uniform01() < config.synonym_doc_prob) {
    add_unit({pools.synonyms[samplers.synonym.sample(rng)]});
    if (rng.uniform01() < config.synonym_second)
      add_unit({pools.synonyms[samplers.synonym.sample(rng)]});
  }
  while (count < len) {
    const double u = rng.uniform01();
    if (u < config.phrase_rate) {
      add_unit(pools.phrases[samplers.phrase.sample(rng)]);
    } else if (u < config.phrase_rate + config.stopword_rate) {
      add_unit({pools.stopwords[samplers.stopword.sample(rng)]});
    } else {
      std::string w = pools.shared[samplers.shared.sample(rng)];
      if (rng.uniform01() < config.hashtag_rate) w = "#" + w;
      add_unit({std::move(w)});
    }
  }
  rng.shuffle(units);
  for (std::vector<std::string>& unit : units)
    for (std::string& w : unit) info.tokens.push_back(std::move(w));
  return info;
}

// Accuracy of two idealized classifiers computed from the latent draws: one
// scoring each bundle as a single piece of evidence, one scoring every bundle
// token independently (the naive multiplicative error a frequency-counting
// model makes on a correlated clique). Real learners land a little under
// these because they estimate the ratios from folds.
void report_oracles(const GenConfig& config, const std::vector<TokenInfo>& infos,
                    const std::vector<Label>& labels, int bundle_tokens) {
  const double prior = std::log(613.0 / 432.0);
  const double lb = std::log((1.0 - config.p_cross) / config.p_cross);
  const double lt =
      std::log((1.0 - config.topical_contamination) / config.topical_contamination);
  int right_once = 0, right_multi = 0;
  for (std::size_t i = 0; i < infos.size(); ++i) {
    const TokenInfo& info = infos[i];
    const double base = prior + info.topical_net * lt;
    const double once = base + info.bundle_sign * lb;
    const double multi = base + info.bundle_sign * lb * bundle_tokens;
    const Label truth = labels[i];
    if ((once > 0) == (truth == Label::misinformation)) ++right_once;
    if ((multi > 0) == (truth == Label::misinformation)) ++right_multi;
  }
  std::fprintf(stderr, "oracle accuracy: %.2f counting bundles once, %.2f per token\n",
               100.0 * right_once / infos.size(), 100.0 * right_multi / infos.size());
}

// Render raw social-media text whose cleaned form is exactly the token list.
std::string decorate(const std::vector<std::string>& tokens, Source source, Rng& rng) {
  static const std::vector<std::string> emoji = {"😷", "🙏", "🦠", "😭"};
  std::string out;
  if (source == Source::twitter && rng.uniform01() < 0.15)
    out += "RT @" + make_word(rng) + " ";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string t = tokens[i];
    const double style = rng.uniform01();
    if (style < 0.08 && t[0] >= 'a' && t[0] <= 'z') {
      t[0] = static_cast<char>(t[0] - 'a' + 'A');
    } else if (style < 0.09) {
      for (char& c : t)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    out += t;
    if (i + 1 == tokens.size()) break;
    const double deco = rng.uniform01();
    if (deco < 0.06)
      out += ",";
    else if (deco < 0.11)
      out += ".";
    else if (deco < 0.14)
      out += "!";
    else if (deco < 0.15)
      out += "?";
    out += ' ';
    const double extra = rng.uniform01();
    if (extra < 0.02)
      out += "@" + make_word(rng) + " ";
    else if (extra < 0.04)
      out += emoji[rng.uniform(emoji.size())] + " ";
    else if (extra < 0.055)
      out += "&amp; ";
    else if (extra < 0.08)
      out += " ";  // double space
  }
  const double tail = rng.uniform01();
  if ((source == Source::twitter && tail < 0.12) ||
      (source == Source::facebook && tail < 0.06)) {
    out += " https://t.co/";
    static const char alnum[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    for (int i = 0; i < 6; ++i) out += alnum[rng.uniform(sizeof alnum - 1)];
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string s;
  for (const std::string& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

void print_diagnostics(const GenConfig& config, const LabeledDataset& ds,
                       const std::vector<std::vector<std::string>>& token_lists,
                       const StopwordList& stoplist) {
  std::fputs(render_stats_text(compute_stats(ds)).c_str(), stderr);

  std::vector<std::string> cleaned;
  std::size_t total_tokens = 0;
  cleaned.reserve(token_lists.size());
  for (const auto& tokens : token_lists) {
    cleaned.push_back(join(tokens));
    total_tokens += tokens.size();
  }
  std::fprintf(stderr, "tokens: %zu total, %.1f per document\n", total_tokens,
               static_cast<double>(total_tokens) / static_cast<double>(token_lists.size()));

  for (int n = 1; n <= 3; ++n) {
    NGramConfig ngram;
    ngram.max_n = n;
    std::fprintf(stderr, "vocabulary max_n=%d: %u\n", n, build_vocabulary(cleaned, ngram).size());
  }

  TokenizedDocs content;
  for (const auto& tokens : token_lists) {
    auto kept = remove_stopwords(tokens, stoplist);
    if (!kept.empty()) content.push_back(std::move(kept));
  }
  const auto freqs = word_frequencies(content);
  const std::unordered_set<std::string> synonyms(covid_synonyms().begin(),
                                                 covid_synonyms().end());
  int hits = 0;
  std::fputs("top 30 after stopword removal:", stderr);
  for (std::size_t i = 0; i < freqs.size() && i < 30; ++i) {
    const bool hit = synonyms.count(freqs[i].first) > 0;
    hits += hit;
    std::fprintf(stderr, " %s%s(%llu)", hit ? "*" : "", freqs[i].first.c_str(),
                 static_cast<unsigned long long>(freqs[i].second));
  }
  std::fprintf(stderr, "\nsynonyms in top 30: %d of %zu\n", hits, covid_synonyms().size());
  (void)config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the released misinformation dataset"};
  std::string out_path, stopword_path;
  std::uint64_t seed = 7;
  app.add_option("--out", out_path, "dataset JSON path")->required();
  app.add_option("--stopwords", stopword_path, "Luganda stopword list")->required();
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  try {
    const GenConfig config;
    const StopwordList stoplist = load_stopwords(stopword_path);
    Rng rng(seed);
    const WordPools pools = build_pools(config, stoplist, rng);
    const Samplers samplers(config, pools);

    struct Slot {
      Source source;
      Label label;
    };
    std::vector<Slot> slots;
    auto add = [&](Source s, Label l, int n) {
      for (int i = 0; i < n; ++i) slots.push_back({s, l});
    };
    add(Source::twitter, Label::misinformation, config.tw_mis);
    add(Source::twitter, Label::no_misinformation, config.tw_no);
    add(Source::facebook, Label::misinformation, config.fb_mis);
    add(Source::facebook, Label::no_misinformation, config.fb_no);

    LabeledDataset ds;
    std::vector<std::vector<std::string>> token_lists;
    std::vector<TokenInfo> infos;
    std::vector<Label> truths;
    const CleaningConfig cleaning = CleaningConfig::all_rules_on();
    for (const Slot& slot : slots) {
      Document doc;
      doc.source = slot.source;
      doc.label = slot.label;
      TokenInfo info = make_tokens(config, pools, samplers, slot.label, slot.source, rng);
      doc.text = decorate(info.tokens, slot.source, rng);
      if (clean_text(doc.text, cleaning) != join(info.tokens))
        throw ValidationError("decoration is not invisible to cleaning: " + doc.text);
      ds.documents.push_back(std::move(doc));
      token_lists.push_back(info.tokens);
      truths.push_back(slot.label);
      infos.push_back(std::move(info));
    }
    report_oracles(config, infos, truths,
                   static_cast<int>(pools.bundles[0][0].size()));

    // Per-source shuffles decide the id sequence, then a global shuffle fixes
    // the file order, so neither ids nor row order encode the label.
    std::vector<std::size_t> order(ds.documents.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    int counters[2] = {0, 0};
    char id[32];
    for (std::size_t i : order) {
      Document& doc = ds.documents[i];
      const int s = static_cast<int>(doc.source);
      std::snprintf(id, sizeof id, "%s-%03d", s == 0 ? "tw" : "fb", ++counters[s]);
      doc.id = id;
    }
    std::vector<std::size_t> file_order(order.size());
    for (std::size_t i = 0; i < file_order.size(); ++i) file_order[i] = i;
    rng.shuffle(file_order);
    LabeledDataset shuffled;
    std::vector<std::vector<std::string>> shuffled_tokens;
    for (std::size_t i : file_order) {
      shuffled.documents.push_back(std::move(ds.documents[i]));
      shuffled_tokens.push_back(std::move(token_lists[i]));
    }

    print_diagnostics(config, shuffled, shuffled_tokens, stoplist);
    save_dataset(shuffled, out_path);
    std::fprintf(stderr, "wrote %zu documents to %s\n", shuffled.size(), out_path.c_str());
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
