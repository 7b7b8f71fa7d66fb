#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "litmap/corpus.hpp"
#include "litmap/error.hpp"
#include "litmap/stemmer.hpp"
#include "litmap/stopwords.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

// Runs of adjacent stems. N-grams never cross a segment boundary.
using Segments = std::vector<std::vector<std::string>>;

struct ResolvedLanguage {
  Language language = Language::En;
  bool fell_back = false;  // code missing or without a profile
};

inline ResolvedLanguage resolve_language(const std::optional<std::string>& code) {
  if (code) {
    if (auto l = parse_language(*code)) return {*l, false};
  }
  return {Language::En, true};
}

namespace detail {

inline bool is_hyphen(char32_t cp) { return cp == U'-' || cp == 0x2010 || cp == 0x2011; }
inline bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == 0xA0 || cp == 0x2009 || cp == 0x202F;
}

}  // namespace detail

// Lowercases and splits on whitespace and punctuation. Whitespace only
// separates tokens; punctuation, stopwords, numbers and one-letter tokens also
// end the current segment. Hyphens between letters stay inside the token.
inline Segments tokenize_and_stem(std::string_view input, Language lang, const StopwordSet& stopwords) {
  Segments segments;
  std::vector<std::string> current;
  std::string token;
  std::size_t token_cps = 0;
  bool token_numeric = false;

  auto cut_segment = [&] {
    if (!current.empty()) segments.push_back(std::move(current));
    current.clear();
  };
  auto flush_token = [&] {
    if (token.empty()) return;
    if (token.back() == '-') token.pop_back(), --token_cps;
    if (token_cps <= 1 || token_numeric || stopwords.contains(lang, token)) {
      cut_segment();
    } else {
      current.push_back(stem(token, lang));
    }
    token.clear();
    token_cps = 0;
  };

  std::size_t pos = 0;
  char32_t prev = 0;
  while (pos < input.size()) {
    const char32_t cp = text::to_lower(text::next_code_point(input, pos));
    if (text::is_word_char(cp) || (text::is_combining_mark(cp) && !token.empty())) {
      if (token.empty()) token_numeric = cp >= U'0' && cp <= U'9';
      text::append_utf8(token, cp);
      if (!text::is_combining_mark(cp)) ++token_cps;
    } else if (detail::is_hyphen(cp) && !token.empty() && prev != U'-' && text::is_word_char(prev)) {
      token.push_back('-');
      ++token_cps;
    } else if (detail::is_space(cp)) {
      flush_token();
    } else {
      flush_token();
      cut_segment();
    }
    prev = detail::is_hyphen(cp) ? U'-' : cp;
  }
  flush_token();
  cut_segment();
  return segments;
}

inline std::vector<std::string> flatten(const Segments& segments) {
  std::vector<std::string> out;
  for (const auto& s : segments) out.insert(out.end(), s.begin(), s.end());
  return out;
}

using TermCounts = std::map<std::string, std::uint32_t>;

// Occurrence counts of every contiguous run of 1..max_len stems.
inline TermCounts count_ngrams(const Segments& segments, int max_len) {
  if (max_len < 1 || max_len > 3) throw DomainError("n-gram length must be 1, 2 or 3");
  TermCounts counts;
  for (const auto& seg : segments) {
    for (std::size_t i = 0; i < seg.size(); ++i) {
      std::string gram;
      for (std::size_t len = 1; len <= static_cast<std::size_t>(max_len) && i + len <= seg.size(); ++len) {
        if (len > 1) gram += ' ';
        gram += seg[i + len - 1];
        ++counts[gram];
      }
    }
  }
  return counts;
}

inline std::set<std::string> extract_ngrams(const Segments& segments, int max_len) {
  std::set<std::string> out;
  for (const auto& [gram, n] : count_ngrams(segments, max_len)) out.insert(gram);
  return out;
}

// ---------------------------------------------------------------------------

// Symmetric document co-occurrence counts. The diagonal (document frequency)
// is stored apart; rows hold nonzero off-diagonal entries sorted by partner.
class CooccurrenceMatrix {
 public:
  struct Entry {
    std::uint32_t partner;
    std::uint32_t count;
  };

  CooccurrenceMatrix() = default;
  CooccurrenceMatrix(std::vector<std::string> terms, std::vector<std::uint32_t> df, std::vector<std::vector<Entry>> rows)
      : terms_(std::move(terms)), df_(std::move(df)), rows_(std::move(rows)) {
    for (std::uint32_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], i);
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(std::uint32_t i) const { return terms_[i]; }
  std::uint32_t df(std::uint32_t i) const { return df_[i]; }
  const std::vector<Entry>& row(std::uint32_t i) const { return rows_[i]; }

  std::optional<std::uint32_t> index_of(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t count(std::uint32_t i, std::uint32_t j) const {
    if (i == j) return df_[i];
    const auto& r = rows_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::uint32_t v) { return e.partner < v; });
    return it != r.end() && it->partner == j ? it->count : 0;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::vector<std::vector<Entry>> rows_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

using DocumentTerms = std::vector<std::set<std::string>>;

inline std::vector<std::string> terms_with_min_df(const DocumentTerms& docs, std::size_t min_df) {
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    for (const auto& t : d) ++df[t];
  }
  std::vector<std::string> out;
  for (const auto& [t, n] : df) {
    if (n >= min_df) out.push_back(t);
  }
  return out;
}

// Counts restricted to `candidates`; a pair counts once per document.
inline CooccurrenceMatrix build_cooccurrence(const DocumentTerms& docs, std::vector<std::string> candidates) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < candidates.size(); ++i) index.emplace(candidates[i], i);

  std::vector<std::uint32_t> df(candidates.size(), 0);
  std::unordered_map<std::uint64_t, std::uint32_t> pairs;
  std::vector<std::uint32_t> ids;
  for (const auto& doc : docs) {
    ids.clear();
    for (const auto& t : doc) {
      if (auto it = index.find(t); it != index.end()) ids.push_back(it->second);
    }
    std::sort(ids.begin(), ids.end());
    for (std::size_t a = 0; a < ids.size(); ++a) {
      ++df[ids[a]];
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        ++pairs[(std::uint64_t{ids[a]} << 32) | ids[b]];
      }
    }
  }

  std::vector<std::vector<CooccurrenceMatrix::Entry>> rows(candidates.size());
  for (auto [key, n] : pairs) {
    const auto i = static_cast<std::uint32_t>(key >> 32);
    const auto j = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
    rows[i].push_back({j, n});
    rows[j].push_back({i, n});
  }
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), [](const auto& x, const auto& y) { return x.partner < y.partner; });
  }
  return CooccurrenceMatrix(std::move(candidates), std::move(df), std::move(rows));
}

inline CooccurrenceMatrix build_cooccurrence(const DocumentTerms& docs, std::size_t min_df = 2) {
  return build_cooccurrence(docs, terms_with_min_df(docs, min_df));
}

// ---------------------------------------------------------------------------

class TermScorer {
 public:
  virtual ~TermScorer() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> score(const CooccurrenceMatrix& c) const = 0;
};

// df * (1 - H(p)/log n) over a term's partner distribution p with n nonzero
// partners. Concentrated profiles score near df, uniform ones exactly 0.
class EntropyDeficitScorer : public TermScorer {
 public:
  std::string name() const override { return "entropy-deficit"; }

  static double score_row(const std::vector<std::uint32_t>& partner_counts, double df) {
    double total = 0;
    std::size_t n = 0;
    for (auto c : partner_counts) {
      if (c > 0) total += c, ++n;
    }
    if (n == 0) return 0.0;
    if (n == 1) return df;
    const auto first = std::find_if(partner_counts.begin(), partner_counts.end(), [](auto c) { return c > 0; });
    if (std::all_of(partner_counts.begin(), partner_counts.end(), [&](auto c) { return c == 0 || c == *first; })) {
      return 0.0;
    }
    double h = 0;
    for (auto c : partner_counts) {
      if (c == 0) continue;
      const double p = c / total;
      h -= p * std::log(p);
    }
    return std::clamp(df * (1.0 - h / std::log(static_cast<double>(n))), 0.0, df);
  }

  std::vector<double> score(const CooccurrenceMatrix& c) const override {
    std::vector<double> out(c.size());
    std::vector<std::uint32_t> counts;
    for (std::uint32_t i = 0; i < c.size(); ++i) {
      counts.clear();
      for (const auto& e : c.row(i)) counts.push_back(e.count);
      out[i] = score_row(counts, c.df(i));
    }
    return out;
  }
};

inline std::vector<double> relevance_scores(const CooccurrenceMatrix& c, const TermScorer& scorer = EntropyDeficitScorer{}) {
  if (c.empty()) throw DomainError("relevance scores: empty co-occurrence matrix");
  return scorer.score(c);
}

// ---------------------------------------------------------------------------

struct VocabularyTerm {
  std::string term;
  std::uint32_t df = 0;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

struct TermVocabulary {
  std::vector<VocabularyTerm> terms;  // by rank
  std::size_t k_w = 0;
  std::size_t subsumed = 0;
  std::vector<std::string> warnings;

  std::size_t size() const { return terms.size(); }
  std::optional<std::size_t> index_of(const std::string& term) const {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].term == term) return i;
    }
    return std::nullopt;
  }
};

struct SelectOptions {
  std::size_t k_w = 10000;
  bool subsumption = true;
  double subsumption_ratio = 0.9;
};

namespace detail {

// Contiguous proper sub-runs of a space-joined multi-stem.
inline std::vector<std::string> proper_subterms(const std::string& term) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (true) {
    auto sp = term.find(' ', start);
    words.push_back(term.substr(start, sp - start));
    if (sp == std::string::npos) break;
    start = sp + 1;
  }
  std::vector<std::string> out;
  for (std::size_t len = 1; len < words.size(); ++len) {
    for (std::size_t i = 0; i + len <= words.size(); ++i) {
      std::string s = words[i];
      for (std::size_t k = 1; k < len; ++k) s += ' ' + words[i + k];
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace detail

// Highest scores first; ties by higher df, then term. With subsumption on, a
// selected term contained in a longer selected term whose df is at least
// ratio * its own is dropped and the slot refilled, until stable.
inline TermVocabulary select_top_k(const CooccurrenceMatrix& c, const std::vector<double>& scores,
                                   const SelectOptions& opt = {}) {
  if (opt.k_w < 1) throw DomainError("K_W must be >= 1");
  if (scores.size() != c.size()) throw DomainError("score vector does not match co-occurrence matrix");
  std::vector<std::uint32_t> order(c.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (c.df(a) != c.df(b)) return c.df(a) > c.df(b);
    return c.term(a) < c.term(b);
  });

  std::vector<bool> dropped(c.size(), false);
  std::vector<std::uint32_t> chosen;
  while (true) {
    chosen.clear();
    for (auto i : order) {
      if (chosen.size() == opt.k_w) break;
      if (!dropped[i]) chosen.push_back(i);
    }
    if (!opt.subsumption) break;
    std::unordered_set<std::uint32_t> in_set(chosen.begin(), chosen.end());
    bool changed = false;
    for (auto longer : chosen) {
      for (const auto& sub : detail::proper_subterms(c.term(longer))) {
        auto s = c.index_of(sub);
        if (!s || !in_set.count(*s) || dropped[*s]) continue;
        if (c.df(longer) >= opt.subsumption_ratio * c.df(*s)) {
          dropped[*s] = true;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  TermVocabulary v;
  v.k_w = opt.k_w;
  v.subsumed = static_cast<std::size_t>(std::count(dropped.begin(), dropped.end(), true));
  for (auto i : chosen) v.terms.push_back({c.term(i), c.df(i), scores[i], v.terms.size() + 1});
  if (v.terms.size() < opt.k_w) {
    v.warnings.push_back("only " + std::to_string(v.terms.size()) + " candidate terms for K_W=" +
                         std::to_string(opt.k_w));
  }
  return v;
}

inline std::string vocabulary_csv(const TermVocabulary& v) {
  std::string out = "term,df,score,rank\n";
  for (const auto& t : v.terms) {
    out += text::csv_escape(t.term) + ',' + std::to_string(t.df) + ',' + text::format_double(t.score) + ',' +
           std::to_string(t.rank) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

struct KeywordOptions {
  int max_len = 3;
  std::size_t min_df = 2;
  SelectOptions select;
};

struct KeywordResult {
  std::vector<std::string> doc_ids;  // references with an abstract, in id order
  std::vector<TermCounts> doc_terms;
  CooccurrenceMatrix cooccurrence;   // over terms with df >= min_df
  std::vector<double> scores;
  TermVocabulary vocabulary;
  std::map<std::string, std::size_t> language_fallbacks;  // code ("" if missing) -> docs stemmed as English
  std::vector<std::string> warnings;
};

inline KeywordResult extract_keywords(const Corpus& corpus, const KeywordOptions& opt, const StopwordSet& stopwords,
                                      const TermScorer& scorer = EntropyDeficitScorer{}) {
  KeywordResult r;
  DocumentTerms sets;
  for (const auto& [id, ref] : corpus.references()) {
    if (!ref.abstract || ref.abstract->empty()) continue;
    const auto lang = resolve_language(ref.language);
    if (lang.fell_back) ++r.language_fallbacks[ref.language.value_or("")];
    auto counts = count_ngrams(tokenize_and_stem(*ref.abstract, lang.language, stopwords), opt.max_len);
    std::set<std::string> present;
    for (const auto& [t, n] : counts) present.insert(t);
    r.doc_ids.push_back(id);
    r.doc_terms.push_back(std::move(counts));
    sets.push_back(std::move(present));
  }
  for (const auto& [code, n] : r.language_fallbacks) {
    r.warnings.push_back(std::to_string(n) + " abstract(s) with language '" + (code.empty() ? "none" : code) +
                         "' stemmed with the English profile");
  }
  if (sets.empty()) throw DomainError("keyword extraction: no abstracts in corpus");
  r.cooccurrence = build_cooccurrence(sets, opt.min_df);
  if (r.cooccurrence.empty()) throw DomainError("keyword extraction: no term reaches min_df=" + std::to_string(opt.min_df));
  r.scores = relevance_scores(r.cooccurrence, scorer);
  r.vocabulary = select_top_k(r.cooccurrence, r.scores, opt.select);
  r.warnings.insert(r.warnings.end(), r.vocabulary.warnings.begin(), r.vocabulary.warnings.end());
  return r;
}

}  // namespace litmap
