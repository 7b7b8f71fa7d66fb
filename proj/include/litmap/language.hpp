#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "litmap/text_util.hpp"

namespace litmap {

namespace detail {

struct LanguageProfile {
  std::string_view code;
  std::vector<std::string_view> trigrams;  // most frequent first, '_' marks a word boundary
};

inline const std::vector<LanguageProfile>& language_profiles() {
  static const std::vector<LanguageProfile> profiles = {
      {"en", {"_th", "the", "he_", "_an", "nd_", "and", "ion", "_of", "of_", "ed_", "tio",
              "_in", "ing", "ng_", "_to", "to_", "er_", "ent", "es_", "in_", "re_", "is_",
              "on_", "_co", "at_", "ati", "_re", "al_", "_a_", "ly_", "_be", "_wh", "for",
              "_fo", "or_", "ter", "_pr", "hat", "tha", "ts_", "_is", "his", "_ha", "ate",
              "ons", "ver", "_st", "_ma", "men", "nt_", "st_", "_wi", "ith", "wit", "_on",
              "ere", "ble", "ty_", "ic_", "an_"}},
      {"fr", {"_de", "es_", "de_", "_le", "ent", "le_", "nt_", "la_", "_la", "ion", "_et",
              "et_", "les", "_pr", "re_", "ne_", "_co", "tio", "on_", "_re", "des", "_da",
              "_un", "ons", "ans", "_qu", "que", "ue_", "men", "dan", "_en", "en_", "ur_",
              "our", "_po", "par", "_pa", "une", "eme", "est", "_es", "_su", "ati", "ait",
              "ns_", "_sa", "aux", "_au", "ux_", "_du", "du_", "te_", "it_", "_ce", "ces",
              "_l_", "_d_", "eau", "ére", "ré_"}},
      {"es", {"_de", "de_", "os_", "_la", "la_", "as_", "el_", "_el", "en_", "_en", "es_",
              "ión", "_co", "ent", "ció", "aci", "_qu", "que", "ue_", "_lo", "los", "_pr",
              "_y_", "ado", "nte", "ra_", "con", "on_", "_se", "del", "par", "_pa", "ara",
              "_es", "est", "_un", "una", "na_", "dad", "ida", "ad_", "_po", "por", "or_",
              "ien", "_re", "_su", "las", "_al", "tra", "ón_", "_ur", "ana", "ano", "_ci",
              "ivi", "_me", "mie", "nto", "to_"}},
      {"de", {"en_", "er_", "_de", "der", "ich", "ein", "sch", "_di", "die", "ie_", "ch_",
              "_ei", "und", "_un", "nd_", "den", "che", "in_", "cht", "ung", "ng_", "_da",
              "te_", "_ge", "gen", "ine", "_be", "_zu", "zu_", "ten", "_in", "es_", "_ve",
              "ver", "_au", "auf", "ter", "ers", "das", "as_", "_si", "sie", "ist", "st_",
              "_is", "_mi", "mit", "it_", "lic", "_so", "_ni", "nic", "eit", "hen", "_we",
              "ere", "ber", "hr_", "_ü", "ger"}},
  };
  return profiles;
}

inline std::vector<std::string> text_trigram_ranking(std::string_view text, std::size_t limit) {
  std::unordered_map<std::string, std::size_t> counts;
  std::vector<std::string> words;
  std::string word;
  for (std::size_t pos = 0; pos <= text.size();) {
    char32_t cp = ' ';
    if (pos < text.size()) cp = text::to_lower(text::next_code_point(text, pos));
    else ++pos;
    const bool letter = text::is_word_char(cp) && !(cp >= '0' && cp <= '9');
    if (letter) {
      text::append_utf8(word, cp);
    } else if (!word.empty()) {
      words.push_back("_" + word + "_");
      word.clear();
    }
  }
  for (const auto& w : words) {
    // trigrams over code points
    std::vector<std::string> cps;
    for (std::size_t p = 0; p < w.size();) {
      std::string one;
      text::append_utf8(one, text::next_code_point(w, p));
      cps.push_back(std::move(one));
    }
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) ++counts[cps[i] + cps[i + 1] + cps[i + 2]];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < limit; ++i) out.push_back(ranked[i].first);
  return out;
}

}  // namespace detail

// Out-of-place trigram ranking against small built-in profiles (en/fr/es/de).
// Returns "und" for short or unrecognisable text.
inline std::string detect_language(std::string_view text) {
  std::size_t letters = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    if (text::is_word_char(text::next_code_point(text, pos))) ++letters;
  }
  if (letters < 20) return "und";
  const auto doc = detail::text_trigram_ranking(text, 300);
  std::string best = "und";
  double best_score = 0.0;
  for (const auto& profile : detail::language_profiles()) {
    std::unordered_map<std::string_view, std::size_t> rank;
    for (std::size_t i = 0; i < profile.trigrams.size(); ++i) rank.emplace(profile.trigrams[i], i);
    const std::size_t max_penalty = profile.trigrams.size();
    std::size_t distance = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < doc.size(); ++i) {
      auto it = rank.find(doc[i]);
      if (it == rank.end()) {
        distance += max_penalty;
      } else {
        ++hits;
        distance += i > it->second ? std::min(i - it->second, max_penalty)
                                   : std::min(it->second - i, max_penalty);
      }
    }
    // similarity in [0,1]: 1 = identical ordering
    const double score = 1.0 - static_cast<double>(distance) /
                                   static_cast<double>(doc.size() * max_penalty);
    if (hits >= 3 && score > best_score) {
      best_score = score;
      best = std::string(profile.code);
    }
  }
  return best;
}

}  // namespace litmap
