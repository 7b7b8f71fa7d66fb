#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "litmap/corpus.hpp"
#include "litmap/crawler.hpp"
#include "litmap/random.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

// Two-field test corpus: dense citation inside each field, sparse across,
// and abstracts written from disjoint field vocabularies plus shared
// generic words.
struct SyntheticOptions {
  std::size_t seeds_per_field = 5;
  std::size_t depth1_per_field = 45;
  std::size_t depth2_per_field = 100;
  std::size_t within_citations = 9;  // besides the parent link; 0..2 more at random
  double cross_citation_prob = 0.08;
  double abstract_share = 0.85;
  double missing_language_share = 0.1;
  double cross_vocabulary_prob = 0.15;
  std::uint64_t seed = 42;
};

struct SyntheticPaper {
  std::string id;
  std::string title;
  int year = 0;
  int field = 0;
  int level = 0;  // planned crawl depth
  std::vector<std::string> cites;
  std::optional<std::string> abstract;
  std::optional<std::string> language;
};

struct SyntheticCorpus {
  SyntheticOptions options;
  std::vector<SyntheticPaper> papers;  // id order
};

inline const std::array<std::vector<std::string>, 2>& synthetic_field_terms() {
  static const std::array<std::vector<std::string>, 2> terms = {{
      {"land use", "transport network", "travel demand", "accessibility", "residential location",
       "commuting pattern", "public transit", "traffic congestion", "modal choice", "urban sprawl",
       "housing market", "trip generation", "road pricing", "job location", "rail investment"},
      {"habitat fragmentation", "species richness", "biodiversity", "ecosystem service", "landscape connectivity",
       "population dynamic", "forest cover", "wetland restoration", "soil carbon", "pollinator decline",
       "invasive species", "river basin", "seed dispersal", "predator abundance", "coral reef"},
  }};
  return terms;
}

inline const std::vector<std::string>& synthetic_generic_terms() {
  static const std::vector<std::string> terms = {"model",     "spatial analysis", "simulation", "data",
                                                 "framework", "approach",         "case study", "empirical evidence",
                                                 "policy"};
  return terms;
}

namespace detail {

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[uniform_index(rng, v.size())];
}

inline std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

inline std::string synthetic_abstract(int field, Rng& rng, double cross_prob) {
  // only stopwords between slots, so every candidate is a planted term
  static const std::vector<std::string> frames = {
      "{A} and {B} with {G}.",
      "The {A} of the {B} in this {G}.",
      "{A} for {B} under the {G}.",
      "Between {A} and {B} on the {G}.",
  };
  const auto& own = synthetic_field_terms()[field];
  const auto& other = synthetic_field_terms()[1 - field];
  const auto& generic = synthetic_generic_terms();
  std::string out;
  const std::size_t sentences = 3 + uniform_index(rng, 2);
  const bool crosses = bernoulli(rng, cross_prob);
  for (std::size_t s = 0; s < sentences; ++s) {
    std::string a = pick(own, rng), b = pick(own, rng);
    while (b == a) b = pick(own, rng);
    if (crosses && s == sentences - 1) b = pick(other, rng);
    std::string frame = pick(frames, rng);
    auto put = [&frame](const std::string& slot, const std::string& v) {
      const auto at = frame.find(slot);
      frame.replace(at, slot.size(), v);
    };
    put("{A}", a);
    put("{B}", b);
    put("{G}", pick(generic, rng));
    frame = capitalized(frame);
    out += (out.empty() ? "" : " ") + frame;
  }
  return out;
}

}  // namespace detail

inline SyntheticCorpus generate_synthetic(const SyntheticOptions& opt = {}) {
  Rng rng(opt.seed);
  SyntheticCorpus sc;
  sc.options = opt;
  const std::size_t per_field = opt.seeds_per_field + opt.depth1_per_field + opt.depth2_per_field;
  const std::size_t n = 2 * per_field;

  // ids are shuffled so that neither field nor level can be read off them
  std::vector<std::size_t> slot(n);
  for (std::size_t i = 0; i < n; ++i) slot[i] = i;
  shuffle(slot, rng);
  std::vector<SyntheticPaper> papers(n);
  std::array<std::array<std::vector<std::size_t>, 3>, 2> by_level;
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = papers[i];
    char buf[16];
    std::snprintf(buf, sizeof buf, "W%04zu", slot[i] + 1);
    p.id = buf;
    p.field = static_cast<int>(i / per_field);
    const std::size_t r = i % per_field;
    p.level = r < opt.seeds_per_field ? 0 : r < opt.seeds_per_field + opt.depth1_per_field ? 1 : 2;
    by_level[p.field][p.level].push_back(i);
  }

  const auto& generic = synthetic_generic_terms();
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = papers[i];
    const auto& own = synthetic_field_terms()[p.field];
    std::string a = detail::pick(own, rng), b = detail::pick(own, rng);
    while (b == a) b = detail::pick(own, rng);
    p.title = detail::capitalized(a) + " and " + b + ": " + detail::pick(generic, rng) + " " + p.id.substr(1);
    p.year = 1990 + static_cast<int>(uniform_index(rng, 30));

    std::set<std::size_t> cited;
    if (p.level > 0) cited.insert(detail::pick(by_level[p.field][p.level - 1], rng));
    const std::size_t extra = opt.within_citations + uniform_index(rng, 3);
    const std::size_t base = static_cast<std::size_t>(p.field) * per_field;
    while (cited.size() < extra + (p.level > 0 ? 1 : 0)) {
      const std::size_t j = base + uniform_index(rng, per_field);
      if (j != i) cited.insert(j);
    }
    if (bernoulli(rng, opt.cross_citation_prob)) {
      cited.insert(static_cast<std::size_t>(1 - p.field) * per_field + uniform_index(rng, per_field));
    }
    for (auto j : cited) p.cites.push_back(papers[j].id);
    std::sort(p.cites.begin(), p.cites.end());

    if (bernoulli(rng, opt.abstract_share)) {
      p.abstract = detail::synthetic_abstract(p.field, rng, opt.cross_vocabulary_prob);
      if (!bernoulli(rng, opt.missing_language_share)) p.language = "en";
    }
  }
  std::sort(papers.begin(), papers.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  sc.papers = std::move(papers);
  return sc;
}

inline const char* kSyntheticConfig =
    "# Two-field synthetic corpus; see truth.csv for the planted fields.\n"
    "corpus = seed.jsonl\n"
    "fixtures_dir = fixtures\n"
    "depth = 2\n"
    "enrich = true\n"
    "min_degree = 2\n"
    "bootstrap = 100\n"
    "min_df = 2\n"
    "k_w = 300\n"
    "semantic_mode = sweep\n"
    "theta_grid = 1:13:3\n"
    "kmax_grid = 20:140:20\n"
    "interdisc_bootstrap = 100\n"
    "seed = 42\n";

// Writes seed.jsonl, fixtures/citing, fixtures/meta, truth.csv and litmap.conf.
inline void write_synthetic(const SyntheticCorpus& sc, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "fixtures" / "citing");
  fs::create_directories(dir / "fixtures" / "meta");

  auto record = [](const SyntheticPaper& p) {
    Reference r;
    r.id = p.id;
    r.title = p.title;
    r.year = p.year;
    r.cited_ids = p.cites;
    return reference_to_json(r).dump();
  };

  std::string seeds, truth = "id,field,level\n";
  std::map<std::string, std::string> citing;  // cited id -> jsonl
  for (const auto& p : sc.papers) {
    if (p.level == 0) seeds += record(p) + '\n';
    for (const auto& c : p.cites) citing[c] += record(p) + '\n';
    truth += p.id + ',' + std::to_string(p.field) + ',' + std::to_string(p.level) + '\n';
    if (p.abstract) {
      nlohmann::ordered_json m;
      m["abstract"] = *p.abstract;
      if (p.language) m["lang"] = *p.language;
      text::write_file(dir / "fixtures" / "meta" / (fixture_key(p.id) + ".json"), m.dump() + '\n');
    }
  }
  for (const auto& [id, body] : citing) {
    text::write_file(dir / "fixtures" / "citing" / (fixture_key(id) + ".jsonl"), body);
  }
  text::write_file(dir / "seed.jsonl", seeds);
  text::write_file(dir / "truth.csv", truth);
  text::write_file(dir / "litmap.conf", kSyntheticConfig);
}

}  // namespace litmap
