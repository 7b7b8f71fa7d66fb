#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "litmap/error.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

// Lowercase, accent-folded, alphanumeric-only form of a title. Letters from
// non-Latin scripts are kept (lowercased); everything else is dropped.
inline std::string normalize_title(std::string_view title) {
  std::string key;
  key.reserve(title.size());
  for (std::size_t pos = 0; pos < title.size();) {
    const char32_t cp = text::to_lower(text::next_code_point(title, pos));
    if (cp < 0x80) {
      if (text::is_word_char(cp)) key.push_back(static_cast<char>(cp));
      continue;
    }
    if (text::is_combining_mark(cp)) continue;
    if (auto folded = text::fold_latin(cp); !folded.empty()) {
      key += folded;
      continue;
    }
    if (cp >= 0x370 && text::is_word_char(cp)) text::append_utf8(key, cp);
  }
  return key;
}

struct Reference {
  std::string id;
  std::string title;
  std::string normalized_key;
  std::optional<int> year;
  std::optional<std::string> language;
  std::optional<std::string> abstract;
  std::vector<std::string> cited_ids;
  bool seed = false;
  int depth = 0;

  bool operator==(const Reference&) const = default;
};

enum class CorpusFormat { Jsonl, CsvPair };

// Outcome of inserting one record into a corpus.
struct MergeResult {
  std::string canonical_id;
  bool inserted = false;    // new reference created
  bool key_merged = false;  // folded into an existing reference with the same title key
};

// Id-indexed set of references. Records are merged on insertion by id, then
// by normalized title key; call finalize() once all records are in.
class Corpus {
 public:
  std::string provenance;

  const std::map<std::string, Reference>& references() const { return refs_; }
  std::size_t size() const { return refs_.size(); }
  bool empty() const { return refs_.empty(); }
  bool contains(const std::string& id) const { return refs_.count(resolve(id)) > 0; }

  const Reference* find(const std::string& id) const {
    auto it = refs_.find(resolve(id));
    return it == refs_.end() ? nullptr : &it->second;
  }
  Reference* find_mutable(const std::string& id) {
    auto it = refs_.find(resolve(id));
    return it == refs_.end() ? nullptr : &it->second;
  }

  // Id a record would map to, following title-key merges.
  std::string resolve(const std::string& id) const {
    auto it = aliases_.find(id);
    return it == aliases_.end() ? id : it->second;
  }

  MergeResult add_or_merge(Reference rec) {
    if (rec.depth < 0 || rec.depth > 2) {
      throw DomainError("reference " + rec.id + ": depth must be 0, 1 or 2");
    }
    rec.normalized_key = normalize_title(rec.title);
    MergeResult result;
    const std::string target = resolve(rec.id);
    if (auto it = refs_.find(target); it != refs_.end()) {
      Reference& existing = it->second;
      if (!rec.normalized_key.empty() && !existing.normalized_key.empty() &&
          rec.normalized_key != existing.normalized_key && target == rec.id) {
        throw ParseError("duplicate id '" + rec.id + "' with conflicting titles: \"" +
                         existing.title + "\" vs \"" + rec.title + "\"");
      }
      if (existing.title.empty() && !rec.title.empty()) {
        existing.title = rec.title;
        existing.normalized_key = rec.normalized_key;
        key_index_.emplace(existing.normalized_key, existing.id);
      }
      merge_fields(existing, rec);
      result.canonical_id = existing.id;
      return result;
    }
    if (!rec.normalized_key.empty()) {
      if (auto kt = key_index_.find(rec.normalized_key); kt != key_index_.end()) {
        Reference& existing = refs_.at(kt->second);
        aliases_[rec.id] = existing.id;
        merge_fields(existing, rec);
        ++key_merges_;
        result.canonical_id = existing.id;
        result.key_merged = true;
        return result;
      }
      key_index_.emplace(rec.normalized_key, rec.id);
    }
    result.canonical_id = rec.id;
    result.inserted = true;
    refs_.emplace(rec.id, std::move(rec));
    return result;
  }

  // Rewrites cited ids through title-key aliases, drops self-citations and
  // duplicates, and recounts dangling targets.
  void finalize() {
    self_citations_dropped_ = 0;
    dangling_links_ = 0;
    std::set<std::string> dangling;
    for (auto& [id, ref] : refs_) {
      std::vector<std::string> cites;
      std::unordered_set<std::string> seen;
      for (const auto& raw : ref.cited_ids) {
        const std::string target = resolve(raw);
        if (target == id) {
          ++self_citations_dropped_;
          continue;
        }
        if (!seen.insert(target).second) continue;
        cites.push_back(target);
        if (!refs_.count(target)) {
          ++dangling_links_;
          dangling.insert(target);
        }
      }
      ref.cited_ids = std::move(cites);
    }
    dangling_targets_ = dangling.size();
  }

  // Cited ids that resolve to members, in stored order.
  std::vector<std::string> resolved_citations(const Reference& ref) const {
    std::vector<std::string> out;
    for (const auto& c : ref.cited_ids) {
      if (refs_.count(c) && c != ref.id) out.push_back(c);
    }
    return out;
  }

  std::size_t key_merges() const { return key_merges_; }
  std::size_t dangling_targets() const { return dangling_targets_; }
  std::size_t dangling_links() const { return dangling_links_; }
  std::size_t self_citations_dropped() const { return self_citations_dropped_; }

  // Content equality: references and their fields only.
  bool same_content(const Corpus& other) const { return refs_ == other.refs_; }

 private:
  static void merge_fields(Reference& into, const Reference& from) {
    if (!into.year && from.year) into.year = from.year;
    if (!into.language && from.language) into.language = from.language;
    if (!into.abstract && from.abstract) into.abstract = from.abstract;
    std::unordered_set<std::string> have(into.cited_ids.begin(), into.cited_ids.end());
    for (const auto& c : from.cited_ids) {
      if (have.insert(c).second) into.cited_ids.push_back(c);
    }
    into.seed = into.seed || from.seed;
    into.depth = std::min(into.depth, from.depth);
  }

  std::map<std::string, Reference> refs_;
  std::unordered_map<std::string, std::string> key_index_;
  std::unordered_map<std::string, std::string> aliases_;
  std::size_t key_merges_ = 0;
  std::size_t dangling_targets_ = 0;
  std::size_t dangling_links_ = 0;
  std::size_t self_citations_dropped_ = 0;
};

// ---------------------------------------------------------------------------
// JSONL records: {"id", "title", "year"?, "lang"?, "abstract"?, "cites"}
// plus optional "depth" and "seed" written by the crawler.

inline Reference reference_from_json(const nlohmann::json& j, const std::string& source,
                                     std::size_t line) {
  auto fail = [&](const std::string& what) -> ParseError { return ParseError(source, line, what); };
  if (!j.is_object()) throw fail("record is not a JSON object");
  Reference r;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw fail("missing or empty string field 'id'");
  }
  r.id = id->get<std::string>();
  if (auto t = j.find("title"); t != j.end() && !t->is_null()) {
    if (!t->is_string()) throw fail("field 'title' must be a string");
    r.title = t->get<std::string>();
  }
  if (auto y = j.find("year"); y != j.end() && !y->is_null()) {
    if (!y->is_number_integer()) throw fail("field 'year' must be an integer");
    r.year = y->get<int>();
  }
  if (auto l = j.find("lang"); l != j.end() && !l->is_null()) {
    if (!l->is_string()) throw fail("field 'lang' must be a string");
    r.language = l->get<std::string>();
  }
  if (auto a = j.find("abstract"); a != j.end() && !a->is_null()) {
    if (!a->is_string()) throw fail("field 'abstract' must be a string");
    r.abstract = a->get<std::string>();
  }
  if (auto c = j.find("cites"); c != j.end() && !c->is_null()) {
    if (!c->is_array()) throw fail("field 'cites' must be an array");
    for (const auto& e : *c) {
      if (!e.is_string()) throw fail("field 'cites' must contain strings");
      r.cited_ids.push_back(e.get<std::string>());
    }
  }
  if (auto d = j.find("depth"); d != j.end() && !d->is_null()) {
    if (!d->is_number_integer()) throw fail("field 'depth' must be an integer");
    r.depth = d->get<int>();
    if (r.depth < 0 || r.depth > 2) throw fail("field 'depth' must be 0, 1 or 2");
  }
  if (auto s = j.find("seed"); s != j.end() && !s->is_null()) {
    if (!s->is_boolean()) throw fail("field 'seed' must be a boolean");
    r.seed = s->get<bool>();
  }
  return r;
}

inline nlohmann::ordered_json reference_to_json(const Reference& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["title"] = r.title;
  if (r.year) j["year"] = *r.year;
  if (r.language) j["lang"] = *r.language;
  if (r.abstract) j["abstract"] = *r.abstract;
  j["cites"] = r.cited_ids;
  if (r.depth != 0) j["depth"] = r.depth;
  if (r.seed) j["seed"] = true;
  return j;
}

inline std::vector<Reference> parse_jsonl_records(std::string_view data, const std::string& source) {
  std::vector<Reference> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string_view::npos) end = data.size();
    ++line_no;
    std::string_view line = data.substr(start, end - start);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    if (!line.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
      }
      out.push_back(reference_from_json(j, source, line_no));
    }
    if (end == data.size()) break;
    start = end + 1;
  }
  return out;
}

namespace detail {

inline Corpus corpus_from_records(std::vector<Reference> records, std::string provenance) {
  Corpus corpus;
  corpus.provenance = std::move(provenance);
  for (auto& r : records) corpus.add_or_merge(std::move(r));
  corpus.finalize();
  return corpus;
}

inline std::vector<Reference> read_csv_pair(const std::filesystem::path& nodes_path,
                                            const std::filesystem::path& edges_path) {
  const std::string nsrc = nodes_path.string();
  auto nodes = text::parse_csv(text::read_file(nodes_path), nsrc);
  if (nodes.empty()) throw ParseError(nsrc, 1, "missing header");
  const std::vector<std::string> want = {"id", "title", "year", "lang"};
  if (nodes[0].fields != want) throw ParseError(nsrc, 1, "expected header id,title,year,lang");
  std::vector<Reference> records;
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const auto& row = nodes[i];
    if (row.fields.size() != 4) throw ParseError(nsrc, row.line, "expected 4 fields");
    Reference r;
    r.id = row.fields[0];
    if (r.id.empty()) throw ParseError(nsrc, row.line, "empty id");
    r.title = row.fields[1];
    if (!row.fields[2].empty()) {
      try {
        std::size_t used = 0;
        r.year = std::stoi(row.fields[2], &used);
        if (used != row.fields[2].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError(nsrc, row.line, "year is not an integer: " + row.fields[2]);
      }
    }
    if (!row.fields[3].empty()) r.language = row.fields[3];
    by_id.emplace(r.id, records.size());
    records.push_back(std::move(r));
  }
  if (std::filesystem::exists(edges_path)) {
    const std::string esrc = edges_path.string();
    auto edges = text::parse_csv(text::read_file(edges_path), esrc);
    if (edges.empty() || edges[0].fields != std::vector<std::string>{"source", "target"}) {
      throw ParseError(esrc, 1, "expected header source,target");
    }
    for (std::size_t i = 1; i < edges.size(); ++i) {
      const auto& row = edges[i];
      if (row.fields.size() != 2) throw ParseError(esrc, row.line, "expected 2 fields");
      auto it = by_id.find(row.fields[0]);
      if (it == by_id.end()) throw ParseError(esrc, row.line, "unknown source id " + row.fields[0]);
      records[it->second].cited_ids.push_back(row.fields[1]);
    }
  }
  return records;
}

}  // namespace detail

// Reads a corpus. For CsvPair, `path` is either a directory holding
// nodes.csv/edges.csv or the nodes.csv file itself.
inline Corpus ingest_corpus(const std::filesystem::path& path, CorpusFormat format) {
  if (!std::filesystem::exists(path)) throw Error("no such file: " + path.string());
  if (format == CorpusFormat::Jsonl) {
    return detail::corpus_from_records(parse_jsonl_records(text::read_file(path), path.string()),
                                       "jsonl:" + path.filename().string());
  }
  std::filesystem::path nodes = path, edges;
  if (std::filesystem::is_directory(path)) {
    nodes = path / "nodes.csv";
    edges = path / "edges.csv";
  } else {
    edges = path.parent_path() / "edges.csv";
  }
  return detail::corpus_from_records(detail::read_csv_pair(nodes, edges),
                                     "csv:" + nodes.parent_path().filename().string());
}

inline std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& [id, ref] : corpus.references()) {
    out += reference_to_json(ref).dump();
    out.push_back('\n');
  }
  return out;
}

inline void export_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  text::write_file(path, corpus_to_jsonl(corpus));
}

// nodes.csv and edges.csv contents.
inline std::pair<std::string, std::string> corpus_to_csv_pair(const Corpus& corpus) {
  std::string nodes = "id,title,year,lang\n";
  std::string edges = "source,target\n";
  for (const auto& [id, ref] : corpus.references()) {
    nodes += text::csv_escape(id) + ',' + text::csv_escape(ref.title) + ',' +
             (ref.year ? std::to_string(*ref.year) : "") + ',' +
             text::csv_escape(ref.language.value_or("")) + '\n';
    for (const auto& c : ref.cited_ids) edges += text::csv_escape(id) + ',' + text::csv_escape(c) + '\n';
  }
  return {std::move(nodes), std::move(edges)};
}

inline void export_csv_pair(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto [nodes, edges] = corpus_to_csv_pair(corpus);
  text::write_file(dir / "nodes.csv", nodes);
  text::write_file(dir / "edges.csv", edges);
}

inline CorpusFormat parse_corpus_format(std::string_view s) {
  if (s == "jsonl") return CorpusFormat::Jsonl;
  if (s == "csv" || s == "csv-pair") return CorpusFormat::CsvPair;
  throw ConfigError("unknown corpus format '" + std::string(s) + "' (expected jsonl or csv-pair)");
}

// ---------------------------------------------------------------------------

struct CorpusStats {
  std::size_t n_references = 0;
  std::size_t n_citation_links = 0;
  double abstract_coverage = 0.0;
  std::map<std::string, double> language_shares;
  double average_degree = 0.0;
  double average_in_degree = 0.0;
  double directed_density = 0.0;
};

// Descriptive statistics over resolved links only. Languages that are
// missing or "und" are left out of the shares.
inline CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) throw DomainError("corpus_stats: empty corpus");
  CorpusStats s;
  s.n_references = corpus.size();
  std::size_t with_abstract = 0, with_lang = 0;
  std::map<std::string, std::size_t> lang_counts;
  for (const auto& [id, ref] : corpus.references()) {
    s.n_citation_links += corpus.resolved_citations(ref).size();
    if (ref.abstract && !ref.abstract->empty()) ++with_abstract;
    if (ref.language && !ref.language->empty() && *ref.language != "und") {
      ++lang_counts[*ref.language];
      ++with_lang;
    }
  }
  const auto v = static_cast<double>(s.n_references);
  const auto e = static_cast<double>(s.n_citation_links);
  s.abstract_coverage = static_cast<double>(with_abstract) / v;
  for (const auto& [lang, n] : lang_counts) {
    s.language_shares[lang] = static_cast<double>(n) / static_cast<double>(with_lang);
  }
  s.average_degree = 2.0 * e / v;
  s.average_in_degree = e / v;
  s.directed_density = s.n_references > 1 ? e / (v * (v - 1.0)) : 0.0;
  return s;
}

inline nlohmann::ordered_json to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["n_references"] = s.n_references;
  j["n_citation_links"] = s.n_citation_links;
  j["abstract_coverage"] = s.abstract_coverage;
  j["language_shares"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.language_shares) j["language_shares"][k] = v;
  j["average_degree"] = s.average_degree;
  j["average_in_degree"] = s.average_in_degree;
  j["directed_density"] = s.directed_density;
  return j;
}

}  // namespace litmap
