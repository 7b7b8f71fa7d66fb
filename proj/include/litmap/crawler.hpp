#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "litmap/corpus.hpp"
#include "litmap/error.hpp"
#include "litmap/language.hpp"
#include "litmap/parallel.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

struct ProviderCapabilities {
  std::size_t max_page_size = 0;  // 0 = unbounded
  double rate_limit_hint = 0.0;   // requests per second, 0 = unlimited
};

// Source of "works citing X" records. Implementations must tolerate
// concurrent calls.
class CitationProvider {
 public:
  virtual ~CitationProvider() = default;
  virtual ProviderCapabilities capabilities() const = 0;
  // Throws ProviderError when the query fails; an empty result is not a failure.
  virtual std::vector<Reference> citing(const Reference& cited) = 0;
};

struct MetadataRecord {
  std::optional<std::string> abstract;
  std::optional<std::string> language;
};

class MetadataProvider {
 public:
  virtual ~MetadataProvider() = default;
  virtual ProviderCapabilities capabilities() const = 0;
  virtual std::optional<MetadataRecord> lookup(const Reference& ref) = 0;
};

// File-system-safe form of a reference id, used to name fixture files.
inline std::string fixture_key(std::string_view id) {
  std::string key;
  key.reserve(id.size());
  for (char c : id) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    key.push_back(safe ? c : '_');
  }
  if (key.empty() || key == "." || key == "..") key = "_" + key;
  return key;
}

inline MetadataRecord metadata_from_json(const nlohmann::json& j, const std::string& source) {
  if (!j.is_object()) throw ProviderError(source + ": metadata is not a JSON object");
  MetadataRecord m;
  if (auto a = j.find("abstract"); a != j.end() && !a->is_null()) {
    if (!a->is_string()) throw ProviderError(source + ": 'abstract' must be a string");
    if (!a->get<std::string>().empty()) m.abstract = a->get<std::string>();
  }
  if (auto l = j.find("lang"); l != j.end() && !l->is_null()) {
    if (!l->is_string()) throw ProviderError(source + ": 'lang' must be a string");
    m.language = l->get<std::string>();
  }
  return m;
}

// Reads fixtures/citing/<key>.jsonl. A missing file means nobody cites the key.
class FixtureCitationProvider : public CitationProvider {
 public:
  explicit FixtureCitationProvider(std::filesystem::path root) : root_(std::move(root)) {
    if (!std::filesystem::is_directory(root_)) throw ProviderError("fixture directory not found: " + root_.string());
  }

  ProviderCapabilities capabilities() const override { return {}; }

  std::vector<Reference> citing(const Reference& cited) override {
    const auto path = root_ / "citing" / (fixture_key(cited.id) + ".jsonl");
    if (!std::filesystem::exists(path)) return {};
    try {
      return parse_jsonl_records(text::read_file(path), path.string());
    } catch (const Error& e) {
      throw ProviderError(e.what());
    }
  }

 private:
  std::filesystem::path root_;
};

// Reads fixtures/meta/<key>.json holding {"abstract": ..., "lang": ...}.
class FixtureMetadataProvider : public MetadataProvider {
 public:
  explicit FixtureMetadataProvider(std::filesystem::path root) : root_(std::move(root)) {
    if (!std::filesystem::is_directory(root_)) throw ProviderError("fixture directory not found: " + root_.string());
  }

  ProviderCapabilities capabilities() const override { return {}; }

  std::optional<MetadataRecord> lookup(const Reference& ref) override {
    const auto path = root_ / "meta" / (fixture_key(ref.id) + ".json");
    if (!std::filesystem::exists(path)) return std::nullopt;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text::read_file(path));
    } catch (const std::exception& e) {
      throw ProviderError(path.string() + ": " + e.what());
    }
    return metadata_from_json(j, path.string());
  }

 private:
  std::filesystem::path root_;
};

// ---------------------------------------------------------------------------

struct ProviderFailure {
  std::string key;
  std::string message;
};

struct CrawlReport {
  std::vector<std::size_t> fetched_per_depth;  // index = depth; [0] is always 0
  std::size_t queries = 0;
  std::size_t dedup_merges = 0;
  std::size_t abstracts_added = 0;
  std::size_t languages_detected = 0;
  std::vector<ProviderFailure> provider_errors;
  double abstract_coverage = 0.0;

  std::size_t total_fetched() const {
    std::size_t n = 0;
    for (auto f : fetched_per_depth) n += f;
    return n;
  }
};

inline nlohmann::ordered_json to_json(const CrawlReport& r) {
  nlohmann::ordered_json j;
  j["fetched_per_depth"] = r.fetched_per_depth;
  j["queries"] = r.queries;
  j["dedup_merges"] = r.dedup_merges;
  j["abstracts_added"] = r.abstracts_added;
  j["languages_detected"] = r.languages_detected;
  j["provider_errors"] = nlohmann::ordered_json::array();
  for (const auto& e : r.provider_errors) {
    j["provider_errors"].push_back({{"key", e.key}, {"message", e.message}});
  }
  j["abstract_coverage"] = r.abstract_coverage;
  return j;
}

struct CrawlResult {
  Corpus corpus;
  CrawlReport report;
};

struct CrawlOptions {
  std::size_t parallelism = 1;
};

namespace detail {

inline double abstract_coverage(const Corpus& corpus) {
  if (corpus.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& [id, ref] : corpus.references()) {
    if (ref.abstract && !ref.abstract->empty()) ++n;
  }
  return static_cast<double>(n) / static_cast<double>(corpus.size());
}

}  // namespace detail

// Breadth-first reverse citation expansion. Works citing depth-d members are
// added at depth d+1 until max_depth; links are stored citing -> cited.
inline CrawlResult expand_citations(const Corpus& seed, int max_depth, CitationProvider& provider,
                                    const CrawlOptions& options = {}) {
  if (max_depth < 1 || max_depth > 2) {
    throw DomainError("expand_citations: max_depth must be 1 or 2");
  }
  CrawlResult result{seed, {}};
  Corpus& corpus = result.corpus;
  CrawlReport& report = result.report;
  report.fetched_per_depth.assign(static_cast<std::size_t>(max_depth) + 1, 0);

  std::vector<std::string> frontier;
  for (const auto& [id, ref] : seed.references()) {
    if (ref.depth == 0) frontier.push_back(id);
  }
  for (const auto& id : frontier) corpus.find_mutable(id)->seed = true;

  using Answer = std::variant<std::vector<Reference>, std::string>;
  for (int depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
    std::vector<Reference> queried;
    queried.reserve(frontier.size());
    for (const auto& id : frontier) queried.push_back(*corpus.find(id));
    auto answers = detail::bounded_map(queried, options.parallelism, [&provider](const Reference& r) {
      try {
        return Answer{provider.citing(r)};
      } catch (const std::exception& e) {
        return Answer{std::string(e.what())};
      }
    });
    report.queries += answers.size();

    std::vector<std::string> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      if (auto* err = std::get_if<std::string>(&answers[i])) {
        report.provider_errors.push_back({frontier[i], *err});
        continue;
      }
      for (auto& rec : std::get<std::vector<Reference>>(answers[i])) {
        rec.depth = depth + 1;
        rec.seed = false;
        rec.cited_ids.push_back(frontier[i]);
        const MergeResult m = corpus.add_or_merge(std::move(rec));
        if (m.inserted) {
          ++report.fetched_per_depth[static_cast<std::size_t>(depth) + 1];
          next.push_back(m.canonical_id);
        }
        if (m.key_merged) ++report.dedup_merges;
      }
    }
    frontier = std::move(next);
  }
  if (report.queries > 0 && report.provider_errors.size() == report.queries) {
    throw ProviderError("expand_citations: every provider query failed (first: " +
                        report.provider_errors.front().message + ")");
  }
  corpus.finalize();
  report.abstract_coverage = detail::abstract_coverage(corpus);
  return result;
}

// Attaches abstracts and languages without overwriting existing values.
// Missing languages fall back to trigram detection on the abstract.
inline CrawlResult enrich_abstracts(const Corpus& input, MetadataProvider& provider,
                                    const CrawlOptions& options = {}) {
  CrawlResult result{input, {}};
  Corpus& corpus = result.corpus;
  CrawlReport& report = result.report;
  std::vector<Reference> refs;
  for (const auto& [id, ref] : input.references()) refs.push_back(ref);

  using Answer = std::variant<std::optional<MetadataRecord>, std::string>;
  auto answers = detail::bounded_map(refs, options.parallelism, [&provider](const Reference& r) {
    try {
      return Answer{provider.lookup(r)};
    } catch (const std::exception& e) {
      return Answer{std::string(e.what())};
    }
  });
  report.queries = answers.size();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    Reference& ref = *corpus.find_mutable(refs[i].id);
    if (auto* err = std::get_if<std::string>(&answers[i])) {
      report.provider_errors.push_back({ref.id, *err});
    } else if (const auto& meta = std::get<std::optional<MetadataRecord>>(answers[i])) {
      if (meta->abstract && !ref.abstract) {
        ref.abstract = meta->abstract;
        ++report.abstracts_added;
      }
      if (meta->language && !ref.language) ref.language = meta->language;
    }
    if (!ref.language && ref.abstract) {
      ref.language = detect_language(*ref.abstract);
      ++report.languages_detected;
    }
  }
  report.abstract_coverage = detail::abstract_coverage(corpus);
  return result;
}

}  // namespace litmap
