#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "litmap/corpus.hpp"
#include "litmap/error.hpp"
#include "litmap/interdisc.hpp"
#include "litmap/semantic.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

enum class ProviderKind { Fixture, Http };
enum class SemanticMode { Sweep, Fixed };

struct PipelineConfig {
  // corpus and crawl
  std::filesystem::path corpus;
  CorpusFormat corpus_format = CorpusFormat::Jsonl;
  int depth = 2;
  bool enrich = true;
  ProviderKind provider = ProviderKind::Fixture;
  std::filesystem::path fixtures_dir;
  std::string http_base_url;
  double rate_limit = 2.0;
  std::size_t parallelism = 1;

  // citation layer
  std::size_t min_degree = 2;
  bool iterate_core = false;
  double resolution = 1.0;
  std::size_t bootstrap = 100;
  std::size_t swaps_per_edge = 10;

  // keywords
  int max_ngram = 3;
  std::size_t min_df = 2;
  std::size_t k_w = 10000;
  bool subsumption = true;
  std::filesystem::path stopwords_dir;

  // semantic layer
  SemanticMode semantic_mode = SemanticMode::Sweep;
  std::vector<std::size_t> theta_grid;
  std::vector<std::size_t> kmax_grid;
  std::size_t theta_w = 10;
  std::size_t k_max = 500;
  FilterOrder filter_order = FilterOrder::HubsFirst;
  std::vector<std::string> pareto_objectives = {"modularity", "n_vertices"};

  // interdisciplinarity
  std::size_t interdisc_bootstrap = 100;
  Belonging belonging = Belonging::Product;

  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
};

// One key=value assignment and the directory its relative paths resolve
// against.
struct Setting {
  std::string value;
  std::filesystem::path base;
  std::string origin;  // "file:line" or "command line"
};

using Settings = std::map<std::string, Setting>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const Setting& s) {
  T v{};
  const char* end = s.value.data() + s.value.size();
  auto [p, ec] = std::from_chars(s.value.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw ConfigError(s.origin + ": " + key + " expects a number, got '" + s.value + "'");
  }
  return v;
}

inline bool parse_bool(const std::string& key, const Setting& s) {
  if (s.value == "true" || s.value == "yes" || s.value == "1") return true;
  if (s.value == "false" || s.value == "no" || s.value == "0") return false;
  throw ConfigError(s.origin + ": " + key + " expects true or false, got '" + s.value + "'");
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string_view::npos) comma = s.size();
    auto item = trim(s.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

// "a:b" (step 1), "a:b:step" or "v1,v2,...". Values are non-negative integers.
inline std::vector<std::size_t> parse_grid(std::string_view spec) {
  auto number = [&](const std::string& s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
      throw ConfigError("grid '" + std::string(spec) + "': '" + s + "' is not a non-negative integer");
    }
    return v;
  };
  std::vector<std::size_t> out;
  if (spec.find(':') != std::string_view::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      auto colon = spec.find(':', start);
      parts.push_back(detail::trim(spec.substr(start, colon == std::string_view::npos ? colon : colon - start)));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() > 3) throw ConfigError("grid '" + std::string(spec) + "': expected a:b or a:b:step");
    const auto lo = number(parts[0]), hi = number(parts[1]);
    const std::size_t step = parts.size() == 3 ? number(parts[2]) : 1;
    if (step == 0 || lo > hi) throw ConfigError("grid '" + std::string(spec) + "': empty range");
    for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    for (const auto& item : detail::split_list(spec)) out.push_back(number(item));
  }
  if (out.empty()) throw ConfigError("grid '" + std::string(spec) + "' is empty");
  return out;
}

// Reads "key = value" lines; '#' starts a comment line. Keys may not repeat.
inline Settings parse_config_text(std::string_view text, const std::string& source,
                                  const std::filesystem::path& base) {
  Settings out;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = detail::trim(text.substr(start, nl - start));
    start = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    const std::string origin = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(origin + ": expected key = value");
    auto key = detail::trim(std::string_view(line).substr(0, eq));
    auto value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ": empty key");
    if (!out.emplace(key, Setting{value, base, origin}).second) {
      throw ConfigError(origin + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

inline Settings read_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
  std::string text;
  try {
    text = text::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text, path.string(), path.parent_path());
}

namespace detail {

using Setter = std::function<void(PipelineConfig&, const std::string&, const Setting&)>;

inline std::filesystem::path resolve_path(const Setting& s) {
  std::filesystem::path p(s.value);
  return p.is_relative() ? (s.base / p).lexically_normal() : p;
}

inline const std::map<std::string, Setter>& config_setters() {
  using C = PipelineConfig;
  using S = Setting;
  using K = const std::string&;
  static const std::map<std::string, Setter> table = {
      {"corpus", [](C& c, K, const S& s) { c.corpus = resolve_path(s); }},
      {"corpus_format",
       [](C& c, K, const S& s) {
         try {
           c.corpus_format = parse_corpus_format(s.value);
         } catch (const ConfigError& e) {
           throw ConfigError(s.origin + ": " + e.what());
         }
       }},
      {"depth", [](C& c, K k, const S& s) { c.depth = parse_number<int>(k, s); }},
      {"enrich", [](C& c, K k, const S& s) { c.enrich = parse_bool(k, s); }},
      {"provider",
       [](C& c, K, const S& s) {
         if (s.value == "fixture") c.provider = ProviderKind::Fixture;
         else if (s.value == "http") c.provider = ProviderKind::Http;
         else throw ConfigError(s.origin + ": provider must be fixture or http");
       }},
      {"fixtures_dir", [](C& c, K, const S& s) { c.fixtures_dir = resolve_path(s); }},
      {"http_base_url", [](C& c, K, const S& s) { c.http_base_url = s.value; }},
      {"rate_limit", [](C& c, K k, const S& s) { c.rate_limit = parse_number<double>(k, s); }},
      {"parallelism", [](C& c, K k, const S& s) { c.parallelism = parse_number<std::size_t>(k, s); }},
      {"min_degree", [](C& c, K k, const S& s) { c.min_degree = parse_number<std::size_t>(k, s); }},
      {"iterate_core", [](C& c, K k, const S& s) { c.iterate_core = parse_bool(k, s); }},
      {"resolution", [](C& c, K k, const S& s) { c.resolution = parse_number<double>(k, s); }},
      {"bootstrap", [](C& c, K k, const S& s) { c.bootstrap = parse_number<std::size_t>(k, s); }},
      {"swaps_per_edge", [](C& c, K k, const S& s) { c.swaps_per_edge = parse_number<std::size_t>(k, s); }},
      {"max_ngram", [](C& c, K k, const S& s) { c.max_ngram = parse_number<int>(k, s); }},
      {"min_df", [](C& c, K k, const S& s) { c.min_df = parse_number<std::size_t>(k, s); }},
      {"k_w", [](C& c, K k, const S& s) { c.k_w = parse_number<std::size_t>(k, s); }},
      {"subsumption", [](C& c, K k, const S& s) { c.subsumption = parse_bool(k, s); }},
      {"stopwords_dir", [](C& c, K, const S& s) { c.stopwords_dir = resolve_path(s); }},
      {"semantic_mode",
       [](C& c, K, const S& s) {
         if (s.value == "sweep") c.semantic_mode = SemanticMode::Sweep;
         else if (s.value == "fixed") c.semantic_mode = SemanticMode::Fixed;
         else throw ConfigError(s.origin + ": semantic_mode must be sweep or fixed");
       }},
      {"theta_grid",
       [](C& c, K, const S& s) {
         try {
           c.theta_grid = parse_grid(s.value);
         } catch (const ConfigError& e) {
           throw ConfigError(s.origin + ": " + e.what());
         }
       }},
      {"kmax_grid",
       [](C& c, K, const S& s) {
         try {
           c.kmax_grid = parse_grid(s.value);
         } catch (const ConfigError& e) {
           throw ConfigError(s.origin + ": " + e.what());
         }
       }},
      {"theta_w", [](C& c, K k, const S& s) { c.theta_w = parse_number<std::size_t>(k, s); }},
      {"k_max", [](C& c, K k, const S& s) { c.k_max = parse_number<std::size_t>(k, s); }},
      {"filter_order",
       [](C& c, K, const S& s) {
         if (s.value == "hubs-first") c.filter_order = FilterOrder::HubsFirst;
         else if (s.value == "edges-first") c.filter_order = FilterOrder::EdgesFirst;
         else throw ConfigError(s.origin + ": filter_order must be hubs-first or edges-first");
       }},
      {"pareto_objectives", [](C& c, K, const S& s) { c.pareto_objectives = split_list(s.value); }},
      {"interdisc_bootstrap",
       [](C& c, K k, const S& s) { c.interdisc_bootstrap = parse_number<std::size_t>(k, s); }},
      {"belonging",
       [](C& c, K, const S& s) {
         auto b = parse_belonging(s.value);
         if (!b) throw ConfigError(s.origin + ": belonging must be product or min");
         c.belonging = *b;
       }},
      {"seed", [](C& c, K k, const S& s) { c.seed = parse_number<std::uint64_t>(k, s); }},
      {"out_dir", [](C& c, K, const S& s) { c.out_dir = resolve_path(s); }},
  };
  return table;
}

}  // namespace detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : detail::config_setters()) keys.push_back(k);
  return keys;
}

// Range and consistency checks. Provider settings are only checked when the
// run will crawl or enrich.
inline void validate(const PipelineConfig& c, bool need_provider = true) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.corpus.empty()) fail("corpus is not set");
  if (!std::filesystem::exists(c.corpus)) fail("corpus not found: " + c.corpus.string());
  if (c.depth < 0 || c.depth > 2) fail("depth must be 0, 1 or 2");
  const bool uses_provider = need_provider && (c.depth > 0 || c.enrich);
  if (uses_provider && c.provider == ProviderKind::Fixture) {
    if (c.fixtures_dir.empty()) fail("fixtures_dir is required when depth > 0 or enrich = true");
    if (!std::filesystem::is_directory(c.fixtures_dir)) fail("fixtures_dir not found: " + c.fixtures_dir.string());
  }
  if (uses_provider && c.provider == ProviderKind::Http && c.http_base_url.empty()) {
    fail("http_base_url is required for the http provider");
  }
  if (!(c.rate_limit > 0)) fail("rate_limit must be positive");
  if (c.parallelism < 1 || c.parallelism > 256) fail("parallelism must be in 1..256");
  if (!(c.resolution > 0)) fail("resolution must be positive");
  if (c.bootstrap == 1) fail("bootstrap must be 0 (off) or at least 2");
  if (c.swaps_per_edge < 1) fail("swaps_per_edge must be at least 1");
  if (c.max_ngram < 1 || c.max_ngram > 3) fail("max_ngram must be 1, 2 or 3");
  if (c.min_df < 1) fail("min_df must be at least 1");
  if (c.k_w < 1) fail("k_w must be at least 1");
  if (!c.stopwords_dir.empty() && !std::filesystem::is_directory(c.stopwords_dir)) {
    fail("stopwords_dir not found: " + c.stopwords_dir.string());
  }
  if (c.semantic_mode == SemanticMode::Sweep && (c.theta_grid.empty() || c.kmax_grid.empty())) {
    fail("sweep mode needs theta_grid and kmax_grid");
  }
  for (auto k : c.kmax_grid) {
    if (k < 1) fail("kmax_grid values must be at least 1");
  }
  if (c.k_max < 1) fail("k_max must be at least 1");
  if (c.pareto_objectives.empty()) fail("pareto_objectives is empty");
  for (const auto& o : c.pareto_objectives) {
    try {
      objective_index(o);
    } catch (const Error& e) {
      fail(std::string("pareto_objectives: ") + e.what());
    }
  }
  if (c.interdisc_bootstrap == 1) fail("interdisc_bootstrap must be 0 (off) or at least 2");
}

// Applies settings over defaults, then validates.
inline PipelineConfig make_config(const Settings& settings, bool need_provider = true) {
  PipelineConfig c;
  c.theta_grid = parse_grid("1:20");
  c.kmax_grid = parse_grid("100:1000:100");
  const auto& setters = detail::config_setters();
  for (const auto& [key, s] : settings) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(s.origin + ": unknown key '" + key + "'");
    it->second(c, key, s);
  }
  validate(c, need_provider);
  return c;
}

// Command-line values replace file values; their relative paths resolve
// against the working directory.
inline Settings merge_settings(Settings file, const std::map<std::string, std::string>& overrides) {
  for (const auto& [k, v] : overrides) file[k] = Setting{v, std::filesystem::current_path(), "command line"};
  return file;
}

inline PipelineConfig load_config(const std::filesystem::path& path,
                                  const std::map<std::string, std::string>& overrides = {}) {
  return make_config(merge_settings(read_config_file(path), overrides));
}

// Parameters that shape results, in a stable order. Paths and the output
// directory are left out so that relocating a run does not change it.
inline nlohmann::ordered_json to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["corpus_format"] = c.corpus_format == CorpusFormat::Jsonl ? "jsonl" : "csv-pair";
  j["depth"] = c.depth;
  j["enrich"] = c.enrich;
  j["provider"] = c.provider == ProviderKind::Fixture ? "fixture" : "http";
  j["min_degree"] = c.min_degree;
  j["iterate_core"] = c.iterate_core;
  j["resolution"] = c.resolution;
  j["bootstrap"] = c.bootstrap;
  j["swaps_per_edge"] = c.swaps_per_edge;
  j["max_ngram"] = c.max_ngram;
  j["min_df"] = c.min_df;
  j["k_w"] = c.k_w;
  j["subsumption"] = c.subsumption;
  j["custom_stopwords"] = !c.stopwords_dir.empty();
  j["semantic_mode"] = c.semantic_mode == SemanticMode::Sweep ? "sweep" : "fixed";
  if (c.semantic_mode == SemanticMode::Sweep) {
    j["theta_grid"] = c.theta_grid;
    j["kmax_grid"] = c.kmax_grid;
    j["pareto_objectives"] = c.pareto_objectives;
  } else {
    j["theta_w"] = c.theta_w;
    j["k_max"] = c.k_max;
  }
  j["filter_order"] = c.filter_order == FilterOrder::HubsFirst ? "hubs-first" : "edges-first";
  j["interdisc_bootstrap"] = c.interdisc_bootstrap;
  j["belonging"] = c.belonging == Belonging::Product ? "product" : "min";
  j["seed"] = c.seed;
  return j;
}

}  // namespace litmap
