#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "litmap/config.hpp"
#include "litmap/corpus.hpp"
#include "litmap/crawler.hpp"
#include "litmap/error.hpp"
#include "litmap/graph.hpp"
#include "litmap/graphml.hpp"
#include "litmap/http_provider.hpp"
#include "litmap/interdisc.hpp"
#include "litmap/keywords.hpp"
#include "litmap/louvain.hpp"
#include "litmap/modularity.hpp"
#include "litmap/random.hpp"
#include "litmap/rewire.hpp"
#include "litmap/semantic.hpp"
#include "litmap/stopwords.hpp"
#include "litmap/tables.hpp"

#ifndef LITMAP_VERSION
#define LITMAP_VERSION "0.0.0"
#endif

namespace litmap {

using Json = nlohmann::ordered_json;

// How far a run goes. Each goal runs the stages it depends on.
enum class Goal { Ingest, Crawl, Citation, Keywords, Semantic, Sweep, Interdisc, Export, Full };

inline const char* to_string(Goal g) {
  switch (g) {
    case Goal::Ingest: return "ingest";
    case Goal::Crawl: return "crawl";
    case Goal::Citation: return "citenet";
    case Goal::Keywords: return "keywords";
    case Goal::Semantic: return "semnet";
    case Goal::Sweep: return "sweep";
    case Goal::Interdisc: return "interdisc";
    case Goal::Export: return "export";
    case Goal::Full: return "run";
  }
  return "run";
}

// Files land as <name>.partial and are renamed once every stage succeeded.
// A failed run leaves its .partial files behind and no stale finals.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, std::string content) {
    const auto final_path = dir_ / name;
    std::filesystem::create_directories(final_path.parent_path());
    std::filesystem::remove(final_path);
    text::write_file(partial(name), content);
    if (!contents_.count(name)) order_.push_back(name);
    contents_[name] = std::move(content);
  }

  void commit() {
    for (const auto& name : order_) std::filesystem::rename(partial(name), dir_ / name);
  }

  const std::vector<std::string>& names() const { return order_; }
  const std::string* content(const std::string& name) const {
    auto it = contents_.find(name);
    return it == contents_.end() ? nullptr : &it->second;
  }

 private:
  std::filesystem::path partial(const std::string& name) const {
    auto p = dir_ / name;
    p += ".partial";
    return p;
  }

  std::filesystem::path dir_;
  std::vector<std::string> order_;
  std::map<std::string, std::string> contents_;
};

struct PipelineSeeds {
  std::uint64_t root = 0;
  std::uint64_t citation_louvain = 0, citation_bootstrap = 0;
  std::uint64_t semantic_sweep = 0, semantic_louvain = 0;
  std::uint64_t interdisc_correlation = 0, interdisc_overlap = 0;

  explicit PipelineSeeds(std::uint64_t r)
      : root(r),
        citation_louvain(derive_seed(r, "citation.louvain")),
        citation_bootstrap(derive_seed(r, "citation.bootstrap")),
        semantic_sweep(derive_seed(r, "semantic.sweep")),
        semantic_louvain(derive_seed(r, "semantic.louvain")),
        interdisc_correlation(derive_seed(r, "interdisc.correlation")),
        interdisc_overlap(derive_seed(r, "interdisc.overlap")) {}

  Json to_json() const {
    return Json{{"root", root},
                {"citation.louvain", citation_louvain},
                {"citation.bootstrap", citation_bootstrap},
                {"semantic.sweep", semantic_sweep},
                {"semantic.louvain", semantic_louvain},
                {"interdisc.correlation", interdisc_correlation},
                {"interdisc.overlap", interdisc_overlap}};
  }
};

// In-memory products of a run, for callers that want more than the files.
struct PipelineArtifacts {
  Corpus corpus;
  std::optional<CitationGraph> citation_core;
  std::optional<Partition> citation_partition;
  std::optional<KeywordResult> keywords;
  std::optional<SweepResult> sweep;
  std::optional<SemanticGraph> semantic_graph;  // filtered
  std::optional<SemanticClustering> semantic_clustering;
  std::optional<MembershipMatrix> membership;
};

struct PipelineResult {
  Json report;   // deterministic for a given config and inputs
  Json timings;  // wall-clock seconds per stage
  std::vector<std::string> outputs;
  PipelineArtifacts artifacts;
  std::map<std::string, std::string> files;  // name -> content of every file written
};

namespace detail {

class StageClock {
 public:
  template <typename F>
  void run(const char* stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      f();
    } catch (const ConfigError&) {
      throw;
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
    timings_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  const Json& timings() const { return timings_; }

 private:
  Json timings_ = Json::object();
};

inline Json bootstrap_json(const BootstrapSummary& s) {
  return Json{{"reps", s.values.size()}, {"mean", s.mean}, {"sd", s.sd}};
}

inline Json table_json(const std::vector<CommunityRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back(Json{{"id", r.id},
                       {"size", r.size},
                       {"share", r.share},
                       {"weight_share", r.weight_share},
                       {"representatives", r.representatives}});
  }
  return out;
}

inline Json skipped(const std::string& reason) { return Json{{"status", "skipped"}, {"reason", reason}}; }

inline bool has_abstracts(const Corpus& c) {
  for (const auto& [id, ref] : c.references()) {
    if (ref.abstract && !ref.abstract->empty()) return true;
  }
  return false;
}

inline Json corpus_json(const Corpus& c) {
  Json j = to_json(corpus_stats(c));
  j["dangling_targets"] = c.dangling_targets();
  j["dangling_links"] = c.dangling_links();
  j["title_merges"] = c.key_merges();
  j["self_citations_dropped"] = c.self_citations_dropped();
  return j;
}

inline std::size_t largest(const std::vector<std::vector<NodeId>>& comps) {
  return comps.empty() ? 0 : comps.front().size();
}

}  // namespace detail

inline PipelineResult run_pipeline(const PipelineConfig& cfg, Goal goal = Goal::Full) {
  PipelineResult res;
  auto& art = res.artifacts;
  Json& report = res.report;
  const PipelineSeeds seeds(cfg.seed);
  OutputSet out(cfg.out_dir);
  detail::StageClock clock;

  auto wants = [goal](std::initializer_list<Goal> gs) { return std::find(gs.begin(), gs.end(), goal) != gs.end(); };
  const bool want_citation = wants({Goal::Citation, Goal::Interdisc, Goal::Export, Goal::Full});
  const bool want_keywords =
      wants({Goal::Keywords, Goal::Semantic, Goal::Sweep, Goal::Interdisc, Goal::Export, Goal::Full});
  const bool want_semantic = wants({Goal::Semantic, Goal::Interdisc, Goal::Export, Goal::Full});
  const bool want_sweep = goal == Goal::Sweep || (want_semantic && cfg.semantic_mode == SemanticMode::Sweep);
  const bool want_interdisc = wants({Goal::Interdisc, Goal::Full});
  // full runs and exports degrade to citation-only output without abstracts
  const bool semantic_optional = wants({Goal::Export, Goal::Full});

  report["tool"] = Json{{"name", "litmap"}, {"version", LITMAP_VERSION}};
  report["goal"] = to_string(goal);
  report["config"] = to_json(cfg);
  report["seeds"] = seeds.to_json();

  clock.run("prepare", [&] { std::filesystem::create_directories(cfg.out_dir); });
  clock.run("ingest", [&] {
    art.corpus = ingest_corpus(cfg.corpus, cfg.corpus_format);
    if (art.corpus.empty()) throw DomainError("corpus is empty");
  });

  if (goal != Goal::Ingest) {
    clock.run("crawl", [&] {
      if (cfg.depth == 0 && !cfg.enrich) {
        report["crawl"] = Json{{"expansion", detail::skipped("depth is 0")},
                               {"enrichment", detail::skipped("enrichment disabled")}};
        return;
      }
      std::unique_ptr<CitationProvider> citing;
      std::unique_ptr<MetadataProvider> meta;
      if (cfg.provider == ProviderKind::Fixture) {
        citing = std::make_unique<FixtureCitationProvider>(cfg.fixtures_dir);
        meta = std::make_unique<FixtureMetadataProvider>(cfg.fixtures_dir);
      } else {
        HttpProviderOptions h;
        h.base_url = cfg.http_base_url;
        h.requests_per_second = cfg.rate_limit;
        citing = std::make_unique<HttpCitationProvider>(h);
        meta = std::make_unique<HttpMetadataProvider>(h);
      }
      CrawlOptions co{cfg.parallelism};
      Json j;
      if (cfg.depth > 0) {
        auto r = expand_citations(art.corpus, cfg.depth, *citing, co);
        art.corpus = std::move(r.corpus);
        j["expansion"] = to_json(r.report);
      } else {
        j["expansion"] = detail::skipped("depth is 0");
      }
      if (cfg.enrich) {
        auto r = enrich_abstracts(art.corpus, *meta, co);
        art.corpus = std::move(r.corpus);
        j["enrichment"] = to_json(r.report);
      } else {
        j["enrichment"] = detail::skipped("enrichment disabled");
      }
      report["crawl"] = std::move(j);
    });
  }

  clock.run("corpus", [&] {
    report["corpus"] = detail::corpus_json(art.corpus);
    out.write("corpus.jsonl", corpus_to_jsonl(art.corpus));
  });

  if (want_citation) {
    clock.run("citenet", [&] {
      const auto full = build_graph(art.corpus);
      auto core = filter_min_degree(full, cfg.min_degree, cfg.iterate_core);
      if (core.n_edges() == 0) {
        throw DomainError("no citation links left after the min-degree filter (k=" + std::to_string(cfg.min_degree) +
                          ")");
      }
      LouvainOptions lo;
      lo.seed = seeds.citation_louvain;
      lo.resolution = cfg.resolution;
      auto p = louvain(core, lo);
      Json j;
      const auto full_comps = weak_components(full);
      const auto core_comps = weak_components(core);
      j["graph"] = Json{{"n_nodes", full.n_nodes()},
                        {"n_edges", full.n_edges()},
                        {"weak_components", full_comps.size()},
                        {"largest_component", detail::largest(full_comps)}};
      j["core"] = Json{{"min_degree", cfg.min_degree},
                       {"iterated", cfg.iterate_core},
                       {"n_nodes", core.n_nodes()},
                       {"n_edges", core.n_edges()},
                       {"weak_components", core_comps.size()},
                       {"largest_component", detail::largest(core_comps)}};
      j["n_communities"] = p.n_communities();
      j["modularity_undirected"] = modularity(symmetrize(core), p, cfg.resolution);
      j["modularity_directed"] = directed_modularity(core, p);
      if (cfg.bootstrap >= 2 && core.n_edges() >= 2) {
        auto b = bootstrap_modularity(core, p, cfg.bootstrap, seeds.citation_bootstrap,
                                      BootstrapOptions{cfg.swaps_per_edge, cfg.parallelism});
        auto bj = detail::bootstrap_json(b);
        bj["low_acceptance_reps"] = b.low_acceptance_reps;
        j["null_model"] = std::move(bj);
      } else {
        j["null_model"] = detail::skipped(cfg.bootstrap < 2 ? "bootstrap disabled" : "fewer than 2 edges");
      }
      const auto table = citation_community_table(core, p);
      j["table"] = detail::table_json(table);
      report["citation"] = std::move(j);

      std::string nodes = "id,community,in_degree,out_degree\n";
      std::vector<std::string> titles;
      for (NodeId i = 0; i < core.n_nodes(); ++i) {
        nodes += text::csv_escape(core.label(i)) + ',' + std::to_string(p[i]) + ',' +
                 std::to_string(core.in_degree(i)) + ',' + std::to_string(core.out_degree(i)) + '\n';
        titles.push_back(art.corpus.find(core.label(i))->title);
      }
      std::string edges = "source,target,source_community,target_community\n";
      for (auto [u, v] : core.edges()) {
        edges += text::csv_escape(core.label(u)) + ',' + text::csv_escape(core.label(v)) + ',' +
                 std::to_string(p[u]) + ',' + std::to_string(p[v]) + '\n';
      }
      out.write("citation_partition.csv", std::move(nodes));
      out.write("citation_edges.csv", std::move(edges));
      out.write("citation_table.csv", community_table_csv(table));
      out.write("citation.graphml", citation_graphml(core, &p, &titles));
      art.citation_core = std::move(core);
      art.citation_partition = std::move(p);
    });
  }

  bool semantic_skipped = false;
  if (want_keywords && !detail::has_abstracts(art.corpus)) {
    if (!semantic_optional) throw StageError("keywords", "no abstracts in corpus");
    semantic_skipped = true;
    report["keywords"] = detail::skipped("no abstracts in corpus");
    if (want_semantic) report["semantic"] = detail::skipped("no abstracts in corpus");
    if (want_interdisc) report["interdisciplinarity"] = detail::skipped("no abstracts in corpus");
  }

  if (want_keywords && !semantic_skipped) {
    clock.run("keywords", [&] {
      const auto stopwords =
          cfg.stopwords_dir.empty() ? StopwordSet::builtin() : StopwordSet::from_dir(cfg.stopwords_dir);
      KeywordOptions ko;
      ko.max_len = cfg.max_ngram;
      ko.min_df = cfg.min_df;
      ko.select.k_w = cfg.k_w;
      ko.select.subsumption = cfg.subsumption;
      auto kw = extract_keywords(art.corpus, ko, stopwords);
      Json j;
      j["n_abstracts"] = kw.doc_ids.size();
      j["n_candidates"] = kw.cooccurrence.size();
      j["vocabulary_size"] = kw.vocabulary.terms.size();
      j["k_w"] = kw.vocabulary.k_w;
      j["subsumed"] = kw.vocabulary.subsumed;
      j["language_fallbacks"] = Json::object();
      for (const auto& [code, n] : kw.language_fallbacks) j["language_fallbacks"][code.empty() ? "none" : code] = n;
      j["warnings"] = kw.warnings;
      Json top = Json::array();
      for (std::size_t i = 0; i < std::min<std::size_t>(20, kw.vocabulary.terms.size()); ++i) {
        const auto& t = kw.vocabulary.terms[i];
        top.push_back(Json{{"term", t.term}, {"df", t.df}, {"score", t.score}});
      }
      j["top_terms"] = std::move(top);
      report["keywords"] = std::move(j);
      out.write("vocabulary.csv", vocabulary_csv(kw.vocabulary));
      art.keywords = std::move(kw);
    });
  }

  if ((want_sweep || want_semantic) && !semantic_skipped) {
    clock.run("semnet", [&] {
      const auto& kw = *art.keywords;
      const auto g = build_semantic_graph(kw.cooccurrence, kw.vocabulary);
      Json j;
      j["graph"] = Json{{"n_nodes", g.n_nodes()}, {"n_edges", g.n_edges()}};
      LouvainOptions lo;
      lo.resolution = cfg.resolution;
      FilterParams params{cfg.theta_w, cfg.k_max};
      if (want_sweep) {
        SweepOptions so;
        so.seed = seeds.semantic_sweep;
        so.louvain = lo;
        so.order = cfg.filter_order;
        so.pareto_objectives = cfg.pareto_objectives;
        so.parallelism = cfg.parallelism;
        auto sweep = sensitivity_sweep(g, cfg.theta_grid, cfg.kmax_grid, so);
        Json sj;
        std::size_t defined = 0;
        for (const auto& pt : sweep.points) defined += pt.raw.has_value();
        sj["points"] = sweep.points.size();
        sj["non_empty_points"] = defined;
        sj["pareto_objectives"] = cfg.pareto_objectives;
        Json front = Json::array();
        for (auto i : sweep.front) {
          const auto& pt = sweep.points[i];
          Json fj{{"theta_w", pt.params.theta_w}, {"k_max", pt.params.k_max}};
          for (std::size_t k = 0; k < kObjectiveCount; ++k) fj[kObjectiveNames[k]] = (*pt.raw)[k];
          front.push_back(std::move(fj));
        }
        sj["front"] = std::move(front);
        if (!sweep.compromise) throw DomainError("every sweep grid point leaves an empty graph");
        const auto& best = sweep.points[*sweep.compromise];
        sj["compromise"] = Json{{"theta_w", best.params.theta_w}, {"k_max", best.params.k_max}};
        j["sweep"] = std::move(sj);
        out.write("sweep.csv", sweep_csv(sweep));
        params = best.params;
        art.sweep = std::move(sweep);
      }
      if (want_semantic) {
        auto filtered = filter_graph(g, params, cfg.filter_order);
        lo.seed = seeds.semantic_louvain;
        auto clustering = cluster_semantic(filtered, lo);
        std::unordered_map<std::string, double> occurrences;
        for (const auto& doc : kw.doc_terms) {
          for (const auto& [t, n] : doc) occurrences[t] += n;
        }
        const auto table = semantic_community_table(filtered, clustering.partition, occurrences);
        j["params"] = Json{{"theta_w", params.theta_w}, {"k_max", params.k_max}};
        j["filtered"] = Json{{"n_nodes", filtered.n_nodes()}, {"n_edges", filtered.n_edges()}};
        j["n_communities"] = clustering.partition.n_communities();
        j["modularity"] = clustering.modularity;
        j["table"] = detail::table_json(table);

        std::string terms = "term,community,degree\n";
        for (NodeId i = 0; i < filtered.n_nodes(); ++i) {
          terms += text::csv_escape(filtered.terms[i]) + ',' + std::to_string(clustering.partition[i]) + ',' +
                   std::to_string(filtered.degree(i)) + '\n';
        }
        out.write("semantic_partition.csv", std::move(terms));
        out.write("semantic_table.csv", community_table_csv(table));
        out.write("semantic.graphml", semantic_graphml(filtered, &clustering.partition));
        art.semantic_graph = std::move(filtered);
        art.semantic_clustering = std::move(clustering);
      }
      report["semantic"] = std::move(j);
    });
  }

  if (want_interdisc && !semantic_skipped) {
    clock.run("interdisc", [&] {
      const auto& kw = *art.keywords;
      const auto& sg = *art.semantic_graph;
      const auto& sp = art.semantic_clustering->partition;
      const auto& core = *art.citation_core;
      const auto& cp = *art.citation_partition;
      auto P = membership_matrix(kw.doc_ids, kw.doc_terms, term_classes(sg.terms, sp), sp.n_communities());
      if (P.n_rows() == 0) throw DomainError("no abstract contains a classified keyword");

      std::vector<std::optional<std::uint32_t>> row_community;
      for (const auto& id : P.ids) {
        auto n = core.index_of(id);
        row_community.push_back(n ? std::optional<std::uint32_t>(cp[*n]) : std::nullopt);
      }
      const std::size_t k = cp.n_communities();
      const auto index = interdisciplinarity_index(P);
      const auto cprox = citation_proximity(core, cp);
      const auto sprox = semantic_proximity(semantic_distance_matrix(P), row_community, k);
      const auto corr = classification_correlation(P, row_community, k, cfg.interdisc_bootstrap,
                                                   seeds.interdisc_correlation, cfg.parallelism);
      const auto overlap = overlapping_modularity(core, P, cfg.interdisc_bootstrap, seeds.interdisc_overlap,
                                                  cfg.belonging, cfg.parallelism);

      // crisp ceiling: the citation partition itself on the same induced graph
      std::vector<bool> keep(core.n_nodes(), false);
      for (const auto& id : P.ids) {
        if (auto n = core.index_of(id)) keep[*n] = true;
      }
      std::vector<std::size_t> crisp;
      for (NodeId u = 0; u < core.n_nodes(); ++u) {
        if (keep[u]) crisp.push_back(cp[u]);
      }
      const double ceiling = directed_modularity(induced_subgraph(core, keep), Partition(crisp));

      Json j;
      std::size_t mapped = 0;
      for (const auto& c : row_community) mapped += c.has_value();
      j["membership"] = Json{{"n_rows", P.n_rows()},
                             {"n_classes", P.n_classes},
                             {"excluded_no_keyword", P.excluded.size()},
                             {"excluded_no_abstract", art.corpus.size() - kw.doc_ids.size()},
                             {"rows_in_citation_core", mapped}};
      std::vector<double> sorted = index;
      std::sort(sorted.begin(), sorted.end());
      double mean = 0.0;
      for (double x : index) mean += x;
      mean /= static_cast<double>(index.size());
      const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                              : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
      Json by_community = Json::array();
      std::vector<double> sum(k, 0.0);
      std::vector<std::size_t> cnt(k, 0);
      for (std::size_t i = 0; i < index.size(); ++i) {
        if (row_community[i]) sum[*row_community[i]] += index[i], ++cnt[*row_community[i]];
      }
      for (std::size_t c = 0; c < k; ++c) {
        by_community.push_back(Json{{"community", c},
                                    {"n", cnt[c]},
                                    {"mean", cnt[c] ? Json(sum[c] / static_cast<double>(cnt[c])) : Json(nullptr)}});
      }
      j["index"] = Json{{"mean", mean},
                        {"median", median},
                        {"min", sorted.front()},
                        {"max", sorted.back()},
                        {"by_community", std::move(by_community)}};
      std::vector<std::size_t> cflag, sflag;
      for (std::size_t c = 0; c < k; ++c) {
        if (cprox.flagged[c]) cflag.push_back(c);
        if (sprox.flagged[c]) sflag.push_back(c);
      }
      j["proximity"] = Json{{"citation_rows_without_citations", cflag},
                            {"semantic_communities_without_rows", sflag}};
      Json cj{{"rows", corr.n_rows},
              {"defined_pairs", corr.observed.defined},
              {"min", corr.observed.min},
              {"max", corr.observed.max},
              {"mean_abs", corr.observed.mean_abs}};
      if (cfg.interdisc_bootstrap >= 2) {
        cj["null"] = Json{{"min", detail::bootstrap_json(corr.null_min)},
                          {"max", detail::bootstrap_json(corr.null_max)},
                          {"mean_abs", detail::bootstrap_json(corr.null_mean_abs)}};
      }
      j["correlation"] = std::move(cj);
      Json oj{{"belonging", cfg.belonging == Belonging::Product ? "product" : "min"},
              {"n_nodes", overlap.n_nodes},
              {"n_edges", overlap.n_edges},
              {"q", overlap.q},
              {"crisp_ceiling", ceiling}};
      if (cfg.interdisc_bootstrap >= 2) oj["null"] = detail::bootstrap_json(overlap.null);
      j["overlapping_modularity"] = std::move(oj);
      report["interdisciplinarity"] = std::move(j);

      out.write("membership.csv", membership_csv(P));
      out.write("interdisc.csv", interdisc_csv(P, index, row_community));
      out.write("proximity_citation.csv", proximity_csv(cprox));
      out.write("proximity_semantic.csv", proximity_csv(sprox));
      out.write("correlation.csv", correlation_csv(corr));
      art.membership = std::move(P);
    });
  }

  if (goal == Goal::Export) {
    clock.run("export", [&] {
      auto [nodes, edges] = corpus_to_csv_pair(art.corpus);
      out.write("corpus_csv/nodes.csv", std::move(nodes));
      out.write("corpus_csv/edges.csv", std::move(edges));
    });
  }

  clock.run("output", [&] {
    report["outputs"] = out.names();
    out.write("report.json", report.dump(2) + "\n");
    res.timings = clock.timings();
    out.write("timings.json", res.timings.dump(2) + "\n");
    out.commit();
  });
  res.outputs = out.names();
  for (const auto& n : res.outputs) res.files[n] = *out.content(n);
  return res;
}

}  // namespace litmap
