#include <gtest/gtest.h>

#include <map>

#include "helpers.hpp"
#include "litmap/crawler.hpp"
#include "litmap/graph.hpp"
#include "litmap/http_provider.hpp"

using namespace litmap;
using testing_helpers::scratch_dir;

namespace {

Corpus seed_corpus(const std::vector<std::string>& ids) {
  Corpus c;
  for (const auto& id : ids) c.add_or_merge({.id = id, .title = "Seed " + id});
  c.finalize();
  return c;
}

void write_citing(const std::filesystem::path& root, const std::string& key, const std::string& jsonl) {
  std::filesystem::create_directories(root / "citing");
  text::write_file(root / "citing" / (key + ".jsonl"), jsonl);
}

class MapProvider : public CitationProvider {
 public:
  std::map<std::string, std::vector<Reference>> answers;
  std::set<std::string> failing;
  ProviderCapabilities capabilities() const override { return {}; }
  std::vector<Reference> citing(const Reference& cited) override {
    if (failing.count(cited.id)) throw ProviderError("boom " + cited.id);
    auto it = answers.find(cited.id);
    return it == answers.end() ? std::vector<Reference>{} : it->second;
  }
};

class MapMetadata : public MetadataProvider {
 public:
  std::map<std::string, MetadataRecord> answers;
  ProviderCapabilities capabilities() const override { return {}; }
  std::optional<MetadataRecord> lookup(const Reference& r) override {
    if (r.id == "bad") throw ProviderError("metadata down");
    auto it = answers.find(r.id);
    if (it == answers.end()) return std::nullopt;
    return it->second;
  }
};

}  // namespace

TEST(Crawler, LinearChainToDepthTwo) {
  auto root = scratch_dir("crawl_chain");
  write_citing(root, "S", R"({"id":"A","title":"Paper A","cites":[]})" "\n");
  write_citing(root, "A", R"({"id":"B","title":"Paper B","cites":[]})" "\n");
  FixtureCitationProvider provider(root);
  auto [corpus, report] = expand_citations(seed_corpus({"S"}), 2, provider);
  EXPECT_EQ(corpus.size(), 3u);
  EXPECT_EQ(corpus_stats(corpus).n_citation_links, 2u);
  EXPECT_EQ(corpus.find("A")->depth, 1);
  EXPECT_EQ(corpus.find("B")->depth, 2);
  EXPECT_TRUE(corpus.find("S")->seed);
  EXPECT_EQ(report.fetched_per_depth, (std::vector<std::size_t>{0, 1, 1}));
}

TEST(Crawler, EmptyProviderLeavesSeedUnchanged) {
  auto root = scratch_dir("crawl_empty");
  FixtureCitationProvider provider(root);
  auto seed = seed_corpus({"s1", "s2", "s3", "s4", "s5", "s6", "s7"});
  auto [corpus, report] = expand_citations(seed, 2, provider);
  EXPECT_EQ(corpus.size(), 7u);
  EXPECT_EQ(report.total_fetched(), 0u);
  EXPECT_EQ(report.queries, 7u);
}

TEST(Crawler, SameDepthCitationIsLinkedWithoutDuplicates) {
  // A and B cite S; A also cites B.
  auto root = scratch_dir("crawl_same_depth");
  write_citing(root, "S", R"({"id":"A","title":"Paper A","cites":["S","B"]}
{"id":"B","title":"Paper B","cites":["S"]}
)");
  write_citing(root, "B", R"({"id":"A","title":"Paper A","cites":["S","B"]})" "\n");
  FixtureCitationProvider provider(root);
  auto [corpus, report] = expand_citations(seed_corpus({"S"}), 2, provider);
  EXPECT_EQ(corpus.size(), 3u);
  EXPECT_EQ(corpus_stats(corpus).n_citation_links, 3u);
  EXPECT_EQ(build_graph(corpus).n_edges(), 3u);
  EXPECT_EQ(corpus.find("A")->depth, 1);
  EXPECT_EQ(corpus.find("B")->depth, 1);
}

TEST(Crawler, MergesCitersByTitleKey) {
  MapProvider provider;
  provider.answers["S"] = {{.id = "a1", .title = "Urban Networks"}, {.id = "a2", .title = "URBAN networks!"}};
  auto [corpus, report] = expand_citations(seed_corpus({"S"}), 1, provider);
  EXPECT_EQ(corpus.size(), 2u);
  EXPECT_EQ(report.dedup_merges, 1u);
}

TEST(Crawler, DeterministicIdempotentAndDepthBounded) {
  auto root = scratch_dir("crawl_fixed_point");
  write_citing(root, "S", R"({"id":"A","title":"A","cites":[]}
{"id":"B","title":"B","cites":[]}
)");
  write_citing(root, "A", R"({"id":"C","title":"C","cites":["B"]})" "\n");
  write_citing(root, "C", R"({"id":"D","title":"D","cites":[]})" "\n");
  FixtureCitationProvider provider(root);
  auto seed = seed_corpus({"S"});
  auto first = expand_citations(seed, 2, provider);
  auto again = expand_citations(seed, 2, provider);
  EXPECT_EQ(corpus_to_jsonl(first.corpus), corpus_to_jsonl(again.corpus));
  auto rerun = expand_citations(first.corpus, 2, provider);
  EXPECT_EQ(corpus_to_jsonl(rerun.corpus), corpus_to_jsonl(first.corpus));
  for (const auto& [id, ref] : first.corpus.references()) EXPECT_LE(ref.depth, 2);
  EXPECT_EQ(first.corpus.find("D"), nullptr);  // would be depth 3

  auto depth1 = expand_citations(seed, 1, provider);
  EXPECT_EQ(depth1.corpus.size(), 3u);
  EXPECT_EQ(depth1.report.fetched_per_depth.size(), 2u);
}

TEST(Crawler, ParallelQueriesGiveSameCorpus) {
  auto root = scratch_dir("crawl_parallel");
  std::string s_citers;
  for (int i = 0; i < 12; ++i) {
    s_citers += R"({"id":"c)" + std::to_string(i) + R"(","title":"Citer )" + std::to_string(i) + R"(","cites":[]})" "\n";
    write_citing(root, "c" + std::to_string(i),
                 R"({"id":"d)" + std::to_string(i % 5) + R"(","title":"Deep )" + std::to_string(i % 5) +
                     R"(","cites":[]})" "\n");
  }
  write_citing(root, "S", s_citers);
  FixtureCitationProvider provider(root);
  auto serial = expand_citations(seed_corpus({"S"}), 2, provider, {.parallelism = 1});
  auto parallel = expand_citations(seed_corpus({"S"}), 2, provider, {.parallelism = 4});
  EXPECT_EQ(corpus_to_jsonl(serial.corpus), corpus_to_jsonl(parallel.corpus));
  EXPECT_EQ(serial.corpus.size(), 1u + 12u + 5u);
}

TEST(Crawler, ProviderFailuresAreRecordedOrFatalWhenTotal) {
  MapProvider provider;
  provider.answers["s1"] = {{.id = "x", .title = "X"}};
  provider.failing = {"s2"};
  auto [corpus, report] = expand_citations(seed_corpus({"s1", "s2"}), 1, provider);
  ASSERT_EQ(report.provider_errors.size(), 1u);
  EXPECT_EQ(report.provider_errors[0].key, "s2");
  EXPECT_EQ(corpus.size(), 3u);

  provider.failing = {"s1", "s2"};
  EXPECT_THROW(expand_citations(seed_corpus({"s1", "s2"}), 1, provider), ProviderError);
  EXPECT_THROW(expand_citations(seed_corpus({"s1"}), 0, provider), DomainError);
}

TEST(Crawler, MalformedFixtureIsProviderError) {
  auto root = scratch_dir("crawl_malformed");
  write_citing(root, "S", "{oops\n");
  write_citing(root, "T", R"({"id":"A","title":"A","cites":[]})" "\n");
  FixtureCitationProvider provider(root);
  auto [corpus, report] = expand_citations(seed_corpus({"S", "T"}), 1, provider);
  EXPECT_EQ(report.provider_errors.size(), 1u);
  EXPECT_EQ(corpus.size(), 3u);
}

TEST(Enrich, CoverageAndNoOverwrite) {
  Corpus c;
  c.add_or_merge({.id = "a", .title = "A"});
  c.add_or_merge({.id = "b", .title = "B", .abstract = "Original abstract."});
  c.add_or_merge({.id = "c", .title = "C"});
  c.finalize();

  MapMetadata empty;
  auto untouched = enrich_abstracts(seed_corpus({"a", "b", "c"}), empty);
  EXPECT_EQ(untouched.report.abstract_coverage, 0.0);
  EXPECT_TRUE(untouched.corpus.same_content(seed_corpus({"a", "b", "c"})));

  MapMetadata one;
  one.answers["a"] = {"The growth of transport networks and the land use of the cities.", std::nullopt};
  auto third = enrich_abstracts(seed_corpus({"a", "b", "c"}), one);
  EXPECT_NEAR(third.report.abstract_coverage, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(third.corpus.find("a")->language, "en");  // detected

  MapMetadata replace;
  replace.answers["b"] = {"Different abstract.", "fr"};
  auto kept = enrich_abstracts(c, replace);
  EXPECT_EQ(kept.corpus.find("b")->abstract, "Original abstract.");
  EXPECT_EQ(kept.corpus.find("b")->language, "fr");
}

TEST(Enrich, FixtureMetadataAndFailures) {
  auto root = scratch_dir("enrich_fixture");
  std::filesystem::create_directories(root / "meta");
  text::write_file(root / "meta" / "a.json", R"({"abstract":"Un résumé","lang":"fr"})");
  text::write_file(root / "meta" / "b.json", "[1,2]");
  FixtureMetadataProvider provider(root);
  auto [corpus, report] = enrich_abstracts(seed_corpus({"a", "b", "c"}), provider);
  EXPECT_EQ(corpus.find("a")->abstract, "Un résumé");
  EXPECT_EQ(report.provider_errors.size(), 1u);
  EXPECT_EQ(report.abstracts_added, 1u);
}

TEST(LanguageDetection, BuiltInProfiles) {
  EXPECT_EQ(detect_language("The evolution of transportation networks is driven by the demand of the cities and the land use."), "en");
  EXPECT_EQ(detect_language("Les effets structurants du transport sont une question de la géographie des réseaux et des territoires."), "fr");
  EXPECT_EQ(detect_language("La movilidad urbana de las ciudades y el desarrollo de los sistemas de transporte para la población."), "es");
  EXPECT_EQ(detect_language("Die Entwicklung der Verkehrsnetze und die Siedlungsstruktur der Städte sind nicht unabhängig."), "de");
  EXPECT_EQ(detect_language("short"), "und");
}

TEST(HttpProvider, CrawlsLocalServerLikeFixtures) {
  httplib::Server server;
  server.Get("/v1/citing/S.jsonl", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"id":"A","title":"Paper A","cites":[]})" "\n", "application/x-ndjson");
  });
  server.Get("/v1/citing/A.jsonl", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"id":"B","title":"Paper B","cites":[]})" "\n", "application/x-ndjson");
  });
  server.Get("/v1/citing/T.jsonl", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  server.Get("/v1/meta/A.json", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"abstract":"Land use and transport.","lang":"en"})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProviderOptions opt{.base_url = "http://127.0.0.1:" + std::to_string(port), .path_prefix = "/v1",
                          .requests_per_second = 0, .timeout_seconds = 5, .retries = 0};
  HttpCitationProvider provider(opt);
  auto [corpus, report] = expand_citations(seed_corpus({"S", "T"}), 2, provider);
  EXPECT_EQ(corpus.size(), 4u);
  EXPECT_EQ(corpus_stats(corpus).n_citation_links, 2u);
  ASSERT_EQ(report.provider_errors.size(), 1u);
  EXPECT_EQ(report.provider_errors[0].key, "T");

  HttpMetadataProvider meta(opt);
  auto enriched = enrich_abstracts(corpus, meta);
  EXPECT_EQ(enriched.corpus.find("A")->abstract, "Land use and transport.");
  EXPECT_EQ(enriched.report.abstracts_added, 1u);

  server.stop();
  worker.join();
}

TEST(HttpProvider, RateLimiterSpacesRequests) {
  RateLimiter limiter(50.0);  // 20 ms apart
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 6; ++i) limiter.acquire();
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_GE(elapsed, std::chrono::milliseconds(95));
}
