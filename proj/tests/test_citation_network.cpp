#include <gtest/gtest.h>

#include "helpers.hpp"
#include "litmap/graph.hpp"
#include "litmap/louvain.hpp"
#include "litmap/modularity.hpp"
#include "litmap/rewire.hpp"

using namespace litmap;
using namespace testing_helpers;

namespace {

// Two triangles {0,1,2}, {3,4,5} joined by 2-3.
CitationGraph two_triangles_directed() {
  return make_graph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {2, 3}});
}

std::vector<std::size_t> degree_sequence(const CitationGraph& g, bool out) {
  std::vector<std::size_t> d;
  for (NodeId i = 0; i < g.n_nodes(); ++i) d.push_back(out ? g.out_degree(i) : g.in_degree(i));
  return d;
}

}  // namespace

TEST(BuildGraph, ChainAndDuplicates) {
  Corpus c;
  c.add_or_merge({.id = "A", .title = "a", .cited_ids = {"B", "B"}});
  c.add_or_merge({.id = "B", .title = "b", .cited_ids = {"C", "ghost"}});
  c.add_or_merge({.id = "C", .title = "c"});
  c.finalize();
  auto g = build_graph(c);
  EXPECT_EQ(g.n_nodes(), 3u);
  EXPECT_EQ(g.n_edges(), 2u);
  EXPECT_TRUE(g.has_edge(*g.index_of("A"), *g.index_of("B")));
  EXPECT_FALSE(g.has_edge(*g.index_of("B"), *g.index_of("A")));
  EXPECT_THROW(build_graph(Corpus{}), DomainError);

  auto direct = make_graph(2, {{0, 1}, {0, 1}, {1, 1}});
  EXPECT_EQ(direct.n_edges(), 1u);
  EXPECT_EQ(direct.duplicates_dropped(), 1u);
  EXPECT_EQ(direct.self_loops_dropped(), 1u);
}

TEST(BuildGraph, LargeCorpusShape) {
  // Synthetic corpus with the same V and E as the reported network.
  Corpus c;
  const std::size_t v = 9462, e = 12004;
  Rng rng(5);
  std::vector<std::vector<std::string>> cites(v);
  std::set<std::pair<std::size_t, std::size_t>> used;
  while (used.size() < e) {
    auto a = uniform_index(rng, v), b = uniform_index(rng, v);
    if (a != b && used.insert({a, b}).second) cites[a].push_back("r" + std::to_string(b));
  }
  for (std::size_t i = 0; i < v; ++i) {
    c.add_or_merge({.id = "r" + std::to_string(i), .title = "Reference number " + std::to_string(i),
                    .cited_ids = cites[i]});
  }
  c.finalize();
  auto g = build_graph(c);
  EXPECT_EQ(g.n_nodes(), v);
  EXPECT_EQ(g.n_edges(), e);
  auto s = corpus_stats(c);
  EXPECT_NEAR(s.average_degree, 2.537, 1e-3);
  EXPECT_NEAR(s.average_in_degree, 1.269, 1e-3);
}

TEST(WeakComponents, Examples) {
  auto two = make_graph(4, {{0, 1}, {2, 3}});
  auto comps = weak_components(two);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].size(), 2u);
  EXPECT_EQ(comps[1].size(), 2u);

  EXPECT_EQ(weak_components(make_graph(5, {{0, 1}, {2, 1}, {2, 3}, {4, 3}})).size(), 1u);

  auto tri = make_graph(7, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {5, 4}, {3, 5}});
  std::vector<std::size_t> sizes;
  for (const auto& comp : weak_components(tri)) sizes.push_back(comp.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 1}));
}

TEST(FilterMinDegree, OnePassRule) {
  auto star = make_graph(4, {{1, 0}, {2, 0}, {3, 0}});
  auto f = filter_min_degree(star, 2);
  EXPECT_EQ(f.n_nodes(), 1u);
  EXPECT_EQ(f.n_edges(), 0u);
  EXPECT_EQ(f.label(0), "n0");

  EXPECT_EQ(filter_min_degree(star, 0).n_nodes(), 4u);
  auto tri = make_graph(3, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_EQ(filter_min_degree(tri, 2).n_edges(), 3u);

  // path 0-1-2-3: one pass drops ends only; iterating to a 2-core empties it
  auto path = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(filter_min_degree(path, 2).n_nodes(), 2u);
  EXPECT_EQ(filter_min_degree(path, 2, true).n_nodes(), 0u);
}

TEST(Modularity, TwoTrianglesWithBridge) {
  auto g = two_triangles_directed();
  Partition tri({0, 0, 0, 1, 1, 1});
  EXPECT_NEAR(modularity(symmetrize(g), tri), 5.0 / 14.0, 1e-12);
  // directed: internal 6, out/in per side (4,3) and (3,4), E = 7
  EXPECT_NEAR(directed_modularity(g, tri), (6.0 - 24.0 / 7.0) / 7.0, 1e-12);
  EXPECT_NEAR(directed_modularity(g, tri), oracle::directed_modularity(dense_adjacency(g), {0, 0, 0, 1, 1, 1}),
              1e-12);
}

TEST(Modularity, SingleCommunityIsZeroAndSingletonsNonPositive) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = random_digraph(3 + uniform_index(rng, 20), 0.2, rng);
    if (g.n_edges() == 0) continue;
    Partition one(std::vector<std::size_t>(g.n_nodes(), 0));
    EXPECT_NEAR(directed_modularity(g, one), 0.0, 1e-12);
    EXPECT_NEAR(modularity(symmetrize(g), one), 0.0, 1e-12);

    std::vector<std::size_t> ids(g.n_nodes());
    std::iota(ids.begin(), ids.end(), 0);
    double expected = 0;
    const double e = static_cast<double>(g.n_edges());
    for (NodeId i = 0; i < g.n_nodes(); ++i) expected -= g.out_degree(i) * g.in_degree(i) / (e * e);
    EXPECT_NEAR(directed_modularity(g, Partition(ids)), expected, 1e-12);
    EXPECT_LE(directed_modularity(g, Partition(ids)), 0.0);
  }
}

TEST(Modularity, MatchesDoubleSumOracle) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 2 + uniform_index(rng, 49);
    auto g = random_digraph(n, 0.05 + 0.3 * uniform_real(rng), rng);
    if (g.n_edges() == 0) continue;
    auto p = random_partition(n, 1 + uniform_index(rng, 6), rng);
    EXPECT_NEAR(directed_modularity(g, p), oracle::directed_modularity(dense_adjacency(g), as_labels(p)), 1e-12);

    WeightedGraph w(n);
    for (auto [u, v] : g.edges()) w.add_edge(u, v, 1.0 + static_cast<double>(uniform_index(rng, 5)));
    EXPECT_NEAR(modularity(w, p), oracle::undirected_modularity(dense_symmetric(w), as_labels(p)), 1e-12);
    EXPECT_NEAR(modularity(w, p, 0.7), oracle::undirected_modularity(dense_symmetric(w), as_labels(p), 0.7), 1e-12);
  }
}

TEST(Modularity, EdgelessGraphIsAnError) {
  auto g = make_graph(3, {});
  EXPECT_THROW(directed_modularity(g, Partition({0, 0, 0})), DomainError);
}

TEST(Louvain, TwoTrianglesSplit) {
  auto g = two_triangles_directed();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto p = louvain(g, {.seed = seed});
    EXPECT_EQ(p.n_communities(), 2u);
    EXPECT_EQ(p[0], p[1]);
    EXPECT_EQ(p[1], p[2]);
    EXPECT_EQ(p[3], p[4]);
    EXPECT_EQ(p[4], p[5]);
    EXPECT_NE(p[0], p[3]);
    // exhaustive search agrees this is the optimum
    EXPECT_NEAR(modularity(symmetrize(g), p), oracle::best_undirected_modularity(dense_symmetric(symmetrize(g))),
                1e-12);
  }
}

TEST(Louvain, CompleteGraphIsOneCommunity) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < 5; ++i) {
    for (NodeId j = i + 1; j < 5; ++j) edges.emplace_back(i, j);
  }
  auto g = make_graph(5, edges);
  auto p = louvain(g, {.seed = 3});
  EXPECT_EQ(p.n_communities(), 1u);
  EXPECT_NEAR(modularity(symmetrize(g), p), 0.0, 1e-12);
}

TEST(Louvain, PlantedBlocksRecovered) {
  std::vector<int> truth;
  auto g = planted_blocks(4, 25, 0.3, 0.01, 42, &truth);
  auto p = louvain(g, {.seed = 42});
  EXPECT_GE(oracle::nmi(as_labels(p), truth), 0.9);
}

TEST(Louvain, DeterministicGivenSeed) {
  Rng rng(8);
  auto g = random_digraph(60, 0.05, rng);
  EXPECT_EQ(louvain(g, {.seed = 11}), louvain(g, {.seed = 11}));
}

TEST(Louvain, NearOptimalOnSmallGraphs) {
  Rng rng(2024);
  int checked = 0;
  while (checked < 20) {
    const auto n = 3 + uniform_index(rng, 6);
    auto g = random_digraph(n, 0.35, rng);
    if (g.n_edges() == 0) continue;
    auto w = symmetrize(g);
    const double best = oracle::best_undirected_modularity(dense_symmetric(w));
    auto p = louvain(w, {.seed = static_cast<std::uint64_t>(checked)});
    EXPECT_GE(modularity(w, p), 0.95 * best - 1e-12) << "n=" << n;
    ++checked;
  }
}

TEST(Louvain, EdgelessGraphGivesSingletons) {
  WeightedGraph g(4);
  EXPECT_EQ(louvain(g).n_communities(), 4u);
}

TEST(Rewire, TwoEdgeSwap) {
  // A->B, C->D: the only legal swap gives A->D, C->B
  auto g = make_graph(4, {{0, 1}, {2, 3}});
  auto r = rewire_null(g, 10, 1);
  EXPECT_GT(r.accepted, 0u);
  const bool original = r.graph.has_edge(0, 1) && r.graph.has_edge(2, 3);
  const bool swapped = r.graph.has_edge(0, 3) && r.graph.has_edge(2, 1);
  EXPECT_TRUE(original || swapped);
  EXPECT_EQ(r.graph.n_edges(), 2u);

  // odd number of swaps ends swapped: force exactly one accepted swap
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto one = rewire_null(g, 1, seed);
    if (one.accepted == 1) {
      EXPECT_TRUE(one.graph.has_edge(0, 3) && one.graph.has_edge(2, 1));
    }
  }
  EXPECT_THROW(rewire_null(make_graph(2, {{0, 1}}), 10, 0), DomainError);
}

TEST(Rewire, PreservesDegreesAndIsDeterministic) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_digraph(5 + uniform_index(rng, 40), 0.1, rng);
    if (g.n_edges() < 2) continue;
    auto r = rewire_null(g, 10, 1000 + trial);
    EXPECT_EQ(r.graph.n_nodes(), g.n_nodes());
    EXPECT_EQ(r.graph.n_edges(), g.n_edges());
    EXPECT_EQ(degree_sequence(r.graph, true), degree_sequence(g, true));
    EXPECT_EQ(degree_sequence(r.graph, false), degree_sequence(g, false));
    EXPECT_EQ(r.graph.self_loops_dropped(), 0u);
    EXPECT_EQ(r.graph.duplicates_dropped(), 0u);
    auto again = rewire_null(g, 10, 1000 + trial);
    EXPECT_EQ(again.graph.edges(), r.graph.edges());
  }
}

TEST(Rewire, LowAcceptanceFlagged) {
  // Complete digraph: no legal swap exists.
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < 4; ++i) {
    for (NodeId j = 0; j < 4; ++j) {
      if (i != j) edges.emplace_back(i, j);
    }
  }
  auto r = rewire_null(make_graph(4, edges), 10, 0);
  EXPECT_EQ(r.accepted, 0u);
  EXPECT_TRUE(r.low_acceptance);
}

TEST(Bootstrap, NullDestroysPlantedStructure) {
  std::vector<int> truth;
  auto g = planted_blocks(4, 25, 0.3, 0.01, 42, &truth);
  Partition planted(std::vector<std::size_t>(truth.begin(), truth.end()));
  EXPECT_GT(directed_modularity(g, planted), 0.5);
  auto s = bootstrap_modularity(g, planted, 100, 7);
  EXPECT_EQ(s.values.size(), 100u);
  EXPECT_LT(std::abs(s.mean), 0.05);
  EXPECT_GT(s.sd, 0.0);
}

TEST(Bootstrap, ReproducibleAndParallelSafe) {
  Rng rng(4);
  auto g = random_digraph(30, 0.1, rng);
  auto p = louvain(g, {.seed = 1});
  auto a = bootstrap_modularity(g, p, 2, 9);
  auto b = bootstrap_modularity(g, p, 2, 9);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.sd, b.sd);
  auto par = bootstrap_modularity(g, p, 8, 9, {.parallelism = 3});
  auto ser = bootstrap_modularity(g, p, 8, 9);
  EXPECT_EQ(par.values, ser.values);
  EXPECT_THROW(bootstrap_modularity(g, p, 1, 9), DomainError);
}
