#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <map>
#include <sstream>

#include "helpers.hpp"
#include "litmap/graphml.hpp"
#include "litmap/tables.hpp"

using namespace litmap;
using namespace testing_helpers;
namespace pt = boost::property_tree;

namespace {

struct Parsed {
  std::string edgedefault;
  std::map<std::string, std::map<std::string, std::string>> nodes;  // id -> key -> value
  std::vector<std::tuple<std::string, std::string, double>> edges;
  std::set<std::string> keys;
};

Parsed parse_graphml(const std::string& xml) {
  std::istringstream in(xml);
  pt::ptree tree;
  pt::read_xml(in, tree);
  Parsed out;
  const auto& root = tree.get_child("graphml");
  for (const auto& [name, child] : root) {
    if (name == "key") out.keys.insert(child.get<std::string>("<xmlattr>.id"));
  }
  const auto& graph = root.get_child("graph");
  out.edgedefault = graph.get<std::string>("<xmlattr>.edgedefault");
  for (const auto& [name, child] : graph) {
    if (name == "node") {
      auto& attrs = out.nodes[child.get<std::string>("<xmlattr>.id")];
      for (const auto& [dn, data] : child) {
        if (dn == "data") attrs[data.get<std::string>("<xmlattr>.key")] = data.data();
      }
    } else if (name == "edge") {
      double w = 0.0;
      for (const auto& [dn, data] : child) {
        if (dn == "data" && data.get<std::string>("<xmlattr>.key") == "weight") w = std::stod(data.data());
      }
      out.edges.emplace_back(child.get<std::string>("<xmlattr>.source"), child.get<std::string>("<xmlattr>.target"),
                             w);
    }
  }
  return out;
}

SemanticGraph toy_semantic() {
  SemanticGraph g;
  g.terms = {"urban", "transport", "land us", "model"};
  g.graph = WeightedGraph(4);
  g.graph.add_edge(0, 1, 7.0);
  g.graph.add_edge(0, 2, 2.5);
  g.graph.add_edge(1, 2, 1.0);
  g.graph.add_edge(2, 3, 4.0);
  g.graph.sort_adjacency();
  return g;
}

}  // namespace

TEST(Graphml, TriangleOneCommunity) {
  auto g = make_graph(3, {{0, 1}, {1, 2}, {2, 0}});
  Partition p({0, 0, 0});
  auto doc = parse_graphml(citation_graphml(g, &p));
  EXPECT_EQ(doc.edgedefault, "directed");
  ASSERT_EQ(doc.nodes.size(), 3u);
  EXPECT_EQ(doc.edges.size(), 3u);
  EXPECT_EQ(doc.keys, (std::set<std::string>{"label", "community", "weight"}));
  for (const auto& [id, attrs] : doc.nodes) {
    EXPECT_EQ(attrs.at("community"), "0");
    EXPECT_EQ(attrs.at("label"), id);
  }
}

TEST(Graphml, TitlesAndEscaping) {
  CitationGraph g({"a&b", "c<d"}, {{0, 1}});
  std::vector<std::string> titles{"Land \"use\" & transport", ""};
  auto doc = parse_graphml(citation_graphml(g, nullptr, &titles));
  EXPECT_EQ(doc.nodes.at("a&b").at("label"), "Land \"use\" & transport");
  EXPECT_EQ(doc.nodes.at("c<d").at("label"), "c<d");
  EXPECT_EQ(doc.nodes.at("a&b").count("community"), 0u);
  EXPECT_EQ(doc.edges[0], std::make_tuple(std::string("a&b"), std::string("c<d"), 1.0));
}

TEST(Graphml, SemanticWeightsSurvive) {
  auto g = toy_semantic();
  Partition p({0, 0, 1, 1}, Layer::Semantic);
  auto doc = parse_graphml(semantic_graphml(g, &p));
  EXPECT_EQ(doc.edgedefault, "undirected");
  ASSERT_EQ(doc.edges.size(), 4u);
  std::map<std::pair<std::string, std::string>, double> w;
  for (auto& [s, t, x] : doc.edges) w[{std::min(s, t), std::max(s, t)}] = x;
  EXPECT_EQ((w[{"transport", "urban"}]), 7.0);
  EXPECT_EQ((w[{"land us", "urban"}]), 2.5);
  EXPECT_EQ((w[{"land us", "transport"}]), 1.0);
  EXPECT_EQ((w[{"land us", "model"}]), 4.0);
  EXPECT_EQ(doc.nodes.at("model").at("community"), "1");
}

TEST(Graphml, EmptyGraphIsValid) {
  auto doc = parse_graphml(citation_graphml(CitationGraph({}, {})));
  EXPECT_TRUE(doc.nodes.empty());
  EXPECT_TRUE(doc.edges.empty());
  SemanticGraph s;
  doc = parse_graphml(semantic_graphml(s));
  EXPECT_TRUE(doc.nodes.empty());
}

TEST(Graphml, WritesFileAndRejectsBadInput) {
  auto dir = scratch_dir("graphml");
  auto g = make_graph(2, {{0, 1}});
  export_graphml(g, nullptr, dir / "g.graphml");
  EXPECT_EQ(parse_graphml(text::read_file(dir / "g.graphml")).nodes.size(), 2u);
  EXPECT_THROW(export_graphml(g, nullptr, dir / "missing" / "g.graphml"), Error);
  Partition short_p({0});
  EXPECT_THROW(citation_graphml(g, &short_p), DomainError);
}

TEST(CommunityTable, SharesAndRepresentatives) {
  // 0,1,2 in community 0; 3 alone. Node 2 is the most cited.
  auto g = make_graph(4, {{0, 2}, {1, 2}, {3, 2}, {2, 3}, {0, 1}});
  Partition p({0, 0, 0, 1});
  auto rows = citation_community_table(g, p);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].size, 3u);
  EXPECT_DOUBLE_EQ(rows[0].share, 0.75);
  EXPECT_DOUBLE_EQ(rows[1].share, 0.25);
  EXPECT_DOUBLE_EQ(rows[0].weight_share, 4.0 / 5.0);
  EXPECT_EQ(rows[0].representatives, (std::vector<std::string>{"n2", "n1", "n0"}));
  EXPECT_EQ(rows[1].representatives, (std::vector<std::string>{"n3"}));
}

TEST(CommunityTable, SemanticRepresentativeIsMaxDegreeTerm) {
  auto g = toy_semantic();  // degrees: urban 2, transport 2, land us 3, model 1
  Partition p({0, 0, 1, 1}, Layer::Semantic);
  std::unordered_map<std::string, double> occ{{"urban", 10}, {"transport", 6}, {"land us", 3}, {"model", 1}};
  auto rows = semantic_community_table(g, p, occ);
  EXPECT_EQ(rows[0].representatives.front(), "urban");  // degree tie, earlier rank wins
  EXPECT_EQ(rows[1].representatives.front(), "land us");
  EXPECT_DOUBLE_EQ(rows[0].weight_share, 0.8);
  EXPECT_DOUBLE_EQ(rows[1].weight_share, 0.2);
}

TEST(CommunityTable, SingleCommunityAndSums) {
  auto g = make_graph(3, {});
  auto rows = citation_community_table(g, Partition({0, 0, 0}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].share, 1.0);
  EXPECT_EQ(rows[0].weight_share, 1.0);  // no citations: falls back to node share

  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    auto h = random_digraph(30, 0.1, rng);
    auto p = random_partition(30, 5, rng);
    double s = 0, w = 0;
    for (const auto& r : citation_community_table(h, p)) s += r.share, w += r.weight_share;
    EXPECT_NEAR(s, 1.0, 1e-9);
    EXPECT_NEAR(w, 1.0, 1e-9);
  }
  EXPECT_THROW(community_table(Partition(), {}, {}, {}), DomainError);
}

TEST(CommunityTable, Csv) {
  auto g = make_graph(2, {{0, 1}});
  auto csv = community_table_csv(citation_community_table(g, Partition({0, 0})));
  EXPECT_EQ(csv, "community,size,share,weight_share,representatives\n0,2,1,1,n1; n0\n");
}
