#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "litmap/graph.hpp"
#include "litmap/random.hpp"
#include "oracles.hpp"

namespace testing_helpers {

using litmap::CitationGraph;
using litmap::NodeId;

inline std::vector<std::string> numbered_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("n" + std::to_string(i));
  return labels;
}

inline CitationGraph make_graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  return CitationGraph(numbered_labels(n), edges);
}

inline CitationGraph random_digraph(std::size_t n, double p, litmap::Rng& rng) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i != j && litmap::bernoulli(rng, p)) edges.emplace_back(i, j);
    }
  }
  return make_graph(n, edges);
}

// Undirected planted partition, stored as one directed edge per pair (i < j).
inline CitationGraph planted_blocks(std::size_t blocks, std::size_t size, double p_in, double p_out,
                                    std::uint64_t seed, std::vector<int>* truth = nullptr) {
  litmap::Rng rng(seed);
  const std::size_t n = blocks * size;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const bool same = i / size == j / size;
      if (litmap::bernoulli(rng, same ? p_in : p_out)) edges.emplace_back(i, j);
    }
  }
  if (truth) {
    truth->clear();
    for (std::size_t i = 0; i < n; ++i) truth->push_back(static_cast<int>(i / size));
  }
  return make_graph(n, edges);
}

inline oracle::Matrix dense_adjacency(const CitationGraph& g) {
  oracle::Matrix a(g.n_nodes(), std::vector<double>(g.n_nodes(), 0.0));
  for (auto [u, v] : g.edges()) a[u][v] = 1.0;
  return a;
}

inline oracle::Matrix dense_symmetric(const litmap::WeightedGraph& g) {
  oracle::Matrix w(g.n_nodes(), std::vector<double>(g.n_nodes(), 0.0));
  for (NodeId u = 0; u < g.n_nodes(); ++u) {
    w[u][u] = 2.0 * g.self_loop(u);
    for (const auto& a : g.neighbors(u)) w[u][a.to] = a.weight;
  }
  return w;
}

inline std::vector<int> as_labels(const litmap::Partition& p) {
  return {p.assignment().begin(), p.assignment().end()};
}

inline litmap::Partition random_partition(std::size_t n, std::size_t k, litmap::Rng& rng) {
  std::vector<std::size_t> raw(n);
  for (auto& c : raw) c = static_cast<std::size_t>(litmap::uniform_index(rng, k));
  return litmap::Partition(raw);
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("litmap_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_helpers
