#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "litmap/corpus.hpp"
#include "litmap/error.hpp"

namespace litmap {

using NodeId = std::uint32_t;

// Simple directed graph over string-labelled nodes. Node indices are dense
// and follow the order of the label list given at construction.
class CitationGraph {
 public:
  CitationGraph() = default;

  // Self-loops and repeated edges are dropped and counted.
  CitationGraph(std::vector<std::string> labels, const std::vector<std::pair<NodeId, NodeId>>& edges)
      : labels_(std::move(labels)), out_(labels_.size()), in_(labels_.size()) {
    for (NodeId i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i], i);
    std::unordered_set<std::uint64_t> seen;
    for (auto [u, v] : edges) {
      if (u >= labels_.size() || v >= labels_.size()) throw DomainError("edge endpoint out of range");
      if (u == v) {
        ++self_loops_dropped_;
        continue;
      }
      if (!seen.insert(key(u, v)).second) {
        ++duplicates_dropped_;
        continue;
      }
      out_[u].push_back(v);
      in_[v].push_back(u);
      ++n_edges_;
    }
    for (auto& a : out_) std::sort(a.begin(), a.end());
    for (auto& a : in_) std::sort(a.begin(), a.end());
  }

  std::size_t n_nodes() const { return labels_.size(); }
  std::size_t n_edges() const { return n_edges_; }
  const std::string& label(NodeId i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<NodeId> index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<NodeId>& out_neighbors(NodeId i) const { return out_[i]; }
  const std::vector<NodeId>& in_neighbors(NodeId i) const { return in_[i]; }
  std::size_t out_degree(NodeId i) const { return out_[i].size(); }
  std::size_t in_degree(NodeId i) const { return in_[i].size(); }
  std::size_t degree(NodeId i) const { return out_[i].size() + in_[i].size(); }

  // Adjacency A(i,j) in {0,1}.
  bool has_edge(NodeId i, NodeId j) const {
    return std::binary_search(out_[i].begin(), out_[i].end(), j);
  }

  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> e;
    e.reserve(n_edges_);
    for (NodeId u = 0; u < out_.size(); ++u) {
      for (NodeId v : out_[u]) e.emplace_back(u, v);
    }
    return e;
  }

  std::size_t self_loops_dropped() const { return self_loops_dropped_; }
  std::size_t duplicates_dropped() const { return duplicates_dropped_; }

 private:
  static std::uint64_t key(NodeId u, NodeId v) { return (std::uint64_t{u} << 32) | v; }

  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::size_t n_edges_ = 0;
  std::size_t self_loops_dropped_ = 0;
  std::size_t duplicates_dropped_ = 0;
};

// Citation graph of a corpus: one node per reference (id order), one edge per
// resolved citation. Dangling targets never enter the graph.
inline CitationGraph build_graph(const Corpus& corpus) {
  if (corpus.empty()) throw DomainError("build_graph: empty corpus");
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> index;
  for (const auto& [id, ref] : corpus.references()) {
    index.emplace(id, static_cast<NodeId>(labels.size()));
    labels.push_back(id);
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& [id, ref] : corpus.references()) {
    const NodeId u = index.at(id);
    for (const auto& c : ref.cited_ids) {
      auto it = index.find(corpus.resolve(c));
      if (it != index.end()) edges.emplace_back(u, it->second);
    }
  }
  return CitationGraph(std::move(labels), edges);
}

// Subgraph induced by the nodes with keep[i] set; node order is preserved.
inline CitationGraph induced_subgraph(const CitationGraph& g, const std::vector<bool>& keep) {
  std::vector<NodeId> remap(g.n_nodes(), 0);
  std::vector<std::string> labels;
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    if (keep[i]) {
      remap[i] = static_cast<NodeId>(labels.size());
      labels.push_back(g.label(i));
    }
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (auto [u, v] : g.edges()) {
    if (keep[u] && keep[v]) edges.emplace_back(remap[u], remap[v]);
  }
  return CitationGraph(std::move(labels), edges);
}

// Maximal weakly connected node sets, largest first (ties: smallest member first).
inline std::vector<std::vector<NodeId>> weak_components(const CitationGraph& g) {
  std::vector<NodeId> parent(g.n_nodes());
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto find = [&](NodeId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (auto [u, v] : g.edges()) {
    NodeId a = find(u), b = find(v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<NodeId, std::vector<NodeId>> groups;
  for (NodeId i = 0; i < g.n_nodes(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<NodeId>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return out;
}

// Drops nodes whose total degree (in + out) is below k. One pass by default;
// with iterate=true the removal repeats until stable (k-core style).
inline CitationGraph filter_min_degree(const CitationGraph& g, std::size_t k, bool iterate = false) {
  CitationGraph current = g;
  while (true) {
    std::vector<bool> keep(current.n_nodes());
    bool removed = false;
    for (NodeId i = 0; i < current.n_nodes(); ++i) {
      keep[i] = current.degree(i) >= k;
      removed = removed || !keep[i];
    }
    if (!removed) return current;
    current = induced_subgraph(current, keep);
    if (!iterate) return current;
  }
}

// ---------------------------------------------------------------------------

// Undirected weighted graph. Each undirected edge is stored in both
// endpoints' lists; self-loops are kept separately with their full weight.
class WeightedGraph {
 public:
  struct Arc {
    NodeId to;
    double weight;
  };

  WeightedGraph() = default;
  explicit WeightedGraph(std::size_t n) : adj_(n), self_(n, 0.0) {}

  std::size_t n_nodes() const { return adj_.size(); }
  std::size_t n_edges() const { return n_edges_; }

  // Weights of repeated (u,v) pairs are summed.
  void add_edge(NodeId u, NodeId v, double w) {
    if (u == v) {
      if (self_[u] == 0.0 && w != 0.0) ++n_edges_;
      self_[u] += w;
      total_weight_ += w;
      return;
    }
    auto bump = [](std::vector<Arc>& list, NodeId to, double w) {
      for (auto& a : list) {
        if (a.to == to) {
          a.weight += w;
          return false;
        }
      }
      list.push_back({to, w});
      return true;
    };
    if (bump(adj_[u], v, w)) ++n_edges_;
    bump(adj_[v], u, w);
    total_weight_ += w;
  }

  // Caller guarantees (u,v) has not been added before; u != v.
  void add_new_edge(NodeId u, NodeId v, double w) {
    adj_[u].push_back({v, w});
    adj_[v].push_back({u, w});
    ++n_edges_;
    total_weight_ += w;
  }

  const std::vector<Arc>& neighbors(NodeId u) const { return adj_[u]; }
  double self_loop(NodeId u) const { return self_[u]; }
  std::size_t degree(NodeId u) const { return adj_[u].size(); }

  // Weighted degree; a self-loop counts twice.
  double strength(NodeId u) const {
    double s = 2.0 * self_[u];
    for (const auto& a : adj_[u]) s += a.weight;
    return s;
  }

  // Sum of edge weights, each undirected edge once.
  double total_weight() const { return total_weight_; }

  double weight(NodeId u, NodeId v) const {
    if (u == v) return self_[u];
    for (const auto& a : adj_[u]) {
      if (a.to == v) return a.weight;
    }
    return 0.0;
  }

  void sort_adjacency() {
    for (auto& list : adj_) {
      std::sort(list.begin(), list.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
    }
  }

 private:
  std::vector<std::vector<Arc>> adj_;
  std::vector<double> self_;
  std::size_t n_edges_ = 0;
  double total_weight_ = 0.0;
};

// Undirected view of a directed graph: w_ij = A_ij + A_ji.
inline WeightedGraph symmetrize(const CitationGraph& g) {
  WeightedGraph w(g.n_nodes());
  for (auto [u, v] : g.edges()) w.add_edge(u, v, 1.0);
  w.sort_adjacency();
  return w;
}

// Connected components of an undirected graph, as a node -> component map.
inline std::vector<std::size_t> connected_components(const WeightedGraph& g, std::size_t* count = nullptr) {
  std::vector<std::size_t> comp(g.n_nodes(), static_cast<std::size_t>(-1));
  std::size_t next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.n_nodes(); ++s) {
    if (comp[s] != static_cast<std::size_t>(-1)) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (const auto& a : g.neighbors(u)) {
        if (comp[a.to] == static_cast<std::size_t>(-1)) {
          comp[a.to] = next;
          stack.push_back(a.to);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

// ---------------------------------------------------------------------------

enum class Layer { Citation, Semantic };

inline const char* to_string(Layer l) { return l == Layer::Citation ? "citation" : "semantic"; }

// Hard assignment of node indices to communities 0..k-1.
class Partition {
 public:
  Partition() = default;

  // Relabels ids contiguously in order of first appearance.
  explicit Partition(const std::vector<std::size_t>& raw, Layer layer = Layer::Citation)
      : layer_(layer) {
    std::unordered_map<std::size_t, std::uint32_t> relabel;
    assignment_.reserve(raw.size());
    for (auto c : raw) {
      auto [it, fresh] = relabel.emplace(c, static_cast<std::uint32_t>(relabel.size()));
      assignment_.push_back(it->second);
    }
    sizes_.assign(relabel.size(), 0);
    for (auto c : assignment_) ++sizes_[c];
  }

  std::size_t n_nodes() const { return assignment_.size(); }
  std::size_t n_communities() const { return sizes_.size(); }
  std::uint32_t operator[](NodeId i) const { return assignment_[i]; }
  const std::vector<std::uint32_t>& assignment() const { return assignment_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  Layer layer() const { return layer_; }
  void set_layer(Layer l) { layer_ = l; }

  std::vector<std::vector<NodeId>> members() const {
    std::vector<std::vector<NodeId>> m(sizes_.size());
    for (NodeId i = 0; i < assignment_.size(); ++i) m[assignment_[i]].push_back(i);
    return m;
  }

  bool operator==(const Partition& o) const { return assignment_ == o.assignment_; }

 private:
  std::vector<std::uint32_t> assignment_;
  std::vector<std::size_t> sizes_;
  Layer layer_ = Layer::Citation;
};

}  // namespace litmap
