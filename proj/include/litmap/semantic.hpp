#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "litmap/error.hpp"
#include "litmap/graph.hpp"
#include "litmap/keywords.hpp"
#include "litmap/louvain.hpp"
#include "litmap/modularity.hpp"
#include "litmap/parallel.hpp"
#include "litmap/random.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

// Term co-occurrence network; weights are document co-occurrence counts.
struct SemanticGraph {
  std::vector<std::string> terms;
  WeightedGraph graph;

  std::size_t n_nodes() const { return terms.size(); }
  std::size_t n_edges() const { return graph.n_edges(); }
  std::size_t degree(NodeId u) const { return graph.degree(u); }
  double strength(NodeId u) const { return graph.strength(u); }
};

// Nodes in vocabulary rank order.
inline SemanticGraph build_semantic_graph(const CooccurrenceMatrix& c, const TermVocabulary& vocab) {
  if (vocab.terms.empty()) throw DomainError("semantic graph: empty vocabulary");
  std::vector<std::uint32_t> matrix_index;
  std::unordered_map<std::uint32_t, NodeId> node_of;
  SemanticGraph g;
  for (const auto& t : vocab.terms) {
    auto i = c.index_of(t.term);
    if (!i) throw DomainError("semantic graph: vocabulary term '" + t.term + "' missing from co-occurrence matrix");
    node_of.emplace(*i, static_cast<NodeId>(g.terms.size()));
    matrix_index.push_back(*i);
    g.terms.push_back(t.term);
  }
  g.graph = WeightedGraph(g.terms.size());
  for (NodeId u = 0; u < g.terms.size(); ++u) {
    for (const auto& e : c.row(matrix_index[u])) {
      auto it = node_of.find(e.partner);
      if (it != node_of.end() && it->second > u) g.graph.add_new_edge(u, it->second, e.count);
    }
  }
  g.graph.sort_adjacency();
  return g;
}

struct FilterParams {
  std::size_t theta_w = 0;  // minimal edge weight
  std::size_t k_max = std::numeric_limits<std::size_t>::max();

  bool operator==(const FilterParams&) const = default;
};

enum class FilterOrder {
  HubsFirst,  // hub degree measured on the unfiltered graph
  EdgesFirst  // hub degree measured after the weight threshold
};

namespace detail {

inline SemanticGraph keep_subgraph(const SemanticGraph& g, const std::vector<bool>& node_kept, std::size_t theta_w) {
  std::vector<NodeId> remap(g.n_nodes(), 0);
  SemanticGraph out;
  for (NodeId u = 0; u < g.n_nodes(); ++u) {
    if (!node_kept[u]) continue;
    remap[u] = static_cast<NodeId>(out.terms.size());
    out.terms.push_back(g.terms[u]);
  }
  out.graph = WeightedGraph(out.terms.size());
  for (NodeId u = 0; u < g.n_nodes(); ++u) {
    if (!node_kept[u]) continue;
    for (const auto& a : g.graph.neighbors(u)) {
      if (a.to > u && node_kept[a.to] && a.weight >= static_cast<double>(theta_w)) {
        out.graph.add_new_edge(remap[u], remap[a.to], a.weight);
      }
    }
  }
  out.graph.sort_adjacency();
  return out;
}

inline SemanticGraph drop_isolates(const SemanticGraph& g) {
  std::vector<bool> kept(g.n_nodes());
  for (NodeId u = 0; u < g.n_nodes(); ++u) kept[u] = g.degree(u) > 0;
  return keep_subgraph(g, kept, 0);
}

inline SemanticGraph drop_hubs(const SemanticGraph& g, std::size_t k_max) {
  std::vector<bool> kept(g.n_nodes());
  for (NodeId u = 0; u < g.n_nodes(); ++u) kept[u] = g.degree(u) <= k_max;
  return keep_subgraph(g, kept, 0);
}

inline SemanticGraph drop_light_edges(const SemanticGraph& g, std::size_t theta_w) {
  return keep_subgraph(g, std::vector<bool>(g.n_nodes(), true), theta_w);
}

}  // namespace detail

// Hubs with degree > k_max, edges lighter than theta_w, then isolated nodes.
// The result may be empty.
inline SemanticGraph filter_graph(const SemanticGraph& g, const FilterParams& p,
                                  FilterOrder order = FilterOrder::HubsFirst) {
  if (p.k_max < 1) throw DomainError("k_max must be >= 1");
  SemanticGraph step = order == FilterOrder::HubsFirst ? detail::drop_light_edges(detail::drop_hubs(g, p.k_max), p.theta_w)
                                                       : detail::drop_hubs(detail::drop_light_edges(g, p.theta_w), p.k_max);
  return detail::drop_isolates(step);
}

struct SemanticClustering {
  Partition partition;
  double modularity = 0.0;
};

inline SemanticClustering cluster_semantic(const SemanticGraph& g, const LouvainOptions& opt) {
  if (g.n_nodes() == 0) throw DomainError("cluster_semantic: empty graph");
  if (g.graph.total_weight() <= 0.0) throw DomainError("cluster_semantic: graph has no edges");
  SemanticClustering out{louvain(g.graph, opt), 0.0};
  out.partition.set_layer(Layer::Semantic);
  out.modularity = modularity(g.graph, out.partition, opt.resolution);
  return out;
}

// ---------------------------------------------------------------------------

inline constexpr std::size_t kObjectiveCount = 6;
inline constexpr std::array<const char*, kObjectiveCount> kObjectiveNames = {
    "modularity", "n_communities", "n_components", "n_vertices", "density", "balance"};

using ObjectiveVector = std::array<double, kObjectiveCount>;

inline std::size_t objective_index(std::string_view name) {
  for (std::size_t i = 0; i < kObjectiveCount; ++i) {
    if (name == kObjectiveNames[i]) return i;
  }
  throw ConfigError("unknown objective '" + std::string(name) + "'");
}

struct SweepPoint {
  FilterParams params;
  std::optional<ObjectiveVector> raw;  // nullopt when the filtered graph is empty
  std::optional<ObjectiveVector> normalized;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // theta-major grid order
  std::vector<std::size_t> pareto_objectives;
  std::vector<std::size_t> front;  // indices into points
  std::optional<std::size_t> compromise;
};

// 1 - sum of squared community size shares.
inline double size_balance(const Partition& p) {
  const double n = static_cast<double>(p.n_nodes());
  double h = 0.0;
  for (auto s : p.sizes()) h += (s / n) * (s / n);
  return 1.0 - h;
}

inline ObjectiveVector semantic_objectives(const SemanticGraph& g, const SemanticClustering& c) {
  std::size_t components = 0;
  connected_components(g.graph, &components);
  const double v = static_cast<double>(g.n_nodes());
  const double density = v > 1 ? 2.0 * static_cast<double>(g.n_edges()) / (v * (v - 1)) : 0.0;
  return {c.modularity, static_cast<double>(c.partition.n_communities()), static_cast<double>(components), v, density,
          size_balance(c.partition)};
}

// Min-max per objective over the points that have values; a constant
// objective normalizes to 1.
inline void normalize_objectives(std::vector<SweepPoint>& points) {
  for (std::size_t k = 0; k < kObjectiveCount; ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : points) {
      if (!p.raw) continue;
      lo = std::min(lo, (*p.raw)[k]);
      hi = std::max(hi, (*p.raw)[k]);
    }
    for (auto& p : points) {
      if (!p.raw) continue;
      if (!p.normalized) p.normalized.emplace();
      (*p.normalized)[k] = hi > lo ? ((*p.raw)[k] - lo) / (hi - lo) : 1.0;
    }
  }
}

// Indices of points not weakly dominated (maximization): q dominates p when
// q >= p everywhere and q > p somewhere. Equal points both stay.
inline std::vector<std::size_t> pareto_front(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw DomainError("pareto_front: no points");
  // a dominating point comes earlier: its sum is no smaller (rounding can
  // make it equal) and on equal sums it is lexicographically larger
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> sum(points.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != points[0].size()) throw DomainError("pareto_front: ragged objective vectors");
    for (double x : points[i]) sum[i] += x;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sum[a] != sum[b]) return sum[a] > sum[b];
    return points[a] > points[b];
  });

  auto dominates = [&](std::size_t q, std::size_t p) {
    bool strict = false;
    for (std::size_t k = 0; k < points[p].size(); ++k) {
      if (points[q][k] < points[p][k]) return false;
      if (points[q][k] > points[p][k]) strict = true;
    }
    return strict;
  };
  std::vector<std::size_t> front;
  for (auto i : order) {
    bool dominated = false;
    for (auto f : front) {
      if (dominates(f, i)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(i);
  }
  std::sort(front.begin(), front.end());
  return front;
}

// Position in `front` of the point closest to the all-ones ideal; near-ties
// go to the larger tie_break value, then the earlier point.
inline std::size_t select_compromise(const std::vector<std::vector<double>>& front, const std::vector<double>& tie_break) {
  if (front.empty()) throw DomainError("select_compromise: empty front");
  if (tie_break.size() != front.size()) throw DomainError("select_compromise: tie-break size mismatch");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < front.size(); ++i) {
    double d = 0.0;
    for (double x : front[i]) d += (1.0 - x) * (1.0 - x);
    d = std::sqrt(d);
    if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && tie_break[i] > tie_break[best])) {
      best = i;
      best_d = std::min(d, best_d);
    }
  }
  return best;
}

struct SweepOptions {
  std::uint64_t seed = 0;
  LouvainOptions louvain;  // seed field is replaced per grid point
  FilterOrder order = FilterOrder::HubsFirst;
  std::vector<std::string> pareto_objectives = {"modularity", "n_vertices"};
  std::size_t parallelism = 1;
};

// Grid point i (theta-major) clusters with seed derive_seed(seed, i).
inline SweepResult sensitivity_sweep(const SemanticGraph& g, const std::vector<std::size_t>& theta_grid,
                                     const std::vector<std::size_t>& kmax_grid, const SweepOptions& opt = {}) {
  if (theta_grid.empty() || kmax_grid.empty()) throw DomainError("sensitivity_sweep: empty grid");
  SweepResult r;
  for (const auto& name : opt.pareto_objectives) r.pareto_objectives.push_back(objective_index(name));
  if (r.pareto_objectives.empty()) throw ConfigError("no Pareto objectives");

  std::vector<std::size_t> idx;
  for (auto t : theta_grid) {
    for (auto k : kmax_grid) {
      idx.push_back(r.points.size());
      r.points.push_back({FilterParams{t, k}, std::nullopt, std::nullopt});
    }
  }
  auto raws = detail::bounded_map(idx, opt.parallelism, [&](std::size_t i) -> std::optional<ObjectiveVector> {
    auto filtered = filter_graph(g, r.points[i].params, opt.order);
    if (filtered.n_nodes() == 0) return std::nullopt;
    LouvainOptions lo = opt.louvain;
    lo.seed = derive_seed(opt.seed, i);
    return semantic_objectives(filtered, cluster_semantic(filtered, lo));
  });
  for (std::size_t i = 0; i < raws.size(); ++i) r.points[i].raw = raws[i];
  normalize_objectives(r.points);

  std::vector<std::size_t> defined;
  std::vector<std::vector<double>> projected;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (!r.points[i].normalized) continue;
    defined.push_back(i);
    std::vector<double> v;
    for (auto k : r.pareto_objectives) v.push_back((*r.points[i].normalized)[k]);
    projected.push_back(std::move(v));
  }
  if (defined.empty()) return r;
  std::vector<std::vector<double>> front_values;
  std::vector<double> front_vertices;
  for (auto f : pareto_front(projected)) {
    r.front.push_back(defined[f]);
    front_values.push_back(projected[f]);
    front_vertices.push_back((*r.points[defined[f]].raw)[3]);
  }
  r.compromise = r.front[select_compromise(front_values, front_vertices)];
  return r;
}

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = "theta_w,k_max";
  for (auto n : kObjectiveNames) out += std::string(",") + n;
  for (auto n : kObjectiveNames) out += std::string(",") + n + "_norm";
  out += '\n';
  for (const auto& p : r.points) {
    out += std::to_string(p.params.theta_w) + ',' + std::to_string(p.params.k_max);
    for (std::size_t k = 0; k < kObjectiveCount; ++k) out += ',' + (p.raw ? text::format_double((*p.raw)[k]) : "");
    for (std::size_t k = 0; k < kObjectiveCount; ++k) {
      out += ',' + (p.normalized ? text::format_double((*p.normalized)[k]) : "");
    }
    out += '\n';
  }
  return out;
}

}  // namespace litmap
