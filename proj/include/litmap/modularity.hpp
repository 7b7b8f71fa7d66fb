#pragma once

#include <vector>

#include "litmap/error.hpp"
#include "litmap/graph.hpp"

namespace litmap {

// Newman modularity of an undirected weighted graph,
//   Q = sum_c [ in_c / m - resolution * (tot_c / 2m)^2 ],
// with in_c the internal edge weight (self-loops included once) and tot_c the
// summed strength of community c.
inline double modularity(const WeightedGraph& g, const Partition& p, double resolution = 1.0) {
  if (p.n_nodes() != g.n_nodes()) throw DomainError("modularity: partition does not cover graph");
  const double m = g.total_weight();
  if (m <= 0.0) throw DomainError("modularity: graph has no edge weight");
  std::vector<double> in(p.n_communities(), 0.0), tot(p.n_communities(), 0.0);
  for (NodeId u = 0; u < g.n_nodes(); ++u) {
    const auto cu = p[u];
    tot[cu] += g.strength(u);
    in[cu] += g.self_loop(u);
    for (const auto& a : g.neighbors(u)) {
      if (a.to > u && p[a.to] == cu) in[cu] += a.weight;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < in.size(); ++c) {
    const double share = tot[c] / (2.0 * m);
    q += in[c] / m - resolution * share * share;
  }
  return q;
}

// Directed modularity
//   Q_d = (1/E) sum_ij [A_ij - k_i^out k_j^in / E] delta(c_i, c_j).
inline double directed_modularity(const CitationGraph& g, const Partition& p) {
  if (p.n_nodes() != g.n_nodes()) throw DomainError("directed_modularity: partition does not cover graph");
  const double e = static_cast<double>(g.n_edges());
  if (g.n_edges() == 0) throw DomainError("directed_modularity: graph has no edges");
  std::vector<double> internal(p.n_communities(), 0.0), out(p.n_communities(), 0.0),
      in(p.n_communities(), 0.0);
  for (NodeId u = 0; u < g.n_nodes(); ++u) {
    const auto cu = p[u];
    out[cu] += static_cast<double>(g.out_degree(u));
    in[cu] += static_cast<double>(g.in_degree(u));
    for (NodeId v : g.out_neighbors(u)) {
      if (p[v] == cu) internal[cu] += 1.0;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < internal.size(); ++c) q += internal[c] - out[c] * in[c] / e;
  return q / e;
}

}  // namespace litmap
