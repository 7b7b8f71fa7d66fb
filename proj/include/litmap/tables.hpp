#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "litmap/error.hpp"
#include "litmap/graph.hpp"
#include "litmap/semantic.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

struct CommunityRow {
  std::uint32_t id = 0;
  std::size_t size = 0;
  double share = 0.0;         // of nodes
  double weight_share = 0.0;  // of the layer's mass (received citations or keyword occurrences)
  std::vector<std::string> representatives;
};

// rank decides representatives (higher first, then lower node index); weight
// is each node's mass. A zero total mass falls back to node shares.
inline std::vector<CommunityRow> community_table(const Partition& p, const std::vector<std::string>& labels,
                                                 const std::vector<double>& rank, const std::vector<double>& weight,
                                                 std::size_t top_n = 3) {
  if (p.n_nodes() == 0) throw DomainError("community table: empty partition");
  if (labels.size() != p.n_nodes() || rank.size() != p.n_nodes() || weight.size() != p.n_nodes()) {
    throw DomainError("community table: inputs do not cover partition");
  }
  const double n = static_cast<double>(p.n_nodes());
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  std::vector<CommunityRow> rows(p.n_communities());
  std::vector<double> mass(p.n_communities(), 0.0);
  for (NodeId i = 0; i < p.n_nodes(); ++i) mass[p[i]] += weight[i];
  auto members = p.members();
  for (std::uint32_t c = 0; c < rows.size(); ++c) {
    auto& r = rows[c];
    r.id = c;
    r.size = members[c].size();
    r.share = static_cast<double>(r.size) / n;
    r.weight_share = total > 0 ? mass[c] / total : r.share;
    auto& m = members[c];
    std::stable_sort(m.begin(), m.end(), [&](NodeId a, NodeId b) { return rank[a] > rank[b]; });
    for (std::size_t k = 0; k < std::min(top_n, m.size()); ++k) r.representatives.push_back(labels[m[k]]);
  }
  return rows;
}

// Representatives and mass by in-degree: the most cited members.
inline std::vector<CommunityRow> citation_community_table(const CitationGraph& g, const Partition& p,
                                                          std::size_t top_n = 3) {
  if (p.n_nodes() != g.n_nodes()) throw DomainError("community table: partition does not cover graph");
  std::vector<double> in(g.n_nodes());
  for (NodeId i = 0; i < g.n_nodes(); ++i) in[i] = static_cast<double>(g.in_degree(i));
  return community_table(p, g.labels(), in, in, top_n);
}

// Representatives by degree in `g`; mass is each term's total occurrence
// count in the corpus.
inline std::vector<CommunityRow> semantic_community_table(const SemanticGraph& g, const Partition& p,
                                                          const std::unordered_map<std::string, double>& occurrences,
                                                          std::size_t top_n = 3) {
  if (p.n_nodes() != g.n_nodes()) throw DomainError("community table: partition does not cover graph");
  std::vector<double> deg(g.n_nodes()), mass(g.n_nodes(), 0.0);
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    deg[i] = static_cast<double>(g.degree(i));
    if (auto it = occurrences.find(g.terms[i]); it != occurrences.end()) mass[i] = it->second;
  }
  return community_table(p, g.terms, deg, mass, top_n);
}

inline std::string community_table_csv(const std::vector<CommunityRow>& rows) {
  std::string out = "community,size,share,weight_share,representatives\n";
  for (const auto& r : rows) {
    std::string reps;
    for (const auto& s : r.representatives) reps += (reps.empty() ? "" : "; ") + s;
    out += std::to_string(r.id) + ',' + std::to_string(r.size) + ',' + text::format_double(r.share) + ',' +
           text::format_double(r.weight_share) + ',' + text::csv_escape(reps) + '\n';
  }
  return out;
}

}  // namespace litmap
