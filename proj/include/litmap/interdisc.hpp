#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "litmap/error.hpp"
#include "litmap/graph.hpp"
#include "litmap/keywords.hpp"
#include "litmap/modularity.hpp"
#include "litmap/parallel.hpp"
#include "litmap/random.hpp"
#include "litmap/rewire.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

// Row i: share of reference ids[i]'s classified keyword occurrences falling
// in each semantic class.
struct MembershipMatrix {
  std::vector<std::string> ids;
  std::size_t n_classes = 0;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> excluded;  // had an abstract but no classified term

  std::size_t n_rows() const { return rows.size(); }
};

// doc_terms[d] are keyword occurrence counts of doc_ids[d]; term_class gives
// the semantic class of each classified term.
inline MembershipMatrix membership_matrix(const std::vector<std::string>& doc_ids,
                                          const std::vector<TermCounts>& doc_terms,
                                          const std::unordered_map<std::string, std::uint32_t>& term_class,
                                          std::size_t n_classes) {
  if (doc_ids.size() != doc_terms.size()) throw DomainError("membership: ids and term counts differ in length");
  MembershipMatrix m;
  m.n_classes = n_classes;
  for (std::size_t d = 0; d < doc_ids.size(); ++d) {
    std::vector<double> row(n_classes, 0.0);
    double total = 0.0;
    for (const auto& [term, n] : doc_terms[d]) {
      auto it = term_class.find(term);
      if (it == term_class.end()) continue;
      if (it->second >= n_classes) throw DomainError("membership: class id out of range for '" + term + "'");
      row[it->second] += n;
      total += n;
    }
    if (total == 0.0) {
      m.excluded.push_back(doc_ids[d]);
      continue;
    }
    for (auto& x : row) x /= total;
    m.ids.push_back(doc_ids[d]);
    m.rows.push_back(std::move(row));
  }
  return m;
}

// Classes from a clustered term list: terms[i] belongs to classes[i].
inline std::unordered_map<std::string, std::uint32_t> term_classes(const std::vector<std::string>& terms,
                                                                   const Partition& classes) {
  if (terms.size() != classes.n_nodes()) throw DomainError("term classes: partition does not cover terms");
  std::unordered_map<std::string, std::uint32_t> out;
  for (NodeId i = 0; i < terms.size(); ++i) out.emplace(terms[i], classes[i]);
  return out;
}

// 1 - sum_j p_j^2
inline double interdisciplinarity(const std::vector<double>& row) {
  double h = 0.0;
  for (double p : row) h += p * p;
  return 1.0 - h;
}

inline std::vector<double> interdisciplinarity_index(const MembershipMatrix& p) {
  std::vector<double> out;
  out.reserve(p.n_rows());
  for (const auto& r : p.rows) out.push_back(interdisciplinarity(r));
  return out;
}

// ---------------------------------------------------------------------------

enum class ProximityKind { Citation, Semantic };

// Square matrix over citation communities; nullopt marks undefined entries.
struct ProximityMatrix {
  ProximityKind kind = ProximityKind::Citation;
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<bool> flagged;  // citation: no outgoing citations; semantic: no member with a membership row

  std::size_t size() const { return values.size(); }
};

// c_kk' = citations from k to k' / all citations from k.
inline ProximityMatrix citation_proximity(const CitationGraph& g, const Partition& p) {
  if (p.n_nodes() != g.n_nodes()) throw DomainError("citation proximity: partition does not cover graph");
  const std::size_t k = p.n_communities();
  std::vector<std::vector<double>> flow(k, std::vector<double>(k, 0.0));
  std::vector<double> out(k, 0.0);
  for (auto [u, v] : g.edges()) {
    flow[p[u]][p[v]] += 1.0;
    out[p[u]] += 1.0;
  }
  ProximityMatrix m;
  m.kind = ProximityKind::Citation;
  m.values.assign(k, std::vector<std::optional<double>>(k));
  m.flagged.assign(k, false);
  for (std::size_t a = 0; a < k; ++a) {
    m.flagged[a] = out[a] == 0.0;
    for (std::size_t b = 0; b < k; ++b) m.values[a][b] = out[a] > 0 ? flow[a][b] / out[a] : 0.0;
  }
  return m;
}

// Symmetric, row-major n x n.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) { d_[i * n_ + j] = d_[j * n_ + i] = v; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// d(i,i') = sqrt(1/2 sum_j (p_ij - p_i'j)^2), in [0,1] for probability rows.
inline double membership_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(0.5 * s);
}

inline DistanceMatrix semantic_distance_matrix(const MembershipMatrix& p) {
  DistanceMatrix d(p.n_rows());
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    for (std::size_t j = i + 1; j < p.n_rows(); ++j) d.set(i, j, membership_distance(p.rows[i], p.rows[j]));
  }
  return d;
}

// Mean distance between members of k and k' (distinct unordered pairs when
// k = k'). Lower means semantically closer. row_community[i] is the citation
// community of membership row i, or nullopt when it is outside the citation
// partition.
inline ProximityMatrix semantic_proximity(const DistanceMatrix& d,
                                          const std::vector<std::optional<std::uint32_t>>& row_community,
                                          std::size_t n_communities) {
  if (row_community.size() != d.size()) throw DomainError("semantic proximity: row mapping size mismatch");
  std::vector<std::vector<double>> sum(n_communities, std::vector<double>(n_communities, 0.0));
  std::vector<std::size_t> members(n_communities, 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!row_community[i]) continue;
    const auto ci = *row_community[i];
    if (ci >= n_communities) throw DomainError("semantic proximity: community id out of range");
    ++members[ci];
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      if (!row_community[j]) continue;
      const auto cj = *row_community[j];
      sum[ci][cj] += d(i, j);
      if (ci != cj) sum[cj][ci] += d(i, j);
    }
  }
  ProximityMatrix m;
  m.kind = ProximityKind::Semantic;
  m.values.assign(n_communities, std::vector<std::optional<double>>(n_communities));
  m.flagged.assign(n_communities, false);
  for (std::size_t a = 0; a < n_communities; ++a) {
    m.flagged[a] = members[a] == 0;
    for (std::size_t b = 0; b < n_communities; ++b) {
      const double pairs = a == b ? members[a] * (members[a] - 1.0) / 2.0
                                  : static_cast<double>(members[a]) * static_cast<double>(members[b]);
      if (pairs > 0) m.values[a][b] = sum[a][b] / pairs;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct CorrelationSummary {
  double min = 0.0, max = 0.0, mean_abs = 0.0;
  std::size_t defined = 0;
};

struct CorrelationResult {
  std::vector<std::vector<std::optional<double>>> matrix;  // citation community x semantic class
  CorrelationSummary observed;
  BootstrapSummary null_min, null_max, null_mean_abs;
  std::size_t n_rows = 0;
};

namespace detail {

inline std::vector<std::vector<std::optional<double>>> column_correlations(
    const std::vector<std::uint32_t>& community, std::size_t n_communities,
    const std::vector<const std::vector<double>*>& rows, std::size_t n_classes) {
  const std::size_t n = community.size();
  std::vector<std::vector<double>> pc(n_communities, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) pc[community[i]][i] = 1.0;
  std::vector<std::vector<double>> pj(n_classes, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n_classes; ++j) pj[j][i] = (*rows[i])[j];
  }
  std::vector<std::vector<std::optional<double>>> out(n_communities, std::vector<std::optional<double>>(n_classes));
  for (std::size_t k = 0; k < n_communities; ++k) {
    for (std::size_t j = 0; j < n_classes; ++j) out[k][j] = pearson(pc[k], pj[j]);
  }
  return out;
}

inline CorrelationSummary summarize_correlations(const std::vector<std::vector<std::optional<double>>>& m) {
  CorrelationSummary s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -s.min;
  double abs_sum = 0.0;
  for (const auto& row : m) {
    for (const auto& v : row) {
      if (!v) continue;
      s.min = std::min(s.min, *v);
      s.max = std::max(s.max, *v);
      abs_sum += std::abs(*v);
      ++s.defined;
    }
  }
  if (s.defined == 0) return CorrelationSummary{};
  s.mean_abs = abs_sum / static_cast<double>(s.defined);
  return s;
}

}  // namespace detail

// Pearson correlation between the one-hot citation membership columns and
// the semantic membership columns, over rows that have a citation community.
// The null shuffles membership rows across references; repetition r uses
// seed derive_seed(seed, r).
inline CorrelationResult classification_correlation(const MembershipMatrix& p,
                                                     const std::vector<std::optional<std::uint32_t>>& row_community,
                                                     std::size_t n_communities, std::size_t reps, std::uint64_t seed,
                                                     std::size_t parallelism = 1) {
  if (row_community.size() != p.n_rows()) throw DomainError("correlation: row mapping size mismatch");
  std::vector<std::uint32_t> community;
  std::vector<const std::vector<double>*> rows;
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    if (!row_community[i]) continue;
    if (*row_community[i] >= n_communities) throw DomainError("correlation: community id out of range");
    community.push_back(*row_community[i]);
    rows.push_back(&p.rows[i]);
  }
  if (rows.size() < 2) throw DomainError("correlation: need at least 2 references in both classifications");

  CorrelationResult r;
  r.n_rows = rows.size();
  r.matrix = detail::column_correlations(community, n_communities, rows, p.n_classes);
  r.observed = detail::summarize_correlations(r.matrix);
  if (reps < 2) return r;

  std::vector<std::size_t> idx(reps);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto nulls = detail::bounded_map(idx, parallelism, [&](std::size_t rep) {
    Rng rng(derive_seed(seed, rep));
    auto shuffled = rows;
    shuffle(shuffled, rng);
    return detail::summarize_correlations(detail::column_correlations(community, n_communities, shuffled, p.n_classes));
  });
  std::vector<double> mins, maxs, means;
  for (const auto& s : nulls) mins.push_back(s.min), maxs.push_back(s.max), means.push_back(s.mean_abs);
  r.null_min = summarize(std::move(mins));
  r.null_max = summarize(std::move(maxs));
  r.null_mean_abs = summarize(std::move(means));
  return r;
}

// ---------------------------------------------------------------------------

enum class Belonging { Product, Min };

inline std::optional<Belonging> parse_belonging(std::string_view s) {
  if (s == "product") return Belonging::Product;
  if (s == "min") return Belonging::Min;
  return std::nullopt;
}

// Graph induced on the references that have a membership row, with rows
// aligned to its node order.
struct OverlapInput {
  CitationGraph graph;
  std::vector<const std::vector<double>*> rows;  // rows[node]
  std::size_t n_classes = 0;
};

inline OverlapInput overlap_input(const CitationGraph& g, const MembershipMatrix& p) {
  std::vector<bool> keep(g.n_nodes(), false);
  std::vector<const std::vector<double>*> by_node(g.n_nodes(), nullptr);
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    if (auto n = g.index_of(p.ids[i])) {
      keep[*n] = true;
      by_node[*n] = &p.rows[i];
    }
  }
  OverlapInput in;
  in.graph = induced_subgraph(g, keep);
  in.n_classes = p.n_classes;
  for (NodeId u = 0; u < g.n_nodes(); ++u) {
    if (keep[u]) in.rows.push_back(by_node[u]);
  }
  return in;
}

// (1/E) sum_c sum_ij [A_ij - k_i^out k_j^in / E] F(p_ic, p_jc)
inline double overlapping_modularity_of(const CitationGraph& g, const std::vector<const std::vector<double>*>& rows,
                                        std::size_t n_classes, Belonging f = Belonging::Product) {
  if (g.n_edges() == 0) throw DomainError("overlapping modularity: induced graph has no edges");
  if (rows.size() != g.n_nodes()) throw DomainError("overlapping modularity: rows do not cover graph");
  const double e = static_cast<double>(g.n_edges());
  double q = 0.0;
  if (f == Belonging::Product) {
    // the null term factorizes: (sum_i p_ic k_i^out)(sum_j p_jc k_j^in)
    for (std::size_t c = 0; c < n_classes; ++c) {
      double observed = 0.0, out = 0.0, in = 0.0;
      for (NodeId u = 0; u < g.n_nodes(); ++u) {
        const double pu = (*rows[u])[c];
        out += pu * static_cast<double>(g.out_degree(u));
        in += pu * static_cast<double>(g.in_degree(u));
        for (NodeId v : g.out_neighbors(u)) observed += pu * (*rows[v])[c];
      }
      q += observed - out * in / e;
    }
    return q / e;
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (NodeId u = 0; u < g.n_nodes(); ++u) {
      const double pu = (*rows[u])[c];
      for (NodeId v : g.out_neighbors(u)) q += std::min(pu, (*rows[v])[c]);
      if (g.out_degree(u) == 0) continue;
      const double ku = static_cast<double>(g.out_degree(u));
      for (NodeId v = 0; v < g.n_nodes(); ++v) {
        if (g.in_degree(v) > 0) q -= std::min(pu, (*rows[v])[c]) * ku * static_cast<double>(g.in_degree(v)) / e;
      }
    }
  }
  return q / e;
}

struct OverlapResult {
  double q = 0.0;
  BootstrapSummary null;  // membership rows shuffled across nodes
  std::size_t n_nodes = 0, n_edges = 0;
};

inline OverlapResult overlapping_modularity(const CitationGraph& g, const MembershipMatrix& p, std::size_t reps,
                                            std::uint64_t seed, Belonging f = Belonging::Product,
                                            std::size_t parallelism = 1) {
  auto in = overlap_input(g, p);
  if (in.graph.n_nodes() == 0) throw DomainError("overlapping modularity: no reference has both a node and a membership row");
  OverlapResult r;
  r.n_nodes = in.graph.n_nodes();
  r.n_edges = in.graph.n_edges();
  r.q = overlapping_modularity_of(in.graph, in.rows, in.n_classes, f);
  if (reps < 2) return r;
  std::vector<std::size_t> idx(reps);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto values = detail::bounded_map(idx, parallelism, [&](std::size_t rep) {
    Rng rng(derive_seed(seed, rep));
    auto shuffled = in.rows;
    shuffle(shuffled, rng);
    return overlapping_modularity_of(in.graph, shuffled, in.n_classes, f);
  });
  r.null = summarize(std::move(values));
  return r;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::string optional_cell(const std::optional<double>& v) { return v ? text::format_double(*v) : ""; }

}  // namespace detail

inline std::string membership_csv(const MembershipMatrix& p) {
  std::string out = "id";
  for (std::size_t j = 0; j < p.n_classes; ++j) out += ",class_" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    out += text::csv_escape(p.ids[i]);
    for (double x : p.rows[i]) out += ',' + text::format_double(x);
    out += '\n';
  }
  return out;
}

inline std::string interdisc_csv(const MembershipMatrix& p, const std::vector<double>& index,
                                 const std::vector<std::optional<std::uint32_t>>& row_community) {
  std::string out = "id,community,I\n";
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    out += text::csv_escape(p.ids[i]) + ',' + (row_community[i] ? std::to_string(*row_community[i]) : "") + ',' +
           text::format_double(index[i]) + '\n';
  }
  return out;
}

inline std::string proximity_csv(const ProximityMatrix& m) {
  std::string out = "community";
  for (std::size_t b = 0; b < m.size(); ++b) out += ',' + std::to_string(b);
  out += '\n';
  for (std::size_t a = 0; a < m.size(); ++a) {
    out += std::to_string(a);
    for (const auto& v : m.values[a]) out += ',' + detail::optional_cell(v);
    out += '\n';
  }
  return out;
}

inline std::string correlation_csv(const CorrelationResult& r) {
  const std::size_t j = r.matrix.empty() ? 0 : r.matrix[0].size();
  std::string out = "community";
  for (std::size_t c = 0; c < j; ++c) out += ",class_" + std::to_string(c);
  out += '\n';
  for (std::size_t k = 0; k < r.matrix.size(); ++k) {
    out += std::to_string(k);
    for (const auto& v : r.matrix[k]) out += ',' + detail::optional_cell(v);
    out += '\n';
  }
  return out;
}

}  // namespace litmap
