#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "litmap/graph.hpp"
#include "litmap/modularity.hpp"
#include "litmap/parallel.hpp"
#include "litmap/random.hpp"

namespace litmap {

struct RewireResult {
  CitationGraph graph;
  std::size_t attempted = 0;
  std::size_t accepted = 0;
  bool low_acceptance = false;  // fewer than 1% of attempted swaps accepted
};

// Degree-preserving randomisation by directed double-edge swaps:
// (a->b, c->d) becomes (a->d, c->b) unless that creates a self-loop or a
// parallel edge. Every node keeps its in- and out-degree.
inline RewireResult rewire_null(const CitationGraph& g, std::size_t swaps_per_edge, std::uint64_t seed) {
  if (g.n_edges() < 2) throw DomainError("rewire_null: need at least 2 edges");
  auto edges = g.edges();
  auto key = [](NodeId u, NodeId v) { return (std::uint64_t{u} << 32) | v; };
  std::unordered_set<std::uint64_t> present;
  present.reserve(edges.size() * 2);
  for (auto [u, v] : edges) present.insert(key(u, v));

  Rng rng(seed);
  RewireResult r;
  r.attempted = swaps_per_edge * edges.size();
  for (std::size_t t = 0; t < r.attempted; ++t) {
    const auto i = static_cast<std::size_t>(uniform_index(rng, edges.size()));
    const auto j = static_cast<std::size_t>(uniform_index(rng, edges.size()));
    if (i == j) continue;
    auto [a, b] = edges[i];
    auto [c, d] = edges[j];
    if (a == d || c == b) continue;
    if (present.count(key(a, d)) || present.count(key(c, b))) continue;
    present.erase(key(a, b));
    present.erase(key(c, d));
    present.insert(key(a, d));
    present.insert(key(c, b));
    edges[i] = {a, d};
    edges[j] = {c, b};
    ++r.accepted;
  }
  r.low_acceptance = r.attempted > 0 && r.accepted * 100 < r.attempted;
  r.graph = CitationGraph(g.labels(), edges);
  return r;
}

struct BootstrapSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  std::vector<double> values;
  std::size_t low_acceptance_reps = 0;
};

inline BootstrapSummary summarize(std::vector<double> values) {
  BootstrapSummary s;
  s.values = std::move(values);
  const auto n = static_cast<double>(s.values.size());
  if (s.values.empty()) return s;
  for (double v : s.values) s.mean += v;
  s.mean /= n;
  if (s.values.size() > 1) {
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

struct BootstrapOptions {
  std::size_t swaps_per_edge = 10;
  std::size_t parallelism = 1;
};

// Directed modularity of the fixed partition p on n_reps rewired copies of g.
// Repetition r uses seed derive_seed(seed, r), so results do not depend on
// scheduling.
inline BootstrapSummary bootstrap_modularity(const CitationGraph& g, const Partition& p, std::size_t n_reps,
                                             std::uint64_t seed, const BootstrapOptions& opt = {}) {
  if (n_reps < 2) throw DomainError("bootstrap_modularity: need at least 2 repetitions");
  std::vector<std::size_t> reps(n_reps);
  std::iota(reps.begin(), reps.end(), std::size_t{0});
  auto runs = detail::bounded_map(reps, opt.parallelism, [&](std::size_t rep) {
    auto rw = rewire_null(g, opt.swaps_per_edge, derive_seed(seed, rep));
    return std::pair{directed_modularity(rw.graph, p), rw.low_acceptance};
  });
  std::vector<double> values;
  std::size_t low = 0;
  for (auto [q, flagged] : runs) {
    values.push_back(q);
    low += flagged ? 1 : 0;
  }
  auto s = summarize(std::move(values));
  s.low_acceptance_reps = low;
  return s;
}

}  // namespace litmap
