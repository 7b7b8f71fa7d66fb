#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <unordered_map>
#include <vector>

#include "litmap/graph.hpp"
#include "litmap/modularity.hpp"
#include "litmap/random.hpp"

namespace litmap {

struct LouvainOptions {
  std::uint64_t seed = 0;
  double resolution = 1.0;
  double min_gain = 1e-9;  // a pass or level must raise Q by more than this
  std::size_t max_levels = 64;
  // Levels with at most this many nodes also get Kernighan-Lin sweeps.
  std::size_t kl_max_nodes = 500;
  // Independent runs from seeds derived from `seed`; the highest Q wins.
  std::size_t restarts = 4;
};

namespace detail {

struct LouvainLevel {
  std::vector<std::size_t> community;  // level node -> community (contiguous)
  std::size_t n_communities = 0;
  bool moved = false;
};

inline double level_modularity(const WeightedGraph& g, const std::vector<std::size_t>& comm,
                               const std::vector<double>& tot, double resolution) {
  const double m = g.total_weight();
  std::vector<double> in(g.n_nodes(), 0.0);
  for (NodeId u = 0; u < g.n_nodes(); ++u) {
    in[comm[u]] += g.self_loop(u);
    for (const auto& a : g.neighbors(u)) {
      if (a.to > u && comm[a.to] == comm[u]) in[comm[u]] += a.weight;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < in.size(); ++c) {
    const double share = tot[c] / (2.0 * m);
    q += in[c] / m - resolution * share * share;
  }
  return q;
}

// Repeated local moving of single nodes until a full pass yields no move or
// raises Q by at most min_gain.
// Starts from `initial` (ids < n) or from singletons when it is empty.
inline LouvainLevel local_moving(const WeightedGraph& g, const LouvainOptions& opt, Rng& rng,
                                 std::vector<std::size_t> initial = {}) {
  const std::size_t n = g.n_nodes();
  const double m2 = 2.0 * g.total_weight();
  std::vector<std::size_t> comm = std::move(initial);
  if (comm.empty()) {
    comm.resize(n);
    std::iota(comm.begin(), comm.end(), std::size_t{0});
  }
  std::vector<double> strength(n), tot(n, 0.0);
  std::vector<std::size_t> members(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    strength[u] = g.strength(u);
    tot[comm[u]] += strength[u];
    ++members[comm[u]];
  }
  std::set<std::size_t> empty;
  for (std::size_t c = 0; c < n; ++c) {
    if (members[c] == 0) empty.insert(c);
  }

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  shuffle(order, rng);

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  LouvainLevel level;
  double q = level_modularity(g, comm, tot, opt.resolution);
  constexpr double kTie = 1e-12;
  while (true) {
    std::size_t moves = 0;
    for (NodeId u : order) {
      const std::size_t home = comm[u];
      const double ku = strength[u];
      touched.clear();
      for (const auto& a : g.neighbors(u)) {
        const std::size_t c = comm[a.to];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += a.weight;
      }
      tot[home] -= ku;
      std::size_t best = home;
      double best_gain = link[home] - opt.resolution * tot[home] * ku / m2;
      std::sort(touched.begin(), touched.end());
      for (std::size_t c : touched) {
        const double gain = link[c] - opt.resolution * tot[c] * ku / m2;
        if (gain > best_gain + kTie) {
          best = c;
          best_gain = gain;
        }
      }
      for (std::size_t c : touched) link[c] = 0.0;
      // isolating u gains 0; taken only when every other option loses
      if (best_gain < -kTie && members[home] > 1 && !empty.empty()) {
        best = *empty.begin();
        best_gain = 0.0;
      }
      tot[best] += ku;
      if (best != home) {
        comm[u] = best;
        if (--members[home] == 0) empty.insert(home);
        if (members[best]++ == 0) empty.erase(best);
        ++moves;
      }
    }
    if (moves == 0) break;
    level.moved = true;
    const double q_next = level_modularity(g, comm, tot, opt.resolution);
    const bool stalled = q_next - q <= opt.min_gain;
    q = q_next;
    if (stalled) break;
  }
  std::unordered_map<std::size_t, std::size_t> relabel;
  level.community.resize(n);
  for (NodeId u = 0; u < n; ++u) {
    auto [it, fresh] = relabel.emplace(comm[u], relabel.size());
    level.community[u] = it->second;
  }
  level.n_communities = relabel.size();
  return level;
}

// Kernighan-Lin style sweeps: every node is moved once, each time taking the
// best available move even when it lowers Q, and the sweep is rolled back to
// its best prefix. Sweeps repeat while they improve Q by more than min_gain.
inline std::vector<std::size_t> kernighan_lin(const WeightedGraph& g, const LouvainOptions& opt,
                                              std::vector<std::size_t> comm, Rng& rng) {
  const std::size_t n = g.n_nodes();
  const double m2 = 2.0 * g.total_weight();
  std::vector<double> strength(n), tot(n, 0.0);
  std::vector<std::size_t> members(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    strength[u] = g.strength(u);
    tot[comm[u]] += strength[u];
    ++members[comm[u]];
  }
  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  constexpr double kTie = 1e-12;
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  for (int sweep = 0; sweep < 32; ++sweep) {
    shuffle(order, rng);  // scan order decides ties
    std::vector<bool> moved(n, false);
    std::vector<std::pair<NodeId, std::size_t>> history;  // node, previous community
    double cumulative = 0.0, best_cumulative = 0.0;
    std::size_t best_steps = 0;
    for (std::size_t step = 0; step < n; ++step) {
      bool found = false;
      NodeId best_u = 0;
      std::size_t best_c = 0;
      double best_gain = 0.0;
      std::size_t first_empty = n;
      for (std::size_t c = 0; c < n; ++c) {
        if (members[c] == 0) {
          first_empty = c;
          break;
        }
      }
      for (NodeId u : order) {
        if (moved[u]) continue;
        const std::size_t home = comm[u];
        const double ku = strength[u];
        touched.clear();
        for (const auto& a : g.neighbors(u)) {
          const std::size_t c = comm[a.to];
          if (link[c] == 0.0) touched.push_back(c);
          link[c] += a.weight;
        }
        const double stay = link[home] - opt.resolution * (tot[home] - ku) * ku / m2;
        std::sort(touched.begin(), touched.end());
        auto consider = [&](std::size_t c, double l) {
          const double gain = (l - opt.resolution * tot[c] * ku / m2) - stay;
          if (!found || gain > best_gain + kTie) {
            found = true;
            best_u = u;
            best_c = c;
            best_gain = gain;
          }
        };
        for (std::size_t c : touched) {
          if (c != home) consider(c, link[c]);
        }
        if (members[home] > 1 && first_empty < n) consider(first_empty, 0.0);
        for (std::size_t c : touched) link[c] = 0.0;
      }
      if (!found) break;
      const std::size_t from = comm[best_u];
      tot[from] -= strength[best_u];
      --members[from];
      tot[best_c] += strength[best_u];
      ++members[best_c];
      comm[best_u] = best_c;
      moved[best_u] = true;
      history.emplace_back(best_u, from);
      cumulative += best_gain;
      if (cumulative > best_cumulative + kTie) {
        best_cumulative = cumulative;
        best_steps = history.size();
      }
    }
    while (history.size() > best_steps) {
      auto [u, from] = history.back();
      history.pop_back();
      tot[comm[u]] -= strength[u];
      --members[comm[u]];
      tot[from] += strength[u];
      ++members[from];
      comm[u] = from;
    }
    if (best_cumulative / (m2 / 2.0) <= opt.min_gain) break;
  }
  return comm;
}

inline WeightedGraph aggregate(const WeightedGraph& g, const LouvainLevel& level) {
  WeightedGraph out(level.n_communities);
  std::unordered_map<std::uint64_t, double> pairs;
  for (NodeId u = 0; u < g.n_nodes(); ++u) {
    const auto cu = static_cast<NodeId>(level.community[u]);
    if (g.self_loop(u) != 0.0) out.add_edge(cu, cu, g.self_loop(u));
    for (const auto& a : g.neighbors(u)) {
      if (a.to < u) continue;
      const auto cv = static_cast<NodeId>(level.community[a.to]);
      if (cu == cv) {
        out.add_edge(cu, cu, a.weight);
      } else {
        const NodeId lo = std::min(cu, cv), hi = std::max(cu, cv);
        pairs[(std::uint64_t{lo} << 32) | hi] += a.weight;
      }
    }
  }
  std::vector<std::pair<std::uint64_t, double>> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end());
  for (auto [key, w] : sorted) {
    out.add_new_edge(static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffu), w);
  }
  return out;
}

}  // namespace detail

// Multi-level Louvain modularity maximisation on an undirected weighted graph.
// The node visiting order at each level is shuffled from opt.seed; among equal
// gains the node stays put, otherwise the lowest community id wins. A node
// whose every placement lowers Q is moved to an empty community. Small levels
// additionally get Kernighan-Lin sweeps during refinement. Once the
// hierarchy stops shrinking, the partition is projected back down and local
// moving is repeated at every level (multilevel refinement).
inline Partition louvain(const WeightedGraph& g, const LouvainOptions& opt = {});

namespace detail {

inline Partition louvain_run(const WeightedGraph& g, const LouvainOptions& opt, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WeightedGraph> graphs{g};
  std::vector<std::vector<std::size_t>> up;  // up[l]: node of graphs[l] -> node of graphs[l+1]
  std::vector<std::size_t> top;              // assignment on graphs.back()
  for (std::size_t depth = 0; depth < opt.max_levels; ++depth) {
    auto level = local_moving(graphs.back(), opt, rng);
    if (!level.moved) break;
    if (depth + 1 == opt.max_levels) {
      top = std::move(level.community);
      break;
    }
    graphs.push_back(aggregate(graphs.back(), level));
    up.push_back(std::move(level.community));
  }
  if (top.empty()) {
    top.resize(graphs.back().n_nodes());
    std::iota(top.begin(), top.end(), std::size_t{0});
  }
  std::vector<std::size_t> assignment = std::move(top);
  for (std::size_t l = up.size(); l-- > 0;) {
    std::vector<std::size_t> lower(graphs[l].n_nodes());
    for (std::size_t u = 0; u < lower.size(); ++u) lower[u] = assignment[up[l][u]];
    assignment = local_moving(graphs[l], opt, rng, std::move(lower)).community;
    if (graphs[l].n_nodes() <= opt.kl_max_nodes) {
      assignment = kernighan_lin(graphs[l], opt, std::move(assignment), rng);
    }
  }
  if (up.empty() && g.n_nodes() <= opt.kl_max_nodes) {
    assignment = kernighan_lin(g, opt, std::move(assignment), rng);
  }
  return Partition(assignment);
}

}  // namespace detail

inline Partition louvain(const WeightedGraph& g, const LouvainOptions& opt) {
  if (g.n_nodes() == 0) throw DomainError("louvain: empty graph");
  if (g.total_weight() <= 0.0) {
    std::vector<std::size_t> singletons(g.n_nodes());
    std::iota(singletons.begin(), singletons.end(), std::size_t{0});
    return Partition(singletons);
  }
  Partition best;
  double best_q = 0.0;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, opt.restarts); ++r) {
    auto p = detail::louvain_run(g, opt, r == 0 ? opt.seed : derive_seed(opt.seed, r));
    const double q = modularity(g, p, opt.resolution);
    if (r == 0 || q > best_q + 1e-12) {
      best = std::move(p);
      best_q = q;
    }
  }
  return best;
}

// Directed input is clustered on its symmetrised view.
inline Partition louvain(const CitationGraph& g, const LouvainOptions& opt = {}) {
  auto p = louvain(symmetrize(g), opt);
  p.set_layer(Layer::Citation);
  return p;
}

}  // namespace litmap
