#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "percnet/lattice.hpp"

namespace percnet {

// Closed-form constants of the corridor-crossing guarantee.
struct PercolationConstants {
  double c = 0.0;
  double kappa = 0.0;
  double p = 0.0;     // open-diamond probability 1 - e^{-c^2}
  double beta = 0.0;
  double a = 0.0;
  bool beta_positive = false;
  bool a_below_minus_one = false;
};

inline PercolationConstants percolation_constants(double c, double kappa) {
  if (!(c > 0) || !(kappa > 0))
    throw std::invalid_argument("percolation_constants: c and kappa must be > 0");
  PercolationConstants k;
  k.c = c;
  k.kappa = kappa;
  k.p = 1.0 - std::exp(-c * c);
  k.beta = 1.0 - (kappa * std::log(6.0) + 4.0) / (kappa * c * c);
  k.a = 0.5 * ((k.beta - 1.0) * kappa * c * c + kappa * std::log(6.0) + 1.0);
  k.beta_positive = k.beta > 0.0;
  k.a_below_minus_one = k.a < -1.0;
  return k;
}

struct Lemma2Bound {
  int m = 0;
  double prob_lower = 0.0;
};

// m = floor(beta*kappa*ln(sqrt(n)/(sqrt(2)c))), probability lower bound
// 1 - 4/3 (n/(2c^2))^a clamped into [0,1].
inline Lemma2Bound lemma2_bound(double n, double c, double kappa) {
  const PercolationConstants k = percolation_constants(c, kappa);
  if (!k.beta_positive)
    throw std::invalid_argument("lemma2_bound: beta <= 0, no crossing guarantee");
  Lemma2Bound b;
  const double lnterm = std::log(std::sqrt(n) / (std::sqrt(2.0) * c));
  b.m = lnterm > 0 ? int(std::floor(k.beta * kappa * lnterm)) : 0;
  const double raw = 1.0 - (4.0 / 3.0) * std::pow(n / (2.0 * c * c), k.a);
  b.prob_lower = std::clamp(raw, 0.0, 1.0);
  return b;
}

// ---------------------------------------------------------------------------

// A maximum family of edge-disjoint open lengthwise crossings. Each path is a
// sequence of edge indices into the graph's edge list, left to right.
struct CrossingSet {
  std::vector<std::vector<int>> paths;
  int count = 0;
};

namespace detail {

// Dinic max flow with unit-capacity arcs for the undirected bond edges.
class FlowNet {
 public:
  explicit FlowNet(int n) : head_(n, -1) {}

  int add_arc(int u, int v, int cap) {
    arcs_.push_back({v, head_[u], cap});
    head_[u] = int(arcs_.size()) - 1;
    arcs_.push_back({u, head_[v], 0});
    head_[v] = int(arcs_.size()) - 1;
    return int(arcs_.size()) - 2;
  }

  int max_flow(int s, int t) {
    int flow = 0;
    while (bfs(s, t)) {
      iter_ = head_;
      while (int f = dfs(s, t, std::numeric_limits<int>::max())) flow += f;
    }
    return flow;
  }

  int flow_on(int arc) const { return arcs_[std::size_t(arc) + 1].cap; }

 private:
  struct Arc {
    int to;
    int next;
    int cap;
  };

  bool bfs(int s, int t) {
    level_.assign(head_.size(), -1);
    std::vector<int> queue{s};
    level_[s] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int u = queue[qi];
      for (int a = head_[u]; a >= 0; a = arcs_[a].next)
        if (arcs_[a].cap > 0 && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[u] + 1;
          queue.push_back(arcs_[a].to);
        }
    }
    return level_[t] >= 0;
  }

  int dfs(int u, int t, int limit) {
    if (u == t) return limit;
    for (int& a = iter_[u]; a >= 0; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.cap > 0 && level_[arc.to] == level_[u] + 1) {
        if (int f = dfs(arc.to, t, std::min(limit, arc.cap))) {
          arc.cap -= f;
          arcs_[a ^ 1].cap += f;
          return f;
        }
      }
    }
    level_[u] = -1;
    return 0;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

}  // namespace detail

// Maximum edge-disjoint open crossings via max flow (Menger). Unit capacity
// per open edge; boundary vertices are attached to a super source/sink.
// Deterministic: the same graph always yields the same path set.
inline CrossingSet max_disjoint_crossings(const BondGraph& g) {
  CrossingSet cs;
  const int n = g.vertex_count();
  const int src = n, snk = n + 1;
  detail::FlowNet net(n + 2);
  // Forward and reverse unit arcs per open undirected edge.
  std::vector<int> fwd(g.edges.size(), -1), bwd(g.edges.size(), -1);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!g.edges[e].open) continue;
    fwd[e] = net.add_arc(g.edges[e].u, g.edges[e].v, 1);
    bwd[e] = net.add_arc(g.edges[e].v, g.edges[e].u, 1);
  }
  const int big = g.rows + 1;
  for (int v : g.left_boundary) net.add_arc(src, v, big);
  for (int v : g.right_boundary) net.add_arc(v, snk, big);
  cs.count = net.max_flow(src, snk);

  // Net direction per edge (flow on both arcs cancels).
  // out_edges[v] lists edges whose net flow leaves v, in edge-index order.
  std::vector<std::vector<std::pair<int, int>>> out_edges(n);  // (edge, to)
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (fwd[e] < 0) continue;
    const int f = net.flow_on(fwd[e]) - net.flow_on(bwd[e]);
    if (f > 0) out_edges[g.edges[e].u].push_back({int(e), g.edges[e].v});
    else if (f < 0) out_edges[g.edges[e].v].push_back({int(e), g.edges[e].u});
  }
  std::vector<bool> used(g.edges.size(), false);
  std::vector<bool> is_right(n, false);
  for (int v : g.right_boundary) is_right[v] = true;

  for (int start : g.left_boundary) {
    for (;;) {
      // Walk used arcs from this boundary vertex until the right boundary.
      std::vector<int> path_edges;
      std::vector<int> path_verts{start};
      int v = start;
      while (!is_right[v] || path_edges.empty()) {
        // Prefer an out-edge perpendicular to the edge we arrived on: straight
        // runs through shared vertices would interleave two paths' diamonds.
        int next_edge = -1, next_v = -1;
        const int last = path_edges.empty() ? -1 : path_edges.back();
        for (auto& [e, to] : out_edges[v]) {
          if (used[e]) continue;
          if (next_edge < 0) {
            next_edge = e;
            next_v = to;
            if (last < 0) break;
          }
          if (last >= 0 && g.edges[std::size_t(e)].horizontal !=
                               g.edges[std::size_t(last)].horizontal) {
            next_edge = e;
            next_v = to;
            break;
          }
        }
        if (next_edge < 0) break;
        used[next_edge] = true;
        // Cancel any loop: flow cycles carry no s-t value.
        auto it = std::find(path_verts.begin(), path_verts.end(), next_v);
        if (it != path_verts.end()) {
          const std::size_t keep = std::size_t(it - path_verts.begin());
          path_edges.resize(keep);
          path_verts.resize(keep + 1);
        } else {
          path_edges.push_back(next_edge);
          path_verts.push_back(next_v);
        }
        v = path_verts.back();
        if (is_right[v] && !path_edges.empty()) break;
      }
      if (!path_edges.empty() && is_right[v]) {
        cs.paths.push_back(std::move(path_edges));
      } else {
        break;  // no more flow out of this boundary vertex
      }
    }
  }
  // Paths certify the count.
  if (int(cs.paths.size()) != cs.count)
    throw std::logic_error("max_disjoint_crossings: flow decomposition mismatch");
  return cs;
}

// ---------------------------------------------------------------------------

// Exhaustive oracle: maximum edge-disjoint crossing count by branch-and-bound
// over path families. Paths are canonicalized by strictly increasing first
// edge index, so each family is enumerated once. Guarded to small lattices.
namespace detail {

struct BruteForce {
  const BondGraph& g;
  std::vector<std::vector<std::pair<int, int>>> adj;  // vertex -> (edge, other)
  std::vector<bool> used;
  std::vector<bool> on_path;
  std::vector<bool> is_left, is_right;
  std::vector<int> first_edges;  // open edges incident to the left boundary
  std::vector<int> cur_verts;    // vertices of the path being extended
  int best = 0;

  explicit BruteForce(const BondGraph& graph) : g(graph) {
    adj.resize(g.vertex_count());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (!g.edges[e].open) continue;
      adj[g.edges[e].u].push_back({int(e), g.edges[e].v});
      adj[g.edges[e].v].push_back({int(e), g.edges[e].u});
    }
    used.assign(g.edges.size(), false);
    on_path.assign(g.vertex_count(), false);
    is_left.assign(g.vertex_count(), false);
    is_right.assign(g.vertex_count(), false);
    for (int v : g.left_boundary) is_left[v] = true;
    for (int v : g.right_boundary) is_right[v] = true;
    for (int v : g.left_boundary)
      for (auto& [e, to] : adj[v]) first_edges.push_back(e);
    std::sort(first_edges.begin(), first_edges.end());
    first_edges.erase(std::unique(first_edges.begin(), first_edges.end()),
                      first_edges.end());
  }

  // Upper bound: every crossing uses an unused open horizontal edge in each
  // column between the boundaries.
  int column_bound() const {
    int bound = std::numeric_limits<int>::max();
    for (int j = g.left_col; j < g.right_col; ++j) {
      int avail = 0;
      for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (g.edges[e].open && !used[e] && g.edges[e].horizontal &&
            g.edges[e].diamond.j == j)
          ++avail;
      bound = std::min(bound, avail);
    }
    return bound == std::numeric_limits<int>::max() ? 0 : bound;
  }

  void search(int count, int min_first) {
    best = std::max(best, count);
    if (count + column_bound() <= best) return;
    for (std::size_t fi = 0; fi < first_edges.size(); ++fi) {
      const int fe = first_edges[fi];
      if (fe < min_first || used[fe]) continue;
      const auto& edge = g.edges[fe];
      const int from = is_left[edge.u] ? edge.u : edge.v;
      const int to = edge.u == from ? edge.v : edge.u;
      used[fe] = true;
      on_path[from] = true;
      cur_verts.push_back(from);
      extend(to, count, fe);
      cur_verts.pop_back();
      on_path[from] = false;
      used[fe] = false;
    }
  }

  // Extends the current path from vertex v; on reaching the right boundary the
  // path is complete and the next path must start at a later first edge.
  // Vertex blocking keeps each path simple but is lifted between paths:
  // edge-disjoint crossings may share vertices.
  void extend(int v, int count, int first) {
    if (is_right[v]) {
      for (int u : cur_verts) on_path[u] = false;
      std::vector<int> saved;
      saved.swap(cur_verts);
      search(count + 1, first + 1);
      cur_verts.swap(saved);
      for (int u : cur_verts) on_path[u] = true;
      return;
    }
    if (on_path[v]) return;
    on_path[v] = true;
    cur_verts.push_back(v);
    for (auto& [e, to] : adj[v]) {
      if (used[e]) continue;
      used[e] = true;
      extend(to, count, first);
      used[e] = false;
    }
    cur_verts.pop_back();
    on_path[v] = false;
  }
};

}  // namespace detail

inline int brute_force_crossings(const BondGraph& g) {
  if (g.rows * g.cols > 40)
    throw std::invalid_argument("brute_force_crossings: instance too large");
  detail::BruteForce bf(g);
  bf.search(0, 0);
  return bf.best;
}

// Independent minimum open-edge cut separating the boundaries, by dynamic
// programming over vertex columns (state: which tracks are on the source
// side). Exact for any lattice with rows <= 20.
inline int min_cut_crossings(const BondGraph& g) {
  if (g.rows > 20)
    throw std::invalid_argument("min_cut_crossings: too many rows for mask DP");
  const int R = g.rows;
  const int masks = 1 << R;
  // Edge lookup tables per vertex column.
  // h_open[j][r]: open horizontal edge between vertex columns j and j+1.
  // v_open_at[i][r]: open vertical edge inside vertex column i between r,r+1.
  std::vector<std::vector<bool>> h_open(g.cols, std::vector<bool>(R, false));
  std::vector<std::vector<bool>> v_open_at(g.cols + 1, std::vector<bool>(R, false));
  for (const auto& e : g.edges) {
    if (!e.open) continue;
    if (e.horizontal) h_open[e.diamond.j][e.diamond.r] = true;
    else v_open_at[e.diamond.j + 1][e.diamond.r] = true;
  }
  auto vertical_cost = [&](int col, int mask) {
    int cost = 0;
    for (int r = 0; r + 1 < R; ++r)
      if (v_open_at[col][r] && (((mask >> r) ^ (mask >> (r + 1))) & 1)) ++cost;
    return cost;
  };
  const int inf = std::numeric_limits<int>::max() / 2;
  std::vector<int> dp(masks, inf);
  const int full = masks - 1;
  dp[full] = vertical_cost(g.left_col, full);  // all left vertices on the source side
  for (int j = g.left_col; j < g.right_col; ++j) {
    std::vector<int> next(masks, inf);
    for (int m = 0; m < masks; ++m) {
      if (dp[m] >= inf) continue;
      for (int m2 = 0; m2 < masks; ++m2) {
        int cost = dp[m] + vertical_cost(j + 1, m2);
        for (int r = 0; r < R; ++r)
          if (h_open[j][r] && (((m >> r) ^ (m2 >> r)) & 1)) ++cost;
        next[m2] = std::min(next[m2], cost);
      }
    }
    dp = std::move(next);
  }
  return dp[0];  // all right vertices on the sink side
}

inline nlohmann::json crossings_to_json(const CrossingSet& cs) {
  nlohmann::json j;
  j["count"] = cs.count;
  j["paths"] = cs.paths;
  return j;
}

}  // namespace percnet
