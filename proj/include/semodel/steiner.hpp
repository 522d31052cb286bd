#pragma once
// Top-k Steiner trees over the alignment graph and seed selection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "semodel/alignment.hpp"
#include "semodel/graph_match.hpp"

namespace semodel {

struct CandidateModel {
  SemanticModel model;
  double total_weight = 0.0;
  std::size_t rank = 0;
  std::string code;
};

namespace detail {

/// Undirected view of the alignment graph with integer vertices. Parallel
/// edges collapse to the lightest (then smallest label) one.
struct SteinerGraph {
  struct Arc {
    std::size_t to;
    std::size_t edge;  // index into AlignmentGraph::edges()
    double w;
  };

  const AlignmentGraph& ag;
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> index;
  std::vector<char> is_attr;
  std::vector<std::vector<Arc>> adj;      // undirected
  std::vector<std::vector<Arc>> rev_adj;  // reverse direction: from dst to src

  explicit SteinerGraph(const AlignmentGraph& g) : ag(g) {
    for (const auto& [id, n] : g.nodes()) {
      index[id] = ids.size();
      ids.push_back(id);
      is_attr.push_back(n.is_attribute());
    }
    adj.resize(ids.size());
    rev_adj.resize(ids.size());
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> best_undirected, best_directed;
    auto better = [&](std::size_t a, std::size_t b) {
      const auto &x = g.edges()[a], &y = g.edges()[b];
      return std::tie(x.weight, x.label) < std::tie(y.weight, y.label);
    };
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      const auto& e = g.edges()[i];
      auto s = index.at(e.src), t = index.at(e.dst);
      auto key = std::minmax(s, t);
      auto [it, fresh] = best_undirected.try_emplace({key.first, key.second}, i);
      if (!fresh && better(i, it->second)) it->second = i;
      auto [jt, jfresh] = best_directed.try_emplace({s, t}, i);
      if (!jfresh && better(i, jt->second)) jt->second = i;
    }
    for (auto& [k, i] : best_undirected) {
      const double w = g.edges()[i].weight;
      adj[k.first].push_back({k.second, i, w});
      adj[k.second].push_back({k.first, i, w});
    }
    for (auto& [k, i] : best_directed) rev_adj[k.second].push_back({k.first, i, g.edges()[i].weight});
  }

  /// Dijkstra from `source`; attribute vertices other than the source are not expanded.
  void dijkstra(std::size_t source, const std::vector<std::vector<Arc>>& arcs, std::vector<double>& dist,
                std::vector<std::size_t>& pred_edge, std::vector<std::size_t>& pred_node) const {
    const auto n = ids.size();
    dist.assign(n, std::numeric_limits<double>::infinity());
    pred_edge.assign(n, SIZE_MAX);
    pred_node.assign(n, SIZE_MAX);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.push({0.0, source});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      if (u != source && is_attr[u]) continue;
      for (const auto& a : arcs[u]) {
        if (is_attr[a.to]) continue;
        const double nd = d + a.w;
        if (nd < dist[a.to]) {
          dist[a.to] = nd;
          pred_edge[a.to] = a.edge;
          pred_node[a.to] = u;
          pq.push({nd, a.to});
        }
      }
    }
  }

  /// Minimum spanning tree of the given edges, then repeated removal of
  /// non-terminal class leaves. Returns the cleaned edge set.
  std::set<std::size_t> clean(const std::set<std::size_t>& edge_set) const {
    std::vector<std::size_t> es(edge_set.begin(), edge_set.end());
    std::sort(es.begin(), es.end(), [&](auto a, auto b) {
      const auto &x = ag.edges()[a], &y = ag.edges()[b];
      return std::tie(x.weight, x.src, x.label, x.dst) < std::tie(y.weight, y.src, y.label, y.dst);
    });
    std::map<std::string, std::string> parent;
    std::function<std::string(const std::string&)> root = [&](const std::string& x) -> std::string {
      auto it = parent.find(x);
      if (it == parent.end() || it->second == x) return x;
      return it->second = root(it->second);
    };
    std::set<std::size_t> tree;
    for (auto i : es) {
      const auto& e = ag.edges()[i];
      auto a = root(e.src), b = root(e.dst);
      if (a == b) continue;
      parent[a] = b;
      tree.insert(i);
    }
    for (bool changed = true; changed;) {
      changed = false;
      std::map<std::string, int> degree;
      for (auto i : tree) {
        ++degree[ag.edges()[i].src];
        ++degree[ag.edges()[i].dst];
      }
      for (auto it = tree.begin(); it != tree.end();) {
        const auto& e = ag.edges()[*it];
        if (ag.find(e.dst)->is_attribute()) {
          ++it;
          continue;
        }
        const bool src_leaf = degree[e.src] == 1 && !ag.find(e.src)->is_attribute();
        const bool dst_leaf = degree[e.dst] == 1 && !ag.find(e.dst)->is_attribute();
        if (src_leaf || dst_leaf) {
          it = tree.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    return tree;
  }
};

inline CandidateModel to_candidate(const AlignmentGraph& ag, const std::set<std::size_t>& tree) {
  CandidateModel c;
  auto ensure = [&](const std::string& id) {
    const auto* n = ag.find(id);
    if (n->is_attribute()) {
      if (!c.model.find_data(id)) c.model.add_data_with_id(id, n->attribute);
    } else if (!c.model.find_class(id)) {
      c.model.add_class_with_id(id, n->cls, n->index);
    }
  };
  for (auto i : tree) {
    const auto& e = ag.edges()[i];
    ensure(e.src);
    ensure(e.dst);
  }
  for (auto i : tree) {
    const auto& e = ag.edges()[i];
    if (ag.find(e.dst)->is_attribute())
      c.model.add_data_edge(e.src, e.label, e.dst);
    else
      c.model.add_object_edge(e.src, e.label, e.dst);
    c.total_weight += e.weight;
  }
  c.code = canonical_code(PatternGraph::from_model_with_data(c.model));
  return c;
}

}  // namespace detail

/// Up to k Steiner trees connecting the given attribute terminals, sorted by
/// (total weight, canonical code). Candidates come from backward expansion
/// from every terminal (one tree per common root) and, for at most
/// `exact_limit` terminals, an exact Dreyfus-Wagner tree.
inline std::vector<CandidateModel> top_k_steiner_trees(const AlignmentGraph& ag,
                                                       const std::vector<std::string>& terminals,
                                                       std::size_t k = 10, std::size_t exact_limit = 10) {
  if (k == 0) throw ConfigError("steiner: k must be at least 1");
  if (terminals.empty()) throw StageError("steiner", "no terminal attributes");
  detail::SteinerGraph g(ag);
  std::vector<std::size_t> term;
  for (const auto& t : terminals) {
    auto it = g.index.find("@" + t);
    if (it == g.index.end() || g.adj[it->second].empty())
      throw StageError("steiner", "attribute '" + t + "' has no attachment edge");
    term.push_back(it->second);
  }
  const auto n = g.ids.size();
  const auto T = term.size();

  // Undirected reachability check: every terminal must meet terminal 0.
  {
    std::vector<double> dist;
    std::vector<std::size_t> pe, pn;
    g.dijkstra(term[0], g.adj, dist, pe, pn);
    for (std::size_t i = 1; i < T; ++i) {
      bool ok = false;
      for (const auto& a : g.adj[term[i]])
        if (dist[a.to] < std::numeric_limits<double>::infinity()) ok = true;
      if (!ok) throw StageError("steiner", "attribute '" + terminals[i] + "' is disconnected from the others");
    }
  }

  std::vector<CandidateModel> pool;
  std::set<std::string> codes;
  auto offer = [&](const std::set<std::size_t>& edges) {
    auto cleaned = g.clean(edges);
    auto c = detail::to_candidate(ag, cleaned);
    if (c.model.data_nodes().size() != T || !c.model.is_connected()) return;
    if (codes.insert(c.code).second) pool.push_back(std::move(c));
  };

  // Backward expansion: a root reaching every terminal along edge directions.
  std::vector<std::vector<double>> dist(T);
  std::vector<std::vector<std::size_t>> pred_edge(T), pred_node(T);
  for (std::size_t i = 0; i < T; ++i) g.dijkstra(term[i], g.rev_adj, dist[i], pred_edge[i], pred_node[i]);
  std::vector<std::pair<double, std::size_t>> roots;
  for (std::size_t v = 0; v < n; ++v) {
    if (g.is_attr[v]) continue;
    double sum = 0.0;
    for (std::size_t i = 0; i < T; ++i) sum += dist[i][v];
    if (sum < std::numeric_limits<double>::infinity()) roots.emplace_back(sum, v);
  }
  std::sort(roots.begin(), roots.end());
  for (const auto& [_, r] : roots) {
    std::set<std::size_t> edges;
    for (std::size_t i = 0; i < T; ++i)
      for (auto v = r; v != term[i]; v = pred_node[i][v]) edges.insert(pred_edge[i][v]);
    offer(edges);
  }

  // Exact tree on the undirected view; merges only at class vertices.
  if (T <= exact_limit) {
    const std::size_t full = (std::size_t{1} << T) - 1;
    const double inf = std::numeric_limits<double>::infinity();
    struct Back {
      int kind = 0;  // 0 none, 1 base path, 2 merge, 3 relax
      std::size_t a = 0;
      std::size_t edge = 0;
    };
    std::vector<std::vector<double>> dp(full + 1, std::vector<double>(n, inf));
    std::vector<std::vector<Back>> back(full + 1, std::vector<Back>(n));
    std::vector<std::vector<std::size_t>> base_pe(T), base_pn(T);
    for (std::size_t i = 0; i < T; ++i) {
      std::vector<double> d;
      g.dijkstra(term[i], g.adj, d, base_pe[i], base_pn[i]);
      for (std::size_t v = 0; v < n; ++v)
        if (!g.is_attr[v] && d[v] < inf) {
          dp[std::size_t{1} << i][v] = d[v];
          back[std::size_t{1} << i][v] = {1, i, 0};
        }
    }
    for (std::size_t S = 1; S <= full; ++S) {
      if ((S & (S - 1)) == 0) continue;
      const std::size_t low = S & (~S + 1);
      for (std::size_t v = 0; v < n; ++v) {
        if (g.is_attr[v]) continue;
        for (std::size_t A = (S - 1) & S; A > 0; A = (A - 1) & S) {
          if (!(A & low)) continue;
          const double c = dp[A][v] + dp[S ^ A][v];
          if (c < dp[S][v]) {
            dp[S][v] = c;
            back[S][v] = {2, A, 0};
          }
        }
      }
      using Item = std::pair<double, std::size_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      for (std::size_t v = 0; v < n; ++v)
        if (dp[S][v] < inf) pq.push({dp[S][v], v});
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dp[S][u]) continue;
        for (const auto& a : g.adj[u]) {
          if (g.is_attr[a.to]) continue;
          if (d + a.w < dp[S][a.to]) {
            dp[S][a.to] = d + a.w;
            back[S][a.to] = {3, u, a.edge};
            pq.push({dp[S][a.to], a.to});
          }
        }
      }
    }
    std::size_t best = SIZE_MAX;
    for (std::size_t v = 0; v < n; ++v)
      if (!g.is_attr[v] && dp[full][v] < inf && (best == SIZE_MAX || dp[full][v] < dp[full][best])) best = v;
    if (best != SIZE_MAX) {
      std::set<std::size_t> edges;
      std::vector<std::pair<std::size_t, std::size_t>> todo{{full, best}};
      while (!todo.empty()) {
        auto [S, v] = todo.back();
        todo.pop_back();
        const auto& b = back[S][v];
        if (b.kind == 1) {
          for (auto u = v; u != term[b.a]; u = base_pn[b.a][u]) edges.insert(base_pe[b.a][u]);
        } else if (b.kind == 2) {
          todo.push_back({b.a, v});
          todo.push_back({S ^ b.a, v});
        } else if (b.kind == 3) {
          edges.insert(b.edge);
          todo.push_back({S, b.a});
        }
      }
      offer(edges);
    }
  }

  if (pool.empty()) throw StageError("steiner", "no tree connects all attributes");
  std::sort(pool.begin(), pool.end(), [](const CandidateModel& a, const CandidateModel& b) {
    if (std::fabs(a.total_weight - b.total_weight) > 1e-9) return a.total_weight < b.total_weight;
    return a.code < b.code;
  });
  if (pool.size() > k) pool.resize(k);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i].rank = i + 1;
  return pool;
}

inline SemanticModel select_seed(const std::vector<CandidateModel>& cands) {
  if (cands.empty()) throw StageError("steiner", "no candidate models");
  return std::min_element(cands.begin(), cands.end(),
                          [](const CandidateModel& a, const CandidateModel& b) {
                            if (std::fabs(a.total_weight - b.total_weight) > 1e-9)
                              return a.total_weight < b.total_weight;
                            return a.code < b.code;
                          })
      ->model;
}

}  // namespace semodel
