#pragma once
//
// Exact graph matching against a knowledge graph: injective label-preserving
// embeddings, minimum-image support, maximum common subgraph, and canonical
// codes for duplicate detection.
//

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "semodel/graph_core.hpp"

namespace semodel {

struct PatternNode {
  std::string id;
  std::string label;
};

struct PatternEdge {
  std::size_t src;
  std::string label;
  std::size_t dst;
  bool operator==(const PatternEdge&) const = default;
};

/// Labelled directed multigraph matched against the knowledge graph.
class PatternGraph {
 public:
  std::size_t add_node(std::string id, std::string label) {
    nodes_.push_back({std::move(id), std::move(label)});
    return nodes_.size() - 1;
  }

  void add_edge(std::size_t src, std::string label, std::size_t dst) {
    edges_.push_back({src, std::move(label), dst});
  }

  const std::vector<PatternNode>& nodes() const noexcept { return nodes_; }
  const std::vector<PatternEdge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::optional<std::size_t> find(std::string_view id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].id == id) return i;
    return std::nullopt;
  }

  bool has_edge(std::size_t src, std::string_view label, std::size_t dst) const {
    return std::any_of(edges_.begin(), edges_.end(), [&](const PatternEdge& e) {
      return e.src == src && e.dst == dst && e.label == label;
    });
  }

  /// Connected components as lists of node indices, ordered by smallest member.
  std::vector<std::vector<std::size_t>> components() const {
    std::vector<std::size_t> parent(nodes_.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find_root = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : edges_) parent[find_root(e.src)] = find_root(e.dst);
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < nodes_.size(); ++i) groups[find_root(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [_, g] : groups) out.push_back(std::move(g));
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_connected() const { return nodes_.size() <= 1 || components().size() == 1; }

  /// Subgraph on the given edges plus any extra nodes; node ids are preserved.
  PatternGraph subgraph(const std::vector<std::size_t>& edge_ids,
                        const std::vector<std::size_t>& extra_nodes = {}) const {
    std::vector<char> keep(nodes_.size(), 0);
    for (auto e : edge_ids) keep[edges_[e].src] = keep[edges_[e].dst] = 1;
    for (auto n : extra_nodes) keep[n] = 1;
    PatternGraph g;
    std::vector<std::size_t> remap(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (keep[i]) remap[i] = g.add_node(nodes_[i].id, nodes_[i].label);
    std::vector<std::size_t> sorted = edge_ids;
    std::sort(sorted.begin(), sorted.end());
    for (auto e : sorted) g.add_edge(remap[edges_[e].src], edges_[e].label, remap[edges_[e].dst]);
    return g;
  }

  /// Class nodes and object edges of a semantic model; labels are class names.
  static PatternGraph from_model(const SemanticModel& m) {
    PatternGraph g;
    for (const auto& n : m.class_nodes()) g.add_node(n.id, n.cls);
    for (const auto& e : m.edges())
      if (e.kind == EdgeKind::Object) g.add_edge(*g.find(e.src), e.label, *g.find(e.dst));
    return g;
  }

  /// Whole model including data nodes (labelled "@attribute"); used for
  /// duplicate detection of complete semantic models.
  static PatternGraph from_model_with_data(const SemanticModel& m) {
    PatternGraph g = from_model(m);
    for (const auto& n : m.data_nodes()) g.add_node(n.id, "@" + n.attribute);
    for (const auto& e : m.edges())
      if (e.kind == EdgeKind::Data) g.add_edge(*g.find(e.src), e.label, *g.find(e.dst));
    return g;
  }

 private:
  std::vector<PatternNode> nodes_;
  std::vector<PatternEdge> edges_;
};

/// One match of a pattern: entity ids aligned with the pattern's node order.
struct Embedding {
  std::vector<std::string> entities;
  bool operator==(const Embedding&) const = default;
};

namespace detail {

/// Backtracking matcher (VF2-style state growth with most-constrained-first
/// ordering). Node candidates are pre-filtered by class and incident labels.
class Matcher {
 public:
  using Entity = KnowledgeGraph::Entity;
  using Symbol = KnowledgeGraph::Symbol;

  Matcher(const PatternGraph& p, const KnowledgeGraph& kg) : p_(p), kg_(kg) {
    const auto n = p.node_count();
    edge_prop_.resize(p.edge_count());
    for (std::size_t i = 0; i < p.edge_count(); ++i) {
      auto s = kg.property_symbol(p.edges()[i].label);
      if (!s) {
        feasible_ = false;
        return;
      }
      edge_prop_[i] = *s;
    }
    in_domain_.assign(n, std::vector<char>(kg.entity_count(), 0));
    domain_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      auto c = kg.class_symbol(p.nodes()[v].label);
      if (!c) {
        feasible_ = false;
        return;
      }
      std::vector<Symbol> need_out, need_in;
      for (std::size_t i = 0; i < p.edge_count(); ++i) {
        if (p.edges()[i].src == v) need_out.push_back(edge_prop_[i]);
        if (p.edges()[i].dst == v) need_in.push_back(edge_prop_[i]);
      }
      for (Entity e : kg.entities_of_class(*c)) {
        if (!covers(kg.out(e), need_out) || !covers(kg.in(e), need_in)) continue;
        domain_[v].push_back(e);
        in_domain_[v][e] = 1;
      }
      if (domain_[v].empty()) feasible_ = false;
    }
  }

  bool feasible() const noexcept { return feasible_ && p_.node_count() > 0; }
  const std::vector<Entity>& domain(std::size_t v) const { return domain_[v]; }

  /// Calls `on_match(assignment)` for every embedding until it returns false.
  /// Optionally pins node `fixed->first` to entity `fixed->second`.
  template <class F>
  void search(F&& on_match, std::optional<std::pair<std::size_t, Entity>> fixed = std::nullopt) {
    if (!feasible()) return;
    if (fixed && !in_domain_[fixed->first][fixed->second]) return;
    plan(fixed ? std::optional<std::size_t>(fixed->first) : std::nullopt);
    assign_.assign(p_.node_count(), kNone);
    used_.clear();
    stop_ = false;
    fixed_ = fixed;
    recurse(0, on_match);
  }

 private:
  static constexpr Entity kNone = std::numeric_limits<Entity>::max();

  static bool covers(std::span<const KnowledgeGraph::Adjacent> adj, const std::vector<Symbol>& need) {
    for (auto p : need)
      if (std::none_of(adj.begin(), adj.end(), [&](const auto& a) { return a.property == p; })) return false;
    return true;
  }

  void plan(std::optional<std::size_t> first) {
    const auto n = p_.node_count();
    order_.clear();
    std::vector<char> placed(n, 0);
    auto pick = [&](bool require_adjacent) -> std::optional<std::size_t> {
      std::optional<std::size_t> best;
      for (std::size_t v = 0; v < n; ++v) {
        if (placed[v]) continue;
        if (require_adjacent) {
          bool adj = false;
          for (const auto& e : p_.edges())
            if ((e.src == v && placed[e.dst]) || (e.dst == v && placed[e.src])) adj = true;
          if (!adj) continue;
        }
        if (!best || domain_[v].size() < domain_[*best].size()) best = v;
      }
      return best;
    };
    if (first) {
      order_.push_back(*first);
      placed[*first] = 1;
    }
    while (order_.size() < n) {
      auto v = pick(true);
      if (!v) v = pick(false);
      order_.push_back(*v);
      placed[*v] = 1;
    }
    // Edges whose both endpoints are placed once order_[i] is placed.
    checks_.assign(n, {});
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[order_[i]] = i;
    for (std::size_t i = 0; i < p_.edge_count(); ++i) {
      const auto& e = p_.edges()[i];
      checks_[std::max(pos[e.src], pos[e.dst])].push_back(i);
    }
  }

  template <class F>
  void recurse(std::size_t depth, F& on_match) {
    if (stop_) return;
    if (depth == order_.size()) {
      if (!on_match(assign_)) stop_ = true;
      return;
    }
    const std::size_t v = order_[depth];
    std::vector<Entity> candidates;
    if (depth == 0 && fixed_) {
      candidates.push_back(fixed_->second);
    } else {
      // Generate from the first edge linking v to an already-mapped node.
      std::optional<std::size_t> via;
      for (auto ei : checks_[depth]) {
        const auto& e = p_.edges()[ei];
        if (e.src != e.dst) {
          via = ei;
          break;
        }
      }
      if (via) {
        const auto& e = p_.edges()[*via];
        const auto prop = edge_prop_[*via];
        if (e.src == v) {
          for (const auto& a : kg_.in(assign_[e.dst]))
            if (a.property == prop) candidates.push_back(a.other);
        } else {
          for (const auto& a : kg_.out(assign_[e.src]))
            if (a.property == prop) candidates.push_back(a.other);
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      } else {
        candidates = domain_[v];
      }
    }
    for (Entity c : candidates) {
      if (!in_domain_[v][c] || used_.count(c)) continue;
      assign_[v] = c;
      bool ok = true;
      for (auto ei : checks_[depth]) {
        const auto& e = p_.edges()[ei];
        if (!kg_.has_relation(assign_[e.src], edge_prop_[ei], assign_[e.dst])) {
          ok = false;
          break;
        }
      }
      if (ok) {
        used_.insert(c);
        recurse(depth + 1, on_match);
        used_.erase(c);
        if (stop_) break;
      }
      assign_[v] = kNone;
    }
    assign_[v] = kNone;
  }

  const PatternGraph& p_;
  const KnowledgeGraph& kg_;
  bool feasible_ = true;
  std::vector<Symbol> edge_prop_;
  std::vector<std::vector<Entity>> domain_;
  std::vector<std::vector<char>> in_domain_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> checks_;
  std::vector<Entity> assign_;
  std::unordered_set<Entity> used_;
  std::optional<std::pair<std::size_t, Entity>> fixed_;
  bool stop_ = false;
};

}  // namespace detail

/// True iff the pattern has at least one injective, label-preserving embedding.
inline bool is_subgraph_isomorphic(const PatternGraph& pattern, const KnowledgeGraph& kg) {
  if (pattern.empty()) return true;
  detail::Matcher m(pattern, kg);
  bool found = false;
  m.search([&](const auto&) {
    found = true;
    return false;
  });
  return found;
}

/// All embeddings (or the first `limit` when limit > 0), ordered by the tuple
/// of entity ids in pattern-node order.
inline std::vector<Embedding> enumerate_embeddings(const PatternGraph& pattern, const KnowledgeGraph& kg,
                                                   std::size_t limit = 0) {
  std::vector<Embedding> out;
  if (pattern.empty()) return out;
  detail::Matcher m(pattern, kg);
  m.search([&](const std::vector<KnowledgeGraph::Entity>& a) {
    Embedding e;
    e.entities.reserve(a.size());
    for (auto x : a) e.entities.push_back(kg.entity_id(x));
    out.push_back(std::move(e));
    return true;
  });
  std::sort(out.begin(), out.end(),
            [](const Embedding& a, const Embedding& b) { return a.entities < b.entities; });
  if (limit > 0 && out.size() > limit) out.resize(limit);
  return out;
}

/// Minimum-image support: min over pattern nodes of the number of distinct
/// entities that node takes across all embeddings. Zero iff no embedding.
inline std::size_t min_image_frequency(const PatternGraph& pattern, const KnowledgeGraph& kg) {
  if (pattern.empty()) return 0;
  detail::Matcher m(pattern, kg);
  if (!m.feasible()) return 0;
  const auto n = pattern.node_count();
  std::vector<std::unordered_set<KnowledgeGraph::Entity>> valid(n), invalid(n);
  std::vector<std::size_t> nodes(n);
  for (std::size_t v = 0; v < n; ++v) nodes[v] = v;
  std::sort(nodes.begin(), nodes.end(),
            [&](auto a, auto b) { return m.domain(a).size() < m.domain(b).size(); });
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (auto v : nodes) {
    std::size_t count = 0;
    for (auto e : m.domain(v)) {
      if (count >= best) break;
      if (valid[v].count(e)) {
        ++count;
        continue;
      }
      bool found = false;
      m.search(
          [&](const std::vector<KnowledgeGraph::Entity>& a) {
            for (std::size_t u = 0; u < n; ++u) valid[u].insert(a[u]);
            found = true;
            return false;
          },
          std::make_pair(v, e));
      if (found) ++count;
    }
    best = std::min(best, count);
    if (best == 0) return 0;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Canonical codes
// ---------------------------------------------------------------------------

namespace detail {

struct CodeEntry {
  int from;
  int to;
  std::string from_label;
  std::string edge_label;
  std::string to_label;
  auto operator<=>(const CodeEntry&) const = default;
  bool operator==(const CodeEntry&) const = default;
};

inline std::string escape_label(const std::string& s) { return std::to_string(s.size()) + ":" + s; }

/// Minimum edge-sequence code of one connected component. A code lists edges
/// as (discovery index of source, discovery index of target, labels); every
/// step extends the traversal by an unused edge touching a discovered node,
/// and only the traversals achieving the smallest prefix survive.
inline std::string component_code(const PatternGraph& g, const std::vector<std::size_t>& comp) {
  std::vector<std::size_t> edges;
  std::vector<char> in_comp(g.node_count(), 0);
  for (auto v : comp) in_comp[v] = 1;
  for (std::size_t i = 0; i < g.edge_count(); ++i)
    if (in_comp[g.edges()[i].src]) edges.push_back(i);
  if (edges.empty()) return "(" + escape_label(g.nodes()[comp.front()].label) + ")";

  struct State {
    std::vector<int> index;   // discovery index per node, -1 if undiscovered
    std::vector<char> used;   // per component edge
    int next = 0;
    bool operator<(const State& o) const { return std::tie(index, used) < std::tie(o.index, o.used); }
  };

  auto entry_for = [&](const State& s, std::size_t k, State* applied) {
    const auto& e = g.edges()[edges[k]];
    State t = s;
    if (t.index[e.src] < 0) t.index[e.src] = t.next++;
    if (t.index[e.dst] < 0) t.index[e.dst] = t.next++;
    t.used[k] = 1;
    CodeEntry c{t.index[e.src], t.index[e.dst], g.nodes()[e.src].label, e.label, g.nodes()[e.dst].label};
    if (applied) *applied = std::move(t);
    return c;
  };

  std::set<State> states;
  State init;
  init.index.assign(g.node_count(), -1);
  init.used.assign(edges.size(), 0);
  states.insert(init);
  std::string code;
  for (std::size_t step = 0; step < edges.size(); ++step) {
    std::optional<CodeEntry> best;
    std::set<State> next;
    for (const auto& s : states) {
      for (std::size_t k = 0; k < edges.size(); ++k) {
        if (s.used[k]) continue;
        const auto& e = g.edges()[edges[k]];
        if (step > 0 && s.index[e.src] < 0 && s.index[e.dst] < 0) continue;
        State t;
        CodeEntry c = entry_for(s, k, &t);
        if (!best || c < *best) {
          best = c;
          next.clear();
        }
        if (c == *best) next.insert(std::move(t));
      }
    }
    states = std::move(next);
    code += "(" + std::to_string(best->from) + "," + std::to_string(best->to) + "," +
            escape_label(best->from_label) + "," + escape_label(best->edge_label) + "," +
            escape_label(best->to_label) + ")";
  }
  return code;
}

}  // namespace detail

/// Isomorphism-invariant code: equal codes iff the patterns are isomorphic
/// (node labels, edge labels and directions preserved).
inline std::string canonical_code(const PatternGraph& pattern) {
  std::vector<std::string> parts;
  for (const auto& comp : pattern.components()) parts.push_back(detail::component_code(pattern, comp));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ";";
    out += parts[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maximum common subgraph
// ---------------------------------------------------------------------------

/// Largest connected subgraph of `model` (by node count, then edge count, then
/// smallest canonical code) that embeds into `kg`. Node ids are preserved.
/// Branch and bound over edge deletions; the bound is the node count of the
/// current connected candidate.
inline PatternGraph max_common_subgraph(const PatternGraph& model, const KnowledgeGraph& kg) {
  struct Best {
    std::size_t nodes = 0, edges = 0;
    std::string code;
    std::optional<PatternGraph> graph;
  } best;

  auto consider = [&](const PatternGraph& g) {
    auto key_better = [&]() {
      if (g.node_count() != best.nodes) return g.node_count() > best.nodes;
      return g.edge_count() > best.edges;
    };
    if (!best.graph || key_better()) {
      best = {g.node_count(), g.edge_count(), canonical_code(g), g};
    } else if (g.node_count() == best.nodes && g.edge_count() == best.edges) {
      auto c = canonical_code(g);
      if (c < best.code) best = {g.node_count(), g.edge_count(), c, g};
    }
  };
  auto bound_ok = [&](std::size_t nodes, std::size_t edges) {
    if (!best.graph) return true;
    if (nodes != best.nodes) return nodes > best.nodes;
    return edges >= best.edges;
  };

  // Single nodes.
  for (std::size_t v = 0; v < model.node_count(); ++v) {
    PatternGraph single = model.subgraph({}, {v});
    if (is_subgraph_isomorphic(single, kg)) consider(single);
  }

  auto nodes_of = [&](const std::vector<std::size_t>& es) {
    std::set<std::size_t> ns;
    for (auto e : es) {
      ns.insert(model.edges()[e].src);
      ns.insert(model.edges()[e].dst);
    }
    return ns.size();
  };

  // Splits an edge set into its connected pieces.
  auto split = [&](const std::vector<std::size_t>& es) {
    std::map<std::size_t, std::size_t> parent;
    std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
      if (!parent.count(x)) parent[x] = x;
      return parent[x] == x ? x : parent[x] = root(parent[x]);
    };
    for (auto e : es) parent[root(model.edges()[e].src)] = root(model.edges()[e].dst);
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (auto e : es) groups[root(model.edges()[e].src)].push_back(e);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [_, g] : groups) out.push_back(std::move(g));
    return out;
  };

  std::set<std::vector<std::size_t>> visited;
  std::vector<std::vector<std::size_t>> stack;
  std::vector<std::size_t> all(model.edge_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  for (auto& piece : split(all)) stack.push_back(std::move(piece));
  // Larger pieces first so the bound tightens early.
  std::sort(stack.begin(), stack.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  while (!stack.empty()) {
    auto es = std::move(stack.back());
    stack.pop_back();
    if (es.empty() || !visited.insert(es).second) continue;
    if (!bound_ok(nodes_of(es), es.size())) continue;
    PatternGraph g = model.subgraph(es);
    if (is_subgraph_isomorphic(g, kg)) {
      consider(g);
      continue;
    }
    for (std::size_t i = 0; i < es.size(); ++i) {
      std::vector<std::size_t> rest = es;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      for (auto& piece : split(rest))
        if (!visited.count(piece) && bound_ok(nodes_of(piece), piece.size())) stack.push_back(std::move(piece));
    }
  }
  return best.graph ? *best.graph : PatternGraph{};
}

}  // namespace semodel
