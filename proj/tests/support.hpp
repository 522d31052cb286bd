#pragma once
// Test-only helpers: random graph generators and exhaustive oracles.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "semodel/graph_match.hpp"
#include "semodel/evaluation.hpp"
#include "semodel/mining.hpp"

namespace semodel::testing {

struct SimpleGraph {
  std::vector<std::string> labels;
  std::vector<std::tuple<std::size_t, std::string, std::size_t>> edges;
};

inline SimpleGraph random_digraph(std::mt19937_64& rng, std::size_t n, int node_labels, int edge_labels,
                                  double p) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SimpleGraph g;
  for (std::size_t i = 0; i < n; ++i) g.labels.push_back(std::string(1, char('A' + rng() % node_labels)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int l = 0; l < edge_labels; ++l)
        if (u(rng) < p / edge_labels) g.edges.emplace_back(i, std::string(1, char('p' + l)), j);
    }
  return g;
}

inline SimpleGraph permute(const SimpleGraph& g, const std::vector<std::size_t>& perm) {
  SimpleGraph h;
  h.labels.resize(g.labels.size());
  for (std::size_t i = 0; i < g.labels.size(); ++i) h.labels[perm[i]] = g.labels[i];
  for (auto& [s, l, d] : g.edges) h.edges.emplace_back(perm[s], l, perm[d]);
  std::shuffle(h.edges.begin(), h.edges.end(), std::mt19937_64(perm.size()));
  return h;
}

inline KnowledgeGraph to_kg(const SimpleGraph& g) {
  KnowledgeGraph kg;
  for (std::size_t i = 0; i < g.labels.size(); ++i) kg.add_entity("n" + std::to_string(i), g.labels[i]);
  for (auto& [s, l, d] : g.edges) kg.add_relation("n" + std::to_string(s), l, "n" + std::to_string(d));
  return kg;
}

inline PatternGraph to_pattern(const SimpleGraph& g) {
  PatternGraph p;
  for (std::size_t i = 0; i < g.labels.size(); ++i) p.add_node("v" + std::to_string(i), g.labels[i]);
  for (auto& [s, l, d] : g.edges) p.add_edge(s, l, d);
  return p;
}

/// Every injective label- and edge-preserving map, by exhaustive search.
inline std::vector<std::vector<std::size_t>> brute_force_embeddings(const SimpleGraph& pattern,
                                                                    const SimpleGraph& target) {
  std::set<std::tuple<std::size_t, std::string, std::size_t>> tedges(target.edges.begin(), target.edges.end());
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> f;
  std::vector<char> used(target.labels.size(), 0);
  auto rec = [&](auto&& self) -> void {
    if (f.size() == pattern.labels.size()) {
      for (auto& [s, l, d] : pattern.edges)
        if (!tedges.count({f[s], l, f[d]})) return;
      out.push_back(f);
      return;
    }
    for (std::size_t t = 0; t < target.labels.size(); ++t) {
      if (used[t] || target.labels[t] != pattern.labels[f.size()]) continue;
      used[t] = 1;
      f.push_back(t);
      self(self);
      f.pop_back();
      used[t] = 0;
    }
  };
  if (!pattern.labels.empty()) rec(rec);
  return out;
}

inline std::size_t brute_force_min_image(const SimpleGraph& pattern,
                                         const std::vector<std::vector<std::size_t>>& embeddings) {
  if (embeddings.empty() || pattern.labels.empty()) return 0;
  std::size_t best = SIZE_MAX;
  for (std::size_t v = 0; v < pattern.labels.size(); ++v) {
    std::set<std::size_t> images;
    for (auto& e : embeddings) images.insert(e[v]);
    best = std::min(best, images.size());
  }
  return best;
}

/// Minimum over all node orderings of a flat description of the graph.
inline std::string brute_canonical(const SimpleGraph& g) {
  std::vector<std::size_t> perm(g.labels.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  bool first = true;
  do {
    std::vector<std::string> lab(g.labels.size());
    for (std::size_t i = 0; i < perm.size(); ++i) lab[perm[i]] = g.labels[i];
    std::vector<std::string> es;
    for (auto& [s, l, d] : g.edges) es.push_back(std::to_string(perm[s]) + l + std::to_string(perm[d]));
    std::sort(es.begin(), es.end());
    std::string s;
    for (auto& x : lab) s += x + ",";
    s += "|";
    for (auto& x : es) s += x + ",";
    if (first || s < best) best = s;
    first = false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Size (nodes, edges) of the largest connected embeddable subgraph, by
/// enumerating every edge subset.
inline std::pair<std::size_t, std::size_t> brute_force_mcs_size(const SimpleGraph& model,
                                                                const SimpleGraph& target) {
  std::pair<std::size_t, std::size_t> best{0, 0};
  for (std::size_t v = 0; v < model.labels.size(); ++v)
    if (std::count(target.labels.begin(), target.labels.end(), model.labels[v])) best = {1, 0};
  const std::size_t m = model.edges.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::map<std::size_t, std::size_t> idx;
    SimpleGraph sub;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(mask >> i & 1)) continue;
      auto& [s, l, d] = model.edges[i];
      for (auto x : {s, d})
        if (!idx.count(x)) {
          idx[x] = sub.labels.size();
          sub.labels.push_back(model.labels[x]);
        }
      sub.edges.emplace_back(idx[s], l, idx[d]);
    }
    std::pair<std::size_t, std::size_t> key{sub.labels.size(), sub.edges.size()};
    if (key <= best) continue;
    if (!to_pattern(sub).is_connected()) continue;
    if (!brute_force_embeddings(sub, target).empty()) best = key;
  }
  return best;
}


// ---------------------------------------------------------------------------
// Mining oracle: enumerates every connected supergraph of the whole seed up to
// an edge budget, one schema edge at a time, and filters minimal covers.

struct MiningInstance {
  KnowledgeGraph kg;
  SemanticModel sd;
  std::vector<CandidateTypeSet> iso;
  ConstraintMap cm;
  std::size_t max_edges = 0;
};

inline MiningInstance random_mining_instance(std::mt19937_64& rng) {
  const std::vector<std::string> classes{"A", "B", "C"};
  const std::vector<std::string> props{"p", "q"};
  MiningInstance in;
  const std::size_t n = 12 + rng() % 19;
  for (std::size_t i = 0; i < n; ++i) in.kg.add_entity("e" + std::to_string(i), classes[rng() % classes.size()]);
  std::set<std::tuple<std::size_t, std::string, std::size_t>> rel;
  const std::size_t m = n + rng() % (n / 2 + 1);
  for (std::size_t tries = 0; rel.size() < m && tries < 10 * m; ++tries) {
    const std::size_t s = rng() % n, o = rng() % n;
    if (s != o) rel.insert({s, props[rng() % props.size()], o});
  }
  for (auto& [s, p, o] : rel) in.kg.add_relation("e" + std::to_string(s), p, "e" + std::to_string(o));

  // Seed: a connected piece of the graph itself, so it always embeds.
  std::vector<std::tuple<std::size_t, std::string, std::size_t>> rv(rel.begin(), rel.end());
  std::vector<std::size_t> ents;
  std::vector<std::tuple<std::size_t, std::string, std::size_t>> chosen;
  if (rv.empty() || rng() % 5 == 0) {
    ents.push_back(rng() % n);
  } else {
    chosen.push_back(rv[rng() % rv.size()]);
    ents = {std::get<0>(chosen[0]), std::get<2>(chosen[0])};
    const std::size_t want = 1 + rng() % 3;
    for (std::size_t tries = 0; chosen.size() < want && tries < 50; ++tries) {
      const auto& r = rv[rng() % rv.size()];
      const bool touches = std::count(ents.begin(), ents.end(), std::get<0>(r)) ||
                           std::count(ents.begin(), ents.end(), std::get<2>(r));
      if (!touches || std::count(chosen.begin(), chosen.end(), r)) continue;
      chosen.push_back(r);
      for (auto e : {std::get<0>(r), std::get<2>(r)})
        if (!std::count(ents.begin(), ents.end(), e)) ents.push_back(e);
    }
  }
  std::map<std::size_t, std::string> ids;
  for (auto e : ents) ids[e] = in.sd.add_class(in.kg.class_name(in.kg.entity_class(static_cast<KnowledgeGraph::Entity>(e))));
  for (auto& [s, p, o] : chosen) in.sd.add_object_edge(ids[s], p, ids[o]);
  if (rng() % 2) in.sd.add_data_edge(ids[ents[rng() % ents.size()]], "d0", in.sd.add_data("s0"));

  const std::size_t cols = 1 + rng() % 2;
  for (std::size_t c = 0; c < cols; ++c) {
    CandidateTypeSet set{"c" + std::to_string(c), {}};
    const std::size_t k = 1 + rng() % 2;
    for (std::size_t tries = 0; set.candidates.size() < k && tries < 20; ++tries) {
      SemanticType t{classes[rng() % classes.size()], rng() % 2 ? "d0" : "d1"};
      if (std::none_of(set.candidates.begin(), set.candidates.end(), [&](auto& x) { return x.type == t; }))
        set.candidates.push_back({t, 0.5});
    }
    in.iso.push_back(set);
  }
  for (const auto& c : classes)
    if (rng() % 10 < 3) in.cm.caps[c] = 1 + rng() % 2;
  in.max_edges = in.sd.object_edges().size() + 2 + rng() % 2;
  return in;
}

namespace oracle_detail {

using Edge = std::tuple<std::size_t, std::string, std::size_t>;

struct Pattern {
  std::vector<std::string> cls;  // seed nodes first, then fresh ones
  std::set<Edge> edges;
};

struct Kg {
  std::vector<std::string> cls;
  std::set<Edge> rel;
  std::set<std::tuple<std::string, std::string, std::string>> schema;
};

inline Kg flatten(const KnowledgeGraph& kg) {
  Kg out;
  for (std::size_t e = 0; e < kg.entity_count(); ++e)
    out.cls.push_back(kg.class_name(kg.entity_class(static_cast<KnowledgeGraph::Entity>(e))));
  for (const auto& r : kg.relations()) {
    out.rel.insert({r.subject, kg.property_name(r.property), r.object});
    out.schema.insert({out.cls[r.subject], kg.property_name(r.property), out.cls[r.object]});
  }
  return out;
}

/// Minimum number of distinct images over pattern nodes, by backtracking over
/// every injective class-preserving assignment.
inline std::size_t min_image(const Pattern& p, const Kg& kg) {
  const std::size_t k = p.cls.size();
  std::vector<std::set<std::size_t>> images(k);
  std::vector<std::size_t> map(k);
  std::vector<bool> used(kg.cls.size(), false);
  bool any = false;
  auto ok = [&](std::size_t v) {
    for (auto& [s, l, d] : p.edges) {
      if (s > v || d > v || (s != v && d != v)) continue;
      if (!kg.rel.count({map[s], l, map[d]})) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t v) -> void {
    if (v == k) {
      any = true;
      for (std::size_t i = 0; i < k; ++i) images[i].insert(map[i]);
      return;
    }
    for (std::size_t e = 0; e < kg.cls.size(); ++e) {
      if (used[e] || kg.cls[e] != p.cls[v]) continue;
      map[v] = e;
      if (!ok(v)) continue;
      used[e] = true;
      self(self, v + 1);
      used[e] = false;
    }
  };
  rec(rec, 0);
  if (!any) return 0;
  std::size_t best = SIZE_MAX;
  for (auto& s : images) best = std::min(best, s.size());
  return best;
}

inline std::string key(const Pattern& p, std::size_t anchored) {
  std::vector<std::size_t> perm(p.cls.size() - anchored);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  bool first = true;
  do {
    auto at = [&](std::size_t v) { return v < anchored ? v : anchored + perm[v - anchored]; };
    std::vector<std::string> fresh(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) fresh[perm[i]] = p.cls[anchored + i];
    std::vector<std::string> es;
    for (auto& [s, l, d] : p.edges) es.push_back(std::to_string(at(s)) + " " + l + " " + std::to_string(at(d)));
    std::sort(es.begin(), es.end());
    std::string k;
    for (auto& c : fresh) k += c + ",";
    for (auto& e : es) k += "|" + e;
    if (first || k < best) best = k;
    first = false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct Column {
  std::string name, cls, prop;
};

/// Calls `emit` with every valid node choice (one per column) among live nodes.
inline void each_assignment(const Pattern& p, const std::vector<bool>& live, const std::vector<Column>& cols,
                            std::set<std::pair<std::size_t, std::string>> taken,
                            const std::function<void(const std::vector<std::size_t>&)>& emit) {
  std::vector<std::size_t> pick;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == cols.size()) {
      emit(pick);
      return;
    }
    for (std::size_t v = 0; v < p.cls.size(); ++v) {
      if (!live[v] || p.cls[v] != cols[i].cls || taken.count({v, cols[i].prop})) continue;
      taken.insert({v, cols[i].prop});
      pick.push_back(v);
      self(self, i + 1);
      pick.pop_back();
      taken.erase({v, cols[i].prop});
    }
  };
  rec(rec, 0);
}

inline bool connected(const std::set<Edge>& edges, const std::vector<bool>& live) {
  std::size_t start = SIZE_MAX, count = 0;
  for (std::size_t v = 0; v < live.size(); ++v)
    if (live[v]) {
      ++count;
      if (start == SIZE_MAX) start = v;
    }
  if (count == 0) return true;
  std::set<std::size_t> seen{start};
  std::vector<std::size_t> stack{start};
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto& [s, l, d] : edges) {
      if (s == u && seen.insert(d).second) stack.push_back(d);
      if (d == u && seen.insert(s).second) stack.push_back(s);
    }
  }
  return seen.size() == count;
}

}  // namespace oracle_detail

/// Canonical code -> frequency of every minimal constrained cover, merged over
/// all combinations of candidate types. Requires a connected seed.
inline std::map<std::string, std::size_t> mining_oracle(const MiningInstance& in) {
  using namespace oracle_detail;
  const Kg kg = flatten(in.kg);
  const auto sd_nodes = in.sd.class_nodes();
  const std::size_t anchored = sd_nodes.size();
  std::map<std::string, std::size_t> idx;
  Pattern start;
  for (std::size_t i = 0; i < anchored; ++i) {
    idx[sd_nodes[i].id] = i;
    start.cls.push_back(sd_nodes[i].cls);
  }
  for (const auto& e : in.sd.object_edges()) start.edges.insert({idx[e.src], e.label, idx[e.dst]});
  const std::set<Edge> sd_edges = start.edges;
  std::set<std::pair<std::size_t, std::string>> seed_props;
  for (const auto& e : in.sd.data_edges()) seed_props.insert({idx[e.src], e.label});

  // Every embeddable connected supergraph within the budget.
  std::vector<std::pair<Pattern, std::size_t>> states;
  std::set<std::string> seen;
  std::vector<Pattern> frontier;
  if (const auto f = min_image(start, kg); f > 0) {
    states.push_back({start, f});
    frontier.push_back(start);
    seen.insert(key(start, anchored));
  }
  while (!frontier.empty()) {
    std::vector<Pattern> next;
    for (const auto& p : frontier) {
      if (p.edges.size() >= in.max_edges) continue;
      std::vector<Pattern> grown;
      for (std::size_t u = 0; u < p.cls.size(); ++u)
        for (const auto& [s, l, o] : kg.schema) {
          if (s == p.cls[u]) {
            Pattern q = p;
            q.cls.push_back(o);
            q.edges.insert({u, l, q.cls.size() - 1});
            grown.push_back(q);
            for (std::size_t v = 0; v < p.cls.size(); ++v) {
              if (v == u || p.cls[v] != o || p.edges.count({u, l, v})) continue;
              Pattern c = p;
              c.edges.insert({u, l, v});
              grown.push_back(c);
            }
          }
          if (o == p.cls[u]) {
            Pattern q = p;
            q.cls.push_back(s);
            q.edges.insert({q.cls.size() - 1, l, u});
            grown.push_back(q);
          }
        }
      for (auto& q : grown) {
        if (!seen.insert(key(q, anchored)).second) continue;
        const auto f = min_image(q, kg);
        if (f == 0) continue;
        states.push_back({q, f});
        next.push_back(q);
      }
    }
    frontier = std::move(next);
  }

  std::map<std::string, std::size_t> out;
  std::vector<std::size_t> pick(in.iso.size(), 0);
  for (const auto& c : in.iso)
    if (c.candidates.empty()) return out;
  while (true) {
    std::vector<Column> cols;
    for (std::size_t i = 0; i < in.iso.size(); ++i) {
      const auto& t = in.iso[i].candidates[pick[i]].type;
      cols.push_back({in.iso[i].column, t.cls, t.property});
    }
    auto covers = [&](const Pattern& p, const std::vector<bool>& live) {
      bool found = false;
      each_assignment(p, live, cols, seed_props, [&](const auto&) { found = true; });
      return found;
    };
    for (const auto& [p, freq] : states) {
      const std::vector<bool> all(p.cls.size(), true);
      if (!covers(p, all)) continue;
      bool minimal = true;
      for (const auto& e : p.edges) {
        if (sd_edges.count(e)) continue;
        std::set<Edge> rest = p.edges;
        rest.erase(e);
        std::vector<bool> live = all;
        for (auto v : {std::get<0>(e), std::get<2>(e)}) {
          const bool isolated = std::none_of(rest.begin(), rest.end(), [&](const Edge& x) {
            return std::get<0>(x) == v || std::get<2>(x) == v;
          });
          if (isolated && v >= anchored && std::count(live.begin(), live.end(), true) > 1) live[v] = false;
        }
        if (connected(rest, live) && covers(p, live)) {
          minimal = false;
          break;
        }
      }
      if (!minimal) continue;
      std::map<std::string, std::size_t> count;
      for (const auto& c : p.cls) ++count[c];
      bool within = true;
      for (const auto& [c, cap] : in.cm.caps)
        if (count[c] > cap) within = false;
      if (!within) continue;

      SemanticModel base = in.sd;
      std::vector<std::string> ids;
      for (const auto& n : sd_nodes) ids.push_back(n.id);
      for (std::size_t v = anchored; v < p.cls.size(); ++v) ids.push_back(base.add_class(p.cls[v]));
      for (const auto& [s, l, d] : p.edges)
        if (!sd_edges.count({s, l, d})) base.add_object_edge(ids[s], l, ids[d]);
      std::string best;
      each_assignment(p, all, cols, seed_props, [&](const std::vector<std::size_t>& chosen) {
        SemanticModel m = base;
        for (std::size_t i = 0; i < cols.size(); ++i)
          m.add_data_edge(ids[chosen[i]], cols[i].prop, m.add_data(cols[i].name));
        auto code = canonical_code(PatternGraph::from_model_with_data(m));
        if (best.empty() || code < best) best = code;
      });
      out.emplace(best, freq);
    }
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == in.iso[i].candidates.size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation fixtures and the permutation oracle for best mappings.


inline SemanticModel edm_gold() {
  SemanticModel m;
  const auto cho = m.add_class("CHO");
  const auto who = m.add_class("Person");
  m.add_object_edge(cho, "creator", who);
  m.add_data_edge(who, "nameOfThePerson", m.add_data("name"));
  m.add_data_edge(who, "biographicalInformation", m.add_data("biography"));
  m.add_data_edge(who, "dateOfBirth", m.add_data("birthDate"));
  return m;
}

// Two of five triples agree with the gold model.
inline SemanticModel edm_degraded() {
  SemanticModel m;
  const auto cho = m.add_class("CHO");
  const auto who = m.add_class("Person");
  const auto ev = m.add_class("Event");
  m.add_object_edge(cho, "creator", who);
  m.add_data_edge(who, "nameOfThePerson", m.add_data("name"));
  m.add_object_edge(who, "wasPresentAt", ev);
  m.add_data_edge(ev, "note", m.add_data("biography"));
  m.add_data_edge(ev, "date", m.add_data("birthDate"));
  return m;
}

// Ten triples: an object with production, two spans and five attributes.
inline SemanticModel ten_triples() {
  SemanticModel m;
  const auto o = m.add_class("Object");
  const auto p = m.add_class("Production");
  const auto a = m.add_class("Person");
  const auto t1 = m.add_class("TimeSpan");
  const auto t2 = m.add_class("TimeSpan");
  m.add_object_edge(o, "producedBy", p);
  m.add_object_edge(p, "carriedOutBy", a);
  m.add_object_edge(p, "hasTimeSpan", t1);
  m.add_object_edge(a, "hasTimeSpan", t2);
  m.add_data_edge(o, "title", m.add_data("Title"));
  m.add_data_edge(a, "name", m.add_data("Artist"));
  m.add_data_edge(t1, "begin", m.add_data("Start"));
  m.add_data_edge(t1, "end", m.add_data("End"));
  m.add_data_edge(t2, "begin", m.add_data("Born"));
  m.add_data_edge(p, "technique", m.add_data("Medium"));
  return m;
}

inline SemanticModel random_eval_model(std::mt19937_64& rng) {
  SemanticModel m;
  const std::size_t na = 1 + rng() % 4, nb = 1 + rng() % 2;
  for (std::size_t i = 0; i < na; ++i) m.add_class("A");
  for (std::size_t i = 0; i < nb; ++i) m.add_class("B");
  const auto nodes = m.class_nodes();
  const std::size_t edges = 2 + rng() % 6;
  for (std::size_t e = 0; e < edges; ++e) {
    const auto& s = nodes[rng() % nodes.size()];
    const auto& d = nodes[rng() % nodes.size()];
    if (s.id != d.id) m.add_object_edge(s.id, rng() % 2 ? "p" : "q", d.id);
  }
  for (int c = 0; c < 3; ++c)
    if (rng() % 2) m.add_data_edge(nodes[rng() % nodes.size()].id, "v", m.add_data("col" + std::to_string(c)));
  return m;
}

// Maximum shared triples over every class-preserving injective relabelling of
// pred nodes into gold labels plus enough unused ones.
inline std::size_t permutation_oracle(const SemanticModel& gold, const SemanticModel& pred) {
  const auto g = model_triples(gold);
  std::vector<std::string> ids, cls;
  std::map<std::string, std::vector<std::string>> targets;
  for (const auto& n : pred.class_nodes()) {
    ids.push_back(n.id);
    cls.push_back(n.cls);
  }
  for (const auto& n : gold.class_nodes()) targets[n.cls].push_back(n.label());
  for (const auto& n : pred.class_nodes()) targets[n.cls].push_back("unused-" + n.id);
  std::map<std::string, std::string> f;
  std::set<std::string> used;
  std::size_t best = 0;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == ids.size()) {
      std::size_t hit = 0;
      std::set<Triple> mapped;
      for (const auto& e : pred.edges()) {
        auto lab = [&](const std::string& id) { return f.count(id) ? f[id] : pred.node_label(id); };
        mapped.insert({lab(e.src), e.label, lab(e.dst)});
      }
      for (const auto& t : mapped) hit += g.count(t);
      best = std::max(best, hit);
      return;
    }
    for (const auto& t : targets[cls[i]]) {
      if (used.count(t)) continue;
      used.insert(t);
      f[ids[i]] = t;
      self(self, i + 1);
      used.erase(t);
    }
  };
  rec(rec, 0);
  return best;
}

// The ten-triple model with its two time-span instances numbered the other way.
inline SemanticModel ten_triples_swapped() {
  SemanticModel pred;
  const auto o = pred.add_class("Object");
  const auto p = pred.add_class("Production");
  const auto a = pred.add_class("Person");
  const auto t2 = pred.add_class("TimeSpan", 2);
  const auto t1 = pred.add_class("TimeSpan", 1);
  pred.add_object_edge(o, "producedBy", p);
  pred.add_object_edge(p, "carriedOutBy", a);
  pred.add_object_edge(p, "hasTimeSpan", t2);
  pred.add_object_edge(a, "hasTimeSpan", t1);
  pred.add_data_edge(o, "title", pred.add_data("Title"));
  pred.add_data_edge(a, "name", pred.add_data("Artist"));
  pred.add_data_edge(t2, "begin", pred.add_data("Start"));
  pred.add_data_edge(t2, "end", pred.add_data("End"));
  pred.add_data_edge(t1, "begin", pred.add_data("Born"));
  pred.add_data_edge(p, "technique", pred.add_data("Medium"));
  return pred;
}

inline std::size_t mapped_score(const SemanticModel& gold, const SemanticModel& pred, const NodeMapping& f) {
  const auto g = model_triples(gold);
  std::set<Triple> mapped;
  for (const auto& e : pred.edges()) {
    auto lab = [&](const std::string& id) { return f.count(id) ? f.at(id) : pred.node_label(id); };
    mapped.insert({lab(e.src), e.label, lab(e.dst)});
  }
  std::size_t hit = 0;
  for (const auto& t : mapped) hit += g.count(t);
  return hit;
}

}  // namespace semodel::testing
