#pragma once
// Seed-model repair: drop relationships the knowledge graph never uses, and
// narrow the candidate types of the columns that lose their entity.

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "semodel/graph_core.hpp"
#include "semodel/graph_match.hpp"
#include "semodel/labeling.hpp"

namespace semodel {

struct CorrectionResult {
  SemanticModel model;
  std::vector<std::string> isolated;  // attributes, in model order
};

/// Removes object edges whose class-level triple is absent from the knowledge
/// graph. If what remains is not one connected embeddable pattern, keeps its
/// maximum common subgraph with the knowledge graph. Attributes whose entity
/// was removed are returned as isolated columns.
inline CorrectionResult remove_incorrect_relationships(const SemanticModel& sd, const KnowledgeGraph& kg) {
  SemanticModel out = sd;
  for (const auto& e : sd.object_edges())
    if (!kg.has_schema_triple(sd.find_class(e.src)->cls, e.label, sd.find_class(e.dst)->cls)) out.remove_edge(e);

  auto pattern = PatternGraph::from_model(out);
  if (!pattern.empty() && !(pattern.is_connected() && is_subgraph_isomorphic(pattern, kg))) {
    auto mcs = max_common_subgraph(pattern, kg);
    std::set<std::string> keep_nodes;
    for (const auto& n : mcs.nodes()) keep_nodes.insert(n.id);
    std::set<std::tuple<std::string, std::string, std::string>> keep_edges;
    for (const auto& e : mcs.edges()) keep_edges.emplace(mcs.nodes()[e.src].id, e.label, mcs.nodes()[e.dst].id);
    for (const auto& e : out.object_edges())
      if (!keep_edges.count({e.src, e.label, e.dst})) out.remove_edge(e);
    std::vector<std::string> drop;
    for (const auto& n : out.class_nodes())
      if (!keep_nodes.count(n.id)) drop.push_back(n.id);
    for (const auto& id : drop) out.remove_class_node(id);
  }

  CorrectionResult r;
  std::vector<std::string> orphans;
  for (const auto& d : out.data_nodes()) {
    auto e = out.data_edge_of(d.id);
    if (!e || !out.find_class(e->src)) {
      r.isolated.push_back(d.attribute);
      orphans.push_back(d.id);
    }
  }
  for (const auto& id : orphans) out.remove_data_node(id);
  r.model = std::move(out);
  return r;
}

struct TypeReductionConfig {
  double eta_threshold = 3.0;
  double min_confidence = 0.05;
  std::size_t max_path_length = 2;

  void validate() const {
    if (!(eta_threshold > 1.0)) throw ConfigError("eta_threshold must be greater than 1");
    if (!(min_confidence > 0.0 && min_confidence < 1.0)) throw ConfigError("min_confidence must lie in (0, 1)");
    if (max_path_length < 1) throw ConfigError("max_path_length must be at least 1");
  }
};

/// The ratio rule: only the top candidate survives when it dominates the
/// runner-up by more than the threshold. The comparison carries a relative
/// tolerance so that exact ratios (0.9 / 0.3 = 3) are not split by rounding.
inline bool eta_keeps_only_first(const CandidateTypeSet& c, double eta) {
  if (c.candidates.size() < 2) return false;
  const double s1 = c.candidates[0].confidence, s2 = c.candidates[1].confidence;
  if (s2 <= 0.0) return true;
  return s1 / s2 > eta * (1.0 + 1e-9);
}

namespace detail {

/// True iff attaching a node of class `target` to `sd` through some path of
/// at most `max_len` schema triples (fresh intermediate nodes) yields a
/// pattern that embeds in the knowledge graph. A length-0 connection reuses an
/// existing node of the class that does not yet carry the data property.
inline bool connects(const SemanticModel& sd, const KnowledgeGraph& kg, const SemanticType& type,
                     std::size_t max_len) {
  const auto base = PatternGraph::from_model(sd);
  if (base.empty()) {
    auto c = kg.class_symbol(type.cls);
    return c && !kg.entities_of_class(*c).empty();
  }
  for (const auto& n : sd.class_nodes()) {
    if (n.cls != type.cls) continue;
    bool has = false;
    for (const auto& e : sd.data_edges()) has |= e.src == n.id && e.label == type.property;
    if (!has && is_subgraph_isomorphic(base, kg)) return true;
  }

  const auto schema = kg.schema_projection();
  bool found = false;
  PatternGraph g = base;
  std::function<void(std::size_t, std::size_t)> extend = [&](std::size_t at, std::size_t depth) {
    if (found || depth == max_len) return;
    const std::string cls = g.nodes()[at].label;
    for (const auto& t : schema) {
      for (int dir = 0; dir < 2 && !found; ++dir) {
        const bool forward = dir == 0;
        if ((forward ? t.subject : t.object) != cls) continue;
        const std::string next = forward ? t.object : t.subject;
        PatternGraph saved = g;
        const auto v = g.add_node("~" + std::to_string(g.node_count()), next);
        if (forward) g.add_edge(at, t.predicate, v);
        else g.add_edge(v, t.predicate, at);
        if (next == type.cls && is_subgraph_isomorphic(g, kg)) found = true;
        else extend(v, depth + 1);
        g = std::move(saved);
      }
      if (found) return;
    }
  };
  for (std::size_t i = 0; i < base.node_count() && !found; ++i) extend(i, 0);
  return found;
}

}  // namespace detail

/// Narrows the candidates of one isolated column. Throws when none survive.
inline CandidateTypeSet reduce_semantic_types(const SemanticModel& sd, const KnowledgeGraph& kg,
                                              const CandidateTypeSet& cands, const TypeReductionConfig& cfg = {}) {
  cfg.validate();
  CandidateTypeSet out{cands.column, {}};
  std::vector<ScoredType> pool = cands.candidates;
  if (eta_keeps_only_first(cands, cfg.eta_threshold)) pool.resize(1);
  for (const auto& c : pool) {
    if (c.confidence < cfg.min_confidence) continue;
    if (detail::connects(sd, kg, c.type, cfg.max_path_length)) out.candidates.push_back(c);
  }
  if (out.candidates.empty())
    throw StageError("correction", "every candidate type of column '" + cands.column + "' was eliminated");
  return out;
}

}  // namespace semodel
