#pragma once
// Completion of a repaired seed model by growing frequent supergraphs of it in
// the knowledge graph until every isolated column can be attached.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "semodel/graph_core.hpp"
#include "semodel/graph_match.hpp"
#include "semodel/labeling.hpp"

namespace semodel {

/// Per-class cap on instances; classes without an entry are unbounded.
struct ConstraintMap {
  std::map<std::string, std::size_t> caps;

  static ConstraintMap from_json(const json& j) {
    ConstraintMap cm;
    if (!j.is_object()) throw ConfigError("constraint map must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!it.value().is_number_unsigned() || it.value().get<std::size_t>() < 1)
        throw ConfigError("constraint map: cap for '" + it.key() + "' must be a positive integer");
      cm.caps[it.key()] = it.value().get<std::size_t>();
    }
    return cm;
  }
};

inline bool check_constraints(const SemanticModel& ext, const ConstraintMap& cm) {
  for (const auto& [cls, cap] : cm.caps)
    if (ext.count_class(cls) > cap) return false;
  return true;
}

/// False when some seed edge has both endpoints in `ext` but is itself absent.
inline bool seed_closure_prune(const SemanticModel& ext, const SemanticModel& sd) {
  const auto edges = ext.object_edges();
  for (const auto& e : sd.object_edges()) {
    if (!ext.find_class(e.src) || !ext.find_class(e.dst)) continue;
    if (std::find(edges.begin(), edges.end(), e) == edges.end()) return false;
  }
  return true;
}

struct MiningConfig {
  std::size_t sigma = 10;  // SIZE_MAX: unbounded
  std::size_t max_pattern_edges = 25;
  bool structural_pruning = true;

  void validate() const {
    if (sigma < 1) throw ConfigError("sigma must be at least 1");
    if (max_pattern_edges < 1) throw ConfigError("max_pattern_edges must be at least 1");
  }
};

/// A column to attach and the semantic type chosen for it.
struct NewNode {
  std::string column;
  SemanticType type;
};

struct MinedModel {
  SemanticModel model;
  std::size_t frequency = 0;
  std::string canonical;
};

namespace detail {

class Miner {
 public:
  Miner(const SemanticModel& sd, const KnowledgeGraph& kg, const ConstraintMap& cm,
        const std::vector<NewNode>& new_nodes, const MiningConfig& cfg)
      : sd_(sd), kg_(kg), cm_(cm), new_nodes_(new_nodes), cfg_(cfg), schema_(kg.schema_projection()) {
    for (const auto& e : sd.object_edges()) sd_edges_.insert(key(e));
  }

  std::vector<MinedModel> run() {
    for (auto& s : start_states()) push(std::move(s));
    while (!queue_.empty()) {
      State s = queue_.top();
      queue_.pop();
      if (prunable(s.frequency, s.model.object_edges().size() + lower_bound_missing(s.model))) continue;
      if (s.model.object_edges().size() >= cfg_.max_pattern_edges) continue;
      for (auto& next : extensions(s.model)) push(std::move(next));
    }
    std::vector<MinedModel> out;
    for (auto& [_, m] : covers_) out.push_back(m);
    return out;
  }

 private:
  using EdgeKey = std::tuple<std::string, std::string, std::string>;
  static EdgeKey key(const ModelEdge& e) { return {e.src, e.label, e.dst}; }

  struct State {
    SemanticModel model;
    std::size_t frequency = 0;
    std::string code;
    bool operator<(const State& o) const {  // priority_queue: top is the best state
      if (frequency != o.frequency) return frequency < o.frequency;
      auto a = model.object_edges().size(), b = o.model.object_edges().size();
      if (a != b) return a > b;
      return code > o.code;
    }
  };

  bool anchored(const std::string& id) const { return sd_.find_class(id) != nullptr; }

  /// Pattern whose labels distinguish seed nodes, so that dedup respects which
  /// seed node each pattern node stands for.
  std::string anchored_code(const SemanticModel& m) const {
    PatternGraph g;
    for (const auto& n : m.class_nodes()) g.add_node(n.id, anchored(n.id) ? n.cls + "#" + n.id : n.cls);
    for (const auto& e : m.object_edges()) g.add_edge(*g.find(e.src), e.label, *g.find(e.dst));
    return canonical_code(g);
  }

  std::vector<SemanticModel> start_states() const {
    std::vector<SemanticModel> out;
    const auto edges = sd_.object_edges();
    if (!edges.empty()) {
      for (const auto& e : edges) {
        SemanticModel s;
        add_anchored(s, e.src);
        add_anchored(s, e.dst);
        out.push_back(std::move(s));
      }
    } else if (sd_.class_nodes().size() == 1) {
      SemanticModel s;
      add_anchored(s, sd_.class_nodes().front().id);
      out.push_back(std::move(s));
    } else if (sd_.class_nodes().empty()) {
      std::set<std::string> classes;
      for (const auto& n : new_nodes_) classes.insert(n.type.cls);
      for (const auto& c : classes) {
        SemanticModel s;
        add_fresh(s, c);
        out.push_back(std::move(s));
      }
    }
    return out;
  }

  /// Adds a seed node together with every seed edge to nodes already present.
  void add_anchored(SemanticModel& s, const std::string& id) const {
    const auto* n = sd_.find_class(id);
    s.add_class_with_id(n->id, n->cls, n->index);
    for (const auto& e : sd_.object_edges())
      if ((e.src == id || e.dst == id) && s.find_class(e.src) && s.find_class(e.dst)) s.add_edge(e);
  }

  std::string add_fresh(SemanticModel& s, const std::string& cls) const {
    for (int i = 1;; ++i) {
      const std::string id = cls + std::to_string(i);
      if (s.find_class_instance(cls, i) || sd_.find_class_instance(cls, i) || s.find_class(id) || sd_.find_class(id) ||
          sd_.find_data(id))
        continue;
      return s.add_class_with_id(id, cls, i);
    }
  }

  std::vector<SemanticModel> extensions(const SemanticModel& s) const {
    std::vector<SemanticModel> out;
    const auto present = s.object_edges();
    auto has = [&](const std::string& a, const std::string& p, const std::string& b) {
      return std::any_of(present.begin(), present.end(),
                         [&](const ModelEdge& e) { return e.src == a && e.label == p && e.dst == b; });
    };
    for (const auto& u : s.class_nodes()) {
      for (const auto& t : schema_) {
        if (t.subject == u.cls) {
          bool via_seed = false;
          for (const auto& e : sd_.object_edges()) {
            if (e.src != u.id || e.label != t.predicate || s.find_class(e.dst)) continue;
            if (sd_.find_class(e.dst)->cls != t.object) continue;
            via_seed = true;
            SemanticModel n = s;
            add_anchored(n, e.dst);
            out.push_back(std::move(n));
          }
          if (!via_seed) {
            SemanticModel n = s;
            const auto v = add_fresh(n, t.object);
            n.add_object_edge(u.id, t.predicate, v);
            out.push_back(std::move(n));
          }
          for (const auto& v : s.class_nodes()) {
            if (v.id == u.id || v.cls != t.object || has(u.id, t.predicate, v.id)) continue;
            SemanticModel n = s;
            n.add_object_edge(u.id, t.predicate, v.id);
            out.push_back(std::move(n));
          }
        }
        if (t.object == u.cls) {
          bool via_seed = false;
          for (const auto& e : sd_.object_edges()) {
            if (e.dst != u.id || e.label != t.predicate || s.find_class(e.src)) continue;
            if (sd_.find_class(e.src)->cls != t.subject) continue;
            via_seed = true;
            SemanticModel n = s;
            add_anchored(n, e.src);
            out.push_back(std::move(n));
          }
          if (!via_seed) {
            SemanticModel n = s;
            const auto v = add_fresh(n, t.subject);
            n.add_object_edge(v, t.predicate, u.id);
            out.push_back(std::move(n));
          }
        }
      }
    }
    return out;
  }

  std::size_t missing_seed_edges(const SemanticModel& s) const {
    std::size_t missing = 0;
    const auto present = s.object_edges();
    for (const auto& e : sd_.object_edges())
      if (std::find(present.begin(), present.end(), e) == present.end()) ++missing;
    return missing;
  }

  std::size_t lower_bound_missing(const SemanticModel& s) const {
    return std::max<std::size_t>(1, missing_seed_edges(s));
  }

  /// True when even the best possible descendant cannot enter the top sigma.
  bool prunable(std::size_t freq, std::size_t min_edges) const {
    if (cfg_.sigma == std::numeric_limits<std::size_t>::max() || keys_.size() < cfg_.sigma) return false;
    auto it = keys_.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(cfg_.sigma - 1));
    const auto [neg_freq, edges] = *it;
    const auto kf = static_cast<std::size_t>(-neg_freq);
    return kf > freq || (kf == freq && edges < min_edges);
  }

  /// Every (node, property) choice for the new columns, one node per column,
  /// never doubling a data property on a node.
  void assignments(const SemanticModel& s, std::size_t i, std::vector<std::string>& chosen,
                   std::set<std::pair<std::string, std::string>>& taken,
                   const std::function<void(const std::vector<std::string>&)>& emit) const {
    if (i == new_nodes_.size()) {
      emit(chosen);
      return;
    }
    const auto& t = new_nodes_[i].type;
    for (const auto& n : s.class_nodes()) {
      if (n.cls != t.cls || taken.count({n.id, t.property})) continue;
      taken.insert({n.id, t.property});
      chosen.push_back(n.id);
      assignments(s, i + 1, chosen, taken, emit);
      chosen.pop_back();
      taken.erase({n.id, t.property});
    }
  }

  std::set<std::pair<std::string, std::string>> seed_data_properties() const {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& e : sd_.data_edges()) out.insert({e.src, e.label});
    return out;
  }

  bool covers(const SemanticModel& s) const {
    for (const auto& n : sd_.class_nodes())
      if (!s.find_class(n.id)) return false;
    if (!seed_closure_prune(s, sd_)) return false;
    std::vector<std::string> chosen;
    auto taken = seed_data_properties();
    bool found = false;
    assignments(s, 0, chosen, taken, [&](const auto&) { found = true; });
    return found;
  }

  SemanticModel full_model(const SemanticModel& s, const std::vector<std::string>& chosen) const {
    SemanticModel m = s;
    for (const auto& d : sd_.data_nodes()) {
      m.add_data_with_id(d.id, d.attribute);
      m.add_edge(*sd_.data_edge_of(d.id));
    }
    for (std::size_t i = 0; i < new_nodes_.size(); ++i) {
      const auto& id = m.add_data(new_nodes_[i].column);
      m.add_data_edge(chosen[i], new_nodes_[i].type.property, id);
    }
    return m;
  }

  /// A cover none of whose single-edge reductions (keeping it connected) still covers.
  bool minimal(const SemanticModel& s) const {
    for (const auto& e : s.object_edges()) {
      if (sd_edges_.count(key(e))) continue;
      SemanticModel r = s;
      r.remove_edge(e);
      for (const auto& id : {e.src, e.dst}) {
        const auto edges = r.object_edges();
        const bool isolated = std::none_of(edges.begin(), edges.end(),
                                           [&](const ModelEdge& x) { return x.src == id || x.dst == id; });
        if (isolated && !anchored(id) && r.class_nodes().size() > 1) r.remove_class_node(id);
      }
      if (r.is_connected() && covers(r)) return false;
    }
    return true;
  }

  void push(SemanticModel s) {
    // Every missing seed edge still has to be added within the edge budget.
    if (s.object_edges().size() + missing_seed_edges(s) > cfg_.max_pattern_edges) return;
    auto code = anchored_code(s);
    if (!visited_.insert(code).second) return;
    if (cfg_.structural_pruning && (!check_constraints(s, cm_) || !seed_closure_prune(s, sd_))) return;
    const auto freq = min_image_frequency(PatternGraph::from_model(s), kg_);
    if (freq == 0) return;
    if (covers(s)) {
      if (check_constraints(s, cm_) && minimal(s)) record(s, freq);
      return;
    }
    queue_.push({std::move(s), freq, std::move(code)});
  }

  void record(const SemanticModel& s, std::size_t freq) {
    std::optional<std::pair<std::string, SemanticModel>> best;
    std::vector<std::string> chosen;
    auto taken = seed_data_properties();
    assignments(s, 0, chosen, taken, [&](const std::vector<std::string>& c) {
      auto m = full_model(s, c);
      auto code = canonical_code(PatternGraph::from_model_with_data(m));
      if (!best || code < best->first) best.emplace(std::move(code), std::move(m));
    });
    auto [it, fresh] = covers_.try_emplace(best->first, MinedModel{best->second, freq, best->first});
    if (fresh) keys_.insert({-static_cast<std::int64_t>(freq), s.object_edges().size()});
  }

  const SemanticModel& sd_;
  const KnowledgeGraph& kg_;
  const ConstraintMap& cm_;
  const std::vector<NewNode>& new_nodes_;
  const MiningConfig& cfg_;
  std::set<Triple> schema_;
  std::set<EdgeKey> sd_edges_;
  std::set<std::string> visited_;
  std::priority_queue<State> queue_;
  std::map<std::string, MinedModel> covers_;
  std::multiset<std::pair<std::int64_t, std::size_t>> keys_;
};

inline void sort_mined(std::vector<MinedModel>& v) {
  std::sort(v.begin(), v.end(), [](const MinedModel& a, const MinedModel& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    auto ea = a.model.edges().size(), eb = b.model.edges().size();
    if (ea != eb) return ea < eb;
    return a.canonical < b.canonical;
  });
}

}  // namespace detail

/// Minimal covering supergraphs of `sd` for one choice of column types.
inline std::vector<MinedModel> subgraph_extension(const KnowledgeGraph& kg, const std::vector<NewNode>& new_nodes,
                                                  const SemanticModel& sd, const ConstraintMap& cm,
                                                  const MiningConfig& cfg = {}) {
  cfg.validate();
  auto out = detail::Miner(sd, kg, cm, new_nodes, cfg).run();
  detail::sort_mined(out);
  return out;
}

/// Runs the extension for every combination of candidate types, merges the
/// results by canonical code, and keeps the top sigma by (frequency desc,
/// edges asc, code asc). Without isolated columns the seed is returned alone.
inline std::vector<MinedModel> add_missing_substructures(const SemanticModel& sd, const KnowledgeGraph& kg,
                                                         const ConstraintMap& cm,
                                                         const std::vector<CandidateTypeSet>& iso_types,
                                                         const MiningConfig& cfg = {}) {
  cfg.validate();
  if (iso_types.empty()) {
    return {MinedModel{sd, min_image_frequency(PatternGraph::from_model(sd), kg),
                       canonical_code(PatternGraph::from_model_with_data(sd))}};
  }
  std::map<std::string, MinedModel> merged;
  std::vector<std::size_t> pick(iso_types.size(), 0);
  for (const auto& c : iso_types)
    if (c.candidates.empty()) return {};
  while (true) {
    std::vector<NewNode> nodes;
    for (std::size_t i = 0; i < iso_types.size(); ++i)
      nodes.push_back({iso_types[i].column, iso_types[i].candidates[pick[i]].type});
    for (auto& m : subgraph_extension(kg, nodes, sd, cm, cfg)) merged.try_emplace(m.canonical, std::move(m));
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == iso_types[i].candidates.size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  std::vector<MinedModel> out;
  for (auto& [_, m] : merged) out.push_back(std::move(m));
  detail::sort_mined(out);
  if (out.size() > cfg.sigma) out.resize(cfg.sigma);
  return out;
}

}  // namespace semodel
