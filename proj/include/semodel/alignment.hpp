#pragma once
// Weighted alignment graph: merged known models, ontology expansion, and
// attachment edges from candidate semantic types to new-source attributes.

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "semodel/graph_core.hpp"
#include "semodel/labeling.hpp"

namespace semodel {

enum class Provenance { Known, Ontology, Attachment };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Known: return "known";
    case Provenance::Ontology: return "ontology";
    case Provenance::Attachment: return "attachment";
  }
  return "?";
}

struct AlignmentNode {
  std::string id;
  std::string cls;  // empty for attribute nodes
  int index = 0;
  std::string attribute;  // set for attribute nodes
  Provenance provenance = Provenance::Known;
  bool is_attribute() const noexcept { return cls.empty(); }
};

struct AlignmentEdge {
  std::string src;
  std::string label;
  std::string dst;
  double weight = 1.0;
  Provenance provenance = Provenance::Known;
};

inline constexpr double kAttachmentEpsilon = 1e-6;

class AlignmentGraph {
 public:
  explicit AlignmentGraph(Ontology onto = {}) : onto_(std::move(onto)) {}

  const Ontology& ontology() const noexcept { return onto_; }
  const std::map<std::string, AlignmentNode>& nodes() const noexcept { return nodes_; }
  const std::vector<AlignmentEdge>& edges() const noexcept { return edges_; }

  const AlignmentNode* find(const std::string& id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  std::vector<const AlignmentNode*> class_nodes(const std::string& cls) const {
    std::vector<const AlignmentNode*> out;
    for (const auto& [_, n] : nodes_)
      if (n.cls == cls) out.push_back(&n);
    return out;
  }

  const AlignmentNode& add_class_node(const std::string& cls, int index, Provenance p) {
    const std::string id = cls + std::to_string(index);
    auto [it, fresh] = nodes_.try_emplace(id, AlignmentNode{id, cls, index, "", p});
    return it->second;
  }

  const AlignmentNode& add_attribute_node(const std::string& attribute) {
    const std::string id = "@" + attribute;
    auto [it, fresh] = nodes_.try_emplace(id, AlignmentNode{id, "", 0, attribute, Provenance::Attachment});
    return it->second;
  }

  void add_edge(AlignmentEdge e) {
    if (!(e.weight > 0.0)) throw StageError("alignment", "edge weight must be positive");
    edges_.push_back(std::move(e));
  }

  bool has_edge(const std::string& src, const std::string& label, const std::string& dst) const {
    return std::any_of(edges_.begin(), edges_.end(),
                       [&](const AlignmentEdge& e) { return e.src == src && e.label == label && e.dst == dst; });
  }

  /// Adds every ontology object property between present class nodes that is
  /// not already an edge. Weight 1 + (1/|E|)·(rank/|E|) for the property's rank
  /// in (domain, name, range) order, so every such edge weighs in (1, 1 + 1/|E|].
  void expand_with_ontology() {
    auto props = onto_.object_properties();
    std::sort(props.begin(), props.end(), [](const ObjectProperty& a, const ObjectProperty& b) {
      return std::tie(a.domain, a.name, a.range) < std::tie(b.domain, b.name, b.range);
    });
    const double total = static_cast<double>(std::max<std::size_t>(1, props.size()));
    for (std::size_t r = 0; r < props.size(); ++r) {
      const auto& p = props[r];
      for (const auto* u : class_nodes(p.domain))
        for (const auto* v : class_nodes(p.range)) {
          if (u->id == v->id || has_edge(u->id, p.name, v->id)) continue;
          add_edge({u->id, p.name, v->id, 1.0 + static_cast<double>(r + 1) / (total * total),
                    Provenance::Ontology});
        }
    }
  }

  void remove_attachments(const std::string& attribute) {
    const std::string id = "@" + attribute;
    std::erase_if(edges_, [&](const AlignmentEdge& e) { return e.dst == id; });
    nodes_.erase(id);
  }

  std::string to_dot() const {
    std::ostringstream out;
    out << "digraph alignment {\n";
    for (const auto& [id, n] : nodes_)
      out << "  \"" << id << "\" [shape=" << (n.is_attribute() ? "box" : "ellipse") << "];\n";
    for (const auto& e : edges_)
      out << "  \"" << e.src << "\" -> \"" << e.dst << "\" [label=\"" << e.label << " (" << std::setprecision(4)
          << e.weight << ")\", style=" << (e.provenance == Provenance::Known ? "solid" : "dashed") << "];\n";
    out << "}\n";
    return out.str();
  }

 private:
  Ontology onto_;
  std::map<std::string, AlignmentNode> nodes_;
  std::vector<AlignmentEdge> edges_;
};

inline AlignmentGraph build_alignment_graph(std::span<const SourceDescription> known, const Ontology& onto) {
  if (known.empty()) throw StageError("alignment", "no known semantic models");
  AlignmentGraph ag(onto);
  std::map<std::string, std::size_t> multiplicity;
  for (const auto& d : known) {
    for (const auto& n : d.model.class_nodes()) {
      if (!onto.has_class(n.cls))
        throw DataError("alignment: model '" + d.name() + "' uses unknown class '" + n.cls + "'");
      multiplicity[n.cls] = std::max(multiplicity[n.cls], d.model.count_class(n.cls));
    }
  }
  for (const auto& [cls, k] : multiplicity)
    for (std::size_t i = 1; i <= k; ++i) ag.add_class_node(cls, static_cast<int>(i), Provenance::Known);

  // Instance i of a class within a model maps to the i-th merged node, by index order.
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> support;
  for (const auto& d : known) {
    std::map<std::string, std::string> to_merged;
    std::map<std::string, std::vector<const ClassNode*>> by_class;
    for (const auto& n : d.model.class_nodes()) by_class[n.cls].push_back(&n);
    for (auto& [cls, ns] : by_class) {
      std::sort(ns.begin(), ns.end(), [](auto* a, auto* b) { return a->index < b->index; });
      for (std::size_t i = 0; i < ns.size(); ++i) to_merged[ns[i]->id] = cls + std::to_string(i + 1);
    }
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (const auto& e : d.model.object_edges()) {
      const auto* s = d.model.find_class(e.src);
      const auto* t = d.model.find_class(e.dst);
      if (!onto.has_object_property(s->cls, e.label, t->cls))
        throw DataError("alignment: model '" + d.name() + "' uses (" + s->cls + ", " + e.label + ", " + t->cls +
                        ") which the ontology does not declare");
      seen.emplace(to_merged[e.src], e.label, to_merged[e.dst]);
    }
    for (const auto& k : seen) ++support[k];
  }
  for (const auto& [k, n] : support) {
    const auto& [s, l, t] = k;
    ag.add_edge({s, l, t, 1.0 / (1.0 + static_cast<double>(n)), Provenance::Known});
  }
  ag.expand_with_ontology();
  return ag;
}

/// Adds one attachment edge per (attribute, candidate type, class node of that
/// type's class). Re-attaching the same attribute replaces its old edges.
inline void attach_candidate_types(AlignmentGraph& ag, const std::vector<CandidateTypeSet>& cands) {
  bool added_class = false;
  for (const auto& c : cands) {
    if (c.candidates.empty()) throw StageError("alignment", "no candidate types for column '" + c.column + "'");
    for (const auto& t : c.candidates)
      if (ag.class_nodes(t.type.cls).empty()) {
        if (!ag.ontology().has_class(t.type.cls))
          throw DataError("alignment: candidate class '" + t.type.cls + "' is not in the ontology");
        ag.add_class_node(t.type.cls, 1, Provenance::Ontology);
        added_class = true;
      }
  }
  if (added_class) ag.expand_with_ontology();
  for (const auto& c : cands) {
    ag.remove_attachments(c.column);
    const auto& attr = ag.add_attribute_node(c.column);
    for (const auto& t : c.candidates)
      for (const auto* n : ag.class_nodes(t.type.cls))
        ag.add_edge({n->id, t.type.property, attr.id, 1.0 - t.confidence + kAttachmentEpsilon, Provenance::Attachment});
  }
}

}  // namespace semodel
