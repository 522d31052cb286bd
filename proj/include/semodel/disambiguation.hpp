#pragma once
// Relationship disambiguation: ambiguous entities, column similarity features,
// a Gini decision tree, and re-anchoring of misplaced relationships.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "semodel/graph_core.hpp"
#include "semodel/stats.hpp"

namespace semodel {

struct Anchor {
  std::string cls;
  std::string label;
  auto operator<=>(const Anchor&) const = default;
};

struct AmbiguousEntity {
  std::string cls;
  std::vector<Anchor> anchors;  // sorted, size >= 2
};

/// Classes linked by the same relationship label from >= 2 anchor classes
/// across the known models. One entry per (class, label).
inline std::vector<AmbiguousEntity> find_ambiguous_entities(std::span<const SourceDescription> known) {
  std::map<std::pair<std::string, std::string>, std::set<std::string>> anchors;
  for (const auto& d : known)
    for (const auto& e : d.model.object_edges())
      anchors[{d.model.find_class(e.dst)->cls, e.label}].insert(d.model.find_class(e.src)->cls);
  std::vector<AmbiguousEntity> out;
  for (const auto& [key, as] : anchors) {
    if (as.size() < 2) continue;
    AmbiguousEntity a{key.first, {}};
    for (const auto& c : as) a.anchors.push_back({c, key.second});
    out.push_back(std::move(a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// External knowledge base
// ---------------------------------------------------------------------------

class KnowledgeBase {
 public:
  void add(const std::string& category, const std::string& value) {
    entries_[category].insert(stats::lower(stats::trim(value)));
  }

  bool contains(const std::string& category, const std::string& value) const {
    auto it = entries_.find(category);
    return it != entries_.end() && it->second.count(stats::lower(stats::trim(value)));
  }

  std::vector<std::string> categories() const {
    std::vector<std::string> out;
    for (const auto& [c, _] : entries_) out.push_back(c);
    return out;
  }

  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::map<std::string, std::set<std::string>> entries_;
};

/// Snapshot format: one `category<TAB>value` per line; '#' starts a comment.
inline KnowledgeBase load_kb(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open knowledge base snapshot '" + path + "'");
  KnowledgeBase kb;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(path + ":" + std::to_string(n) + ": expected category<TAB>value");
    kb.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return kb;
}

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

struct FeatureVector {
  std::vector<double> name_similarity;  // per anchor
  std::vector<double> jaccard;          // per reference column
  std::vector<double> tfidf_cosine;
  std::vector<double> ks_statistic;
  std::vector<double> mw_statistic;
  std::vector<double> kb_hit;  // per knowledge-base category

  std::vector<double> flatten() const {
    std::vector<double> out;
    for (const auto* v : {&name_similarity, &jaccard, &tfidf_cosine, &ks_statistic, &mw_statistic, &kb_hit})
      out.insert(out.end(), v->begin(), v->end());
    return out;
  }
};

/// Name tokens without ontology code fragments (numbers, single letters).
inline std::set<std::string> meaningful_tokens(const std::string& name) {
  std::set<std::string> out;
  for (auto& t : stats::name_tokens(name)) {
    if (t.size() < 2 || std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit((unsigned char)c); }))
      continue;
    out.insert(t);
  }
  return out;
}

inline double name_similarity(const std::string& attribute, const Anchor& anchor) {
  auto a = meaningful_tokens(attribute);
  auto b = meaningful_tokens(anchor.cls);
  auto p = meaningful_tokens(anchor.label);
  b.insert(p.begin(), p.end());
  return stats::jaccard(a, b);
}

inline FeatureVector extract_features(const Column& attr, const std::vector<Column>& refs,
                                      const std::vector<Anchor>& anchors, const KnowledgeBase* kb) {
  if (attr.values.empty()) throw DataError("disambiguation: column '" + attr.name + "' is empty");
  FeatureVector f;
  for (const auto& a : anchors) f.name_similarity.push_back(name_similarity(attr.name, a));
  const bool numeric = stats::is_numeric(attr.values);
  const auto values = stats::value_set(attr.values);
  const auto nums = stats::numeric_values(attr.values);
  const auto hist = stats::value_histogram(attr.values);
  std::vector<std::map<std::string, double>> docs;
  for (const auto& r : refs) docs.push_back(stats::term_counts(r.values));
  const auto attr_terms = stats::term_counts(attr.values);
  std::vector<const std::map<std::string, double>*> corpus{&attr_terms};
  for (const auto& d : docs) corpus.push_back(&d);
  const stats::Idf idf(corpus);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (numeric) {
      f.jaccard.push_back(0.0);
      f.tfidf_cosine.push_back(0.0);
      f.mw_statistic.push_back(0.0);
      f.ks_statistic.push_back(stats::ks_statistic(nums, stats::numeric_values(refs[i].values)));
    } else {
      f.jaccard.push_back(stats::jaccard(values, stats::value_set(refs[i].values)));
      f.tfidf_cosine.push_back(stats::cosine(idf.weigh(attr_terms), idf.weigh(docs[i])));
      f.mw_statistic.push_back(stats::mann_whitney(hist, stats::value_histogram(refs[i].values)));
      f.ks_statistic.push_back(0.0);
    }
  }
  if (kb) {
    for (const auto& c : kb->categories()) {
      std::size_t hits = 0;
      for (const auto& v : values) hits += kb->contains(c, v);
      f.kb_hit.push_back(!values.empty() && 2 * hits >= values.size() ? 1.0 : 0.0);
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Decision tree
// ---------------------------------------------------------------------------

struct DecisionTreeConfig {
  std::size_t max_depth = 8;
  std::size_t min_leaf = 1;
};

class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int label = 0;
    std::unique_ptr<Node> left, right;  // left: value <= threshold
  };

  static DecisionTree train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                            DecisionTreeConfig cfg = {}) {
    if (x.empty() || x.size() != y.size()) throw StageError("disambiguation", "invalid training data");
    DecisionTree t;
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    t.root_ = build(x, y, idx, 0, cfg);
    return t;
  }

  int predict(const std::vector<double>& f) const {
    const Node* n = root_.get();
    while (n->feature >= 0) n = f[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left.get() : n->right.get();
    return n->label;
  }

  std::size_t depth() const { return depth_of(root_.get()); }

 private:
  static std::size_t depth_of(const Node* n) {
    if (n->feature < 0) return 0;
    return 1 + std::max(depth_of(n->left.get()), depth_of(n->right.get()));
  }

  static int majority(const std::vector<int>& y, const std::vector<std::size_t>& idx) {
    std::map<int, std::size_t> counts;
    for (auto i : idx) ++counts[y[i]];
    int best = counts.begin()->first;
    for (auto& [label, c] : counts)
      if (c > counts[best]) best = label;
    return best;
  }

  static double gini(const std::map<int, std::size_t>& counts, std::size_t n) {
    double g = 1.0;
    for (auto& [_, c] : counts) {
      const double p = static_cast<double>(c) / static_cast<double>(n);
      g -= p * p;
    }
    return g;
  }

  static std::unique_ptr<Node> build(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                                     const std::vector<std::size_t>& idx, std::size_t depth,
                                     const DecisionTreeConfig& cfg) {
    auto node = std::make_unique<Node>();
    node->label = majority(y, idx);
    std::map<int, std::size_t> all;
    for (auto i : idx) ++all[y[i]];
    if (all.size() == 1 || depth >= cfg.max_depth) return node;
    const double parent = gini(all, idx.size());
    double best_score = parent;
    int best_feature = -1;
    double best_threshold = 0.0;
    const std::size_t nf = x[idx[0]].size();
    for (std::size_t f = 0; f < nf; ++f) {
      std::vector<std::size_t> order = idx;
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a][f] < x[b][f]; });
      std::map<int, std::size_t> left, right = all;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const int lab = y[order[k]];
        ++left[lab];
        if (--right[lab] == 0) right.erase(lab);
        const double lo = x[order[k]][f], hi = x[order[k + 1]][f];
        if (lo == hi) continue;
        const std::size_t nl = k + 1, nr = order.size() - nl;
        if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
        const double score = (static_cast<double>(nl) * gini(left, nl) + static_cast<double>(nr) * gini(right, nr)) /
                             static_cast<double>(order.size());
        if (score < best_score - 1e-12) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = (lo + hi) / 2.0;
        }
      }
    }
    if (best_feature < 0) return node;
    std::vector<std::size_t> l, r;
    for (auto i : idx) (x[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? l : r).push_back(i);
    node->feature = best_feature;
    node->threshold = best_threshold;
    node->left = build(x, y, l, depth + 1, cfg);
    node->right = build(x, y, r, depth + 1, cfg);
    return node;
  }

  std::unique_ptr<Node> root_;
};

// ---------------------------------------------------------------------------
// Relationship classifier
// ---------------------------------------------------------------------------

/// A training column: a known attribute whose entity hangs off anchor `label`.
struct LabeledColumn {
  Column column;
  int label = 0;
};

/// Known columns whose entity (of the ambiguous class) is linked from one of
/// the entity's anchors, labelled with that anchor's position.
inline std::vector<LabeledColumn> labeled_columns(const AmbiguousEntity& entity,
                                                  std::span<const SourceDescription> known) {
  std::vector<LabeledColumn> out;
  for (const auto& d : known) {
    for (const auto& e : d.model.data_edges()) {
      const auto* owner = d.model.find_class(e.src);
      if (owner->cls != entity.cls) continue;
      for (const auto& oe : d.model.object_edges()) {
        if (oe.dst != owner->id) continue;
        Anchor a{d.model.find_class(oe.src)->cls, oe.label};
        auto it = std::find(entity.anchors.begin(), entity.anchors.end(), a);
        if (it == entity.anchors.end()) continue;
        const auto* col = d.source.find(d.model.find_data(e.dst)->attribute);
        if (col) out.push_back({*col, static_cast<int>(it - entity.anchors.begin())});
      }
    }
  }
  return out;
}

class RelationshipClassifier {
 public:
  RelationshipClassifier(AmbiguousEntity entity, std::vector<Column> references, const KnowledgeBase* kb,
                         DecisionTree tree)
      : entity_(std::move(entity)), refs_(std::move(references)), kb_(kb), tree_(std::move(tree)) {}

  const AmbiguousEntity& entity() const noexcept { return entity_; }
  const std::vector<Column>& references() const noexcept { return refs_; }

  FeatureVector features(const Column& c) const { return extract_features(c, refs_, entity_.anchors, kb_); }

  Anchor predict(const Column& c) const {
    return entity_.anchors[static_cast<std::size_t>(tree_.predict(features(c).flatten()))];
  }

 private:
  AmbiguousEntity entity_;
  std::vector<Column> refs_;
  const KnowledgeBase* kb_;
  DecisionTree tree_;
};

/// Picks one reference column per anchor with a seeded generator, then trains
/// a tree on every labelled column (references included).
inline RelationshipClassifier train_relationship_classifier(const AmbiguousEntity& entity,
                                                            const std::vector<LabeledColumn>& training,
                                                            const KnowledgeBase* kb, std::uint64_t seed,
                                                            DecisionTreeConfig cfg = {}) {
  std::mt19937_64 rng(seed);
  std::vector<Column> refs;
  for (std::size_t j = 0; j < entity.anchors.size(); ++j) {
    std::vector<const LabeledColumn*> pool;
    for (const auto& t : training)
      if (t.label == static_cast<int>(j)) pool.push_back(&t);
    if (pool.empty())
      throw StageError("disambiguation", "no training column for anchor " + entity.anchors[j].cls + " of " + entity.cls);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    refs.push_back(pool[pick(rng)]->column);
  }
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto& t : training) {
    x.push_back(extract_features(t.column, refs, entity.anchors, kb).flatten());
    y.push_back(t.label);
  }
  return RelationshipClassifier(entity, std::move(refs), kb, DecisionTree::train(x, y, cfg));
}

// ---------------------------------------------------------------------------
// Moving relationships
// ---------------------------------------------------------------------------

/// Re-anchors the incoming `anchor.label` edge of the attribute's entity to a
/// node of class `anchor.cls`. An entity shared with other attributes is split
/// so only this attribute moves. A missing anchor class gets a fresh node,
/// linked to the model through the first ontology property that connects it.
inline SemanticModel move_relationship(const SemanticModel& sd, const std::string& attribute, const Anchor& anchor,
                                       const Ontology& onto) {
  const auto* d = sd.find_data_by_attribute(attribute);
  if (!d) throw StageError("disambiguation", "attribute '" + attribute + "' is not in the model");
  auto de = sd.data_edge_of(d->id);
  if (!de) throw StageError("disambiguation", "attribute '" + attribute + "' has no entity");
  const auto* entity = sd.find_class(de->src);
  std::optional<ModelEdge> incoming;
  for (const auto& e : sd.object_edges())
    if (e.dst == entity->id && e.label == anchor.label) incoming = e;
  if (incoming && sd.find_class(incoming->src)->cls == anchor.cls) return sd;

  SemanticModel out = sd;
  std::string anchor_id;
  for (const auto& n : out.class_nodes())
    if (n.cls == anchor.cls && (anchor_id.empty() || n.index < out.find_class(anchor_id)->index)) anchor_id = n.id;
  if (anchor_id.empty()) {
    if (!onto.has_class(anchor.cls))
      throw StageError("disambiguation", "anchor class '" + anchor.cls + "' is not in the ontology");
    auto props = onto.object_properties();
    std::sort(props.begin(), props.end(), [](const ObjectProperty& a, const ObjectProperty& b) {
      return std::tie(a.domain, a.name, a.range) < std::tie(b.domain, b.name, b.range);
    });
    std::optional<ModelEdge> link;
    for (const auto& p : props) {
      if (link) break;
      for (const auto& n : out.class_nodes()) {
        if (n.id == entity->id) continue;
        if (p.domain == n.cls && p.range == anchor.cls) link = ModelEdge{n.id, p.name, "", EdgeKind::Object};
        else if (p.range == n.cls && p.domain == anchor.cls) link = ModelEdge{"", p.name, n.id, EdgeKind::Object};
        if (link) break;
      }
    }
    if (!link) throw StageError("disambiguation", "anchor class '" + anchor.cls + "' cannot be linked to the model");
    anchor_id = out.add_class(anchor.cls);
    if (link->src.empty()) link->src = anchor_id;
    else link->dst = anchor_id;
    out.add_edge(*link);
  }

  std::size_t attributes_on_entity = 0;
  for (const auto& e : out.data_edges()) attributes_on_entity += e.src == entity->id;
  if (attributes_on_entity > 1) {
    const std::string fresh = out.add_class(entity->cls);
    out.remove_edge(*de);
    out.add_data_edge(fresh, de->label, de->dst);
    out.add_object_edge(anchor_id, anchor.label, fresh);
  } else {
    if (incoming) out.remove_edge(*incoming);
    out.add_object_edge(anchor_id, anchor.label, entity->id);
  }
  return out;
}

}  // namespace semodel
