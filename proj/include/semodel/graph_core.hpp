#pragma once
//
// Core data model: ontology, source tables, semantic models, knowledge graphs,
// plus their file formats and the knowledge-graph materialization rules.
//

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semodel/error.hpp"

namespace semodel {

using json = nlohmann::json;

/// (subject, predicate, object) with string labels.
struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

// ---------------------------------------------------------------------------
// Ontology
// ---------------------------------------------------------------------------

struct ObjectProperty {
  std::string name;
  std::string domain;
  std::string range;
  auto operator<=>(const ObjectProperty&) const = default;
  bool operator==(const ObjectProperty&) const = default;
};

struct DataProperty {
  std::string name;
  std::string domain;
  auto operator<=>(const DataProperty&) const = default;
  bool operator==(const DataProperty&) const = default;
};

struct SubclassEdge {
  std::string child;
  std::string parent;
  auto operator<=>(const SubclassEdge&) const = default;
  bool operator==(const SubclassEdge&) const = default;
};

/// Domain ontology. Matching elsewhere uses exact class names; the subclass
/// relation is stored and validated but never used for inference.
class Ontology {
 public:
  Ontology() = default;
  Ontology(std::set<std::string> classes, std::vector<ObjectProperty> object_properties,
           std::vector<DataProperty> data_properties, std::vector<SubclassEdge> subclass_edges)
      : classes_(std::move(classes)),
        object_properties_(std::move(object_properties)),
        data_properties_(std::move(data_properties)),
        subclass_edges_(std::move(subclass_edges)) {
    validate();
  }

  const std::set<std::string>& classes() const noexcept { return classes_; }
  const std::vector<ObjectProperty>& object_properties() const noexcept { return object_properties_; }
  const std::vector<DataProperty>& data_properties() const noexcept { return data_properties_; }
  const std::vector<SubclassEdge>& subclass_edges() const noexcept { return subclass_edges_; }

  bool has_class(const std::string& c) const { return classes_.count(c) != 0; }

  bool has_object_property(const std::string& domain, const std::string& name,
                           const std::string& range) const {
    return std::find(object_properties_.begin(), object_properties_.end(),
                     ObjectProperty{name, domain, range}) != object_properties_.end();
  }

  bool has_data_property(const std::string& domain, const std::string& name) const {
    return std::find(data_properties_.begin(), data_properties_.end(),
                     DataProperty{name, domain}) != data_properties_.end();
  }

  std::size_t property_count() const noexcept {
    return object_properties_.size() + data_properties_.size();
  }

  void validate() const {
    auto require = [&](const std::string& c, const std::string& what) {
      if (!has_class(c))
        throw DataError("ontology: " + what + " references undeclared class '" + c + "'");
    };
    for (const auto& p : object_properties_) {
      require(p.domain, "object property '" + p.name + "' domain");
      require(p.range, "object property '" + p.name + "' range");
    }
    for (const auto& p : data_properties_) require(p.domain, "data property '" + p.name + "' domain");
    std::map<std::string, std::vector<std::string>> parents;
    for (const auto& s : subclass_edges_) {
      require(s.child, "subclass edge");
      require(s.parent, "subclass edge");
      parents[s.child].push_back(s.parent);
    }
    // Cycle detection over the subclass relation (iterative three-colour DFS).
    std::map<std::string, int> colour;
    for (const auto& [start, _] : parents) {
      if (colour[start] != 0) continue;
      std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
      colour[start] = 1;
      while (!stack.empty()) {
        auto& [node, next] = stack.back();
        auto it = parents.find(node);
        if (it == parents.end() || next >= it->second.size()) {
          colour[node] = 2;
          stack.pop_back();
          continue;
        }
        const std::string parent = it->second[next++];
        int& c = colour[parent];
        if (c == 1) throw DataError("ontology: subclass cycle through '" + parent + "'");
        if (c == 0) {
          c = 1;
          stack.emplace_back(parent, 0);
        }
      }
    }
  }

 private:
  std::set<std::string> classes_;
  std::vector<ObjectProperty> object_properties_;
  std::vector<DataProperty> data_properties_;
  std::vector<SubclassEdge> subclass_edges_;
};

inline json ontology_to_json(const Ontology& o) {
  json j;
  j["classes"] = json::array();
  for (const auto& c : o.classes()) j["classes"].push_back(c);
  j["object_properties"] = json::array();
  for (const auto& p : o.object_properties())
    j["object_properties"].push_back({{"name", p.name}, {"domain", p.domain}, {"range", p.range}});
  j["data_properties"] = json::array();
  for (const auto& p : o.data_properties())
    j["data_properties"].push_back({{"name", p.name}, {"domain", p.domain}});
  j["subclass"] = json::array();
  for (const auto& s : o.subclass_edges())
    j["subclass"].push_back({{"child", s.child}, {"parent", s.parent}});
  return j;
}

inline Ontology ontology_from_json(const json& j) {
  try {
    std::set<std::string> classes;
    for (const auto& c : j.at("classes")) classes.insert(c.get<std::string>());
    std::vector<ObjectProperty> ops;
    if (j.contains("object_properties"))
      for (const auto& p : j["object_properties"])
        ops.push_back({p.at("name").get<std::string>(), p.at("domain").get<std::string>(),
                       p.at("range").get<std::string>()});
    std::vector<DataProperty> dps;
    if (j.contains("data_properties"))
      for (const auto& p : j["data_properties"])
        dps.push_back({p.at("name").get<std::string>(), p.at("domain").get<std::string>()});
    std::vector<SubclassEdge> subs;
    if (j.contains("subclass"))
      for (const auto& s : j["subclass"])
        subs.push_back({s.at("child").get<std::string>(), s.at("parent").get<std::string>()});
    return Ontology(std::move(classes), std::move(ops), std::move(dps), std::move(subs));
  } catch (const json::exception& e) {
    throw DataError(std::string("ontology: malformed document: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

inline Ontology load_ontology(const std::string& path) {
  return ontology_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------
// Source tables
// ---------------------------------------------------------------------------

struct Column {
  std::string name;
  std::vector<std::string> values;
};

/// A tabular data source: ordered attributes of equal length.
class SourceTable {
 public:
  SourceTable() = default;
  SourceTable(std::string name, std::vector<Column> columns)
      : name_(std::move(name)), columns_(std::move(columns)) {
    validate();
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  std::size_t row_count() const noexcept { return columns_.empty() ? 0 : columns_.front().values.size(); }

  const Column* find(std::string_view attribute) const {
    for (const auto& c : columns_)
      if (c.name == attribute) return &c;
    return nullptr;
  }

  void validate() const {
    if (columns_.empty()) throw DataError("source '" + name_ + "': no columns");
    std::set<std::string> seen;
    for (const auto& c : columns_) {
      if (!seen.insert(c.name).second)
        throw DataError("source '" + name_ + "': duplicate attribute '" + c.name + "'");
      if (c.values.size() != columns_.front().values.size())
        throw DataError("source '" + name_ + "': column '" + c.name + "' has a different row count");
    }
  }

 private:
  std::string name_;
  std::vector<Column> columns_;
};

namespace detail {

inline std::vector<std::vector<std::string>> parse_csv_records(std::string_view text,
                                                               const std::string& origin) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !field.empty())
          throw DataError(origin + ":" + std::to_string(line) + ": stray quote");
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (quoted) throw DataError(origin + ": unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

inline std::string csv_escape(const std::string& v) {
  if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

}  // namespace detail

/// Parses CSV text with a header row; header cells become attribute names.
inline SourceTable parse_csv(std::string_view text, const std::string& name) {
  auto records = detail::parse_csv_records(text, name);
  if (records.empty()) throw DataError("source '" + name + "': empty CSV");
  const auto& header = records.front();
  std::vector<Column> columns;
  for (const auto& h : header) columns.push_back({h, {}});
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size())
      throw DataError("source '" + name + "': row " + std::to_string(r) + " has " +
                      std::to_string(records[r].size()) + " cells, expected " +
                      std::to_string(header.size()));
    for (std::size_t c = 0; c < header.size(); ++c) columns[c].values.push_back(records[r][c]);
  }
  return SourceTable(name, std::move(columns));
}

inline SourceTable load_csv(const std::string& path, const std::string& name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), name);
}

inline std::string to_csv(const SourceTable& t) {
  std::string out;
  const auto& cols = t.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out += ',';
    out += detail::csv_escape(cols[c].name);
  }
  out += '\n';
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ',';
      out += detail::csv_escape(cols[c].values[r]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Semantic models
// ---------------------------------------------------------------------------

enum class EdgeKind { Object, Data };

struct ClassNode {
  std::string id;
  std::string cls;
  int index = 1;
  /// Class name with instance index, e.g. "E52_Time-Span2".
  std::string label() const { return cls + std::to_string(index); }
};

struct DataNode {
  std::string id;
  std::string attribute;
};

struct ModelEdge {
  std::string src;
  std::string label;
  std::string dst;
  EdgeKind kind = EdgeKind::Object;
  bool operator==(const ModelEdge&) const = default;
};

/// Directed graph of ontology class nodes and source-attribute data nodes.
class SemanticModel {
 public:
  /// Adds a class node. `index == 0` picks the smallest unused instance index.
  const std::string& add_class(const std::string& cls, int index = 0) {
    if (index == 0) index = next_index(cls);
    if (find_class_instance(cls, index))
      throw DataError("model: duplicate class node " + cls + std::to_string(index));
    if (index < 1) throw DataError("model: instance index must be >= 1");
    std::string id = cls + std::to_string(index);
    if (has_node(id)) throw DataError("model: duplicate node id '" + id + "'");
    classes_.push_back({std::move(id), cls, index});
    return classes_.back().id;
  }

  /// Adds a class node with an explicit id (used by loaders).
  const std::string& add_class_with_id(const std::string& id, const std::string& cls, int index) {
    if (has_node(id)) throw DataError("model: duplicate node id '" + id + "'");
    if (index < 1) throw DataError("model: instance index must be >= 1 for '" + id + "'");
    if (find_class_instance(cls, index))
      throw DataError("model: duplicate class node " + cls + std::to_string(index));
    classes_.push_back({id, cls, index});
    return classes_.back().id;
  }

  const std::string& add_data(const std::string& attribute) {
    return add_data_with_id("@" + attribute, attribute);
  }

  const std::string& add_data_with_id(const std::string& id, const std::string& attribute) {
    if (has_node(id)) throw DataError("model: duplicate node id '" + id + "'");
    if (find_data_by_attribute(attribute))
      throw DataError("model: duplicate data node for attribute '" + attribute + "'");
    data_.push_back({id, attribute});
    return data_.back().id;
  }

  void add_object_edge(const std::string& src, const std::string& label, const std::string& dst) {
    if (!find_class(src) || !find_class(dst))
      throw DataError("model: object edge '" + label + "' must connect class nodes (" + src + " -> " + dst + ")");
    edges_.push_back({src, label, dst, EdgeKind::Object});
  }

  void add_data_edge(const std::string& src, const std::string& label, const std::string& dst) {
    if (!find_class(src) || !find_data(dst))
      throw DataError("model: data edge '" + label + "' must connect a class node to a data node");
    if (data_edge_of(dst))
      throw DataError("model: data node '" + dst + "' already has an incoming edge");
    edges_.push_back({src, label, dst, EdgeKind::Data});
  }

  void add_edge(const ModelEdge& e) {
    if (e.kind == EdgeKind::Object) add_object_edge(e.src, e.label, e.dst);
    else add_data_edge(e.src, e.label, e.dst);
  }

  bool remove_edge(const ModelEdge& e) {
    auto it = std::find(edges_.begin(), edges_.end(), e);
    if (it == edges_.end()) return false;
    edges_.erase(it);
    return true;
  }

  /// Removes a class node and every incident edge. Data nodes are left alone.
  void remove_class_node(const std::string& id) {
    std::erase_if(edges_, [&](const ModelEdge& e) { return e.src == id || e.dst == id; });
    std::erase_if(classes_, [&](const ClassNode& n) { return n.id == id; });
  }

  void remove_data_node(const std::string& id) {
    std::erase_if(edges_, [&](const ModelEdge& e) { return e.dst == id; });
    std::erase_if(data_, [&](const DataNode& n) { return n.id == id; });
  }

  const std::vector<ClassNode>& class_nodes() const noexcept { return classes_; }
  const std::vector<DataNode>& data_nodes() const noexcept { return data_; }
  const std::vector<ModelEdge>& edges() const noexcept { return edges_; }

  std::vector<ModelEdge> object_edges() const {
    std::vector<ModelEdge> out;
    for (const auto& e : edges_)
      if (e.kind == EdgeKind::Object) out.push_back(e);
    return out;
  }

  std::vector<ModelEdge> data_edges() const {
    std::vector<ModelEdge> out;
    for (const auto& e : edges_)
      if (e.kind == EdgeKind::Data) out.push_back(e);
    return out;
  }

  bool empty() const noexcept { return classes_.empty() && data_.empty(); }
  bool has_node(std::string_view id) const { return find_class(id) || find_data(id); }

  const ClassNode* find_class(std::string_view id) const {
    for (const auto& n : classes_)
      if (n.id == id) return &n;
    return nullptr;
  }

  const ClassNode* find_class_instance(std::string_view cls, int index) const {
    for (const auto& n : classes_)
      if (n.cls == cls && n.index == index) return &n;
    return nullptr;
  }

  const DataNode* find_data(std::string_view id) const {
    for (const auto& n : data_)
      if (n.id == id) return &n;
    return nullptr;
  }

  const DataNode* find_data_by_attribute(std::string_view attribute) const {
    for (const auto& n : data_)
      if (n.attribute == attribute) return &n;
    return nullptr;
  }

  std::optional<ModelEdge> data_edge_of(std::string_view data_id) const {
    for (const auto& e : edges_)
      if (e.kind == EdgeKind::Data && e.dst == data_id) return e;
    return std::nullopt;
  }

  /// Class node label for class nodes, attribute name for data nodes.
  std::string node_label(std::string_view id) const {
    if (auto* c = find_class(id)) return c->label();
    if (auto* d = find_data(id)) return d->attribute;
    throw DataError("model: unknown node '" + std::string(id) + "'");
  }

  int next_index(std::string_view cls) const {
    for (int i = 1;; ++i)
      if (!find_class_instance(cls, i)) return i;
  }

  std::size_t count_class(std::string_view cls) const {
    return static_cast<std::size_t>(
        std::count_if(classes_.begin(), classes_.end(), [&](const ClassNode& n) { return n.cls == cls; }));
  }

  /// Weak connectivity over all nodes. The empty model counts as connected.
  bool is_connected() const {
    std::vector<std::string> ids;
    for (const auto& n : classes_) ids.push_back(n.id);
    for (const auto& n : data_) ids.push_back(n.id);
    if (ids.empty()) return true;
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : edges_) {
      adj[e.src].push_back(e.dst);
      adj[e.dst].push_back(e.src);
    }
    std::set<std::string> seen{ids.front()};
    std::vector<std::string> stack{ids.front()};
    while (!stack.empty()) {
      auto n = stack.back();
      stack.pop_back();
      for (const auto& m : adj[n])
        if (seen.insert(m).second) stack.push_back(m);
    }
    return seen.size() == ids.size();
  }

  void validate(bool require_connected = false) const {
    for (const auto& d : data_) {
      int in = 0;
      for (const auto& e : edges_)
        if (e.dst == d.id) ++in;
      if (in != 1)
        throw DataError("model: data node '" + d.attribute + "' has in-degree " + std::to_string(in));
    }
    if (require_connected && !is_connected()) throw DataError("model: not weakly connected");
  }

 private:
  std::vector<ClassNode> classes_;
  std::vector<DataNode> data_;
  std::vector<ModelEdge> edges_;
};

inline json model_to_json(const SemanticModel& m) {
  json j;
  j["nodes"] = json::array();
  for (const auto& n : m.class_nodes())
    j["nodes"].push_back({{"id", n.id}, {"kind", "class"}, {"label", n.cls}, {"index", n.index}});
  for (const auto& n : m.data_nodes())
    j["nodes"].push_back({{"id", n.id}, {"kind", "data"}, {"label", n.attribute}});
  j["edges"] = json::array();
  for (const auto& e : m.edges())
    j["edges"].push_back({{"src", e.src},
                          {"label", e.label},
                          {"dst", e.dst},
                          {"kind", e.kind == EdgeKind::Object ? "object" : "data"}});
  return j;
}

inline SemanticModel model_from_json(const json& j) {
  SemanticModel m;
  try {
    for (const auto& n : j.at("nodes")) {
      const auto kind = n.at("kind").get<std::string>();
      if (kind == "class")
        m.add_class_with_id(n.at("id").get<std::string>(), n.at("label").get<std::string>(),
                            n.value("index", 1));
      else if (kind == "data")
        m.add_data_with_id(n.at("id").get<std::string>(), n.at("label").get<std::string>());
      else
        throw DataError("model: unknown node kind '" + kind + "'");
    }
    for (const auto& e : j.at("edges")) {
      const auto kind = e.at("kind").get<std::string>();
      if (kind != "object" && kind != "data") throw DataError("model: unknown edge kind '" + kind + "'");
      m.add_edge({e.at("src").get<std::string>(), e.at("label").get<std::string>(),
                  e.at("dst").get<std::string>(), kind == "object" ? EdgeKind::Object : EdgeKind::Data});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("model: malformed document: ") + e.what());
  }
  m.validate();
  return m;
}

inline SemanticModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

inline void save_model(const std::string& path, const SemanticModel& m) {
  write_text_file(path, model_to_json(m).dump(2) + "\n");
}

/// rel(sm): one triple per edge, class nodes rendered with their instance index.
inline std::set<Triple> model_triples(const SemanticModel& m) {
  std::set<Triple> out;
  for (const auto& e : m.edges()) out.insert({m.node_label(e.src), e.label, m.node_label(e.dst)});
  return out;
}

/// A source paired with its semantic model; data edges are the attribute mapping.
struct SourceDescription {
  SourceTable source;
  SemanticModel model;

  const std::string& name() const noexcept { return source.name(); }

  void validate() const {
    model.validate();
    for (const auto& d : model.data_nodes())
      if (!source.find(d.attribute))
        throw DataError("description '" + name() + "': attribute '" + d.attribute +
                        "' is not a column of the source");
  }
};

// ---------------------------------------------------------------------------
// Knowledge graph
// ---------------------------------------------------------------------------

/// Instance-level graph: entities typed by ontology classes, relations labelled
/// by object properties. Class and property names are interned as symbols.
class KnowledgeGraph {
 public:
  using Entity = std::uint32_t;
  using Symbol = std::uint32_t;

  struct Adjacent {
    Symbol property;
    Entity other;
  };

  struct Relation {
    Entity subject;
    Symbol property;
    Entity object;
  };

  Entity add_entity(const std::string& id, const std::string& cls) {
    Symbol c = intern(class_symbols_, class_names_, cls);
    auto [it, inserted] = entity_index_.try_emplace(id, static_cast<Entity>(entity_ids_.size()));
    if (!inserted) {
      if (entity_class_[it->second] != c)
        throw DataError("knowledge graph: entity '" + id + "' declared with classes '" +
                        class_names_[entity_class_[it->second]] + "' and '" + cls + "'");
      return it->second;
    }
    entity_ids_.push_back(id);
    entity_class_.push_back(c);
    out_.emplace_back();
    in_.emplace_back();
    if (by_class_.size() <= c) by_class_.resize(c + 1);
    by_class_[c].push_back(it->second);
    return it->second;
  }

  void add_relation(const std::string& subject, const std::string& property, const std::string& object) {
    auto s = find_entity(subject), o = find_entity(object);
    if (!s || !o)
      throw DataError("knowledge graph: relation '" + property + "' references an unknown entity");
    add_relation(*s, property, *o);
  }

  void add_relation(Entity s, const std::string& property, Entity o) {
    Symbol p = intern(property_symbols_, property_names_, property);
    relations_.push_back({s, p, o});
    out_[s].push_back({p, o});
    in_[o].push_back({p, s});
    relation_set_.insert(key(s, p, o));
    schema_.insert({class_names_[entity_class_[s]], property, class_names_[entity_class_[o]]});
  }

  std::size_t entity_count() const noexcept { return entity_ids_.size(); }
  std::size_t relation_count() const noexcept { return relations_.size(); }
  bool empty() const noexcept { return entity_ids_.empty(); }

  const std::string& entity_id(Entity e) const { return entity_ids_[e]; }
  Symbol entity_class(Entity e) const { return entity_class_[e]; }
  const std::string& class_name(Symbol c) const { return class_names_[c]; }
  const std::string& property_name(Symbol p) const { return property_names_[p]; }
  const std::vector<Relation>& relations() const noexcept { return relations_; }

  std::optional<Entity> find_entity(const std::string& id) const {
    auto it = entity_index_.find(id);
    if (it == entity_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<Symbol> class_symbol(const std::string& name) const {
    auto it = class_symbols_.find(name);
    if (it == class_symbols_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<Symbol> property_symbol(const std::string& name) const {
    auto it = property_symbols_.find(name);
    if (it == property_symbols_.end()) return std::nullopt;
    return it->second;
  }

  std::span<const Entity> entities_of_class(Symbol c) const {
    if (c >= by_class_.size()) return {};
    return by_class_[c];
  }

  std::span<const Adjacent> out(Entity e) const { return out_[e]; }
  std::span<const Adjacent> in(Entity e) const { return in_[e]; }

  bool has_relation(Entity s, Symbol p, Entity o) const { return relation_set_.count(key(s, p, o)) != 0; }

  /// Distinct (subject-class, property, object-class) triples.
  const std::set<Triple>& schema_projection() const noexcept { return schema_; }

  bool has_schema_triple(const std::string& s, const std::string& p, const std::string& o) const {
    return schema_.count({s, p, o}) != 0;
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::tuple<Entity, Symbol, Entity>& k) const noexcept {
      auto [s, p, o] = k;
      std::size_t h = std::hash<std::uint64_t>{}((std::uint64_t(s) << 32) | o);
      return h ^ (std::hash<std::uint32_t>{}(p) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
  };

  static std::tuple<Entity, Symbol, Entity> key(Entity s, Symbol p, Entity o) { return {s, p, o}; }

  static Symbol intern(std::unordered_map<std::string, Symbol>& table, std::vector<std::string>& names,
                       const std::string& name) {
    auto [it, inserted] = table.try_emplace(name, static_cast<Symbol>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  }

  std::vector<std::string> entity_ids_;
  std::vector<Symbol> entity_class_;
  std::unordered_map<std::string, Entity> entity_index_;
  std::unordered_map<std::string, Symbol> class_symbols_, property_symbols_;
  std::vector<std::string> class_names_, property_names_;
  std::vector<std::vector<Entity>> by_class_;
  std::vector<std::vector<Adjacent>> out_, in_;
  std::vector<Relation> relations_;
  std::unordered_set<std::tuple<Entity, Symbol, Entity>, KeyHash> relation_set_;
  std::set<Triple> schema_;
};

/// Reads tab-separated quads `subject_id  subject_class  property  object_id  object_class`.
inline KnowledgeGraph parse_kg(std::istream& in, const std::string& origin = "kg") {
  KnowledgeGraph kg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != 5 || std::any_of(f.begin(), f.end(), [](const std::string& s) { return s.empty(); }))
      throw DataError(origin + ":" + std::to_string(lineno) + ": expected 5 non-empty tab-separated fields");
    try {
      auto s = kg.add_entity(f[0], f[1]);
      auto o = kg.add_entity(f[3], f[4]);
      kg.add_relation(s, f[2], o);
    } catch (const DataError& e) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return kg;
}

inline KnowledgeGraph load_kg(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_kg(in, path);
}

inline std::string kg_to_tsv(const KnowledgeGraph& kg) {
  std::string out;
  for (const auto& r : kg.relations()) {
    out += kg.entity_id(r.subject) + '\t' + kg.class_name(kg.entity_class(r.subject)) + '\t' +
           kg.property_name(r.property) + '\t' + kg.entity_id(r.object) + '\t' +
           kg.class_name(kg.entity_class(r.object)) + '\n';
  }
  return out;
}

/// Adds one entity per (row, class node) and one relation per (row, object edge).
inline void materialize_into(KnowledgeGraph& kg, const SourceDescription& d) {
  if (!d.model.is_connected())
    throw DataError("description '" + d.name() + "': model is disconnected");
  const std::size_t rows = d.source.row_count();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string prefix = d.name() + "#" + std::to_string(r) + "#";
    for (const auto& n : d.model.class_nodes()) kg.add_entity(prefix + n.id, n.cls);
    for (const auto& e : d.model.edges())
      if (e.kind == EdgeKind::Object) kg.add_relation(prefix + e.src, e.label, prefix + e.dst);
  }
}

/// Materializes every description except `held_out`.
inline KnowledgeGraph build_leave_one_out_kg(std::span<const SourceDescription> descriptions,
                                             const std::string& held_out) {
  bool found = std::any_of(descriptions.begin(), descriptions.end(),
                           [&](const SourceDescription& d) { return d.name() == held_out; });
  if (!found) throw DataError("leave-one-out: no source named '" + held_out + "'");
  KnowledgeGraph kg;
  for (const auto& d : descriptions)
    if (d.name() != held_out) materialize_into(kg, d);
  return kg;
}

inline KnowledgeGraph materialize_all(std::span<const SourceDescription> descriptions) {
  KnowledgeGraph kg;
  for (const auto& d : descriptions) materialize_into(kg, d);
  return kg;
}

}  // namespace semodel
