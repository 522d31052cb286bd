#pragma once
// Synthetic dataset generator. A spec names a template tree of classes, typed
// attributes hung on its nodes, and sources as attribute subsets; every source
// model is the smallest subtree of the template spanning its attributes.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "semodel/evaluation.hpp"
#include "semodel/graph_core.hpp"
#include "semodel/mining.hpp"

namespace semodel {

struct FixtureAttribute {
  std::string name;
  std::string node;  // template node id
  std::string property;
  bool numeric = false;
};

struct FixtureSource {
  std::string name;
  std::vector<std::string> attributes;
  std::size_t rows = 0;
};

struct FixtureSpec {
  std::uint64_t seed = 42;
  std::size_t rows = 10;
  std::map<std::string, std::string> nodes;  // template node id -> class
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::vector<FixtureAttribute> attributes;
  std::vector<ObjectProperty> extra_properties;
  std::vector<FixtureSource> sources;

  static FixtureSpec from_json(const json& j);
  void validate() const;
};

inline FixtureSpec FixtureSpec::from_json(const json& j) {
  FixtureSpec s;
  try {
    s.seed = j.value("seed", std::uint64_t{42});
    s.rows = j.value("rows", std::size_t{10});
    for (auto it = j.at("nodes").begin(); it != j.at("nodes").end(); ++it) s.nodes[it.key()] = it.value();
    for (const auto& e : j.at("edges")) s.edges.emplace_back(e.at(0), e.at(1), e.at(2));
    for (const auto& a : j.at("attributes")) {
      const auto kind = a.value("kind", std::string("text"));
      if (kind != "text" && kind != "number") throw ConfigError("fixture: attribute kind must be text or number");
      s.attributes.push_back({a.at("name"), a.at("node"), a.at("property"), kind == "number"});
    }
    if (j.contains("extra_properties"))
      for (const auto& p : j["extra_properties"]) s.extra_properties.push_back({p.at("name"), p.at("domain"), p.at("range")});
    for (const auto& src : j.at("sources"))
      s.sources.push_back({src.at("name"), src.at("attributes").get<std::vector<std::string>>(),
                           src.value("rows", std::size_t{0})});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("fixture spec: ") + e.what());
  }
  s.validate();
  return s;
}

inline void FixtureSpec::validate() const {
  if (sources.empty()) throw ConfigError("fixture spec lists no sources");
  if (nodes.empty()) throw ConfigError("fixture spec lists no template nodes");
  if (rows < 1) throw ConfigError("fixture spec: rows must be at least 1");
  std::set<std::string> classes;
  for (const auto& [id, cls] : nodes)
    if (!classes.insert(cls).second) throw ConfigError("fixture spec: class '" + cls + "' used by two template nodes");
  if (edges.size() + 1 != nodes.size()) throw ConfigError("fixture spec: template must be a tree");
  for (const auto& [s, p, o] : edges)
    if (!nodes.count(s) || !nodes.count(o)) throw ConfigError("fixture spec: edge '" + p + "' names an unknown node");
  SemanticModel probe;
  for (const auto& [id, cls] : nodes) probe.add_class_with_id(id, cls, 1);
  for (const auto& [s, p, o] : edges) probe.add_object_edge(s, p, o);
  if (!probe.is_connected()) throw ConfigError("fixture spec: template must be a tree");
  std::set<std::string> names;
  for (const auto& a : attributes) {
    if (!nodes.count(a.node)) throw ConfigError("fixture spec: attribute '" + a.name + "' names an unknown node");
    if (!names.insert(a.name).second) throw ConfigError("fixture spec: duplicate attribute '" + a.name + "'");
  }
  std::set<std::string> source_names;
  for (const auto& s : sources) {
    if (!source_names.insert(s.name).second) throw ConfigError("fixture spec: duplicate source '" + s.name + "'");
    if (s.attributes.empty()) throw ConfigError("fixture spec: source '" + s.name + "' has no attributes");
    for (const auto& a : s.attributes)
      if (!names.count(a)) throw ConfigError("fixture spec: source '" + s.name + "' uses unknown attribute '" + a + "'");
  }
}

struct Fixture {
  Ontology ontology;
  std::vector<SourceDescription> sources;
  KnowledgeGraph kg;  // every source materialized
};

namespace detail {

/// Template subtree spanning the nodes that carry the given attributes.
inline SemanticModel spanning_model(const FixtureSpec& spec, const std::vector<std::string>& attrs) {
  std::map<std::string, const FixtureAttribute*> by_name;
  for (const auto& a : spec.attributes) by_name[a.name] = &a;
  std::set<std::string> keep;
  for (const auto& [id, _] : spec.nodes) keep.insert(id);
  std::set<std::string> carriers;
  for (const auto& a : attrs) carriers.insert(by_name.at(a)->node);
  // Strip leaves without attributes until none remain.
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = keep.begin(); it != keep.end();) {
      std::size_t degree = 0;
      for (const auto& [s, p, o] : spec.edges)
        if ((s == *it && keep.count(o)) || (o == *it && keep.count(s))) ++degree;
      if (!carriers.count(*it) && degree <= 1) {
        it = keep.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  SemanticModel m;
  for (const auto& id : keep) m.add_class(spec.nodes.at(id), 1);
  for (const auto& [s, p, o] : spec.edges)
    if (keep.count(s) && keep.count(o)) m.add_object_edge(spec.nodes.at(s) + "1", p, spec.nodes.at(o) + "1");
  for (const auto& a : attrs) {
    const auto& fa = *by_name.at(a);
    m.add_data_edge(spec.nodes.at(fa.node) + "1", fa.property, m.add_data(a));
  }
  return m;
}

inline std::string random_word(std::mt19937_64& rng) {
  static const std::string consonants = "bcdfghklmnprstvz", vowels = "aeiou";
  std::uniform_int_distribution<std::size_t> len(2, 3), c(0, consonants.size() - 1), v(0, vowels.size() - 1);
  std::string w;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) {
    w += consonants[c(rng)];
    w += vowels[v(rng)];
  }
  return w;
}

/// Gold minus one attribute, with the attribute-less leaves it leaves behind.
inline SemanticModel without_attribute(const FixtureSpec& spec, const SourceDescription& d, const std::string& attr) {
  std::vector<std::string> rest;
  for (const auto& n : d.model.data_nodes())
    if (n.attribute != attr) rest.push_back(n.attribute);
  if (rest.empty()) return {};
  return spanning_model(spec, rest);
}

}  // namespace detail

/// Generates the dataset and verifies it: for every source and attribute, the
/// exhaustive miner over the other sources' knowledge graph must complete the
/// source model without that attribute back into the gold model, with a
/// frequency no other completion reaches. Throws DataError otherwise.
inline Fixture make_fixture(const FixtureSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  Fixture fx;

  std::set<std::string> classes;
  std::vector<ObjectProperty> ops;
  std::vector<DataProperty> dps;
  for (const auto& [id, cls] : spec.nodes) classes.insert(cls);
  for (const auto& [s, p, o] : spec.edges) ops.push_back({p, spec.nodes.at(s), spec.nodes.at(o)});
  for (const auto& p : spec.extra_properties) {
    if (!classes.count(p.domain) || !classes.count(p.range))
      throw ConfigError("fixture spec: extra property '" + p.name + "' names an unknown class");
    ops.push_back(p);
  }
  for (const auto& a : spec.attributes) {
    DataProperty dp{a.property, spec.nodes.at(a.node)};
    if (std::find(dps.begin(), dps.end(), dp) == dps.end()) dps.push_back(dp);
  }
  fx.ontology = Ontology(classes, ops, dps, {});
  fx.ontology.validate();

  // Value pools: distinct words per text attribute, disjoint ranges per numeric one.
  std::map<std::string, std::vector<std::string>> pools;
  std::set<std::string> used_words;
  int numeric_slot = 0;
  for (const auto& a : spec.attributes) {
    auto& pool = pools[a.name];
    if (a.numeric) {
      const int base = 1000 * ++numeric_slot;
      for (int k = 0; k < 100; ++k) pool.push_back(std::to_string(base + k));
    } else {
      std::vector<std::string> vocab;
      while (vocab.size() < 6) {
        auto w = detail::random_word(rng);
        if (used_words.insert(w).second) vocab.push_back(w);
      }
      for (const auto& x : vocab)
        for (const auto& y : vocab)
          if (x != y) pool.push_back(x + " " + y);
    }
  }

  for (const auto& s : spec.sources) {
    const std::size_t rows = s.rows ? s.rows : spec.rows;
    std::vector<Column> cols;
    for (const auto& a : s.attributes) {
      const auto& pool = pools.at(a);
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      Column c{a, {}};
      for (std::size_t r = 0; r < rows; ++r) c.values.push_back(pool[pick(rng)]);
      cols.push_back(std::move(c));
    }
    SourceDescription d{SourceTable(s.name, std::move(cols)), detail::spanning_model(spec, s.attributes)};
    d.validate();
    fx.sources.push_back(std::move(d));
  }
  fx.kg = materialize_all(fx.sources);

  MiningConfig exhaustive;
  exhaustive.sigma = SIZE_MAX;
  exhaustive.structural_pruning = false;
  for (const auto& d : fx.sources) {
    if (fx.sources.size() < 2) throw DataError("fixture: a single source cannot be completed from the others");
    const auto kg = build_leave_one_out_kg(fx.sources, d.name());
    for (const auto& n : d.model.data_nodes()) {
      const auto sd = detail::without_attribute(spec, d, n.attribute);
      const auto type = semantic_type_of(d.model, n.attribute);
      const auto mined =
          add_missing_substructures(sd, kg, {}, {{n.attribute, {{*type, 1.0}}}}, exhaustive);
      const auto fail = [&](const std::string& why) {
        throw DataError("fixture spec unsatisfiable: source '" + d.name() + "' without '" + n.attribute + "': " + why);
      };
      if (mined.empty()) fail("no completion found");
      const auto pr = precision_recall(d.model, mined.front().model);
      if (pr.precision != 1.0 || pr.recall != 1.0) fail("top completion differs from the gold model");
      if (mined.size() > 1 && mined[1].frequency == mined.front().frequency) fail("top completion is not unique");
    }
  }
  return fx;
}

/// Writes ontology.json, sources/*.csv, models/*.json, kg.tsv and pipeline.conf.
inline void write_fixture(const Fixture& fx, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "sources");
  fs::create_directories(dir / "models");
  write_text_file((dir / "ontology.json").string(), ontology_to_json(fx.ontology).dump(2) + "\n");
  for (const auto& d : fx.sources) {
    write_text_file((dir / "sources" / (d.name() + ".csv")).string(), to_csv(d.source));
    save_model((dir / "models" / (d.name() + ".json")).string(), d.model);
  }
  write_text_file((dir / "kg.tsv").string(), kg_to_tsv(fx.kg));
  write_text_file((dir / "pipeline.conf").string(),
                  "# Leave-one-out: every other source is known and feeds the knowledge graph.\n"
                  "known_count = " + std::to_string(fx.sources.size() - 1) + "\nseed = 42\n");
}

}  // namespace semodel
