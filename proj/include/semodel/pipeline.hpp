#pragma once
// Configuration, dataset loading, and the end-to-end learning pipeline.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "semodel/alignment.hpp"
#include "semodel/correction.hpp"
#include "semodel/disambiguation.hpp"
#include "semodel/evaluation.hpp"
#include "semodel/graph_core.hpp"
#include "semodel/labeling.hpp"
#include "semodel/mining.hpp"
#include "semodel/steiner.hpp"

namespace semodel {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Flat `key = value` file with optional `[section]` headers (keys become
/// "section.key"), '#' comments, and optionally quoted values.
inline std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::string line, section;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    auto body = std::string(stats::trim(line.substr(0, line.find('#'))));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(origin + ":" + std::to_string(n) + ": malformed section header");
      section = std::string(stats::trim(std::string_view(body).substr(1, body.size() - 2)));
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(n) + ": expected key = value");
    auto key = std::string(stats::trim(std::string_view(body).substr(0, eq)));
    auto value = std::string(stats::trim(std::string_view(body).substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(n) + ": empty key");
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

struct PipelineConfig {
  fs::path ontology;
  fs::path sources_dir;
  fs::path models_dir;
  std::vector<std::string> known;  // known-model sources; empty: drawn at random
  std::size_t known_count = 2;
  std::optional<fs::path> kg;  // absent: leave-one-out over described sources
  std::optional<fs::path> constraint_map;
  std::optional<fs::path> kb_snapshot;
  fs::path output_dir = "out";
  std::uint64_t seed = 42;
  std::size_t label_top_k = 4;
  std::size_t steiner_k = 10;
  bool dump_alignment = false;
  TypeReductionConfig reduction;
  MiningConfig mining;

  void validate() const {
    auto must_exist = [](const fs::path& p, const char* what) {
      if (!fs::exists(p)) throw ConfigError(std::string(what) + " '" + p.string() + "' does not exist");
    };
    must_exist(ontology, "ontology");
    must_exist(sources_dir, "sources directory");
    must_exist(models_dir, "models directory");
    if (kg) must_exist(*kg, "knowledge graph");
    if (constraint_map) must_exist(*constraint_map, "constraint map");
    if (kb_snapshot) must_exist(*kb_snapshot, "knowledge base snapshot");
    if (label_top_k < 1 || steiner_k < 1) throw ConfigError("top-k values must be at least 1");
    reduction.validate();
    mining.validate();
  }
};

namespace detail {

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "unbounded") return std::numeric_limits<std::size_t>::max();
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError("'" + key + "' expects a count, got '" + v + "'");
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  auto x = stats::parse_number(v);
  if (!x) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return *x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

}  // namespace detail

/// Applies one setting; used for both the config file and CLI overrides.
inline void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value, const fs::path& base) {
  auto path = [&] { return fs::path(value).is_absolute() ? fs::path(value) : base / value; };
  if (key == "ontology") c.ontology = path();
  else if (key == "sources_dir") c.sources_dir = path();
  else if (key == "models_dir") c.models_dir = path();
  else if (key == "output_dir") c.output_dir = path();
  else if (key == "kg") c.kg = value == "leave-one-out" ? std::nullopt : std::optional<fs::path>(path());
  else if (key == "constraint_map") c.constraint_map = path();
  else if (key == "kb_snapshot") c.kb_snapshot = path();
  else if (key == "known") {
    c.known.clear();
    std::stringstream ss(value);
    for (std::string item; std::getline(ss, item, ',');)
      if (auto t = stats::trim(item); !t.empty()) c.known.emplace_back(t);
  } else if (key == "known_count") c.known_count = detail::parse_count(key, value);
  else if (key == "seed") c.seed = detail::parse_count(key, value);
  else if (key == "label_top_k") c.label_top_k = detail::parse_count(key, value);
  else if (key == "steiner_k") c.steiner_k = detail::parse_count(key, value);
  else if (key == "dump_alignment") c.dump_alignment = detail::parse_bool(key, value);
  else if (key == "reduction.eta_threshold") c.reduction.eta_threshold = detail::parse_real(key, value);
  else if (key == "reduction.min_confidence") c.reduction.min_confidence = detail::parse_real(key, value);
  else if (key == "reduction.max_path_length") c.reduction.max_path_length = detail::parse_count(key, value);
  else if (key == "mining.sigma") c.mining.sigma = detail::parse_count(key, value);
  else if (key == "mining.max_pattern_edges") c.mining.max_pattern_edges = detail::parse_count(key, value);
  else if (key == "mining.structural_pruning") c.mining.structural_pruning = detail::parse_bool(key, value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

inline PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  PipelineConfig c;
  const auto base = path.parent_path();
  c.ontology = base / "ontology.json";
  c.sources_dir = base / "sources";
  c.models_dir = base / "models";
  c.output_dir = base / "out";
  for (const auto& [k, v] : parse_key_values(in, path.string())) apply_setting(c, k, v, base);
  return c;
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

struct Dataset {
  Ontology ontology;
  std::map<std::string, SourceTable> tables;           // every source
  std::map<std::string, SourceDescription> described;  // sources with a model
  std::optional<KnowledgeGraph> kg;
  std::optional<KnowledgeBase> kb;
  ConstraintMap constraints;

  std::vector<SourceDescription> described_except(const std::string& name) const {
    std::vector<SourceDescription> out;
    for (const auto& [n, d] : described)
      if (n != name) out.push_back(d);
    return out;
  }
};

inline Dataset load_dataset(const PipelineConfig& cfg) {
  Dataset ds;
  ds.ontology = load_ontology(cfg.ontology.string());
  if (!fs::is_directory(cfg.sources_dir))
    throw DataError("sources directory '" + cfg.sources_dir.string() + "' is not a directory");
  std::vector<fs::path> csvs;
  for (const auto& e : fs::directory_iterator(cfg.sources_dir))
    if (e.path().extension() == ".csv") csvs.push_back(e.path());
  if (csvs.empty()) throw DataError("no CSV sources in '" + cfg.sources_dir.string() + "'");
  std::sort(csvs.begin(), csvs.end());
  for (const auto& p : csvs) {
    const auto name = p.stem().string();
    ds.tables.emplace(name, load_csv(p.string(), name));
    const auto model_path = cfg.models_dir / (name + ".json");
    if (fs::exists(model_path)) {
      SourceDescription d{ds.tables.at(name), load_model(model_path.string())};
      d.validate();
      ds.described.emplace(name, std::move(d));
    }
  }
  if (cfg.kg) ds.kg = load_kg(cfg.kg->string());
  if (cfg.kb_snapshot) ds.kb = load_kb(cfg.kb_snapshot->string());
  if (cfg.constraint_map) ds.constraints = ConstraintMap::from_json(read_json_file(cfg.constraint_map->string()));
  return ds;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// Pipeline stages in execution order; a run can stop after any of them.
enum class Stage { Label, Align, Seed, Disambiguate, Correct, Mine, Evaluate };

struct PipelineResult {
  std::string source;
  Stage completed = Stage::Label;
  std::vector<std::string> known;
  std::vector<CandidateTypeSet> candidates;
  std::vector<CandidateModel> steiner;
  SemanticModel seed;
  SemanticModel disambiguated;
  CorrectionResult corrected;
  std::vector<CandidateTypeSet> reduced;
  std::vector<MinedModel> mined;
  SemanticModel final_model;
  std::vector<std::string> unlabeled;  // columns left without a type
  std::optional<SourceResult> evaluation;
  std::string alignment_dot;
};

using Logger = std::function<void(const std::string&)>;

inline std::vector<std::string> choose_known(const PipelineConfig& cfg, const Dataset& ds, const std::string& target) {
  std::vector<std::string> out;
  if (!cfg.known.empty()) {
    for (const auto& k : cfg.known) {
      if (k == target) continue;
      if (!ds.described.count(k)) throw ConfigError("known source '" + k + "' has no model");
      out.push_back(k);
    }
  } else {
    std::vector<std::string> pool;
    for (const auto& [n, _] : ds.described)
      if (n != target) pool.push_back(n);
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(pool.size(), cfg.known_count));
    std::sort(pool.begin(), pool.end());
    out = pool;
  }
  if (out.empty()) throw StageError("alignment", "no known semantic models available for '" + target + "'");
  return out;
}

/// Re-anchors every attribute whose entity belongs to an ambiguous class.
inline SemanticModel disambiguate(const SemanticModel& seed, const SourceTable& table,
                                  std::span<const SourceDescription> known, const Ontology& onto,
                                  const KnowledgeBase* kb, std::uint64_t rng_seed, const Logger& log) {
  SemanticModel model = seed;
  const auto entities = find_ambiguous_entities(known);
  for (const auto& entity : entities) {
    std::optional<RelationshipClassifier> clf;
    try {
      clf.emplace(train_relationship_classifier(entity, labeled_columns(entity, known), kb, rng_seed));
    } catch (const StageError& e) {
      if (log) log(std::string("skipping ambiguous entity: ") + e.what());
      continue;
    }
    for (const auto& d : seed.data_nodes()) {
      const auto* cur = model.find_data_by_attribute(d.attribute);
      auto de = model.data_edge_of(cur->id);
      if (!de || model.find_class(de->src)->cls != entity.cls) continue;
      bool anchored_by_label = false;
      for (const auto& e : model.object_edges())
        if (e.dst == de->src && e.label == entity.anchors.front().label) anchored_by_label = true;
      if (!anchored_by_label) continue;
      const auto* col = table.find(d.attribute);
      if (!col) continue;
      model = move_relationship(model, d.attribute, clf->predict(*col), onto);
    }
  }
  return model;
}

inline PipelineResult run_pipeline(const PipelineConfig& cfg, const Dataset& ds, const std::string& target,
                                   const Logger& log = {}, Stage stop_after = Stage::Evaluate) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  auto it = ds.tables.find(target);
  if (it == ds.tables.end()) throw DataError("unknown source '" + target + "'");
  const SourceTable& table = it->second;
  PipelineResult r;
  r.source = target;

  // Labeling: trained on every other described source.
  const auto training = ds.described_except(target);
  const auto labeler = train_labeler(training);
  for (const auto& col : table.columns()) r.candidates.push_back(predict_types(labeler, col, cfg.label_top_k));
  if (stop_after == Stage::Label) return r;

  // Alignment and seed.
  r.known = choose_known(cfg, ds, target);
  std::vector<SourceDescription> known;
  for (const auto& k : r.known) known.push_back(ds.described.at(k));
  std::vector<CandidateTypeSet> attachable;
  for (const auto& c : r.candidates) {
    if (c.candidates.empty()) {
      r.unlabeled.push_back(c.column);
      if (log) log("column '" + c.column + "' has no candidate type and is left unlabeled");
    } else {
      attachable.push_back(c);
    }
  }
  auto ag = build_alignment_graph(known, ds.ontology);
  attach_candidate_types(ag, attachable);
  if (cfg.dump_alignment) r.alignment_dot = ag.to_dot();
  r.completed = Stage::Align;
  if (stop_after == Stage::Align) return r;
  std::vector<std::string> terminals;
  for (const auto& c : attachable) terminals.push_back(c.column);
  r.steiner = top_k_steiner_trees(ag, terminals, cfg.steiner_k);
  r.seed = select_seed(r.steiner);
  r.completed = Stage::Seed;
  if (stop_after == Stage::Seed) return r;

  // Phase I: disambiguation, relationship removal, type reduction.
  const auto t0 = clock::now();
  r.disambiguated = disambiguate(r.seed, table, known, ds.ontology, ds.kb ? &*ds.kb : nullptr, cfg.seed, log);
  r.completed = Stage::Disambiguate;
  if (stop_after == Stage::Disambiguate) return r;
  const KnowledgeGraph kg = ds.kg ? *ds.kg : materialize_all(training);
  r.corrected = remove_incorrect_relationships(r.disambiguated, kg);
  for (const auto& col : r.corrected.isolated) {
    const auto& orig = *std::find_if(r.candidates.begin(), r.candidates.end(),
                                     [&](const CandidateTypeSet& c) { return c.column == col; });
    try {
      r.reduced.push_back(reduce_semantic_types(r.corrected.model, kg, orig, cfg.reduction));
    } catch (const StageError& e) {
      if (log) log(std::string(e.what()) + "; falling back to its first candidate");
      r.reduced.push_back({col, {orig.candidates.front()}});
    }
  }
  const auto t1 = clock::now();
  r.completed = Stage::Correct;
  if (stop_after == Stage::Correct) return r;

  // Phase II: mining.
  r.mined = add_missing_substructures(r.corrected.model, kg, ds.constraints, r.reduced, cfg.mining);
  const auto t2 = clock::now();
  if (r.mined.empty()) {
    if (log) log("no completion found for '" + target + "'; returning the corrected model");
    r.final_model = r.corrected.model;
    for (const auto& c : r.corrected.isolated) r.unlabeled.push_back(c);
  } else {
    r.final_model = r.mined.front().model;
  }
  r.completed = Stage::Mine;
  if (stop_after == Stage::Mine) return r;

  if (auto g = ds.described.find(target); g != ds.described.end()) {
    SourceResult s;
    s.source = target;
    s.scores = precision_recall(g->second.model, r.final_model);
    s.phase1_ms = ms(t1 - t0);
    s.phase2_ms = ms(t2 - t1);
    std::vector<SemanticType> gold;
    std::vector<CandidateTypeSet> preds;
    for (const auto& c : r.candidates)
      if (auto t = semantic_type_of(g->second.model, c.column)) {
        gold.push_back(*t);
        preds.push_back(c);
      }
    if (!gold.empty()) s.mrr = mrr(preds, gold);
    r.evaluation = s;
  }
  r.completed = Stage::Evaluate;
  return r;
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

inline json candidates_to_json(const std::vector<CandidateTypeSet>& cs) {
  json j = json::array();
  for (const auto& c : cs) {
    json e = {{"column", c.column}, {"candidates", json::array()}};
    for (const auto& t : c.candidates)
      e["candidates"].push_back({{"class", t.type.cls}, {"property", t.type.property}, {"confidence", t.confidence}});
    j.push_back(e);
  }
  return j;
}

inline std::vector<CandidateTypeSet> candidates_from_json(const json& j) {
  std::vector<CandidateTypeSet> out;
  try {
    for (const auto& e : j) {
      CandidateTypeSet c{e.at("column"), {}};
      for (const auto& t : e.at("candidates"))
        c.candidates.push_back({{t.at("class"), t.at("property")}, t.at("confidence")});
      out.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("candidate file: ") + e.what());
  }
  return out;
}

inline void write_json(const fs::path& p, const json& j) { write_text_file(p.string(), j.dump(2) + "\n"); }

/// Writes every intermediate model and the report under `dir/<source>/`.
inline void write_artifacts(const PipelineResult& r, const fs::path& dir) {
  const auto out = dir / r.source;
  fs::create_directories(out);
  write_json(out / "candidates.json", candidates_to_json(r.candidates));
  if (!r.alignment_dot.empty()) write_text_file((out / "alignment.dot").string(), r.alignment_dot);
  if (r.completed < Stage::Seed) return;
  json steiner = json::array();
  for (const auto& c : r.steiner)
    steiner.push_back({{"rank", c.rank}, {"weight", c.total_weight}, {"model", model_to_json(c.model)}});
  write_json(out / "steiner.json", steiner);
  save_model((out / "seed.json").string(), r.seed);
  if (r.completed < Stage::Disambiguate) return;
  save_model((out / "disambiguated.json").string(), r.disambiguated);
  if (r.completed < Stage::Correct) return;
  save_model((out / "corrected.json").string(), r.corrected.model);
  write_json(out / "isolated.json", r.corrected.isolated);
  write_json(out / "reduced.json", candidates_to_json(r.reduced));
  if (r.completed < Stage::Mine) return;
  json mined = json::array();
  for (std::size_t i = 0; i < r.mined.size(); ++i)
    mined.push_back({{"rank", i + 1}, {"frequency", r.mined[i].frequency}, {"model", model_to_json(r.mined[i].model)}});
  write_json(out / "mined.json", mined);
  save_model((out / "final.json").string(), r.final_model);
  if (r.evaluation) {
    EvalReport rep{{*r.evaluation}};
    write_json(out / "report.json", rep.to_json());
    write_text_file((out / "report.txt").string(), rep.to_table());
  }
}

}  // namespace semodel
