#pragma once
// Semantic labeling: rank (class, data property) types for a column.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "semodel/graph_core.hpp"
#include "semodel/stats.hpp"

namespace semodel {

struct SemanticType {
  std::string cls;
  std::string property;
  auto operator<=>(const SemanticType&) const = default;
  std::string str() const { return cls + "." + property; }
};

struct ScoredType {
  SemanticType type;
  double confidence = 0.0;
};

struct CandidateTypeSet {
  std::string column;
  std::vector<ScoredType> candidates;
};

/// Semantic type of a column according to a model's data edge.
inline std::optional<SemanticType> semantic_type_of(const SemanticModel& m, const std::string& attribute) {
  const auto* d = m.find_data_by_attribute(attribute);
  if (!d) return std::nullopt;
  auto e = m.data_edge_of(d->id);
  if (!e) return std::nullopt;
  return SemanticType{m.find_class(e->src)->cls, e->label};
}

class Labeler {
 public:
  struct TypeStats {
    std::map<std::string, double> terms;  // pooled token counts of textual columns
    std::set<std::string> values;         // distinct normalized textual values
    std::vector<double> numbers;          // pooled samples of numeric columns
    std::size_t columns = 0;
  };

  void add_column(const SemanticType& type, const std::vector<std::string>& values) {
    auto& s = types_[type];
    ++s.columns;
    if (stats::is_numeric(values)) {
      auto xs = stats::numeric_values(values);
      s.numbers.insert(s.numbers.end(), xs.begin(), xs.end());
    } else {
      for (auto& [t, c] : stats::term_counts(values)) s.terms[t] += c;
      auto vs = stats::value_set(values);
      s.values.insert(vs.begin(), vs.end());
    }
    rebuild_idf();
  }

  bool empty() const noexcept { return types_.empty(); }
  const std::map<SemanticType, TypeStats>& types() const noexcept { return types_; }

  /// Raw similarity of a column to one trained type, in [0,1].
  double score(const std::vector<std::string>& values, const SemanticType& type) const {
    auto it = types_.find(type);
    if (it == types_.end()) return 0.0;
    const auto& s = it->second;
    if (stats::is_numeric(values)) {
      if (s.numbers.empty()) return 0.0;
      return 1.0 - stats::ks_statistic(stats::numeric_values(values), s.numbers);
    }
    if (s.values.empty() && s.terms.empty()) return 0.0;
    const double jac = stats::jaccard(stats::value_set(values), s.values);
    const double cos = stats::cosine(idf_.weigh(stats::term_counts(values)), idf_.weigh(s.terms));
    return std::max(jac, cos);
  }

  /// Top-k trained types with positive score; confidences are scores divided
  /// by the total over all trained types. Ties broken by type name.
  CandidateTypeSet predict(const std::string& column, const std::vector<std::string>& values,
                           std::size_t k = 4) const {
    if (types_.empty()) throw StageError("labeling", "labeler is not trained");
    std::vector<ScoredType> all;
    double total = 0.0;
    for (const auto& [t, _] : types_) {
      const double s = score(values, t);
      total += s;
      if (s > 0.0) all.push_back({t, s});
    }
    std::sort(all.begin(), all.end(), [](const ScoredType& a, const ScoredType& b) {
      if (a.confidence != b.confidence) return a.confidence > b.confidence;
      return a.type < b.type;
    });
    if (all.size() > k) all.resize(k);
    for (auto& c : all) c.confidence /= total;
    return {column, std::move(all)};
  }

  json to_json() const {
    json types = json::array();
    for (const auto& [t, s] : types_) {
      types.push_back({{"class", t.cls},
                       {"property", t.property},
                       {"columns", s.columns},
                       {"terms", s.terms},
                       {"values", s.values},
                       {"numbers", s.numbers}});
    }
    return {{"types", types}};
  }

  static Labeler from_json(const json& j) {
    Labeler l;
    try {
      for (const auto& t : j.at("types")) {
        auto& s = l.types_[SemanticType{t.at("class"), t.at("property")}];
        s.columns = t.at("columns");
        s.terms = t.at("terms").get<std::map<std::string, double>>();
        s.values = t.at("values").get<std::set<std::string>>();
        s.numbers = t.at("numbers").get<std::vector<double>>();
      }
    } catch (const json::exception& e) {
      throw DataError(std::string("labeler snapshot: ") + e.what());
    }
    l.rebuild_idf();
    return l;
  }

 private:
  void rebuild_idf() {
    std::vector<const std::map<std::string, double>*> docs;
    for (const auto& [_, s] : types_)
      if (!s.terms.empty()) docs.push_back(&s.terms);
    idf_ = stats::Idf(docs);
  }

  std::map<SemanticType, TypeStats> types_;
  stats::Idf idf_;
};

inline Labeler train_labeler(std::span<const SourceDescription> training) {
  if (training.empty()) throw StageError("labeling", "training set is empty");
  Labeler l;
  for (const auto& d : training) {
    for (const auto& node : d.model.data_nodes()) {
      auto type = semantic_type_of(d.model, node.attribute);
      if (!type) throw DataError("labeling: column '" + node.attribute + "' of '" + d.name() + "' has no data edge");
      const auto* col = d.source.find(node.attribute);
      if (!col) throw DataError("labeling: '" + d.name() + "' has no column '" + node.attribute + "'");
      l.add_column(*type, col->values);
    }
  }
  return l;
}

inline CandidateTypeSet predict_types(const Labeler& labeler, const Column& column, std::size_t k = 4) {
  if (column.values.empty()) throw DataError("labeling: column '" + column.name + "' is empty");
  return labeler.predict(column.name, column.values, k);
}

/// Mean reciprocal rank of the gold type; 0 for a column whose gold type is absent.
inline double mrr(const std::vector<CandidateTypeSet>& predictions, const std::vector<SemanticType>& gold) {
  if (predictions.size() != gold.size()) throw DataError("mrr: prediction and gold lists differ in length");
  if (predictions.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& c = predictions[i].candidates;
    for (std::size_t r = 0; r < c.size(); ++r)
      if (c[r].type == gold[i]) {
        sum += 1.0 / static_cast<double>(r + 1);
        break;
      }
  }
  return sum / static_cast<double>(gold.size());
}

}  // namespace semodel
