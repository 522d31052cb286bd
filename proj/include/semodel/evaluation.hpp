#pragma once
// Triple-overlap precision/recall under the best instance mapping, plus
// report assembly.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "semodel/graph_core.hpp"

namespace semodel {

/// Pred class-node id -> label it takes when compared with the gold model.
using NodeMapping = std::map<std::string, std::string>;

namespace detail {

inline std::set<Triple> mapped_triples(const SemanticModel& pred, const NodeMapping& f) {
  std::set<Triple> out;
  auto label = [&](const std::string& id) {
    if (auto it = f.find(id); it != f.end()) return it->second;
    return pred.node_label(id);
  };
  for (const auto& e : pred.edges()) out.insert({label(e.src), e.label, label(e.dst)});
  return out;
}

inline std::size_t overlap(const std::set<Triple>& a, const std::set<Triple>& b) {
  std::size_t n = 0;
  for (const auto& t : a) n += b.count(t);
  return n;
}

}  // namespace detail

/// Class-preserving injective mapping of pred instances onto gold instances
/// that maximizes the number of shared triples. Pred instances left over get
/// labels no gold node uses. Exact over all per-class permutations up to
/// `exact_limit` combinations; coordinate descent beyond that.
inline NodeMapping best_mapping(const SemanticModel& gold, const SemanticModel& pred,
                                std::size_t exact_limit = 10000) {
  const auto gold_triples = model_triples(gold);
  std::map<std::string, std::vector<std::string>> pred_by_class;
  for (const auto& n : pred.class_nodes()) pred_by_class[n.cls].push_back(n.id);

  // Per class: candidate target labels are the gold instances, padded when short.
  struct Slot {
    std::vector<std::string> pred_ids;
    std::vector<std::string> targets;
    std::vector<std::size_t> perm;  // perm[i] = target index for pred_ids[i]
  };
  std::vector<Slot> slots;
  for (auto& [cls, ids] : pred_by_class) {
    std::sort(ids.begin(), ids.end(), [&](const auto& a, const auto& b) {
      return pred.find_class(a)->index < pred.find_class(b)->index;
    });
    Slot s{ids, {}, {}};
    int max_index = 0;
    for (const auto& g : gold.class_nodes())
      if (g.cls == cls) {
        s.targets.push_back(g.label());
        max_index = std::max(max_index, g.index);
      }
    std::sort(s.targets.begin(), s.targets.end());
    // Mapping onto a free gold instance never loses a triple, so padding is
    // only needed for pred instances in excess of the gold ones.
    const std::size_t gold_count = s.targets.size();
    for (std::size_t k = gold_count; k < ids.size(); ++k)
      s.targets.push_back(cls + std::to_string(max_index + 1 + static_cast<int>(k - gold_count)));
    s.perm.resize(ids.size());
    std::iota(s.perm.begin(), s.perm.end(), 0);
    slots.push_back(std::move(s));
  }

  auto mapping_of = [&](const std::vector<std::vector<std::size_t>>& choice) {
    NodeMapping f;
    for (std::size_t c = 0; c < slots.size(); ++c)
      for (std::size_t i = 0; i < slots[c].pred_ids.size(); ++i)
        f[slots[c].pred_ids[i]] = slots[c].targets[choice[c][i]];
    return f;
  };
  auto score = [&](const std::vector<std::vector<std::size_t>>& choice) {
    return detail::overlap(detail::mapped_triples(pred, mapping_of(choice)), gold_triples);
  };

  // All injective assignments of a slot's pred ids into its targets.
  auto arrangements = [](const Slot& s) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::vector<char> used(s.targets.size(), 0);
    auto rec = [&](auto&& self) -> void {
      if (cur.size() == s.pred_ids.size()) {
        out.push_back(cur);
        return;
      }
      for (std::size_t t = 0; t < s.targets.size(); ++t) {
        if (used[t]) continue;
        used[t] = 1;
        cur.push_back(t);
        self(self);
        cur.pop_back();
        used[t] = 0;
      }
    };
    rec(rec);
    return out;
  };

  auto count_arrangements = [](const Slot& s) {
    double n = 1;
    for (std::size_t k = 0; k < s.pred_ids.size(); ++k) n *= static_cast<double>(s.targets.size() - k);
    return n;
  };
  double total = 1;
  for (const auto& s : slots) total *= count_arrangements(s);

  std::vector<std::vector<std::size_t>> choice;
  for (const auto& s : slots) choice.push_back(s.perm);

  if (total <= static_cast<double>(exact_limit)) {
    std::vector<std::vector<std::vector<std::size_t>>> options;
    for (const auto& s : slots) options.push_back(arrangements(s));
    auto best = choice;
    std::size_t best_score = score(choice);
    std::vector<std::size_t> pos(slots.size(), 0);
    auto cur = choice;
    while (true) {
      for (std::size_t c = 0; c < slots.size(); ++c) cur[c] = options[c][pos[c]];
      const auto sc = score(cur);
      if (sc > best_score) {
        best_score = sc;
        best = cur;
      }
      std::size_t c = 0;
      while (c < pos.size() && ++pos[c] == options[c].size()) pos[c++] = 0;
      if (c == pos.size()) break;
    }
    return mapping_of(best);
  }

  // Coordinate descent: improve one class at a time by pairwise swaps.
  std::size_t current = score(choice);
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t c = 0; c < slots.size(); ++c) {
      auto& p = choice[c];
      const std::size_t nt = slots[c].targets.size();
      for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t t = 0; t < nt; ++t) {
          if (p[i] == t) continue;
          auto saved = p;
          auto other = std::find(p.begin(), p.end(), t);
          if (other != p.end()) *other = p[i];
          p[i] = t;
          const auto sc = score(choice);
          if (sc > current) {
            current = sc;
            improved = true;
          } else {
            p = saved;
          }
        }
      }
    }
  }
  return mapping_of(choice);
}

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
};

inline PrecisionRecall precision_recall(const SemanticModel& gold, const SemanticModel& pred) {
  const auto g = model_triples(gold);
  const auto p = detail::mapped_triples(pred, best_mapping(gold, pred));
  const auto hit = static_cast<double>(detail::overlap(p, g));
  PrecisionRecall r;
  if (p.empty()) r.precision_undefined = true;
  else r.precision = hit / static_cast<double>(p.size());
  r.recall = g.empty() ? 0.0 : hit / static_cast<double>(g.size());
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

struct SourceResult {
  std::string source;
  PrecisionRecall scores;
  double phase1_ms = 0.0;  // disambiguation + relationship removal + type reduction
  double phase2_ms = 0.0;  // mining
  std::optional<double> mrr;
};

struct EvalReport {
  std::vector<SourceResult> sources;

  PrecisionRecall mean() const {
    PrecisionRecall m;
    if (sources.empty()) return m;
    for (const auto& s : sources) {
      m.precision += s.scores.precision;
      m.recall += s.scores.recall;
      m.f1 += s.scores.f1;
    }
    const auto n = static_cast<double>(sources.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    return m;
  }

  json to_json() const {
    json j;
    j["sources"] = json::array();
    for (const auto& s : sources) {
      json e = {{"source", s.source},
                {"precision", s.scores.precision},
                {"recall", s.scores.recall},
                {"f1", s.scores.f1},
                {"precision_undefined", s.scores.precision_undefined},
                {"phase1_ms", s.phase1_ms},
                {"phase2_ms", s.phase2_ms}};
      if (s.mrr) e["mrr"] = *s.mrr;
      j["sources"].push_back(e);
    }
    const auto m = mean();
    j["mean"] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
    return j;
  }

  std::string to_table() const {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-24s %9s %9s %9s %11s %11s\n", "source", "precision", "recall", "f1",
                  "phase1(ms)", "phase2(ms)");
    out += buf;
    for (const auto& s : sources) {
      std::snprintf(buf, sizeof buf, "%-24s %9.3f %9.3f %9.3f %11.1f %11.1f\n", s.source.c_str(),
                    s.scores.precision, s.scores.recall, s.scores.f1, s.phase1_ms, s.phase2_ms);
      out += buf;
    }
    const auto m = mean();
    std::snprintf(buf, sizeof buf, "%-24s %9.3f %9.3f %9.3f\n", "mean", m.precision, m.recall, m.f1);
    out += buf;
    return out;
  }
};

}  // namespace semodel
