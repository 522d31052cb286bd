#include <gtest/gtest.h>

#include <random>

#include "semodel/steiner.hpp"

using namespace semodel;

namespace {

struct RandomAlignment {
  AlignmentGraph ag;
  std::vector<std::string> terminals;
};

RandomAlignment random_alignment(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.2, 2.0);
  const std::size_t classes = 3 + rng() % 4;
  std::set<std::string> names;
  for (std::size_t i = 0; i < classes; ++i) names.insert("C" + std::to_string(i));
  RandomAlignment r{AlignmentGraph(Ontology(names, {}, {}, {})), {}};
  for (std::size_t i = 0; i < classes; ++i) r.ag.add_class_node("C" + std::to_string(i), 1, Provenance::Known);
  int label = 0;
  for (std::size_t i = 0; i < classes; ++i)
    for (std::size_t j = 0; j < classes; ++j)
      if (i != j && rng() % 3 == 0)
        r.ag.add_edge({"C" + std::to_string(i) + "1", "p" + std::to_string(label++), "C" + std::to_string(j) + "1",
                       w(rng), Provenance::Known});
  const std::size_t attrs = 2 + rng() % 2;
  for (std::size_t a = 0; a < attrs; ++a) {
    const auto name = "a" + std::to_string(a);
    r.ag.add_attribute_node(name);
    r.terminals.push_back(name);
    const std::size_t fan = 1 + rng() % 2;
    std::set<std::size_t> hosts;
    while (hosts.size() < fan) hosts.insert(rng() % classes);
    for (auto h : hosts)
      r.ag.add_edge({"C" + std::to_string(h) + "1", "d" + std::to_string(label++), "@" + name, w(rng),
                     Provenance::Attachment});
  }
  return r;
}

// Minimum total weight over every edge subset that connects all terminals
// with each attribute as a leaf; infinity when none does.
double exhaustive_steiner(const AlignmentGraph& ag, const std::vector<std::string>& terminals) {
  const auto& edges = ag.edges();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < (std::size_t{1} << edges.size()); ++mask) {
    std::map<std::string, std::vector<std::string>> adj;
    double total = 0;
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (mask >> i & 1) {
        adj[edges[i].src].push_back(edges[i].dst);
        adj[edges[i].dst].push_back(edges[i].src);
        total += edges[i].weight;
      }
    if (total >= best) continue;
    bool ok = true;
    for (const auto& t : terminals) ok &= adj["@" + t].size() == 1;
    if (!ok) continue;
    std::set<std::string> seen{"@" + terminals[0]};
    std::vector<std::string> stack{"@" + terminals[0]};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (const auto& v : adj[u])
        if (seen.insert(v).second) stack.push_back(v);
    }
    if (seen.size() != adj.size()) continue;
    best = total;
  }
  return best;
}

}  // namespace

TEST(Steiner, RankOneMatchesExhaustiveMinimum) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto r = random_alignment(rng);
    if (r.ag.edges().size() > 16) continue;
    const double oracle = exhaustive_steiner(r.ag, r.terminals);
    if (oracle == std::numeric_limits<double>::infinity()) {
      EXPECT_THROW(top_k_steiner_trees(r.ag, r.terminals), StageError) << "trial " << trial;
      continue;
    }
    auto cands = top_k_steiner_trees(r.ag, r.terminals, 5);
    ASSERT_FALSE(cands.empty());
    EXPECT_NEAR(cands[0].total_weight, oracle, 1e-9) << "trial " << trial;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      EXPECT_EQ(cands[i].rank, i + 1);
      EXPECT_EQ(cands[i].model.data_nodes().size(), r.terminals.size());
      EXPECT_TRUE(cands[i].model.is_connected());
      if (i) {
        EXPECT_LE(cands[i - 1].total_weight, cands[i].total_weight + 1e-9);
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Steiner, PrefersKnownPathOverOntologyShortcut) {
  AlignmentGraph ag(Ontology({"A", "B", "C"}, {}, {}, {}));
  for (const char* c : {"A", "B", "C"}) ag.add_class_node(c, 1, Provenance::Known);
  ag.add_edge({"A1", "ab", "B1", 0.5, Provenance::Known});
  ag.add_edge({"B1", "bc", "C1", 0.5, Provenance::Known});
  ag.add_edge({"A1", "ac", "C1", 1.2, Provenance::Ontology});
  ag.add_attribute_node("x");
  ag.add_attribute_node("y");
  ag.add_edge({"A1", "p", "@x", 0.1, Provenance::Attachment});
  ag.add_edge({"C1", "q", "@y", 0.1, Provenance::Attachment});
  auto cands = top_k_steiner_trees(ag, {"x", "y"});
  ASSERT_GE(cands.size(), 1u);
  EXPECT_NEAR(cands[0].total_weight, 1.2, 1e-12);
  const auto seed = select_seed(cands);
  EXPECT_EQ(seed.object_edges().size(), 2u);
}

TEST(Steiner, EqualWeightsBreakTiesByCode) {
  AlignmentGraph ag(Ontology({"A", "B"}, {}, {}, {}));
  ag.add_class_node("A", 1, Provenance::Known);
  ag.add_class_node("B", 1, Provenance::Known);
  ag.add_attribute_node("x");
  ag.add_edge({"A1", "p", "@x", 0.5, Provenance::Attachment});
  ag.add_edge({"B1", "p", "@x", 0.5, Provenance::Attachment});
  auto cands = top_k_steiner_trees(ag, {"x"});
  ASSERT_EQ(cands.size(), 2u);
  EXPECT_LT(cands[0].code, cands[1].code);
  EXPECT_EQ(cands[0].model.class_nodes().front().cls, "A");
}

TEST(Steiner, Errors) {
  AlignmentGraph ag(Ontology({"A", "B"}, {}, {}, {}));
  ag.add_class_node("A", 1, Provenance::Known);
  ag.add_class_node("B", 1, Provenance::Known);
  ag.add_attribute_node("x");
  ag.add_attribute_node("y");
  ag.add_edge({"A1", "p", "@x", 0.5, Provenance::Attachment});
  EXPECT_THROW(top_k_steiner_trees(ag, {"x", "y"}), StageError);
  ag.add_edge({"B1", "p", "@y", 0.5, Provenance::Attachment});
  EXPECT_THROW(top_k_steiner_trees(ag, {"x", "y"}), StageError);
  EXPECT_THROW(top_k_steiner_trees(ag, {}), StageError);
  EXPECT_THROW(top_k_steiner_trees(ag, {"x"}, 0), ConfigError);
  EXPECT_THROW(select_seed({}), StageError);
}
