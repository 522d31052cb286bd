#include <gtest/gtest.h>

#include "semodel/alignment.hpp"

using namespace semodel;

namespace {

Ontology museum() {
  return Ontology({"Object", "Production", "Person", "TimeSpan", "Material"},
                  {{"producedBy", "Object", "Production"},
                   {"carriedOutBy", "Production", "Person"},
                   {"hasTimeSpan", "Production", "TimeSpan"},
                   {"consistsOf", "Object", "Material"},
                   {"alsoFoundOn", "Object", "Material"}},
                  {{"begin", "TimeSpan"}, {"end", "TimeSpan"}, {"label", "Material"}, {"name", "Person"}}, {});
}

SourceDescription described(const std::string& name, bool two_spans) {
  SemanticModel m;
  const auto o = m.add_class("Object");
  const auto p = m.add_class("Production");
  const auto who = m.add_class("Person");
  m.add_object_edge(o, "producedBy", p);
  m.add_object_edge(p, "carriedOutBy", who);
  m.add_data_edge(who, "name", m.add_data("Artist"));
  std::vector<Column> cols{{"Artist", {"a"}}};
  const auto t1 = m.add_class("TimeSpan");
  m.add_object_edge(p, "hasTimeSpan", t1);
  m.add_data_edge(t1, "begin", m.add_data("Start"));
  cols.push_back({"Start", {"1"}});
  if (two_spans) {
    const auto t2 = m.add_class("TimeSpan");
    m.add_object_edge(p, "hasTimeSpan", t2);
    m.add_data_edge(t2, "end", m.add_data("End"));
    cols.push_back({"End", {"2"}});
  }
  return {SourceTable(name, cols), m};
}

const AlignmentEdge* find_edge(const AlignmentGraph& ag, const std::string& s, const std::string& l,
                               const std::string& d) {
  for (const auto& e : ag.edges())
    if (e.src == s && e.label == l && e.dst == d) return &e;
  return nullptr;
}

}  // namespace

TEST(Alignment, MergesKnownModelsWithSupportWeights) {
  std::vector<SourceDescription> known{described("a", true), described("b", false)};
  auto ag = build_alignment_graph(known, museum());
  EXPECT_EQ(ag.class_nodes("TimeSpan").size(), 2u);
  EXPECT_EQ(ag.class_nodes("Person").size(), 1u);
  ASSERT_TRUE(find_edge(ag, "Production1", "hasTimeSpan", "TimeSpan1"));
  EXPECT_DOUBLE_EQ(find_edge(ag, "Production1", "hasTimeSpan", "TimeSpan1")->weight, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(find_edge(ag, "Production1", "hasTimeSpan", "TimeSpan2")->weight, 1.0 / 2.0);
  EXPECT_EQ(find_edge(ag, "Production1", "hasTimeSpan", "TimeSpan2")->provenance, Provenance::Known);
}

TEST(Alignment, OntologyEdgesAreHeavierThanKnownOnes) {
  std::vector<SourceDescription> known{described("a", true)};
  auto ag = build_alignment_graph(known, museum());
  attach_candidate_types(ag, {{"Medium", {{{"Material", "label"}, 0.7}}}});
  const auto* also = find_edge(ag, "Object1", "alsoFoundOn", "Material1");
  const auto* consists = find_edge(ag, "Object1", "consistsOf", "Material1");
  ASSERT_TRUE(also && consists);
  const double e = 5.0;
  for (const auto& edge : ag.edges()) {
    if (edge.provenance != Provenance::Ontology) continue;
    EXPECT_GT(edge.weight, 1.0);
    EXPECT_LE(edge.weight, 1.0 + 1.0 / e + 1e-12);
  }
  EXPECT_LT(also->weight, consists->weight);
}

TEST(Alignment, AttachmentWeightsAndIdempotence) {
  std::vector<SourceDescription> known{described("a", true)};
  auto ag = build_alignment_graph(known, museum());
  const std::vector<CandidateTypeSet> cands = {{"Date", {{{"TimeSpan", "begin"}, 0.75}, {{"TimeSpan", "end"}, 0.25}}}};
  attach_candidate_types(ag, cands);
  const auto count = ag.edges().size();
  std::size_t attachments = 0;
  for (const auto& e : ag.edges())
    if (e.dst == "@Date") {
      ++attachments;
      EXPECT_NEAR(e.weight, 1.0 - (e.label == "begin" ? 0.75 : 0.25) + kAttachmentEpsilon, 1e-15);
    }
  EXPECT_EQ(attachments, 4u);  // two types x two TimeSpan nodes
  attach_candidate_types(ag, cands);
  EXPECT_EQ(ag.edges().size(), count);
}

TEST(Alignment, CertainCandidateStillHasPositiveWeight) {
  std::vector<SourceDescription> known{described("a", false)};
  auto ag = build_alignment_graph(known, museum());
  attach_candidate_types(ag, {{"Date", {{{"TimeSpan", "begin"}, 1.0}}}});
  EXPECT_DOUBLE_EQ(find_edge(ag, "TimeSpan1", "begin", "@Date")->weight, kAttachmentEpsilon);
}

TEST(Alignment, Errors) {
  EXPECT_THROW(build_alignment_graph(std::vector<SourceDescription>{}, museum()), StageError);
  auto bad = described("a", false);
  bad.model.add_class("Unicorn");
  EXPECT_THROW(build_alignment_graph(std::vector<SourceDescription>{bad}, museum()), DataError);
  std::vector<SourceDescription> known{described("a", false)};
  auto ag = build_alignment_graph(known, museum());
  EXPECT_THROW(attach_candidate_types(ag, {{"x", {{{"Unicorn", "p"}, 1.0}}}}), DataError);
  EXPECT_THROW(attach_candidate_types(ag, {{"x", {}}}), StageError);
  EXPECT_THROW(ag.add_edge({"Object1", "p", "Person1", 0.0}), StageError);
}

TEST(Alignment, DotOutputNamesEveryEdge) {
  std::vector<SourceDescription> known{described("a", false)};
  auto ag = build_alignment_graph(known, museum());
  const auto dot = ag.to_dot();
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("carriedOutBy"), std::string::npos);
}
