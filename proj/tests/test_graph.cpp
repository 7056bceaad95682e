#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixture.hpp"
#include "ksdw/graph.hpp"

using namespace ksdw;

namespace {

bool has(const std::vector<Triple>& v, const Triple& t) { return std::find(v.begin(), v.end(), t) != v.end(); }

}  // namespace

TEST(LoadGraph, EmptyFile) {
  auto r = load_graph_text("");
  EXPECT_EQ(r.graph.triples().size(), 0u);
  EXPECT_EQ(r.graph.node_count(), 0u);
}

TEST(LoadGraph, OneTableNode) {
  auto r = load_graph_text("pt_parties\ttablename\tparties\npt_parties\ttype\t<physical_table>\npt_parties\tlayer\tphysical\n");
  EXPECT_EQ(r.graph.triples().size(), 3u);
  EXPECT_EQ(r.graph.node_count(), 2u);
  EXPECT_EQ(r.graph.layer(NodeId{"pt_parties"}), Layer::Physical);
  // physical_table has no layer triple
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("physical_table"), std::string::npos);
}

TEST(LoadGraph, ErrorsCarryLineNumbers) {
  try {
    load_graph_text("# comment\na\tb\n");
    FAIL();
  } catch (const GraphFormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_graph_text("a\tb\t<unterminated\n"), GraphFormatError);
  EXPECT_THROW(load_graph_text("a b\tp\to\n"), GraphFormatError);
  EXPECT_THROW(load_graph_text("a\tlayer\tstratosphere\n"), GraphFormatError);
  EXPECT_THROW(load_graph_text("a\tp\to\textra\n"), GraphFormatError);
}

TEST(LoadGraph, DuplicateTriplesWarn) {
  auto r = load_graph_text("a\tlayer\tlogical\na\tlayer\tlogical\n");
  EXPECT_EQ(r.graph.triples().size(), 1u);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("duplicate"), std::string::npos);
}

TEST(LoadGraph, MissingLayerDefaultsToPhysical) {
  auto r = load_graph_text("n1\tconcept_label\tthing\n");
  EXPECT_EQ(r.graph.layer(NodeId{"n1"}), Layer::Physical);
  EXPECT_EQ(r.graph.defaulted_layer_nodes().size(), 1u);
}

TEST(LoadGraph, FixtureHasEightPhysicalTables) {
  const auto& g = ksdw::testing::minibank().graph();
  std::set<std::string> tables;
  for (const auto& t : g.triples())
    if (t.predicate == "tablename" && g.layer(t.subject) == Layer::Physical) tables.insert(t.subject.uri);
  EXPECT_EQ(tables.size(), 8u);
  EXPECT_TRUE(ksdw::testing::minibank().warnings().empty());
}

TEST(Adjacency, OutgoingAndIncoming) {
  auto r = load_graph_text("a\tz\t<b>\na\ty\tlabel\nc\tlayer\tlogical\nd\ttype\t<k>\ne\ttype\t<k>\n");
  const auto& g = r.graph;
  EXPECT_TRUE(g.outgoing(NodeId{"b"}).empty());
  EXPECT_TRUE(g.incoming(NodeId{"c"}).empty());
  auto out = g.outgoing(NodeId{"a"});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].predicate, "y");
  EXPECT_EQ(out[1].predicate, "z");
  auto in = g.incoming(NodeId{"k"});
  ASSERT_EQ(in.size(), 2u);
  EXPECT_EQ(in[0].subject.uri, "d");
  EXPECT_EQ(in[1].subject.uri, "e");
}

TEST(Adjacency, FixtureNodes) {
  const auto& g = ksdw::testing::minibank().graph();
  auto out = g.outgoing(NodeId{"pt_parties"});
  EXPECT_TRUE(has(out, Triple{NodeId{"pt_parties"}, "tablename", TextLabel{"parties"}}));
  EXPECT_TRUE(has(out, Triple{NodeId{"pt_parties"}, "type", NodeId{"physical_table"}}));
  auto in = g.incoming(NodeId{"pc_individuals_firstName"});
  size_t column_edges = 0;
  for (const auto& t : in)
    if (t.predicate == "column") {
      ++column_edges;
      EXPECT_EQ(t.subject.uri, "pt_individuals");
    }
  EXPECT_EQ(column_edges, 1u);
}

TEST(GraphProperties, AdjacencyConsistencyAndDeterminism) {
  std::mt19937 rng(11);
  for (int round = 0; round < 20; ++round) {
    std::string text;
    int n = 5 + static_cast<int>(rng() % 20);
    for (int i = 0; i < 3 * n; ++i) {
      std::string s = "n" + std::to_string(rng() % n);
      std::string p = "p" + std::to_string(rng() % 3);
      std::string o = rng() % 3 ? "<n" + std::to_string(rng() % n) + ">" : "label" + std::to_string(rng() % 4);
      text += s + "\t" + p + "\t" + o + "\n";
    }
    auto g = load_graph_text(text).graph;
    std::set<std::string> nodes;
    for (const auto& t : g.triples()) {
      nodes.insert(t.subject.uri);
      EXPECT_TRUE(has(g.outgoing(t.subject), t));
      if (const auto* o = std::get_if<NodeId>(&t.object)) {
        nodes.insert(o->uri);
        EXPECT_TRUE(has(g.incoming(*o), t));
      }
    }
    EXPECT_EQ(g.node_count(), nodes.size());
    EXPECT_EQ(load_graph_text(text).graph.triples(), g.triples());
  }
}
