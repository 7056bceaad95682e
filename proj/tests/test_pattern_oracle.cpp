#include <gtest/gtest.h>

#include "pattern_oracle.hpp"

using namespace ksdw;

// Every built-in pattern, 100 random graphs of at most 50 nodes, every node.
TEST(PatternOracle, TraversalEqualsBruteForce) {
  std::mt19937 rng(2011);
  const auto& reg = builtin_patterns();
  std::map<std::string, size_t> matched_nodes;
  size_t discrepancies = 0;
  for (int round = 0; round < 100; ++round) {
    MetadataGraph g = ksdw::testing::random_pattern_graph(rng, 50);
    ASSERT_LE(g.node_count(), 50u);
    ksdw::testing::BruteForceMatcher oracle(g, reg);
    for (const auto& name : reg.names()) {
      const Pattern& p = reg.get(name);
      for (const auto& n : g.nodes()) {
        auto fast = match_at(g, reg, p, n);
        auto slow = oracle.match_at(p, n);
        if (fast != slow) {
          ++discrepancies;
          ADD_FAILURE() << "pattern " << name << " at " << n.uri << " in round " << round << ": traversal "
                        << fast.size() << " vs brute force " << slow.size();
        }
        EXPECT_EQ(matches(g, reg, p, n), !slow.empty());
        if (!slow.empty()) ++matched_nodes[name];
      }
    }
  }
  EXPECT_EQ(discrepancies, 0u);
  // The generator must exercise every pattern, or the comparison proves little.
  for (const auto& name : reg.names()) EXPECT_GT(matched_nodes[name], 0u) << name;
}

// Every binding satisfies each edge clause it binds.
TEST(PatternOracle, BindingConsistency) {
  std::mt19937 rng(7);
  const auto& reg = builtin_patterns();
  for (int round = 0; round < 30; ++round) {
    MetadataGraph g = ksdw::testing::random_pattern_graph(rng, 40);
    for (const auto& name : reg.names()) {
      const Pattern& p = reg.get(name);
      for (const auto& [node, b] : match_all(g, reg, p)) {
        for (const auto& c : p.clauses) {
          const auto* e = std::get_if<EdgeClause>(&c);
          if (!e) continue;
          auto term = [&](const PatternTerm& t) -> GraphTerm {
            if (t.kind == PatternTerm::Kind::StaticNode) return NodeId{t.value};
            if (t.kind == PatternTerm::Kind::TextLabel) return TextLabel{t.value};
            return b.at(t.value);
          };
          Triple t{std::get<NodeId>(term(e->subject)), e->predicate, term(e->object)};
          EXPECT_TRUE(g.contains(t)) << name;
        }
      }
    }
  }
}
