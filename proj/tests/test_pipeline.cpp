#include <gtest/gtest.h>

#include <deque>
#include <map>
#include <random>
#include <set>

#include "fixture.hpp"
#include "ksdw/pipeline.hpp"
#include "ksdw/text.hpp"

using namespace ksdw;

namespace {

const Workspace& ws() { return ksdw::testing::minibank(); }
SearchContext ctx() { return ws().context(); }

PipelineOptions no_exec() {
  PipelineOptions o;
  o.execute = false;
  return o;
}

EntryPoint node_entry(const std::string& uri, Layer layer = Layer::Physical) {
  return EntryPoint{{uri}, NodeId{uri}, layer};
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

const char* kQuery1 =
    "SELECT *\nFROM parties, individuals\nWHERE parties.id = individuals.id\nAND individuals.firstName = 'Sara'\n"
    "AND individuals.lastName = 'Guttinger'";

}  // namespace

TEST(Lookup, ComplexityOneOneTwo) {
  auto lr = lookup(parse_query("customers Zurich financial instruments"), ctx());
  ASSERT_EQ(lr.slots.size(), 3u);
  EXPECT_EQ(lr.slots[0].alternatives.size(), 1u);
  EXPECT_EQ(lr.slots[1].alternatives.size(), 1u);
  EXPECT_EQ(lr.slots[2].alternatives.size(), 2u);
  EXPECT_EQ(lr.complexity, 2u);
  EXPECT_EQ(lr.interpretations.size(), 2u);
  EXPECT_EQ(complexity(parse_query("customers Zurich financial instruments"), ctx()), 2u);
}

TEST(Lookup, SingleBaseDataHit) {
  auto lr = lookup(parse_query("Sara"), ctx());
  ASSERT_EQ(lr.interpretations.size(), 1u);
  EXPECT_EQ(lr.interpretations[0].entries[0].hit(), (BaseDataHit{"individuals", "firstName", "Sara"}));
  EXPECT_EQ(complexity(parse_query("Sara"), ctx()), 1u);
}

TEST(Lookup, NothingMatches) {
  auto lr = lookup(parse_query("qzx"), ctx());
  EXPECT_TRUE(lr.interpretations.empty());
  EXPECT_EQ(lr.complexity, 0u);
  EXPECT_FALSE(lr.diagnostics.empty());
  EXPECT_EQ(lr.unmatched, std::vector<std::string>{"qzx"});
  EXPECT_EQ(complexity(parse_query("qzx"), ctx()), 0u);
}

TEST(Lookup, MandatoryAggregationParts) {
  EXPECT_EQ(complexity(parse_query("sum (qzx) group by (transaction date)"), ctx()), 0u);
  EXPECT_EQ(complexity(parse_query("sum (amount) group by (qzx)"), ctx()), 0u);
  EXPECT_GT(complexity(parse_query("sum (amount) group by (transaction date)"), ctx()), 0u);
}

TEST(Lookup, LastSlotVariesFastest) {
  auto lr = lookup(parse_query("financial instruments transaction date"), ctx());
  ASSERT_EQ(lr.slots.size(), 2u);
  ASSERT_EQ(lr.interpretations.size(), 4u);
  EXPECT_EQ(lr.interpretations[0].entries[0], lr.interpretations[1].entries[0]);
  EXPECT_NE(lr.interpretations[0].entries[1], lr.interpretations[1].entries[1]);
  for (size_t i = 0; i < 4; ++i) EXPECT_EQ(lr.interpretations[i].ordinal, i);
}

TEST(LookupProperties, ComplexityLaw) {
  std::mt19937 rng(17);
  const std::vector<std::string> vocab = {"customers", "Zurich", "financial instruments", "Sara", "Alpina", "company",
                                          "transaction date", "amount", "given name", "qzx", "client", "CHF"};
  size_t positive = 0;
  for (int i = 0; i < 200; ++i) {
    std::string q;
    for (size_t k = 0, n = 1 + rng() % 3; k < n; ++k) q += (k ? " " : "") + vocab[rng() % vocab.size()];
    auto ast = parse_query(q);
    uint64_t c = complexity(ast, ctx());
    auto lr = lookup(ast, ctx());
    if (c > 0) {
      ++positive;
      EXPECT_EQ(lr.interpretations.size(), c) << q;
      uint64_t product = 1;
      for (const auto& s : lr.slots) product *= s.alternatives.size();
      EXPECT_EQ(product, c) << q;
    } else {
      EXPECT_TRUE(lr.interpretations.empty()) << q;
    }
  }
  EXPECT_GT(positive, 100u);
}

TEST(Rank, OntologyBeatsSynonym) {
  Interpretation onto{{node_entry("a", Layer::Ontology)}, 1};
  Interpretation syn{{node_entry("b", Layer::Synonym)}, 0};
  auto r = rank({syn, onto}, 10, LayerWeights{});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].interpretation.entries[0].layer, Layer::Ontology);
  EXPECT_GT(r[0].score, r[1].score);
}

TEST(Rank, IdenticalScoresKeepOrder) {
  Interpretation a{{node_entry("a", Layer::Logical)}, 0};
  Interpretation b{{node_entry("b", Layer::Logical)}, 1};
  auto r = rank({a, b}, 10, LayerWeights{});
  EXPECT_EQ(r[0].score, r[1].score);
  EXPECT_EQ(r[0].interpretation.ordinal, 0u);
  EXPECT_EQ(r[1].interpretation.ordinal, 1u);
}

TEST(Rank, Truncation) {
  std::vector<Interpretation> five;
  const Layer layers[] = {Layer::Physical, Layer::Ontology, Layer::Synonym, Layer::BaseData, Layer::Logical};
  for (size_t i = 0; i < 5; ++i) five.push_back({{node_entry("n" + std::to_string(i), layers[i])}, i});
  auto one = rank(five, 1, LayerWeights{});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].interpretation.ordinal, 1u);
  EXPECT_EQ(rank(five, 2, LayerWeights{}, 4).size(), 1u);
  EXPECT_TRUE(rank(five, 2, LayerWeights{}, 5).empty());
}

TEST(RankProperties, HigherLayerNeverLosesPosition) {
  std::mt19937 rng(23);
  const Layer all[] = {Layer::Ontology, Layer::Conceptual, Layer::Logical, Layer::Physical, Layer::BaseData, Layer::Synonym};
  LayerWeights w;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Interpretation> interps;
    size_t n = 2 + rng() % 8, width = 1 + rng() % 3;
    for (size_t i = 0; i < n; ++i) {
      Interpretation in;
      in.ordinal = i;
      for (size_t k = 0; k < width; ++k) in.entries.push_back(node_entry("n", all[rng() % 6]));
      interps.push_back(in);
    }
    size_t target = rng() % n, slot = rng() % width;
    Layer cur = interps[target].entries[slot].layer;
    std::vector<Layer> higher;
    for (Layer l : all)
      if (w.weight(l) > w.weight(cur)) higher.push_back(l);
    if (higher.empty()) continue;
    auto above = [&](const std::vector<Interpretation>& v) {
      std::set<size_t> out;
      for (const auto& r : rank(v, n, w)) {
        if (r.interpretation.ordinal == target) break;
        out.insert(r.interpretation.ordinal);
      }
      return out;
    };
    auto before = above(interps);
    interps[target].entries[slot].layer = higher[rng() % higher.size()];
    auto after = above(interps);
    for (size_t peer : after) EXPECT_TRUE(before.count(peer)) << "trial " << trial;
  }
}

TEST(Tables, SevenForCustomersZurichInstruments) {
  auto lr = lookup(parse_query("customers Zurich financial instruments"), ctx());
  auto ranked = rank(lr.interpretations, 1, LayerWeights{});
  ASSERT_EQ(ranked.size(), 1u);
  auto d = discover_tables(ctx(), ranked[0].interpretation.entries);
  EXPECT_EQ(sorted(d.tables), (std::vector<std::string>{"addresses", "fi_transactions", "financial_instruments", "individuals",
                                                        "organizations", "parties", "transactions"}));
}

TEST(Tables, EntryOnTableNode) {
  auto d = discover_tables(ctx(), {node_entry("pt_addresses")});
  EXPECT_EQ(d.tables, std::vector<std::string>{"addresses"});
  EXPECT_EQ(d.direct_tables, std::vector<std::string>{"addresses"});
  EXPECT_TRUE(d.inheritance.empty());
}

TEST(Tables, ChildCollectsParent) {
  auto d = discover_tables(ctx(), {node_entry("pt_individuals")});
  EXPECT_EQ(d.tables, (std::vector<std::string>{"parties", "individuals"}));
  EXPECT_EQ(d.direct_tables, std::vector<std::string>{"individuals"});
  EXPECT_EQ(d.inheritance, (std::vector<std::pair<std::string, std::string>>{{"parties", "individuals"}}));
}

TEST(Tables, UnknownNode) {
  EXPECT_THROW(discover_tables(ctx(), {node_entry("no_such_node")}), UnknownNodeError);
}

TEST(Tables, MetadataFilterNodeRecorded) {
  auto d = discover_tables(ctx(), {node_entry("onto_wealthy_customers", Layer::Ontology)});
  EXPECT_EQ(d.filter_nodes, std::vector<NodeId>{NodeId{"onto_wealthy_customers"}});
}

namespace {

// Reachability oracle: plain BFS over outgoing edges, stopping at nodes any table or column
// match_all result contains.
std::set<std::string> oracle_tables(const NodeId& start) {
  const auto& g = ws().graph();
  std::set<NodeId> table_nodes, column_nodes;
  for (const auto& [n, b] : match_all(g, ws().patterns(), ws().patterns().get(patterns::kTable))) table_nodes.insert(n);
  for (const auto& [n, b] : match_all(g, ws().patterns(), ws().patterns().get(patterns::kColumn))) column_nodes.insert(n);
  std::set<std::string> out;
  std::set<NodeId> seen{start};
  std::deque<NodeId> q{start};
  while (!q.empty()) {
    NodeId n = q.front();
    q.pop_front();
    if (table_nodes.count(n)) {
      out.insert(*g.label(n, "tablename"));
      continue;
    }
    if (column_nodes.count(n)) {
      for (const auto& t : g.incoming(n))
        if (t.predicate == "column") out.insert(*g.label(t.subject, "tablename"));
      continue;
    }
    for (const auto& t : g.outgoing(n))
      if (const auto* o = std::get_if<NodeId>(&t.object); o && seen.insert(*o).second) q.push_back(*o);
  }
  return out;
}

}  // namespace

TEST(TablesProperties, DiscoveryMatchesReachabilityOracle) {
  size_t checked = 0;
  for (const auto& [term, entries] : ws().classification().terms()) {
    for (const auto& e : entries) {
      auto d = discover_tables(ctx(), {EntryPoint{{term}, e.node, e.layer}});
      std::set<std::string> got(d.direct_tables.begin(), d.direct_tables.end());
      EXPECT_EQ(got, oracle_tables(e.node)) << term;
      ++checked;
    }
  }
  EXPECT_GT(checked, 30u);
}

TEST(Joins, InheritanceJoin) {
  auto j = discover_joins(ws().catalog(), {"individuals"}, {{"parties", "individuals"}}, {"parties", "individuals"});
  ASSERT_EQ(j.alternatives.size(), 1u);
  ASSERT_EQ(j.alternatives[0].joins.size(), 1u);
  EXPECT_EQ(render(j.alternatives[0].joins[0]), "parties.id = individuals.id");
  EXPECT_EQ(j.alternatives[0].tables, (std::vector<std::string>{"parties", "individuals"}));
}

TEST(Joins, SingleTable) {
  auto j = discover_joins(ws().catalog(), {"addresses"}, {});
  ASSERT_EQ(j.alternatives.size(), 1u);
  EXPECT_TRUE(j.alternatives[0].joins.empty());
  EXPECT_EQ(j.alternatives[0].tables, std::vector<std::string>{"addresses"});
}

TEST(Joins, Disconnected) {
  auto g = load_graph_text(
               "a\ttablename\ta\na\ttype\t<physical_table>\nb\ttablename\tb\nb\ttype\t<physical_table>\n")
               .graph;
  auto cat = SchemaCatalog::build(g, builtin_patterns());
  auto j = discover_joins(cat, {"a", "b"}, {});
  EXPECT_TRUE(j.alternatives.empty());
  ASSERT_EQ(j.diagnostics.size(), 1u);
}

namespace {

std::string bridge_graph() {
  std::string g;
  auto table = [&](const std::string& t, const std::vector<std::string>& cols) {
    g += "t_" + t + "\ttablename\t" + t + "\nt_" + t + "\ttype\t<physical_table>\n";
    for (const auto& c : cols) {
      std::string n = "c_" + t + "_" + c;
      g += "t_" + t + "\tcolumn\t<" + n + ">\n" + n + "\tcolumnname\t" + c + "\n" + n + "\ttype\t<physical_column>\n";
    }
    g += "c_" + t + "_id\ttype\t<primary_key>\n";
  };
  table("a", {"id"});
  table("b", {"id"});
  table("ab", {"id", "a_id", "b_id"});
  for (const char* side : {"a", "b"}) {
    std::string j = std::string("j_") + side;
    g += j + "\ttype\t<join_relationship>\n" + j + "\tprimary_key_of\t<c_" + side + "_id>\n" + j +
         "\tforeign_key_of\t<c_ab_" + side + "_id>\n";
  }
  return g;
}

}  // namespace

TEST(Joins, ThroughBridge) {
  auto g = load_graph_text(bridge_graph()).graph;
  auto cat = SchemaCatalog::build(g, builtin_patterns());
  ASSERT_EQ(cat.bridges().size(), 1u);
  auto j = discover_joins(cat, {"a", "b"}, {});
  ASSERT_EQ(j.alternatives.size(), 1u);
  std::vector<std::string> joins;
  for (const auto& c : j.alternatives[0].joins) joins.push_back(render(c));
  EXPECT_EQ(joins, (std::vector<std::string>{"ab.a_id = a.id", "ab.b_id = b.id"}));
  EXPECT_EQ(sorted(j.alternatives[0].tables), (std::vector<std::string>{"a", "ab", "b"}));
}

namespace {

// Independent BFS distances over the catalog joins (self-joins ignored).
std::map<std::string, std::map<std::string, size_t>> all_distances(const SchemaCatalog& cat) {
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& j : cat.joins())
    if (j.left.table != j.right.table) {
      adj[j.left.table].insert(j.right.table);
      adj[j.right.table].insert(j.left.table);
    }
  std::map<std::string, std::map<std::string, size_t>> out;
  for (const auto& t : cat.tables()) {
    auto& d = out[t.name];
    d[t.name] = 0;
    std::deque<std::string> q{t.name};
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      for (const auto& v : adj[u])
        if (d.emplace(v, d[u] + 1).second) q.push_back(v);
    }
  }
  return out;
}

}  // namespace

TEST(JoinsProperties, EveryJoinLiesOnADirectPath) {
  const auto& cat = ws().catalog();
  auto dist = all_distances(cat);
  std::vector<std::string> names;
  for (const auto& t : cat.tables()) names.push_back(t.name);
  auto d = [&](const std::string& a, const std::string& b) -> size_t {
    auto it = dist[a].find(b);
    return it == dist[a].end() ? 1000 : it->second;
  };
  std::mt19937 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> direct;
    for (size_t k = 0, n = 1 + rng() % 4; k < n; ++k) direct.push_back(names[rng() % names.size()]);
    auto jd = discover_joins(cat, direct, {});
    for (const auto& plan : jd.alternatives) {
      for (const auto& j : plan.joins) {
        const auto& u = j.left.table;
        const auto& v = j.right.table;
        bool on_path = false;
        for (const auto& s : direct)
          for (const auto& t : direct)
            if (s != t && (d(s, u) + 1 + d(v, t) == d(s, t) || d(s, v) + 1 + d(u, t) == d(s, t))) on_path = true;
        EXPECT_TRUE(on_path) << render(j) << " trial " << trial;
        for (const auto& tbl : {u, v}) EXPECT_NE(std::find(plan.tables.begin(), plan.tables.end(), tbl), plan.tables.end());
      }
    }
  }
}

TEST(Filters, QueryOneFilters) {
  auto r = run_pipeline("Sara Guttinger", ctx(), no_exec());
  ASSERT_FALSE(r.candidates.empty());
  const auto& f = r.candidates[0].filters;
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(render(f[0].condition()), "individuals.firstName = 'Sara'");
  EXPECT_EQ(render(f[1].condition()), "individuals.lastName = 'Guttinger'");
  EXPECT_EQ(f[0].source, FilterSource::BaseData);
}

TEST(Filters, DatePredicateIsTyped) {
  auto r = run_pipeline("birthday = date(1981-04-23)", ctx(), no_exec());
  ASSERT_FALSE(r.candidates.empty());
  ASSERT_EQ(r.candidates[0].filters.size(), 1u);
  EXPECT_EQ(r.candidates[0].filters[0].values, (std::vector<Value>{Value{Date{1981, 4, 23}}}));
  EXPECT_EQ(render(r.candidates[0].filters[0].condition()), "individuals.birthday = DATE '1981-04-23'");
}

TEST(Filters, MetadataFilterAttached) {
  auto r = run_pipeline("wealthy customers", ctx(), no_exec());
  ASSERT_FALSE(r.candidates.empty());
  const auto& c = r.candidates[0];
  ASSERT_EQ(c.filters.size(), 1u);
  EXPECT_EQ(c.filters[0].source, FilterSource::Metadata);
  EXPECT_EQ(render(c.filters[0].condition()), "individuals.salary >= 100000");
}

TEST(Filters, OrOnOneColumnMerges) {
  auto r = run_pipeline("Sara or Marco", ctx(), no_exec());
  ASSERT_EQ(r.candidates.size(), 1u);
  ASSERT_EQ(r.candidates[0].filters.size(), 1u);
  EXPECT_EQ(render(r.candidates[0].filters[0].condition()),
            "(individuals.firstName = 'Sara' OR individuals.firstName = 'Marco')");
}

TEST(Filters, OrAcrossColumnsSplits) {
  auto r = run_pipeline("Guttinger or Alpina", ctx(), no_exec());
  ASSERT_GE(r.candidates.size(), 2u);
  for (const auto& c : r.candidates) EXPECT_EQ(c.filters.size(), 1u);
}

TEST(FiltersProperties, EveryPredicateAndHitAppearsOnce) {
  std::mt19937 rng(31);
  const std::vector<std::string> groups = {"Sara", "Zurich", "Guttinger", "Alpina", "CHF", "customers", "company"};
  const std::vector<std::string> preds = {"salary >= 50000", "birthday = date(1981-04-23)", "amount > 100",
                                          "transaction date < date(2012-01-01)", "given name like 'S%'"};
  size_t checked = 0;
  for (int i = 0; i < 120; ++i) {
    std::string q;
    for (size_t k = 0, n = rng() % 3; k < n; ++k) q += (k ? " and " : "") + groups[rng() % groups.size()];
    size_t np = (q.empty() ? 1 : 0) + rng() % 2;
    for (size_t k = 0; k < np; ++k) q += (q.empty() ? "" : " and ") + preds[rng() % preds.size()];
    auto r = run_pipeline(q, ctx(), no_exec());
    for (const auto& c : r.candidates) {
      if (c.flagged) continue;
      ++checked;
      size_t from_query = 0;
      for (const auto& f : c.filters) from_query += f.source == FilterSource::Query;
      EXPECT_EQ(from_query, r.ast.predicates.size()) << q;
      for (const auto& e : c.interpretation.entries) {
        if (e.is_metadata()) continue;
        size_t n = 0;
        for (const auto& f : c.filters)
          if (f.source == FilterSource::BaseData && f.target == ColumnRef{e.hit().table, e.hit().column} &&
              std::count(f.values.begin(), f.values.end(), Value{e.hit().value}))
            ++n;
        EXPECT_EQ(n, 1u) << q << " / " << describe(e);
      }
    }
  }
  EXPECT_GT(checked, 50u);
}

TEST(GenerateSql, JoinsPrecedeFilters) {
  Candidate c;
  c.tables = {"transactions", "fi_transactions", "organizations"};
  c.joins = ws().catalog().joins_of("fi_transactions");
  c.joins.push_back(ws().catalog().joins_of("organizations").back());
  c.filters.push_back({{"organizations", "companyname"}, CompareOp::EQ, {std::string("Alpina")}, FilterSource::BaseData});
  auto s = generate_sql(c);
  ASSERT_EQ(s.where.size(), 4u);
  for (size_t i = 0; i < 3; ++i) EXPECT_TRUE(std::holds_alternative<ColumnRef>(s.where[i].disjuncts[0].right));
  EXPECT_FALSE(std::holds_alternative<ColumnRef>(s.where[3].disjuncts[0].right));
  EXPECT_TRUE(std::is_sorted(s.where.begin(), s.where.begin() + 3,
                             [](const auto& a, const auto& b) { return render(a) < render(b); }));
}

TEST(CandidateId, Fnv1a) {
  EXPECT_EQ(candidate_id(""), "cbf29ce484222325");
  EXPECT_EQ(candidate_id("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(candidate_id(kQuery1), candidate_id(kQuery1));
}

TEST(RunPipeline, QueryOne) {
  auto r = run_pipeline("Sara Guttinger", ctx());
  ASSERT_FALSE(r.candidates.empty());
  const auto& c = r.candidates[0];
  EXPECT_EQ(c.sql_text, kQuery1);
  EXPECT_EQ(c.rank, 1u);
  EXPECT_EQ(c.id, candidate_id(kQuery1));
  ASSERT_TRUE(c.snippet);
  ASSERT_EQ(c.snippet->rows.size(), 1u);
}

TEST(RunPipeline, QueryTwo) {
  auto r = run_pipeline("salary >= 50000 and birthday = date(1981-04-23)", ctx());
  ASSERT_FALSE(r.candidates.empty());
  EXPECT_EQ(r.candidates[0].sql_text,
            "SELECT *\nFROM parties, individuals\nWHERE parties.id = individuals.id\nAND individuals.salary >= 50000\n"
            "AND individuals.birthday = DATE '1981-04-23'");
  ASSERT_TRUE(r.candidates[0].snippet);
  EXPECT_EQ(r.candidates[0].snippet->rows.size(), 1u);
}

TEST(RunPipeline, QueryThree) {
  auto r = run_pipeline("sum (amount) group by (transaction date)", ctx());
  ASSERT_FALSE(r.candidates.empty());
  EXPECT_EQ(r.complexity, 4u);
  EXPECT_EQ(r.candidates[0].sql_text,
            "SELECT sum(fi_transactions.amount), fi_transactions.transactiondate\nFROM fi_transactions\n"
            "GROUP BY fi_transactions.transactiondate\nORDER BY sum(fi_transactions.amount) DESC");
}

TEST(RunPipeline, QueryFour) {
  auto r = run_pipeline("count (transactions) group by (company name)", ctx());
  ASSERT_FALSE(r.candidates.empty());
  EXPECT_EQ(r.candidates[0].sql_text,
            "SELECT count(fi_transactions.id), organizations.companyname\nFROM transactions, fi_transactions, organizations\n"
            "WHERE transactions.id = fi_transactions.id\nAND transactions.toParty = organizations.id\n"
            "GROUP BY organizations.companyname\nORDER BY count(fi_transactions.id) DESC");
}

TEST(RunPipeline, TopN) {
  auto r = run_pipeline("top 3 count (transactions) group by (company name)", ctx());
  ASSERT_FALSE(r.candidates.empty());
  const auto& c = r.candidates[0];
  EXPECT_NE(c.sql_text.find("\nLIMIT 3"), std::string::npos);
  ASSERT_TRUE(c.snippet);
  EXPECT_EQ(c.snippet->rows.size(), 3u);
}

TEST(RunPipeline, PagePastEnd) {
  auto r = run_pipeline("Sara Guttinger", ctx(), {}, 5);
  EXPECT_TRUE(r.candidates.empty());
  EXPECT_EQ(r.interpretation_count, 1u);
}

TEST(RunPipeline, Paging) {
  PipelineOptions o = no_exec();
  o.top_n = 1;
  auto p0 = run_pipeline("customers Zurich financial instruments", ctx(), o, 0);
  auto p1 = run_pipeline("customers Zurich financial instruments", ctx(), o, 1);
  ASSERT_FALSE(p0.candidates.empty());
  ASSERT_FALSE(p1.candidates.empty());
  EXPECT_NE(p0.candidates[0].interpretation.ordinal, p1.candidates[0].interpretation.ordinal);
  EXPECT_GT(p1.candidates[0].rank, p0.candidates.back().rank - 1);
}

TEST(RunPipeline, SnippetCapAndProjection) {
  PipelineOptions o;
  o.snippet_cap = 5;
  auto r = run_pipeline("Zurich", ctx(), o);
  ASSERT_FALSE(r.candidates.empty());
  ASSERT_TRUE(r.candidates[0].snippet);
  EXPECT_LE(r.candidates[0].snippet->rows.size(), 5u);
  o.project_columns = true;
  auto p = run_pipeline("Zurich", ctx(), o);
  EXPECT_EQ(p.candidates[0].sql_text.rfind("SELECT addresses.city\n", 0), 0u) << p.candidates[0].sql_text;
}

TEST(RunPipeline, TypeMismatchIsFlagged) {
  auto r = run_pipeline("salary >= date(2011-01-01)", ctx(), no_exec());
  ASSERT_FALSE(r.candidates.empty());
  EXPECT_TRUE(r.candidates[0].flagged);
  EXPECT_FALSE(r.candidates[0].diagnostics.empty());
}

TEST(RunPipeline, Deterministic) {
  for (const char* q : {"customers Zurich financial instruments", "Alpina", "count (transactions) group by (company name)"}) {
    auto a = run_pipeline(q, ctx()), b = run_pipeline(q, ctx());
    ASSERT_EQ(a.candidates.size(), b.candidates.size());
    for (size_t i = 0; i < a.candidates.size(); ++i) {
      EXPECT_EQ(a.candidates[i].sql_text, b.candidates[i].sql_text);
      EXPECT_EQ(a.candidates[i].snippet, b.candidates[i].snippet);
    }
  }
}
