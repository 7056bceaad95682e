#include <gtest/gtest.h>

#include <random>

#include "fixture.hpp"
#include "ksdw/sql.hpp"
#include "sql_gen.hpp"

using namespace ksdw;

namespace {

const Workspace& ws() { return ksdw::testing::minibank(); }

SqlStatement query1() {
  return parse_sql(
      "SELECT * FROM parties, individuals WHERE parties.id = individuals.id AND individuals.firstName = 'Sara' "
      "AND individuals.lastName = 'Guttinger'");
}

RelationalStore counting_store(size_t rows) {
  RelationalStore s;
  s.add_table({"t", {{"id", DataType::Number}, {"v", DataType::Text}}, {"id"}});
  for (size_t i = 0; i < rows; ++i) s.insert("t", {static_cast<double>(i), std::string("v") + std::to_string(i % 7)});
  return s;
}

}  // namespace

TEST(Render, Minimal) {
  SqlStatement s;
  s.select.push_back({});
  s.from = {"t"};
  EXPECT_EQ(render(s), "SELECT *\nFROM t");
}

TEST(Render, ClausesAndLiterals) {
  SqlStatement s;
  s.select = {{std::nullopt, ColumnRef{"o", "name"}}, {AggFunc::Count, std::nullopt}};
  s.from = {"o", "t"};
  s.where = {Condition{{Comparison{{"o", "id"}, CompareOp::EQ, ColumnRef{"t", "oid"}}}},
             Condition{{Comparison{{"t", "d"}, CompareOp::GE, Value{Date{2011, 9, 1}}},
                        Comparison{{"o", "name"}, CompareOp::LIKE, Value{std::string("O'B%")}}}}};
  s.group_by = {{"o", "name"}};
  s.order_by = {{{AggFunc::Count, std::nullopt}, true}};
  s.limit = 3;
  EXPECT_EQ(render(s),
            "SELECT o.name, count(*)\nFROM o, t\nWHERE o.id = t.oid\nAND (t.d >= DATE '2011-09-01' OR o.name LIKE 'O''B%')\n"
            "GROUP BY o.name\nORDER BY count(*) DESC\nLIMIT 3");
  EXPECT_EQ(parse_sql(render(s)), s);
}

TEST(Render, QueryOneListing) {
  EXPECT_EQ(render(query1()),
            "SELECT *\nFROM parties, individuals\nWHERE parties.id = individuals.id\nAND individuals.firstName = 'Sara'\n"
            "AND individuals.lastName = 'Guttinger'");
}

TEST(ParseSql, AcceptsLooseForms) {
  auto s = parse_sql("select count (fi_transactions.id), companyname from organizations, fi_transactions "
                     "where organizations.id = fi_transactions.id group by companyname order by count (fi_transactions.id) desc;");
  ASSERT_EQ(s.select.size(), 2u);
  EXPECT_EQ(s.select[0].agg, AggFunc::Count);
  EXPECT_EQ(s.select[1].column, (ColumnRef{"", "companyname"}));
  EXPECT_TRUE(s.order_by[0].desc);
}

TEST(ParseSql, Errors) {
  for (const char* bad : {"", "SELECT", "SELECT * FROM", "SELECT * FROM t WHERE", "SELECT * FROM t WHERE a = ",
                          "SELECT sum(*) FROM t", "SELECT * FROM t LIMIT -1", "SELECT * FROM t extra",
                          "SELECT * FROM t WHERE a = 'x", "DELETE FROM t"}) {
    EXPECT_THROW(parse_sql(bad), SqlParseError) << bad;
  }
}

TEST(SqlProperties, RenderParseRoundTrip) {
  ksdw::testing::SqlGenerator gen(ws().store(), ws().catalog().joins());
  std::mt19937 rng(3);
  for (int i = 0; i < 500; ++i) {
    SqlStatement s = gen.next(rng, {true});
    std::string text = render(s);
    SqlStatement back;
    ASSERT_NO_THROW(back = parse_sql(text)) << text;
    EXPECT_EQ(back, s) << text;
    EXPECT_EQ(render(back), text);
  }
}

TEST(Execute, EmptyTables) {
  RelationalStore s;
  s.add_table({"a", {{"id", DataType::Number}}, {"id"}});
  s.add_table({"b", {{"id", DataType::Number}, {"a_id", DataType::Number}}, {"id"}});
  EXPECT_TRUE(execute(parse_sql("SELECT * FROM a, b WHERE a.id = b.a_id"), s).rows.empty());
  EXPECT_TRUE(execute(parse_sql("SELECT a.id, count(*) FROM a GROUP BY a.id"), s).rows.empty());
  auto total = execute(parse_sql("SELECT count(*) FROM a"), s);
  ASSERT_EQ(total.rows.size(), 1u);
  EXPECT_EQ(total.rows[0][0], Value(0.0));
}

TEST(Execute, QueryOneOnFixture) {
  auto rs = execute(query1(), ws().store());
  ASSERT_EQ(rs.rows.size(), 1u);
  EXPECT_EQ(rs.headers, (std::vector<std::string>{"parties.id", "parties.type", "individuals.id", "individuals.firstName",
                                                  "individuals.lastName", "individuals.birthday", "individuals.salary"}));
  EXPECT_EQ(rs.rows[0][0], Value(1.0));
  EXPECT_EQ(rs.rows[0][3], Value(std::string("Sara")));
  EXPECT_EQ(rs.rows[0][4], Value(std::string("Guttinger")));
}

TEST(Execute, SnippetCap) {
  auto s = counting_store(100);
  auto all = execute(parse_sql("SELECT * FROM t"), s);
  auto capped = execute(parse_sql("SELECT * FROM t"), s, {20});
  EXPECT_EQ(all.rows.size(), 100u);
  EXPECT_EQ(capped.rows.size(), 20u);
}

TEST(Execute, ThreeValuedLogicAndNullGroups) {
  RelationalStore s;
  s.add_table({"t", {{"id", DataType::Number}, {"g", DataType::Text}, {"x", DataType::Number}}, {"id"}});
  s.insert("t", {1.0, std::string("a"), 5.0});
  s.insert("t", {2.0, Value{}, Value{}});
  s.insert("t", {3.0, Value{}, 7.0});
  EXPECT_EQ(execute(parse_sql("SELECT * FROM t WHERE (x < 6 OR x >= 6)"), s).rows.size(), 2u);
  EXPECT_EQ(execute(parse_sql("SELECT * FROM t WHERE (g = 'a' OR x > 6)"), s).rows.size(), 2u);
  auto grouped = execute(parse_sql("SELECT g, count(*), count(x), sum(x) FROM t GROUP BY g"), s);
  ASSERT_EQ(grouped.rows.size(), 2u);
  EXPECT_EQ(grouped.rows[1], (Row{Value{}, 2.0, 1.0, 7.0}));
}

TEST(Execute, Errors) {
  const auto& st = ws().store();
  EXPECT_THROW(execute(parse_sql("SELECT * FROM nope"), st), SqlError);
  EXPECT_THROW(execute(parse_sql("SELECT * FROM parties WHERE parties.nope = 1"), st), SqlError);
  EXPECT_THROW(execute(parse_sql("SELECT * FROM parties, individuals WHERE id = 1"), st), SqlError);
  EXPECT_THROW(execute(parse_sql("SELECT * FROM individuals WHERE salary = 'x'"), st), SqlError);
  EXPECT_THROW(execute(parse_sql("SELECT sum(individuals.firstName) FROM individuals"), st), SqlError);
  EXPECT_THROW(execute(parse_sql("SELECT * FROM transactions, fi_transactions, individuals"), st, {std::nullopt, 1000}),
               SqlError);
}

TEST(SqlProperties, CappedIsPrefixOrSubset) {
  ksdw::testing::SqlGenerator gen(ws().store(), ws().catalog().joins());
  std::mt19937 rng(5);
  for (int i = 0; i < 150; ++i) {
    SqlStatement s = gen.next(rng, {true});
    auto full = execute(s, ws().store());
    auto capped = execute(s, ws().store(), {20});
    EXPECT_EQ(capped.rows.size(), std::min<size_t>(20, full.rows.size()));
    if (!s.order_by.empty()) {
      // the reference executor is deterministic, so capping keeps the prefix
      EXPECT_TRUE(std::equal(capped.rows.begin(), capped.rows.end(), full.rows.begin())) << render(s);
    } else {
      auto fb = ksdw::testing::as_bag(full);
      for (const auto& [row, n] : ksdw::testing::as_bag(capped)) EXPECT_LE(n, fb[row]) << render(s);
    }
  }
}

TEST(SqlProperties, JoinCommutativity) {
  ksdw::testing::SqlGenerator gen(ws().store(), ws().catalog().joins());
  std::mt19937 rng(9);
  int multi = 0;
  for (int i = 0; i < 150; ++i) {
    SqlStatement s = gen.next(rng);
    if (s.from.size() < 2) continue;
    if (s.select.size() == 1 && s.select[0].is_star()) continue;  // column order follows FROM
    ++multi;
    auto base = ksdw::testing::as_bag(execute(s, ws().store()));
    SqlStatement p = s;
    std::reverse(p.from.begin(), p.from.end());
    EXPECT_EQ(ksdw::testing::as_bag(execute(p, ws().store())), base) << render(s);
    std::shuffle(p.from.begin(), p.from.end(), rng);
    EXPECT_EQ(ksdw::testing::as_bag(execute(p, ws().store())), base) << render(s);
  }
  EXPECT_GT(multi, 10);
}
