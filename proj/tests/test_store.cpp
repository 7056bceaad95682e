#include <gtest/gtest.h>

#include "fixture.hpp"
#include "ksdw/store.hpp"

using namespace ksdw;

namespace {

const char* kManifest = R"(# two tables
table people
column id number
column name text
column born date
pk id

table notes
column id number
column body text
)";

RelationalStore declared() {
  RelationalStore s;
  for (auto& d : parse_manifest(kManifest)) s.add_table(d);
  return s;
}

}  // namespace

TEST(Manifest, Parses) {
  auto defs = parse_manifest(kManifest);
  ASSERT_EQ(defs.size(), 2u);
  EXPECT_EQ(defs[0].name, "people");
  EXPECT_EQ(defs[0].columns,
            (std::vector<ColumnDef>{{"id", DataType::Number}, {"name", DataType::Text}, {"born", DataType::Date}}));
  EXPECT_EQ(defs[0].primary_key, std::vector<std::string>{"id"});
  EXPECT_TRUE(defs[1].primary_key.empty());
  EXPECT_EQ(defs[0].column_index("NAME"), 1u);
  EXPECT_FALSE(defs[0].column_index("missing"));
}

TEST(Manifest, Errors) {
  EXPECT_THROW(parse_manifest("column id number\n"), StoreError);
  EXPECT_THROW(parse_manifest("table t\ncolumn id blob\n"), StoreError);
  EXPECT_THROW(parse_manifest("table t\ncolumn id number\npk nope\n"), StoreError);
  EXPECT_THROW(parse_manifest("table t\ncolumn id number\ncolumn id text\n"), StoreError);
  EXPECT_THROW(parse_manifest("table t\ncolumn id number\n\ntable t\ncolumn id number\n"), StoreError);
  EXPECT_THROW(load_manifest_file("/nonexistent/manifest.txt"), StoreError);
}

TEST(Csv, QuotedFields) {
  auto recs = parse_csv("a,b\n\"x, y\",\"say \"\"hi\"\"\"\n\"two\nlines\",z\n");
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[1].fields, (std::vector<std::string>{"x, y", "say \"hi\""}));
  EXPECT_EQ(recs[2].fields, (std::vector<std::string>{"two\nlines", "z"}));
  EXPECT_EQ(recs[2].line, 3u);
}

TEST(Ingest, FiveRows) {
  auto s = declared();
  size_t n = ingest_csv(s, s.table("people").def,
                        "id,name,born\n1,Sara,1975-02-11\n2,Marco,\n3,Lena,1981-04-23\n4,\"Keller, Sara\",1988-07-30\n5,Zoe,2000-01-01\n",
                        "people.csv");
  EXPECT_EQ(n, 5u);
  EXPECT_EQ(s.table("people").rows.size(), 5u);
  EXPECT_TRUE(is_null(s.table("people").rows[1][2]));
  EXPECT_EQ(s.table("people").rows[2][2], Value(Date{1981, 4, 23}));
  EXPECT_EQ(s.table("people").rows[3][1], Value(std::string("Keller, Sara")));
}

TEST(Ingest, HeaderOnly) {
  auto s = declared();
  EXPECT_EQ(ingest_csv(s, s.table("notes").def, "id,body\n", "notes.csv"), 0u);
  ASSERT_NE(s.find("notes"), nullptr);
  EXPECT_TRUE(s.find("NOTES")->rows.empty());
}

TEST(Ingest, TypeErrorsNameTableColumnLine) {
  auto s = declared();
  try {
    ingest_csv(s, s.table("people").def, "id,name,born\n1,a,2000-01-01\nabc,b,2000-01-01\n", "people.csv");
    FAIL() << "expected StoreError";
  } catch (const StoreError& e) {
    std::string m = e.what();
    EXPECT_NE(m.find("people"), std::string::npos) << m;
    EXPECT_NE(m.find("id"), std::string::npos) << m;
    EXPECT_NE(m.find("3"), std::string::npos) << m;
  }
  EXPECT_THROW(ingest_csv(s, s.table("people").def, "id,name,born\n1,a,2000-02-30\n", "p"), StoreError);
  EXPECT_THROW(ingest_csv(s, s.table("people").def, "id,name\n1,a\n", "p"), StoreError);
  EXPECT_THROW(ingest_csv(s, s.table("people").def, "id,name,born\n1,a\n", "p"), StoreError);
}

TEST(Store, InsertChecks) {
  auto s = declared();
  EXPECT_THROW(s.insert("people", {1.0}), StoreError);
  EXPECT_THROW(s.insert("people", {std::string("x"), std::string("a"), Value{}}), StoreError);
  EXPECT_THROW(s.insert("nope", {}), StoreError);
  s.insert("people", {1.0, std::string("a"), Value{}});
  EXPECT_EQ(s.row_count(), 1u);
}

TEST(Store, Fixture) {
  const auto& ws = ksdw::testing::minibank();
  EXPECT_EQ(ws.store().tables().size(), 8u);
  EXPECT_EQ(ws.store().table("individuals").rows.size(), 60u);
  EXPECT_EQ(ws.store().row_count(), 570u);
  EXPECT_THROW(load_store(*std::make_unique<RelationalStore>(), ksdw::testing::data_path("minibank/manifest.txt"), "/nonexistent"),
               StoreError);
}
