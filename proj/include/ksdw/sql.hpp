#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ksdw/query.hpp"
#include "ksdw/store.hpp"
#include "ksdw/value.hpp"

namespace ksdw {

/// Qualified column reference. `table` may be empty in parsed SQL; the executor resolves it.
struct ColumnRef {
  std::string table;
  std::string column;

  auto operator<=>(const ColumnRef&) const = default;
};

std::string render(const ColumnRef& c);

using SqlOperand = std::variant<ColumnRef, Value>;

struct Comparison {
  ColumnRef left;
  CompareOp op = CompareOp::EQ;
  SqlOperand right;

  bool operator==(const Comparison&) const = default;
};

/// Disjunction of comparisons; WHERE is the conjunction of its conditions.
struct Condition {
  std::vector<Comparison> disjuncts;

  bool operator==(const Condition&) const = default;
};

/// `*` (no agg, no column), a plain column, or sum/count over a column; count without a
/// column is count(*).
struct SelectItem {
  std::optional<AggFunc> agg;
  std::optional<ColumnRef> column;

  bool is_star() const { return !agg && !column; }
  bool operator==(const SelectItem&) const = default;
};

struct OrderItem {
  SelectItem expr;
  bool desc = false;

  bool operator==(const OrderItem&) const = default;
};

struct SqlStatement {
  std::vector<SelectItem> select;
  std::vector<std::string> from;
  std::vector<Condition> where;
  std::vector<ColumnRef> group_by;
  std::vector<OrderItem> order_by;
  std::optional<size_t> limit;

  bool has_aggregate() const;
  bool operator==(const SqlStatement&) const = default;
};

std::string render_literal(const Value& v);
std::string render(const Comparison& c);
std::string render(const Condition& c);
std::string render(const SelectItem& s);

/// Canonical text: uppercase keywords, one clause per line, conditions joined by "\nAND ".
std::string render(const SqlStatement& s);

class SqlParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the supported subset (the shape render() emits). Accepts unqualified columns,
/// lowercase keywords, `count (x)` spacing and a trailing semicolon.
SqlStatement parse_sql(std::string_view text);

/// Unknown table/column, ambiguous column, type mismatch, or resource guard.
class SqlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResultSet {
  std::vector<std::string> headers;
  std::vector<Row> rows;

  bool operator==(const ResultSet&) const = default;
};

struct ExecOptions {
  std::optional<size_t> cap;                   // snippet cap applied after LIMIT
  size_t max_intermediate_rows = 2'000'000;   // join guard
};

/// Reference executor: hash joins with pushed-down filters, three-valued logic, stable
/// grouping in first-appearance order. Headers are `table.column`, `sum(table.column)`,
/// `count(*)`.
ResultSet execute(const SqlStatement& s, const RelationalStore& store, const ExecOptions& opts = {});

/// Execution backend. The reference executor is the default; SqliteEngine is the external
/// cross-check.
class SqlEngine {
 public:
  virtual ~SqlEngine() = default;
  virtual std::string name() const = 0;
  virtual ResultSet run(const SqlStatement& s, std::optional<size_t> cap) const = 0;
};

class ReferenceEngine : public SqlEngine {
 public:
  explicit ReferenceEngine(const RelationalStore& store) : store_(store) {}
  std::string name() const override { return "reference"; }
  ResultSet run(const SqlStatement& s, std::optional<size_t> cap) const override;

 private:
  const RelationalStore& store_;
};

/// Loads the store into an in-memory SQLite database. Dates are stored as ISO text and
/// LIKE is made case-sensitive to match the reference semantics.
class SqliteEngine : public SqlEngine {
 public:
  explicit SqliteEngine(const RelationalStore& store);
  ~SqliteEngine() override;
  SqliteEngine(const SqliteEngine&) = delete;
  SqliteEngine& operator=(const SqliteEngine&) = delete;

  std::string name() const override { return "sqlite"; }
  ResultSet run(const SqlStatement& s, std::optional<size_t> cap) const override;
  /// Runs raw SQL text (after DATE-literal translation).
  ResultSet run_text(const std::string& sql) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ksdw
