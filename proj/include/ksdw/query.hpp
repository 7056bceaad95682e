#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ksdw/value.hpp"

namespace ksdw {

enum class CompareOp { GT, GE, EQ, LE, LT, LIKE };

std::string_view to_string(CompareOp op);  // ">", ">=", "=", "<=", "<", "LIKE"
std::optional<CompareOp> parse_compare_op(std::string_view text);

enum class AggFunc { Sum, Count };
std::string_view to_string(AggFunc f);  // "sum", "count"

enum class Connective { And, Or };

using KeywordGroup = std::vector<std::string>;

/// Grammar violation in a search query. The message is the user-facing diagnostic.
class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QueryToken {
  enum class Kind { Word, Quoted, Compare, And, Or, Aggregate, GroupBy, DateLiteral, Top };

  Kind kind = Kind::Word;
  std::string text;  // word, quoted content, or operator argument list
  CompareOp op = CompareOp::EQ;
  AggFunc func = AggFunc::Count;

  bool operator==(const QueryToken&) const = default;
};

/// Splits a raw query. `sum(...)`, `count(...)`, `group by (...)` and `date(...)` become
/// single tokens carrying their argument text; `select count()` is read as `count(*)`.
std::vector<QueryToken> tokenize(std::string_view raw);

using RightOperand = std::variant<Date, double, KeywordGroup>;

struct Predicate {
  KeywordGroup left;
  CompareOp op = CompareOp::EQ;
  RightOperand right;

  bool operator==(const Predicate&) const = default;
};

struct AggregationSpec {
  AggFunc func = AggFunc::Count;
  KeywordGroup attribute;  // {"*"} counts joined rows
  std::vector<KeywordGroup> group_by;
  std::optional<int> top;  // "top N": limit with descending order

  bool counts_rows() const { return attribute.size() == 1 && attribute.front() == "*"; }
  bool operator==(const AggregationSpec&) const = default;
};

struct QueryAst {
  std::vector<KeywordGroup> keyword_groups;
  std::vector<Connective> connectives;  // between adjacent keyword groups; size = groups - 1
  std::vector<Predicate> predicates;
  std::optional<AggregationSpec> aggregation;

  bool operator==(const QueryAst&) const = default;
};

QueryAst parse_query(const std::vector<QueryToken>& tokens);
inline QueryAst parse_query(std::string_view raw) { return parse_query(tokenize(raw)); }

/// Canonical text form; parse_query(render_query(ast)) == ast.
std::string render_query(const QueryAst& ast);

}  // namespace ksdw
