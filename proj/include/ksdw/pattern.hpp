#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ksdw/graph.hpp"

namespace ksdw {

class PatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One position of a pattern clause.
///
/// Variables are written as a letter optionally followed by digits (`x`, `y`, `c1`) or
/// with an explicit `?` prefix (`?parent`). `t:name` is a variable restricted to text
/// labels, `t:"text"` a literal label, `<uri>` or any other bare token a static node.
struct PatternTerm {
  enum class Kind { Variable, StaticNode, TextLabel };

  Kind kind = Kind::Variable;
  std::string value;
  bool label_only = false;  // variable written as t:name

  bool operator==(const PatternTerm&) const = default;
};

struct EdgeClause {
  PatternTerm subject;
  std::string predicate;
  PatternTerm object;

  bool operator==(const EdgeClause&) const = default;
};

/// `( v matches-name )`: succeeds iff pattern `name` has a match at v's node.
struct ReferenceClause {
  std::string variable;
  std::string pattern;

  bool operator==(const ReferenceClause&) const = default;
};

using PatternClause = std::variant<EdgeClause, ReferenceClause>;

struct Pattern {
  std::string name;
  std::vector<PatternClause> clauses;

  /// Variables in order of first appearance; `x` first.
  std::vector<std::string> variables() const;
  bool operator==(const Pattern&) const = default;
};

/// Variable name -> bound node or label. Always contains the root `x`.
using Binding = std::map<std::string, GraphTerm>;

inline constexpr std::string_view kRootVariable = "x";

/// Parses a clause expression such as `( x tablename t:y ) & ( x type physical_table )`.
Pattern parse_pattern(std::string_view name, std::string_view text);

/// Named patterns, registered in dependency order.
class PatternRegistry {
 public:
  /// Rejects references to unregistered patterns (which also rules out recursion) and
  /// duplicate names.
  void add(Pattern p);
  bool contains(std::string_view name) const;
  const Pattern& get(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Pattern, std::less<>> patterns_;
  std::vector<std::string> order_;
};

/// Parses a pattern file: blocks of `pattern <name>:` followed by the clause expression,
/// separated by blank lines; `#` lines are comments.
PatternRegistry load_patterns(std::string_view text);
PatternRegistry load_patterns_file(const std::string& path);

/// The shipped patterns: table, column, foreign_key, join_relationship, inheritance_child,
/// bridge_table, metadata_filter.
const PatternRegistry& builtin_patterns();
std::string_view builtin_patterns_source();

namespace patterns {
inline constexpr std::string_view kTable = "table";
inline constexpr std::string_view kColumn = "column";
inline constexpr std::string_view kForeignKey = "foreign_key";
inline constexpr std::string_view kJoinRelationship = "join_relationship";
inline constexpr std::string_view kInheritanceChild = "inheritance_child";
inline constexpr std::string_view kBridgeTable = "bridge_table";
inline constexpr std::string_view kMetadataFilter = "metadata_filter";
}  // namespace patterns

/// All bindings with x = n, sorted lexicographically and without duplicates.
/// Non-root variables bind pairwise-distinct values.
std::vector<Binding> match_at(const MetadataGraph& g, const PatternRegistry& reg, const Pattern& p,
                              const NodeId& n);

/// True iff match_at would return at least one binding (stops at the first).
bool matches(const MetadataGraph& g, const PatternRegistry& reg, const Pattern& p, const NodeId& n);

/// match_at over every node of g, in node order.
std::vector<std::pair<NodeId, Binding>> match_all(const MetadataGraph& g, const PatternRegistry& reg,
                                                  const Pattern& p);

}  // namespace ksdw
