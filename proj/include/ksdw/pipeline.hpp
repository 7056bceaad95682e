#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksdw/catalog.hpp"
#include "ksdw/graph.hpp"
#include "ksdw/index.hpp"
#include "ksdw/pattern.hpp"
#include "ksdw/query.hpp"
#include "ksdw/sql.hpp"
#include "ksdw/store.hpp"

namespace ksdw {

struct LayerWeights {
  double ontology = 1.0;
  double conceptual = 0.9;
  double logical = 0.8;
  double physical = 0.7;
  double base_data = 0.6;
  double synonym = 0.5;

  double weight(Layer l) const;
};

struct PipelineOptions {
  size_t top_n = 10;
  size_t snippet_cap = 20;
  LayerWeights weights;
  bool project_columns = false;  // SELECT entry-point columns instead of *
  bool execute = true;           // run snippets
  size_t max_join_alternatives = 8;
  uint64_t max_interpretations = 100'000;
};

/// Read-only snapshot the pipeline runs against.
struct SearchContext {
  const MetadataGraph& graph;
  const PatternRegistry& patterns;
  const SchemaCatalog& catalog;
  const ClassificationIndex& classification;
  const InvertedIndex& inverted;
  const RelationalStore& store;
};

enum class SlotRole { Keyword, PredicateLeft, AggAttribute, GroupBy };
std::string_view to_string(SlotRole r);

/// One classified sub-group of the query and its alternative entry points.
struct Slot {
  SlotRole role = SlotRole::Keyword;
  size_t source = 0;  // keyword group, predicate or group-by index
  KeywordGroup words;
  std::vector<EntryPoint> alternatives;
};

/// One entry point per slot.
struct Interpretation {
  std::vector<EntryPoint> entries;
  size_t ordinal = 0;  // construction order, the ranking tie-break
};

struct LookupResult {
  std::vector<Slot> slots;
  std::vector<Interpretation> interpretations;
  uint64_t complexity = 0;
  std::vector<std::string> unmatched;
  std::vector<std::string> diagnostics;
};

/// Classifies keyword groups, predicate left operands, the aggregation attribute and group-by
/// items, and returns the Cartesian product of their entry points (last slot varies fastest).
LookupResult lookup(const QueryAst& ast, const SearchContext& ctx, const PipelineOptions& opts = {});

/// Product of per-slot entry-point counts; 0 without slots or when a mandatory slot
/// (aggregation attribute, group-by item) has no match.
uint64_t complexity(const QueryAst& ast, const SearchContext& ctx);

double score(const Interpretation& i, const LayerWeights& w);

struct RankedInterpretation {
  Interpretation interpretation;
  double score = 0;
};

/// Sorted by descending score, stable on construction order, then the window
/// [offset, offset + n).
std::vector<RankedInterpretation> rank(const std::vector<Interpretation>& interps, size_t n, const LayerWeights& w,
                                       size_t offset = 0);

/// What one entry point reached: tables matched by the table pattern and columns by the
/// column pattern.
struct EntryReach {
  std::vector<std::string> tables;
  std::vector<ColumnRef> columns;
};

struct TableDiscovery {
  std::vector<std::string> tables;         // discovery order, inheritance parents before children
  std::vector<std::string> direct_tables;  // reached without inheritance
  std::vector<ColumnRef> columns;
  std::vector<std::pair<std::string, std::string>> inheritance;  // (parent, child)
  std::vector<EntryReach> reach;                                  // per entry point
  std::vector<NodeId> filter_nodes;                               // metadata_filter matches
};

/// Breadth-first traversal over outgoing edges from each metadata entry point; nodes that
/// match the table or column pattern are collected and not expanded. Base-data hits map to
/// their table and column. Throws UnknownNodeError for entry nodes missing from the graph.
TableDiscovery discover_tables(const SearchContext& ctx, const std::vector<EntryPoint>& entries);

struct JoinPlan {
  std::vector<std::string> tables;
  std::vector<JoinCondition> joins;  // sorted by rendered text
};

struct JoinDiscovery {
  std::vector<JoinPlan> alternatives;  // empty when the tables are disconnected
  std::vector<std::string> diagnostics;
};

/// Joins on shortest undirected paths between every pair of `direct_tables`, one
/// alternative per combination of equal-length paths; bridge joins between two direct tables
/// that share no edge; inheritance joins to every collected parent.
JoinDiscovery discover_joins(const SchemaCatalog& cat, const std::vector<std::string>& direct_tables,
                             const std::vector<std::pair<std::string, std::string>>& inheritance,
                             const std::vector<std::string>& table_order = {}, size_t max_alternatives = 8);

enum class FilterSource { Query, BaseData, Metadata };
std::string_view to_string(FilterSource s);

/// `target op value` or, with several values, their disjunction.
struct FilterCondition {
  ColumnRef target;
  CompareOp op = CompareOp::EQ;
  std::vector<Value> values;
  FilterSource source = FilterSource::Query;

  Condition condition() const;
  bool operator==(const FilterCondition&) const = default;
};

struct ResolvedAggregation {
  AggFunc func = AggFunc::Count;
  std::optional<ColumnRef> column;  // none for count(*)
  std::vector<ColumnRef> group_by;
  std::optional<int> top;
};

struct Candidate {
  size_t rank = 0;
  double score = 0;
  Interpretation interpretation;
  std::vector<std::string> tables;
  std::vector<JoinCondition> joins;
  std::vector<FilterCondition> filters;
  std::vector<ColumnRef> columns;  // discovered columns, for projection
  std::optional<ResolvedAggregation> aggregation;
  std::optional<SqlStatement> sql;
  std::string sql_text;
  std::string id;  // content hash of sql_text
  std::optional<ResultSet> snippet;
  std::vector<std::string> diagnostics;
  bool flagged = false;  // a filter or aggregation part could not be resolved
};

/// SELECT * (or agg + group columns), FROM in discovery order, WHERE joins sorted by text then
/// filters in keyword, predicate, metadata order, GROUP BY, ORDER BY the aggregate descending
/// when grouped or limited.
SqlStatement generate_sql(const Candidate& c, bool project_columns = false);

/// FNV-1a 64-bit of the text, 16 hex digits.
std::string candidate_id(const std::string& sql_text);

struct SearchResult {
  std::string query;
  QueryAst ast;
  uint64_t complexity = 0;
  size_t page = 0;
  size_t interpretation_count = 0;
  std::vector<Candidate> candidates;
  std::vector<std::string> unmatched;
  std::vector<std::string> diagnostics;
  double pipeline_ms = 0;
};

/// parse -> lookup -> rank (page k = interpretations [kN, (k+1)N)) -> tables -> joins ->
/// filters -> aggregation -> SQL -> snippets. Throws QueryError on grammar violations.
SearchResult run_pipeline(std::string_view raw, const SearchContext& ctx, const PipelineOptions& opts = {},
                          size_t page = 0);

}  // namespace ksdw
