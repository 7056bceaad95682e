#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ksdw/graph.hpp"
#include "ksdw/pattern.hpp"
#include "ksdw/sql.hpp"
#include "ksdw/store.hpp"

namespace ksdw {

enum class JoinKind { ForeignKey, JoinNode, Inheritance, Bridge };
std::string_view to_string(JoinKind k);

/// Equality join. Orientation: foreign-key side on the left, or parent on the left for
/// inheritance joins.
struct JoinCondition {
  ColumnRef left;
  ColumnRef right;
  JoinKind kind = JoinKind::ForeignKey;

  Comparison comparison() const { return Comparison{left, CompareOp::EQ, right}; }
  bool operator==(const JoinCondition&) const = default;
};

std::string render(const JoinCondition& j);

struct CatalogColumn {
  std::string name;
  NodeId node;
  bool primary_key = false;
  std::optional<DataType> type;  // from the store, when one is attached
};

struct CatalogTable {
  std::string name;
  NodeId node;
  std::vector<CatalogColumn> columns;
  std::vector<std::string> parents;   // inheritance parents
  std::vector<std::string> children;  // inheritance children

  const CatalogColumn* column(std::string_view name) const;
  std::vector<std::string> primary_key() const;
};

/// A table with join relationships to two other tables.
struct BridgeInfo {
  std::string bridge;
  std::string left_table;
  std::string right_table;
  JoinCondition left_join;
  JoinCondition right_join;
};

/// Physical schema recovered from the metadata graph with the table, column, foreign_key,
/// join_relationship, inheritance_child and bridge_table patterns.
class SchemaCatalog {
 public:
  static SchemaCatalog build(const MetadataGraph& g, const PatternRegistry& reg, const RelationalStore* store = nullptr);

  /// Sorted by name.
  const std::vector<CatalogTable>& tables() const { return tables_; }
  const CatalogTable* find_table(std::string_view name) const;
  const CatalogTable* table_by_node(const NodeId& n) const;
  std::optional<ColumnRef> column_by_node(const NodeId& n) const;
  std::optional<DataType> column_type(const ColumnRef& c) const;

  /// Every join, deduplicated per column pair and sorted by rendered text.
  const std::vector<JoinCondition>& joins() const { return joins_; }
  std::vector<JoinCondition> joins_of(std::string_view table) const;
  const std::vector<BridgeInfo>& bridges() const { return bridges_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<CatalogTable> tables_;
  std::vector<JoinCondition> joins_;
  std::vector<BridgeInfo> bridges_;
  std::vector<std::string> warnings_;
};

}  // namespace ksdw
