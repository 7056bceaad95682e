#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ksdw/value.hpp"

namespace ksdw {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ColumnDef {
  std::string name;
  DataType type = DataType::Text;

  bool operator==(const ColumnDef&) const = default;
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::vector<std::string> primary_key;

  /// Case-insensitive column lookup.
  std::optional<size_t> column_index(std::string_view column) const;
  bool operator==(const TableDef&) const = default;
};

using Row = std::vector<Value>;

struct Table {
  TableDef def;
  std::vector<Row> rows;  // row id = position
};

/// In-memory base data. Tables keep manifest order.
class RelationalStore {
 public:
  /// Throws StoreError on duplicate table/column names or unknown pk columns.
  void add_table(TableDef def);
  /// Throws StoreError on arity or type mismatch.
  void insert(std::string_view table, Row row);

  /// Case-insensitive; nullptr when absent.
  const Table* find(std::string_view table) const;
  const Table& table(std::string_view table) const;
  const std::vector<Table>& tables() const { return tables_; }
  size_t row_count() const;

 private:
  Table& mutable_table(std::string_view table);
  std::vector<Table> tables_;
};

/// Parses the manifest format: blocks of `table <name>`, `column <name> <type>` lines and an
/// optional `pk <col>[,<col>...]` line. `#` lines are comments.
std::vector<TableDef> parse_manifest(std::string_view text);
std::vector<TableDef> load_manifest_file(const std::string& path);

/// Splits RFC-4180 CSV into records. Quoted fields may contain commas, quotes ("") and
/// line breaks. Each record carries the 1-based line it starts on.
struct CsvRecord {
  size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRecord> parse_csv(std::string_view text);

/// Loads one table's CSV into the store. The header must list the declared columns in order;
/// empty fields become NULL. Returns the number of rows added.
size_t ingest_csv(RelationalStore& store, const TableDef& def, std::string_view csv_text,
                  std::string_view source_name);

struct IngestReport {
  std::vector<std::pair<std::string, size_t>> rows_per_table;
};

/// Declares every manifest table and loads `<csv_dir>/<name>.csv` for each.
IngestReport load_store(RelationalStore& store, const std::string& manifest_path, const std::string& csv_dir);

}  // namespace ksdw
