#include "ksdw/store.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ksdw/text.hpp"

namespace ksdw {

std::optional<size_t> TableDef::column_index(std::string_view column) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (iequals(columns[i].name, column)) return i;
  return std::nullopt;
}

void RelationalStore::add_table(TableDef def) {
  if (def.name.empty()) throw StoreError("table name is empty");
  if (find(def.name)) throw StoreError("duplicate table '" + def.name + "'");
  if (def.columns.empty()) throw StoreError("table '" + def.name + "' has no columns");
  std::set<std::string> seen;
  for (const auto& c : def.columns)
    if (!seen.insert(to_lower_ascii(c.name)).second)
      throw StoreError("table '" + def.name + "' declares column '" + c.name + "' twice");
  for (const auto& pk : def.primary_key)
    if (!def.column_index(pk)) throw StoreError("table '" + def.name + "' primary key column '" + pk + "' is not declared");
  tables_.push_back(Table{std::move(def), {}});
}

void RelationalStore::insert(std::string_view table, Row row) {
  Table& t = mutable_table(table);
  if (row.size() != t.def.columns.size())
    throw StoreError("table '" + t.def.name + "': row has " + std::to_string(row.size()) + " values, expected " +
                     std::to_string(t.def.columns.size()));
  for (size_t i = 0; i < row.size(); ++i) {
    if (is_null(row[i])) continue;
    if (type_of(row[i]) != t.def.columns[i].type)
      throw StoreError("table '" + t.def.name + "', column '" + t.def.columns[i].name + "': expected " +
                       std::string(to_string(t.def.columns[i].type)) + " value");
  }
  t.rows.push_back(std::move(row));
}

const Table* RelationalStore::find(std::string_view table) const {
  for (const auto& t : tables_)
    if (iequals(t.def.name, table)) return &t;
  return nullptr;
}

const Table& RelationalStore::table(std::string_view table) const {
  if (const Table* t = find(table)) return *t;
  throw StoreError("unknown table '" + std::string(table) + "'");
}

Table& RelationalStore::mutable_table(std::string_view table) {
  for (auto& t : tables_)
    if (iequals(t.def.name, table)) return t;
  throw StoreError("unknown table '" + std::string(table) + "'");
}

size_t RelationalStore::row_count() const {
  size_t n = 0;
  for (const auto& t : tables_) n += t.rows.size();
  return n;
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string read_file(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError(std::string(what) + " not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<TableDef> parse_manifest(std::string_view text) {
  std::vector<TableDef> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t line_no = 0;
  auto fail = [&](const std::string& msg) { throw StoreError("manifest line " + std::to_string(line_no) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto words = split_ws(line);
    const std::string& kw = words[0];
    if (kw == "table") {
      if (words.size() != 2) fail("expected 'table <name>'");
      for (const auto& t : out)
        if (iequals(t.name, words[1])) fail("duplicate table '" + words[1] + "'");
      out.push_back(TableDef{words[1], {}, {}});
    } else if (kw == "column") {
      if (out.empty()) fail("column outside a table block");
      if (words.size() != 3) fail("expected 'column <name> <type>'");
      auto type = parse_data_type(words[2]);
      if (!type) fail("unknown column type '" + words[2] + "' (text, number or date)");
      if (out.back().column_index(words[1])) fail("duplicate column '" + words[1] + "'");
      out.back().columns.push_back(ColumnDef{words[1], *type});
    } else if (kw == "pk") {
      if (out.empty()) fail("pk outside a table block");
      if (words.size() < 2) fail("expected 'pk <column>[,<column>...]'");
      std::string cols;
      for (size_t i = 1; i < words.size(); ++i) cols += words[i];
      std::string cur;
      for (char c : cols + ",") {
        if (c == ',') {
          if (!cur.empty() && !out.back().column_index(cur)) fail("primary key column '" + cur + "' is not declared above");
          if (!cur.empty()) out.back().primary_key.push_back(cur);
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
    } else {
      fail("unknown directive '" + kw + "'");
    }
  }
  return out;
}

std::vector<TableDef> load_manifest_file(const std::string& path) { return parse_manifest(read_file(path, "manifest")); }

std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> out;
  size_t i = 0;
  size_t line = 1;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < text.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      if (i < text.size() && text[i] == '"') {
        size_t start_line = line;
        ++i;
        while (true) {
          if (i >= text.size()) throw StoreError("csv line " + std::to_string(start_line) + ": unterminated quoted field");
          char c = text[i++];
          if (c == '"') {
            if (i < text.size() && text[i] == '"') {
              field.push_back('"');
              ++i;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
          }
        }
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
          throw StoreError("csv line " + std::to_string(line) + ": unexpected character after closing quote");
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') field.push_back(text[i++]);
      }
      rec.fields.push_back(std::move(field));
      field.clear();
      if (i >= text.size()) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        if (text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        ++line;
        done = true;
      }
    }
    // A blank line yields one empty field; skip it.
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
    out.push_back(std::move(rec));
  }
  return out;
}

size_t ingest_csv(RelationalStore& store, const TableDef& def, std::string_view csv_text, std::string_view source_name) {
  auto records = parse_csv(csv_text);
  std::string src(source_name);
  if (records.empty()) throw StoreError(src + ": missing header row");
  const auto& header = records.front().fields;
  if (header.size() != def.columns.size())
    throw StoreError(src + ": header has " + std::to_string(header.size()) + " columns, table '" + def.name +
                     "' declares " + std::to_string(def.columns.size()));
  for (size_t c = 0; c < header.size(); ++c)
    if (!iequals(trim(header[c]), def.columns[c].name))
      throw StoreError(src + ": header column " + std::to_string(c + 1) + " is '" + header[c] + "', expected '" +
                       def.columns[c].name + "'");
  size_t added = 0;
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    std::string where = src + " line " + std::to_string(rec.line);
    if (rec.fields.size() != def.columns.size())
      throw StoreError(where + ": expected " + std::to_string(def.columns.size()) + " fields, got " +
                       std::to_string(rec.fields.size()));
    Row row;
    row.reserve(rec.fields.size());
    for (size_t c = 0; c < rec.fields.size(); ++c) {
      const std::string& f = rec.fields[c];
      const ColumnDef& col = def.columns[c];
      if (f.empty()) {
        row.emplace_back(std::monostate{});
        continue;
      }
      switch (col.type) {
        case DataType::Text: row.emplace_back(f); break;
        case DataType::Number: {
          auto n = parse_number(trim(f));
          if (!n) throw StoreError(where + ": table '" + def.name + "', column '" + col.name + "': '" + f + "' is not a number");
          row.emplace_back(*n);
          break;
        }
        case DataType::Date: {
          auto d = parse_date(trim(f));
          if (!d) throw StoreError(where + ": table '" + def.name + "', column '" + col.name + "': '" + f + "' is not a date (YYYY-MM-DD)");
          row.emplace_back(*d);
          break;
        }
      }
    }
    store.insert(def.name, std::move(row));
    ++added;
  }
  return added;
}

IngestReport load_store(RelationalStore& store, const std::string& manifest_path, const std::string& csv_dir) {
  IngestReport report;
  for (auto& def : load_manifest_file(manifest_path)) {
    store.add_table(def);
    auto path = (std::filesystem::path(csv_dir) / (def.name + ".csv")).string();
    std::string text = read_file(path, "csv file for table '" + def.name + "'");
    size_t n = ingest_csv(store, def, text, def.name + ".csv");
    report.rows_per_table.emplace_back(def.name, n);
  }
  return report;
}

}  // namespace ksdw
