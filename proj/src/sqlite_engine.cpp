#include <sqlite3.h>

#include <cctype>

#include "ksdw/sql.hpp"

namespace ksdw {

namespace {

std::string quote_ident(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

// SQLite has no DATE literal; dates are stored as ISO text, so `DATE 'x'` becomes `'x'`.
std::string translate_dates(const std::string& sql) {
  std::string out;
  bool in_string = false;
  for (size_t i = 0; i < sql.size(); ++i) {
    char c = sql[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\'') in_string = false;  // a doubled quote re-enters on the next char
      continue;
    }
    if (c == '\'') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    if (sql.compare(i, 6, "DATE '") == 0 && (i == 0 || !std::isalnum(static_cast<unsigned char>(sql[i - 1])))) {
      i += 4;  // skip "DATE", keep the space
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

struct SqliteEngine::Impl {
  sqlite3* db = nullptr;

  void exec(const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw SqlError("sqlite: " + msg);
    }
  }
};

SqliteEngine::SqliteEngine(const RelationalStore& store) : impl_(std::make_unique<Impl>()) {
  if (sqlite3_open(":memory:", &impl_->db) != SQLITE_OK) throw SqlError("sqlite: cannot open in-memory database");
  impl_->exec("PRAGMA case_sensitive_like = ON");
  impl_->exec("BEGIN");
  for (const Table& t : store.tables()) {
    std::string ddl = "CREATE TABLE " + quote_ident(t.def.name) + " (";
    std::string ins = "INSERT INTO " + quote_ident(t.def.name) + " VALUES (";
    for (size_t c = 0; c < t.def.columns.size(); ++c) {
      if (c) {
        ddl += ", ";
        ins += ", ";
      }
      ddl += quote_ident(t.def.columns[c].name) + (t.def.columns[c].type == DataType::Number ? " REAL" : " TEXT");
      ins += "?";
    }
    impl_->exec(ddl + ")");
    sqlite3_stmt* st = nullptr;
    if (sqlite3_prepare_v2(impl_->db, (ins + ")").c_str(), -1, &st, nullptr) != SQLITE_OK)
      throw SqlError(std::string("sqlite: ") + sqlite3_errmsg(impl_->db));
    for (const Row& row : t.rows) {
      sqlite3_reset(st);
      for (size_t c = 0; c < row.size(); ++c) {
        int idx = static_cast<int>(c + 1);
        const Value& v = row[c];
        if (is_null(v)) sqlite3_bind_null(st, idx);
        else if (const auto* d = std::get_if<double>(&v)) sqlite3_bind_double(st, idx, *d);
        else if (const auto* s = std::get_if<std::string>(&v)) sqlite3_bind_text(st, idx, s->c_str(), static_cast<int>(s->size()), SQLITE_TRANSIENT);
        else {
          std::string iso = to_string(std::get<Date>(v));
          sqlite3_bind_text(st, idx, iso.c_str(), static_cast<int>(iso.size()), SQLITE_TRANSIENT);
        }
      }
      if (sqlite3_step(st) != SQLITE_DONE) {
        std::string msg = sqlite3_errmsg(impl_->db);
        sqlite3_finalize(st);
        throw SqlError("sqlite: " + msg);
      }
    }
    sqlite3_finalize(st);
  }
  impl_->exec("COMMIT");
}

SqliteEngine::~SqliteEngine() {
  if (impl_ && impl_->db) sqlite3_close(impl_->db);
}

ResultSet SqliteEngine::run_text(const std::string& sql) const {
  sqlite3_stmt* st = nullptr;
  std::string text = translate_dates(sql);
  if (sqlite3_prepare_v2(impl_->db, text.c_str(), -1, &st, nullptr) != SQLITE_OK)
    throw SqlError(std::string("sqlite: ") + sqlite3_errmsg(impl_->db));
  ResultSet out;
  int ncol = sqlite3_column_count(st);
  for (int c = 0; c < ncol; ++c) out.headers.emplace_back(sqlite3_column_name(st, c));
  int rc;
  while ((rc = sqlite3_step(st)) == SQLITE_ROW) {
    Row r;
    for (int c = 0; c < ncol; ++c) {
      switch (sqlite3_column_type(st, c)) {
        case SQLITE_INTEGER:
        case SQLITE_FLOAT: r.emplace_back(sqlite3_column_double(st, c)); break;
        case SQLITE_TEXT:
          r.emplace_back(std::string(reinterpret_cast<const char*>(sqlite3_column_text(st, c)),
                                     static_cast<size_t>(sqlite3_column_bytes(st, c))));
          break;
        default: r.emplace_back(std::monostate{}); break;
      }
    }
    out.rows.push_back(std::move(r));
  }
  std::string msg = rc == SQLITE_DONE ? "" : sqlite3_errmsg(impl_->db);
  sqlite3_finalize(st);
  if (!msg.empty()) throw SqlError("sqlite: " + msg);
  return out;
}

ResultSet SqliteEngine::run(const SqlStatement& s, std::optional<size_t> cap) const {
  ResultSet out = run_text(render(s));
  if (cap && out.rows.size() > *cap) out.rows.resize(*cap);
  return out;
}

}  // namespace ksdw
