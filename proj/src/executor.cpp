#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>

#include "ksdw/sql.hpp"
#include "ksdw/text.hpp"

namespace ksdw {

namespace {

constexpr uint32_t kUnset = UINT32_MAX;

struct ColPos {
  size_t table = 0;
  size_t column = 0;
  bool operator==(const ColPos&) const = default;
};

struct BoundComparison {
  ColPos left;
  CompareOp op = CompareOp::EQ;
  std::variant<ColPos, Value> right;
};

struct BoundCondition {
  std::vector<BoundComparison> disjuncts;
  std::vector<size_t> tables;  // distinct tables referenced
};

using Tuple = std::vector<uint32_t>;  // row index per FROM table

std::vector<uint32_t> utf8_code_points(std::string_view s) {
  std::vector<uint32_t> out;
  for (size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    size_t len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : (c >> 3) == 30 ? 4 : 1;
    uint32_t cp = len == 1 ? c : c & (0x7F >> len);
    for (size_t k = 1; k < len && i + k < s.size(); ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

// SQL LIKE: % any run, _ one character, everything else literal and case-sensitive.
bool like_match(std::string_view text, std::string_view pattern) {
  auto t = utf8_code_points(text);
  auto p = utf8_code_points(pattern);
  size_t ti = 0, pi = 0, star = std::string::npos, mark = 0;
  while (ti < t.size()) {
    if (pi < p.size() && (p[pi] == '_' || (p[pi] != '%' && p[pi] == t[ti]))) {
      ++ti;
      ++pi;
    } else if (pi < p.size() && p[pi] == '%') {
      star = pi++;
      mark = ti;
    } else if (star != std::string::npos) {
      pi = star + 1;
      ti = ++mark;
    } else {
      return false;
    }
  }
  while (pi < p.size() && p[pi] == '%') ++pi;
  return pi == p.size();
}

// Three-way comparison of two non-null values of the same type.
int compare_same(const Value& a, const Value& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

// NULL sorts before everything.
int compare_for_sort(const Value& a, const Value& b) {
  bool na = is_null(a), nb = is_null(b);
  if (na || nb) return na == nb ? 0 : (na ? -1 : 1);
  return compare_same(a, b);
}

std::optional<bool> eval_compare(const Value& l, CompareOp op, const Value& r) {
  if (is_null(l) || is_null(r)) return std::nullopt;
  if (op == CompareOp::LIKE) return like_match(std::get<std::string>(l), std::get<std::string>(r));
  int c = compare_same(l, r);
  switch (op) {
    case CompareOp::GT: return c > 0;
    case CompareOp::GE: return c >= 0;
    case CompareOp::EQ: return c == 0;
    case CompareOp::LE: return c <= 0;
    case CompareOp::LT: return c < 0;
    case CompareOp::LIKE: break;
  }
  return false;
}

class Executor {
 public:
  Executor(const SqlStatement& s, const RelationalStore& store, const ExecOptions& opts)
      : s_(s), store_(store), opts_(opts) {}

  ResultSet run() {
    resolve_tables();
    bind_conditions();
    auto tuples = join_all();
    apply_residual(tuples);
    bool grouped = s_.has_aggregate() || !s_.group_by.empty();
    ResultSet out = grouped ? aggregate(tuples) : project(tuples);
    if (s_.limit && out.rows.size() > *s_.limit) out.rows.resize(*s_.limit);
    if (opts_.cap && out.rows.size() > *opts_.cap) out.rows.resize(*opts_.cap);
    return out;
  }

 private:
  void resolve_tables() {
    if (s_.from.empty()) throw SqlError("FROM list is empty");
    for (const auto& name : s_.from) {
      const Table* t = store_.find(name);
      if (!t) throw SqlError("unknown table '" + name + "'");
      for (const Table* seen : tables_)
        if (seen == t) throw SqlError("table '" + name + "' listed twice in FROM");
      tables_.push_back(t);
    }
  }

  ColPos resolve(const ColumnRef& c) const {
    if (!c.table.empty()) {
      for (size_t i = 0; i < tables_.size(); ++i) {
        if (!iequals(tables_[i]->def.name, c.table)) continue;
        auto col = tables_[i]->def.column_index(c.column);
        if (!col) throw SqlError("unknown column '" + render(c) + "'");
        return {i, *col};
      }
      throw SqlError("table '" + c.table + "' is not in FROM");
    }
    std::optional<ColPos> found;
    for (size_t i = 0; i < tables_.size(); ++i) {
      if (auto col = tables_[i]->def.column_index(c.column)) {
        if (found) throw SqlError("ambiguous column '" + c.column + "'");
        found = ColPos{i, *col};
      }
    }
    if (!found) throw SqlError("unknown column '" + c.column + "'");
    return *found;
  }

  DataType type_at(ColPos p) const { return tables_[p.table]->def.columns[p.column].type; }

  std::string header(ColPos p) const {
    return tables_[p.table]->def.name + "." + tables_[p.table]->def.columns[p.column].name;
  }

  const Value& cell(const Tuple& t, ColPos p) const { return tables_[p.table]->rows[t[p.table]][p.column]; }

  void bind_conditions() {
    for (const auto& cond : s_.where) {
      if (cond.disjuncts.empty()) throw SqlError("empty condition");
      BoundCondition b;
      for (const auto& cmp : cond.disjuncts) {
        BoundComparison bc;
        bc.left = resolve(cmp.left);
        bc.op = cmp.op;
        DataType lt = type_at(bc.left);
        std::optional<DataType> rt;
        if (const auto* rc = std::get_if<ColumnRef>(&cmp.right)) {
          ColPos rp = resolve(*rc);
          rt = type_at(rp);
          bc.right = rp;
          b.tables.push_back(rp.table);
        } else {
          const Value& v = std::get<Value>(cmp.right);
          if (!is_null(v)) rt = type_of(v);
          bc.right = v;
        }
        if (rt && *rt != lt)
          throw SqlError("type mismatch in '" + render(cmp) + "': " + std::string(to_string(lt)) + " vs " +
                         std::string(to_string(*rt)));
        if (bc.op == CompareOp::LIKE && lt != DataType::Text) throw SqlError("LIKE needs text operands in '" + render(cmp) + "'");
        b.tables.push_back(bc.left.table);
        b.disjuncts.push_back(std::move(bc));
      }
      std::sort(b.tables.begin(), b.tables.end());
      b.tables.erase(std::unique(b.tables.begin(), b.tables.end()), b.tables.end());
      if (b.tables.size() == 1) {
        pushed_.push_back(std::move(b));
      } else if (b.disjuncts.size() == 1 && b.disjuncts[0].op == CompareOp::EQ && b.tables.size() == 2) {
        joins_.push_back(std::move(b));
      } else {
        residual_.push_back(std::move(b));
      }
    }
  }

  std::optional<bool> eval(const BoundComparison& c, const Tuple& t) const {
    const Value& l = cell(t, c.left);
    const Value& r = std::holds_alternative<ColPos>(c.right) ? cell(t, std::get<ColPos>(c.right)) : std::get<Value>(c.right);
    return eval_compare(l, c.op, r);
  }

  bool holds(const BoundCondition& c, const Tuple& t) const {
    for (const auto& d : c.disjuncts)
      if (eval(d, t) == true) return true;
    return false;
  }

  std::vector<uint32_t> filtered_rows(size_t ti) const {
    std::vector<uint32_t> rows;
    Tuple probe(tables_.size(), kUnset);
    for (uint32_t r = 0; r < tables_[ti]->rows.size(); ++r) {
      probe[ti] = r;
      bool ok = true;
      for (const auto& c : pushed_)
        if (c.tables.front() == ti && !holds(c, probe)) {
          ok = false;
          break;
        }
      if (ok) rows.push_back(r);
    }
    return rows;
  }

  void guard(size_t n) const {
    if (n > opts_.max_intermediate_rows)
      throw SqlError("intermediate result exceeds " + std::to_string(opts_.max_intermediate_rows) + " rows");
  }

  std::vector<Tuple> join_all() {
    size_t n = tables_.size();
    std::vector<std::vector<uint32_t>> rows(n);
    for (size_t i = 0; i < n; ++i) rows[i] = filtered_rows(i);

    std::vector<bool> in(n, false);
    std::vector<Tuple> cur;
    for (uint32_t r : rows[0]) {
      Tuple t(n, kUnset);
      t[0] = r;
      cur.push_back(std::move(t));
    }
    in[0] = true;
    std::vector<bool> used(joins_.size(), false);

    for (size_t step = 1; step < n; ++step) {
      // Next table: first in FROM order with a join edge into the current set, else first unjoined.
      size_t next = n;
      for (size_t i = 0; i < n && next == n; ++i) {
        if (in[i]) continue;
        for (size_t j = 0; j < joins_.size(); ++j) {
          if (used[j]) continue;
          const auto& jt = joins_[j].tables;
          if ((jt[0] == i && in[jt[1]]) || (jt[1] == i && in[jt[0]])) {
            next = i;
            break;
          }
        }
      }
      if (next == n)
        for (size_t i = 0; i < n; ++i)
          if (!in[i]) {
            next = i;
            break;
          }

      // Key columns: (column on `next`, column on the joined side) for every connecting edge.
      std::vector<std::pair<ColPos, ColPos>> keys;
      for (size_t j = 0; j < joins_.size(); ++j) {
        if (used[j]) continue;
        const auto& c = joins_[j].disjuncts[0];
        ColPos a = c.left, b = std::get<ColPos>(c.right);
        if (a.table == next && in[b.table]) keys.emplace_back(a, b);
        else if (b.table == next && in[a.table]) keys.emplace_back(b, a);
        else continue;
        used[j] = true;
      }

      std::vector<Tuple> out;
      if (keys.empty()) {
        guard(cur.size() * rows[next].size());
        for (const auto& t : cur)
          for (uint32_t r : rows[next]) {
            Tuple u = t;
            u[next] = r;
            out.push_back(std::move(u));
          }
      } else {
        std::map<std::vector<Value>, std::vector<uint32_t>> hash;
        const Table& nt = *tables_[next];
        for (uint32_t r : rows[next]) {
          std::vector<Value> key;
          bool has_null = false;
          for (const auto& [mine, other] : keys) {
            const Value& v = nt.rows[r][mine.column];
            has_null = has_null || is_null(v);
            key.push_back(v);
          }
          if (!has_null) hash[std::move(key)].push_back(r);
        }
        for (const auto& t : cur) {
          std::vector<Value> key;
          bool has_null = false;
          for (const auto& [mine, other] : keys) {
            const Value& v = cell(t, other);
            has_null = has_null || is_null(v);
            key.push_back(v);
          }
          if (has_null) continue;
          auto it = hash.find(key);
          if (it == hash.end()) continue;
          for (uint32_t r : it->second) {
            Tuple u = t;
            u[next] = r;
            out.push_back(std::move(u));
          }
          guard(out.size());
        }
      }
      cur = std::move(out);
      in[next] = true;
    }
    // Edges closing a cycle were never used as hash keys.
    for (size_t j = 0; j < joins_.size(); ++j)
      if (!used[j]) residual_.push_back(joins_[j]);
    return cur;
  }

  void apply_residual(std::vector<Tuple>& tuples) const {
    if (residual_.empty()) return;
    std::vector<Tuple> kept;
    for (auto& t : tuples) {
      bool ok = true;
      for (const auto& c : residual_)
        if (!holds(c, t)) {
          ok = false;
          break;
        }
      if (ok) kept.push_back(std::move(t));
    }
    tuples = std::move(kept);
  }

  ResultSet project(std::vector<Tuple>& tuples) const {
    std::vector<ColPos> cols;
    ResultSet out;
    for (const auto& item : s_.select) {
      if (item.is_star()) {
        for (size_t t = 0; t < tables_.size(); ++t)
          for (size_t c = 0; c < tables_[t]->def.columns.size(); ++c) cols.push_back({t, c});
      } else {
        cols.push_back(resolve(*item.column));
      }
    }
    for (ColPos p : cols) out.headers.push_back(header(p));

    if (!s_.order_by.empty()) {
      std::vector<std::pair<ColPos, bool>> keys;
      for (const auto& o : s_.order_by) {
        if (!o.expr.column || o.expr.agg) throw SqlError("ORDER BY " + render(o.expr) + " needs an aggregate query");
        keys.emplace_back(resolve(*o.expr.column), o.desc);
      }
      std::stable_sort(tuples.begin(), tuples.end(), [&](const Tuple& a, const Tuple& b) {
        for (const auto& [p, desc] : keys) {
          int c = compare_for_sort(cell(a, p), cell(b, p));
          if (c != 0) return desc ? c > 0 : c < 0;
        }
        return false;
      });
    }
    size_t limit = tuples.size();
    if (s_.limit) limit = std::min(limit, *s_.limit);
    if (opts_.cap) limit = std::min(limit, *opts_.cap);
    for (size_t i = 0; i < limit; ++i) {
      Row r;
      for (ColPos p : cols) r.push_back(cell(tuples[i], p));
      out.rows.push_back(std::move(r));
    }
    return out;
  }

  struct BoundItem {
    std::optional<AggFunc> agg;
    std::optional<ColPos> column;
    bool operator==(const BoundItem&) const = default;
  };

  BoundItem bind_item(const SelectItem& s) const {
    if (s.is_star()) throw SqlError("SELECT * cannot be combined with aggregation");
    BoundItem b{s.agg, std::nullopt};
    if (s.column) b.column = resolve(*s.column);
    if (b.agg == AggFunc::Sum && type_at(*b.column) != DataType::Number)
      throw SqlError("sum needs a number column, got " + render(s));
    return b;
  }

  std::string item_header(const BoundItem& b) const {
    if (!b.agg) return header(*b.column);
    return std::string(to_string(*b.agg)) + "(" + (b.column ? header(*b.column) : std::string("*")) + ")";
  }

  ResultSet aggregate(const std::vector<Tuple>& tuples) const {
    std::vector<ColPos> group_cols;
    for (const auto& g : s_.group_by) group_cols.push_back(resolve(g));

    std::vector<BoundItem> items;
    for (const auto& s : s_.select) items.push_back(bind_item(s));
    size_t visible = items.size();
    std::vector<std::pair<size_t, bool>> order;
    for (const auto& o : s_.order_by) {
      BoundItem b = bind_item(o.expr);
      auto it = std::find(items.begin(), items.end(), b);
      size_t idx = static_cast<size_t>(it - items.begin());
      if (it == items.end()) items.push_back(b);
      order.emplace_back(idx, o.desc);
    }
    for (const auto& b : items)
      if (!b.agg && std::find(group_cols.begin(), group_cols.end(), *b.column) == group_cols.end())
        throw SqlError("column " + header(*b.column) + " must appear in GROUP BY");

    std::map<std::vector<Value>, size_t> group_index;
    std::vector<std::vector<Value>> keys;
    std::vector<std::vector<const Tuple*>> members;
    for (const auto& t : tuples) {
      std::vector<Value> key;
      for (ColPos p : group_cols) key.push_back(cell(t, p));
      auto [it, fresh] = group_index.emplace(key, keys.size());
      if (fresh) {
        keys.push_back(std::move(key));
        members.emplace_back();
      }
      members[it->second].push_back(&t);
    }
    if (group_cols.empty() && keys.empty()) {
      keys.emplace_back();
      members.emplace_back();
    }

    std::vector<Row> rows;
    for (size_t g = 0; g < keys.size(); ++g) {
      Row r;
      for (const auto& b : items) {
        if (!b.agg) {
          size_t k = static_cast<size_t>(std::find(group_cols.begin(), group_cols.end(), *b.column) - group_cols.begin());
          r.push_back(keys[g][k]);
        } else if (*b.agg == AggFunc::Count) {
          size_t n = 0;
          for (const Tuple* t : members[g])
            if (!b.column || !is_null(cell(*t, *b.column))) ++n;
          r.emplace_back(static_cast<double>(n));
        } else {
          double sum = 0;
          bool any = false;
          for (const Tuple* t : members[g]) {
            const Value& v = cell(*t, *b.column);
            if (is_null(v)) continue;
            sum += std::get<double>(v);
            any = true;
          }
          r.push_back(any ? Value{sum} : Value{});
        }
      }
      rows.push_back(std::move(r));
    }
    if (!order.empty()) {
      std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        for (const auto& [idx, desc] : order) {
          int c = compare_for_sort(a[idx], b[idx]);
          if (c != 0) return desc ? c > 0 : c < 0;
        }
        return false;
      });
    }
    ResultSet out;
    for (size_t i = 0; i < visible; ++i) out.headers.push_back(item_header(items[i]));
    for (auto& r : rows) {
      r.resize(visible);
      out.rows.push_back(std::move(r));
    }
    return out;
  }

  const SqlStatement& s_;
  const RelationalStore& store_;
  const ExecOptions& opts_;
  std::vector<const Table*> tables_;
  std::vector<BoundCondition> pushed_, joins_, residual_;
};

}  // namespace

ResultSet execute(const SqlStatement& s, const RelationalStore& store, const ExecOptions& opts) {
  return Executor(s, store, opts).run();
}

ResultSet ReferenceEngine::run(const SqlStatement& s, std::optional<size_t> cap) const {
  ExecOptions opts;
  opts.cap = cap;
  return execute(s, store_, opts);
}

}  // namespace ksdw
