#include "ksdw/sql.hpp"

#include <cctype>

#include "ksdw/text.hpp"

namespace ksdw {

bool SqlStatement::has_aggregate() const {
  for (const auto& s : select)
    if (s.agg) return true;
  return false;
}

std::string render(const ColumnRef& c) { return c.table.empty() ? c.column : c.table + "." + c.column; }

std::string render_literal(const Value& v) {
  struct V {
    std::string operator()(std::monostate) const { return "NULL"; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const Date& d) const { return "DATE '" + to_string(d) + "'"; }
    std::string operator()(const std::string& s) const {
      std::string out = "'";
      for (char c : s) {
        if (c == '\'') out += "''";
        else out.push_back(c);
      }
      return out + "'";
    }
  };
  return std::visit(V{}, v);
}

std::string render(const Comparison& c) {
  std::string right = std::holds_alternative<ColumnRef>(c.right) ? render(std::get<ColumnRef>(c.right))
                                                                  : render_literal(std::get<Value>(c.right));
  return render(c.left) + " " + std::string(to_string(c.op)) + " " + right;
}

std::string render(const Condition& c) {
  if (c.disjuncts.size() == 1) return render(c.disjuncts.front());
  std::string out = "(";
  for (size_t i = 0; i < c.disjuncts.size(); ++i) {
    if (i) out += " OR ";
    out += render(c.disjuncts[i]);
  }
  return out + ")";
}

std::string render(const SelectItem& s) {
  if (s.is_star()) return "*";
  if (!s.agg) return render(*s.column);
  return std::string(to_string(*s.agg)) + "(" + (s.column ? render(*s.column) : std::string("*")) + ")";
}

std::string render(const SqlStatement& s) {
  std::string out = "SELECT ";
  for (size_t i = 0; i < s.select.size(); ++i) {
    if (i) out += ", ";
    out += render(s.select[i]);
  }
  out += "\nFROM " + join(s.from, ", ");
  for (size_t i = 0; i < s.where.size(); ++i) out += (i ? "\nAND " : "\nWHERE ") + render(s.where[i]);
  if (!s.group_by.empty()) {
    out += "\nGROUP BY ";
    for (size_t i = 0; i < s.group_by.size(); ++i) {
      if (i) out += ", ";
      out += render(s.group_by[i]);
    }
  }
  if (!s.order_by.empty()) {
    out += "\nORDER BY ";
    for (size_t i = 0; i < s.order_by.size(); ++i) {
      if (i) out += ", ";
      out += render(s.order_by[i].expr);
      if (s.order_by[i].desc) out += " DESC";
    }
  }
  if (s.limit) out += "\nLIMIT " + std::to_string(*s.limit);
  return out;
}

namespace {

struct SqlToken {
  enum class Kind { Ident, Number, String, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  size_t pos = 0;
};

std::vector<SqlToken> lex_sql(std::string_view s) {
  std::vector<SqlToken> out;
  size_t i = 0;
  auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    size_t start = i;
    if (is_ident_start(c)) {
      while (i < s.size() && is_ident(s[i])) ++i;
      out.push_back({SqlToken::Kind::Ident, std::string(s.substr(start, i - start)), start});
    } else if (is_digit(c) || (c == '-' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      ++i;
      while (i < s.size() && (is_digit(s[i]) || s[i] == '.')) ++i;
      out.push_back({SqlToken::Kind::Number, std::string(s.substr(start, i - start)), start});
    } else if (c == '\'') {
      ++i;
      std::string v;
      while (true) {
        if (i >= s.size()) throw SqlParseError("unterminated string literal at offset " + std::to_string(start));
        if (s[i] == '\'') {
          if (i + 1 < s.size() && s[i + 1] == '\'') {
            v.push_back('\'');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        v.push_back(s[i++]);
      }
      out.push_back({SqlToken::Kind::String, v, start});
    } else if ((c == '<' || c == '>') && i + 1 < s.size() && s[i + 1] == '=') {
      out.push_back({SqlToken::Kind::Symbol, std::string(s.substr(i, 2)), start});
      i += 2;
    } else if (std::string_view(",.()*=<>;").find(c) != std::string_view::npos) {
      out.push_back({SqlToken::Kind::Symbol, std::string(1, c), start});
      ++i;
    } else {
      throw SqlParseError(std::string("unexpected character '") + c + "' at offset " + std::to_string(start));
    }
  }
  out.push_back({SqlToken::Kind::End, "", s.size()});
  return out;
}

class SqlParser {
 public:
  explicit SqlParser(std::string_view text) : toks_(lex_sql(text)) {}

  SqlStatement statement() {
    SqlStatement s;
    expect_keyword("SELECT");
    if (accept_symbol("*")) {
      s.select.push_back({});
    } else {
      do s.select.push_back(select_item());
      while (accept_symbol(","));
    }
    expect_keyword("FROM");
    do s.from.push_back(identifier("table name"));
    while (accept_symbol(","));
    if (accept_keyword("WHERE")) {
      do s.where.push_back(condition());
      while (accept_keyword("AND"));
    }
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      do s.group_by.push_back(column_ref());
      while (accept_symbol(","));
    }
    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      do {
        OrderItem o{select_item(), false};
        if (accept_keyword("DESC")) o.desc = true;
        else accept_keyword("ASC");
        s.order_by.push_back(std::move(o));
      } while (accept_symbol(","));
    }
    if (accept_keyword("LIMIT")) {
      const SqlToken& t = peek();
      if (t.kind != SqlToken::Kind::Number || t.text.find_first_not_of("0123456789") != std::string::npos)
        fail("LIMIT needs a non-negative integer");
      s.limit = std::stoull(t.text);
      ++i_;
    }
    accept_symbol(";");
    if (peek().kind != SqlToken::Kind::End) fail("unexpected '" + peek().text + "'");
    return s;
  }

 private:
  const SqlToken& peek() const { return toks_[i_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SqlParseError(msg + " at offset " + std::to_string(peek().pos));
  }

  bool is_keyword(const SqlToken& t, std::string_view kw) const {
    return t.kind == SqlToken::Kind::Ident && iequals(t.text, kw);
  }

  bool accept_keyword(std::string_view kw) {
    if (!is_keyword(peek(), kw)) return false;
    ++i_;
    return true;
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail("expected " + std::string(kw));
  }

  bool accept_symbol(std::string_view sym) {
    if (peek().kind != SqlToken::Kind::Symbol || peek().text != sym) return false;
    ++i_;
    return true;
  }

  void expect_symbol(std::string_view sym) {
    if (!accept_symbol(sym)) fail("expected '" + std::string(sym) + "'");
  }

  std::string identifier(std::string_view what) {
    static const char* kReserved[] = {"SELECT", "FROM", "WHERE", "AND", "OR", "GROUP", "BY", "ORDER",
                                      "LIMIT", "LIKE", "DESC", "ASC", "NULL"};
    const SqlToken& t = peek();
    if (t.kind != SqlToken::Kind::Ident) fail("expected " + std::string(what));
    for (const char* r : kReserved)
      if (iequals(t.text, r)) fail("expected " + std::string(what) + ", got keyword " + t.text);
    ++i_;
    return t.text;
  }

  ColumnRef column_ref() {
    std::string a = identifier("column name");
    if (accept_symbol(".")) return ColumnRef{a, identifier("column name")};
    return ColumnRef{"", a};
  }

  SelectItem select_item() {
    const SqlToken& t = peek();
    bool is_sum = is_keyword(t, "sum");
    bool is_count = is_keyword(t, "count");
    if ((is_sum || is_count) && toks_[i_ + 1].kind == SqlToken::Kind::Symbol && toks_[i_ + 1].text == "(") {
      i_ += 2;
      SelectItem s;
      s.agg = is_sum ? AggFunc::Sum : AggFunc::Count;
      if (accept_symbol("*")) {
        if (is_sum) fail("sum(*) is not supported");
      } else {
        s.column = column_ref();
      }
      expect_symbol(")");
      return s;
    }
    return SelectItem{std::nullopt, column_ref()};
  }

  CompareOp compare_op() {
    const SqlToken& t = peek();
    if (is_keyword(t, "LIKE")) {
      ++i_;
      return CompareOp::LIKE;
    }
    if (t.kind == SqlToken::Kind::Symbol) {
      if (auto op = parse_compare_op(t.text)) {
        ++i_;
        return *op;
      }
    }
    fail("expected comparison operator");
  }

  SqlOperand operand() {
    const SqlToken& t = peek();
    if (t.kind == SqlToken::Kind::Number) {
      auto n = parse_number(t.text);
      if (!n) fail("bad number '" + t.text + "'");
      ++i_;
      return Value{*n};
    }
    if (t.kind == SqlToken::Kind::String) {
      ++i_;
      return Value{t.text};
    }
    if (is_keyword(t, "NULL")) {
      ++i_;
      return Value{};
    }
    if (is_keyword(t, "DATE") && toks_[i_ + 1].kind == SqlToken::Kind::String) {
      auto d = parse_date(toks_[i_ + 1].text);
      if (!d) fail("bad date literal '" + toks_[i_ + 1].text + "'");
      i_ += 2;
      return Value{*d};
    }
    return column_ref();
  }

  Comparison comparison() {
    Comparison c;
    c.left = column_ref();
    c.op = compare_op();
    c.right = operand();
    return c;
  }

  Condition condition() {
    Condition c;
    if (accept_symbol("(")) {
      do c.disjuncts.push_back(comparison());
      while (accept_keyword("OR"));
      expect_symbol(")");
    } else {
      c.disjuncts.push_back(comparison());
      if (is_keyword(peek(), "OR")) fail("OR must be parenthesized");
    }
    return c;
  }

  std::vector<SqlToken> toks_;
  size_t i_ = 0;
};

}  // namespace

SqlStatement parse_sql(std::string_view text) { return SqlParser(text).statement(); }

}  // namespace ksdw
