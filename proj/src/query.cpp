#include "ksdw/query.hpp"

#include <algorithm>
#include <cctype>

#include "ksdw/text.hpp"

namespace ksdw {

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::GT: return ">";
    case CompareOp::GE: return ">=";
    case CompareOp::EQ: return "=";
    case CompareOp::LE: return "<=";
    case CompareOp::LT: return "<";
    case CompareOp::LIKE: return "LIKE";
  }
  return "=";
}

std::optional<CompareOp> parse_compare_op(std::string_view text) {
  if (text == ">") return CompareOp::GT;
  if (text == ">=") return CompareOp::GE;
  if (text == "=") return CompareOp::EQ;
  if (text == "<=") return CompareOp::LE;
  if (text == "<") return CompareOp::LT;
  if (iequals(text, "like")) return CompareOp::LIKE;
  return std::nullopt;
}

std::string_view to_string(AggFunc f) { return f == AggFunc::Sum ? "sum" : "count"; }

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_special(char c) { return c == '<' || c == '>' || c == '=' || c == '(' || c == ')' || c == '\'' || c == '"'; }

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<QueryToken> run() {
    std::vector<QueryToken> out;
    while (true) {
      skip_space();
      if (i_ >= s_.size()) break;
      char c = s_[i_];
      if (c == '<' || c == '>' || c == '=') {
        std::string op(1, c);
        if ((c == '<' || c == '>') && i_ + 1 < s_.size() && s_[i_ + 1] == '=') op.push_back('=');
        i_ += op.size();
        if (i_ < s_.size() && (s_[i_] == '<' || s_[i_] == '>' || s_[i_] == '='))
          throw QueryError("unsupported comparison operator '" + op + s_[i_] + "'");
        out.push_back({QueryToken::Kind::Compare, op, *parse_compare_op(op)});
      } else if (c == '\'' || c == '"') {
        out.push_back({QueryToken::Kind::Quoted, quoted(c)});
      } else if (c == '(' || c == ')') {
        throw QueryError(std::string("unexpected '") + c +
                         "': parentheses only follow sum, count, group by and date");
      } else {
        out.push_back(word_token(read_word()));
      }
    }
    return out;
  }

 private:
  void skip_space() {
    while (i_ < s_.size() && is_space(s_[i_])) ++i_;
  }

  std::string read_word() {
    size_t start = i_;
    while (i_ < s_.size() && !is_space(s_[i_]) && !is_special(s_[i_])) ++i_;
    return std::string(s_.substr(start, i_ - start));
  }

  std::string quoted(char q) {
    ++i_;
    std::string out;
    while (i_ < s_.size()) {
      if (s_[i_] == q) {
        if (i_ + 1 < s_.size() && s_[i_ + 1] == q) {
          out.push_back(q);
          i_ += 2;
          continue;
        }
        ++i_;
        return out;
      }
      out.push_back(s_[i_++]);
    }
    throw QueryError("unterminated quoted string");
  }

  // Peeks past whitespace for '(' without consuming.
  bool paren_follows() const {
    size_t j = i_;
    while (j < s_.size() && is_space(s_[j])) ++j;
    return j < s_.size() && s_[j] == '(';
  }

  std::string paren_argument(std::string_view op) {
    skip_space();
    ++i_;  // '('
    size_t start = i_;
    while (i_ < s_.size() && s_[i_] != ')') {
      if (s_[i_] == '(') throw QueryError("unbalanced parentheses in " + std::string(op) + "(...)");
      ++i_;
    }
    if (i_ >= s_.size()) throw QueryError("unbalanced parentheses in " + std::string(op) + "(...)");
    std::string arg = trim(s_.substr(start, i_ - start));
    ++i_;  // ')'
    return arg;
  }

  // Next word without consuming it.
  std::string peek_word() const {
    size_t j = i_;
    while (j < s_.size() && is_space(s_[j])) ++j;
    size_t start = j;
    while (j < s_.size() && !is_space(s_[j]) && !is_special(s_[j])) ++j;
    return std::string(s_.substr(start, j - start));
  }

  void consume_word() {
    skip_space();
    read_word();
  }

  QueryToken word_token(std::string w) {
    std::string lw = to_lower_ascii(w);
    if (lw == "and") return {QueryToken::Kind::And, w};
    if (lw == "or") return {QueryToken::Kind::Or, w};
    if (lw == "like") return {QueryToken::Kind::Compare, "LIKE", CompareOp::LIKE};
    if ((lw == "sum" || lw == "count") && paren_follows()) {
      QueryToken t{QueryToken::Kind::Aggregate, paren_argument(lw)};
      t.func = lw == "sum" ? AggFunc::Sum : AggFunc::Count;
      return t;
    }
    if (lw == "date" && paren_follows()) return {QueryToken::Kind::DateLiteral, paren_argument("date")};
    if (lw == "group" && iequals(peek_word(), "by")) {
      size_t save = i_;
      consume_word();
      if (paren_follows()) return {QueryToken::Kind::GroupBy, paren_argument("group by")};
      i_ = save;
    }
    if (lw == "select" && iequals(peek_word(), "count")) {
      size_t save = i_;
      consume_word();
      if (paren_follows()) {
        std::string arg = paren_argument("count");
        QueryToken t{QueryToken::Kind::Aggregate, arg.empty() ? "*" : arg};
        t.func = AggFunc::Count;
        return t;
      }
      i_ = save;
    }
    if (lw == "top") {
      std::string n = peek_word();
      if (!n.empty() && std::all_of(n.begin(), n.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        consume_word();
        return {QueryToken::Kind::Top, n};
      }
    }
    return {QueryToken::Kind::Word, w};
  }

  std::string_view s_;
  size_t i_ = 0;
};

KeywordGroup split_words(std::string_view text) {
  KeywordGroup out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::vector<QueryToken> tokenize(std::string_view raw) {
  if (trim(raw).empty()) throw QueryError("empty query");
  return Lexer(raw).run();
}

QueryAst parse_query(const std::vector<QueryToken>& tokens) {
  using Kind = QueryToken::Kind;
  if (tokens.empty()) throw QueryError("empty query");

  enum class Item { None, Group, Predicate, Aggregation };
  QueryAst ast;
  KeywordGroup current;
  Item last = Item::None;
  std::optional<Connective> pending;
  std::optional<int> top;

  auto finish_group = [&] {
    if (current.empty()) return;
    if (last == Item::Group && !ast.keyword_groups.empty())
      ast.connectives.push_back(pending.value_or(Connective::And));
    else if (pending == Connective::Or)
      throw QueryError("'or' is only supported between two keyword groups");
    ast.keyword_groups.push_back(std::move(current));
    current.clear();
    pending.reset();
    last = Item::Group;
  };

  for (size_t i = 0; i < tokens.size(); ++i) {
    const QueryToken& t = tokens[i];
    switch (t.kind) {
      case Kind::Word:
      case Kind::Quoted:
        current.push_back(t.text);
        break;
      case Kind::And:
      case Kind::Or: {
        bool has_left = !current.empty() || last != Item::None;
        finish_group();
        if (!has_left) throw QueryError("'" + t.text + "' needs keywords on its left");
        if (i + 1 == tokens.size()) throw QueryError("'" + t.text + "' needs keywords on its right");
        pending = t.kind == Kind::And ? Connective::And : Connective::Or;
        break;
      }
      case Kind::Compare: {
        if (current.empty())
          throw QueryError("comparison operator '" + std::string(to_string(t.op)) + "' is missing its left operand");
        if (pending == Connective::Or) throw QueryError("'or' is only supported between two keyword groups");
        pending.reset();
        Predicate p;
        p.left = std::move(current);
        current.clear();
        p.op = t.op;
        if (i + 1 >= tokens.size())
          throw QueryError("comparison operator '" + std::string(to_string(t.op)) + "' is missing its right operand");
        const QueryToken& r = tokens[i + 1];
        if (r.kind == Kind::DateLiteral) {
          auto d = parse_date(r.text);
          if (!d) throw QueryError("invalid date literal date(" + r.text + "); expected a calendar date YYYY-MM-DD");
          p.right = *d;
          ++i;
        } else if (r.kind == Kind::Word && p.op != CompareOp::LIKE && parse_number(r.text)) {
          p.right = *parse_number(r.text);
          ++i;
        } else if (r.kind == Kind::Word || r.kind == Kind::Quoted) {
          KeywordGroup words;
          while (i + 1 < tokens.size() && (tokens[i + 1].kind == Kind::Word || tokens[i + 1].kind == Kind::Quoted)) {
            words.push_back(tokens[i + 1].text);
            ++i;
          }
          p.right = std::move(words);
        } else {
          throw QueryError("comparison operator '" + std::string(to_string(t.op)) + "' is missing its right operand");
        }
        ast.predicates.push_back(std::move(p));
        last = Item::Predicate;
        break;
      }
      case Kind::Aggregate: {
        finish_group();
        if (ast.aggregation) throw QueryError("only one aggregation operator is allowed");
        AggregationSpec spec;
        spec.func = t.func;
        spec.attribute = split_words(t.text);
        if (spec.attribute.empty())
          throw QueryError(std::string(to_string(t.func)) + "() needs an aggregation attribute");
        if (spec.counts_rows() && spec.func == AggFunc::Sum) throw QueryError("sum(*) is not supported");
        spec.top = top;
        top.reset();
        ast.aggregation = std::move(spec);
        last = Item::Aggregation;
        break;
      }
      case Kind::GroupBy: {
        finish_group();
        if (!ast.aggregation) throw QueryError("group by needs a preceding sum(...) or count(...)");
        if (!ast.aggregation->group_by.empty()) throw QueryError("only one group by clause is allowed");
        std::string_view arg = t.text;
        size_t start = 0;
        while (start <= arg.size()) {
          size_t comma = arg.find(',', start);
          if (comma == std::string_view::npos) comma = arg.size();
          KeywordGroup g = split_words(arg.substr(start, comma - start));
          if (g.empty()) throw QueryError("group by has an empty attribute");
          ast.aggregation->group_by.push_back(std::move(g));
          start = comma + 1;
        }
        break;
      }
      case Kind::DateLiteral:
        throw QueryError("date(" + t.text + ") must follow a comparison operator");
      case Kind::Top:
        finish_group();
        if (ast.aggregation || top) throw QueryError("'top " + t.text + "' must precede the aggregation operator");
        top = std::stoi(t.text);
        if (*top < 1) throw QueryError("top N needs N >= 1");
        break;
    }
  }
  finish_group();
  if (top) throw QueryError("'top N' needs an aggregation operator such as sum(...) or count(...)");
  if (ast.keyword_groups.empty() && ast.predicates.empty() && !ast.aggregation)
    throw QueryError("query has no keywords, predicates or aggregation");
  return ast;
}

namespace {

bool needs_quotes(const std::string& w, bool numeric_sensitive) {
  static const char* kReserved[] = {"and", "or", "like", "sum", "count", "date", "group", "by", "select", "top"};
  if (w.empty()) return true;
  for (const char* r : kReserved)
    if (iequals(w, r)) return true;
  for (char c : w)
    if (is_space(c) || is_special(c)) return true;
  return numeric_sensitive && parse_number(w).has_value();
}

std::string render_word(const std::string& w, bool numeric_sensitive = false) {
  if (!needs_quotes(w, numeric_sensitive)) return w;
  std::string out = "'";
  for (char c : w) {
    if (c == '\'') out += "''";
    else out.push_back(c);
  }
  return out + "'";
}

std::string render_group(const KeywordGroup& g, bool numeric_sensitive = false) {
  std::string out;
  for (size_t i = 0; i < g.size(); ++i) {
    if (i) out += ' ';
    out += render_word(g[i], numeric_sensitive);
  }
  return out;
}

}  // namespace

std::string render_query(const QueryAst& ast) {
  std::vector<std::string> parts;
  if (ast.aggregation) {
    const auto& a = *ast.aggregation;
    std::string s;
    if (a.top) s += "top " + std::to_string(*a.top) + " ";
    s += std::string(to_string(a.func)) + " (" + (a.counts_rows() ? "*" : join(a.attribute, " ")) + ")";
    parts.push_back(std::move(s));
  }
  std::string groups;
  for (size_t i = 0; i < ast.keyword_groups.size(); ++i) {
    if (i) groups += (i - 1 < ast.connectives.size() && ast.connectives[i - 1] == Connective::Or) ? " or " : " and ";
    groups += render_group(ast.keyword_groups[i]);
  }
  std::string preds;
  for (size_t i = 0; i < ast.predicates.size(); ++i) {
    const Predicate& p = ast.predicates[i];
    if (i) preds += " and ";
    preds += render_group(p.left) + " " + (p.op == CompareOp::LIKE ? "like" : std::string(to_string(p.op))) + " ";
    if (const auto* d = std::get_if<Date>(&p.right)) preds += "date(" + to_string(*d) + ")";
    else if (const auto* n = std::get_if<double>(&p.right)) preds += format_number(*n);
    else {
      const auto& g = std::get<KeywordGroup>(p.right);
      // A bare multi-word right operand would swallow following words; quote each word
      // group that could be misread.
      preds += render_group(g, true);
    }
  }
  if (!groups.empty() && !preds.empty()) parts.push_back(groups + " and " + preds);
  else if (!groups.empty()) parts.push_back(groups);
  else if (!preds.empty()) parts.push_back(preds);
  if (ast.aggregation && !ast.aggregation->group_by.empty()) {
    std::string gb = "group by (";
    for (size_t i = 0; i < ast.aggregation->group_by.size(); ++i) {
      if (i) gb += ", ";
      gb += join(ast.aggregation->group_by[i], " ");
    }
    parts.push_back(gb + ")");
  }
  return join(parts, " ");
}

}  // namespace ksdw
