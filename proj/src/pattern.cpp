#include "ksdw/pattern.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "builtin_patterns_data.hpp"
#include "ksdw/text.hpp"

namespace ksdw {

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_short_variable(std::string_view tok) {
  if (tok.empty() || !std::isalpha(static_cast<unsigned char>(tok[0]))) return false;
  return std::all_of(tok.begin() + 1, tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_variable_name(std::string_view tok) {
  if (tok.empty() || !std::isalpha(static_cast<unsigned char>(tok[0]))) return false;
  return std::all_of(tok.begin(), tok.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::vector<std::string> lex(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')' || c == '&') {
      out.emplace_back(1, c);
      ++i;
    } else {
      size_t start = i;
      bool quoted = false;
      while (i < text.size()) {
        char d = text[i];
        if (d == '"') quoted = !quoted;
        if (!quoted && (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '&')) break;
        ++i;
      }
      if (quoted) throw PatternError("unterminated quoted label");
      out.emplace_back(text.substr(start, i - start));
    }
  }
  return out;
}

PatternTerm parse_term(const std::string& tok, bool subject_position) {
  PatternTerm term;
  if (tok.rfind("t:", 0) == 0) {
    if (subject_position) throw PatternError("text label '" + tok + "' cannot be a clause subject");
    std::string rest = tok.substr(2);
    if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"') {
      term.kind = PatternTerm::Kind::TextLabel;
      term.value = rest.substr(1, rest.size() - 2);
    } else if (is_variable_name(rest)) {
      term.kind = PatternTerm::Kind::Variable;
      term.value = rest;
      term.label_only = true;
    } else {
      throw PatternError("malformed text label term '" + tok + "'");
    }
    return term;
  }
  if (tok.front() == '?') {
    if (!is_variable_name(tok.substr(1))) throw PatternError("malformed variable '" + tok + "'");
    term.kind = PatternTerm::Kind::Variable;
    term.value = tok.substr(1);
    return term;
  }
  if (tok.front() == '<') {
    if (tok.size() < 3 || tok.back() != '>') throw PatternError("malformed node reference '" + tok + "'");
    term.kind = PatternTerm::Kind::StaticNode;
    term.value = tok.substr(1, tok.size() - 2);
    return term;
  }
  if (is_short_variable(tok)) {
    term.kind = PatternTerm::Kind::Variable;
    term.value = tok;
    return term;
  }
  term.kind = PatternTerm::Kind::StaticNode;
  term.value = tok;
  return term;
}

std::string parse_predicate(const std::string& tok) {
  if (tok.rfind("t:", 0) == 0 || tok.front() == '?' || is_short_variable(tok))
    throw PatternError("predicate '" + tok + "' must be a static edge label, not a variable");
  if (tok.front() == '<') {
    if (tok.size() < 3 || tok.back() != '>') throw PatternError("malformed predicate '" + tok + "'");
    return tok.substr(1, tok.size() - 2);
  }
  return tok;
}

// Union-find over variable names for the connectivity check.
struct VarGroups {
  std::map<std::string, std::string> parent;
  std::string find(const std::string& v) {
    auto it = parent.find(v);
    if (it == parent.end()) {
      parent[v] = v;
      return v;
    }
    if (it->second == v) return v;
    std::string root = find(it->second);
    parent[v] = root;
    return root;
  }
  void unite(const std::string& a, const std::string& b) { parent[find(a)] = find(b); }
};

void check_connected(const Pattern& p) {
  VarGroups groups;
  bool has_root = false;
  for (const auto& clause : p.clauses) {
    if (const auto* e = std::get_if<EdgeClause>(&clause)) {
      bool sv = e->subject.kind == PatternTerm::Kind::Variable;
      bool ov = e->object.kind == PatternTerm::Kind::Variable;
      if (sv) groups.find(e->subject.value);
      if (ov) groups.find(e->object.value);
      if (sv && ov) groups.unite(e->subject.value, e->object.value);
      has_root |= (sv && e->subject.value == kRootVariable) || (ov && e->object.value == kRootVariable);
    } else {
      const auto& r = std::get<ReferenceClause>(clause);
      groups.find(r.variable);
      has_root |= r.variable == kRootVariable;
    }
  }
  if (!has_root) throw PatternError("pattern '" + p.name + "' never mentions the root variable x");
  std::string root = groups.find(std::string(kRootVariable));
  for (const auto& v : p.variables())
    if (groups.find(v) != root)
      throw PatternError("variable '" + v + "' in pattern '" + p.name + "' is not connected to x");
}

}  // namespace

std::vector<std::string> Pattern::variables() const {
  std::vector<std::string> out{std::string(kRootVariable)};
  auto add = [&](const std::string& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  for (const auto& clause : clauses) {
    if (const auto* e = std::get_if<EdgeClause>(&clause)) {
      if (e->subject.kind == PatternTerm::Kind::Variable) add(e->subject.value);
      if (e->object.kind == PatternTerm::Kind::Variable) add(e->object.value);
    } else {
      add(std::get<ReferenceClause>(clause).variable);
    }
  }
  return out;
}

Pattern parse_pattern(std::string_view name, std::string_view text) {
  Pattern p;
  p.name = std::string(name);
  std::vector<std::string> toks = lex(text);
  size_t i = 0;
  auto expect = [&](const char* what) {
    if (i >= toks.size() || toks[i] != what)
      throw PatternError("pattern '" + p.name + "': expected '" + what + "'" +
                         (i < toks.size() ? " near '" + toks[i] + "'" : " at end of input"));
    ++i;
  };
  while (true) {
    expect("(");
    std::vector<std::string> inner;
    while (i < toks.size() && toks[i] != ")") {
      if (toks[i] == "(" || toks[i] == "&") throw PatternError("pattern '" + p.name + "': unbalanced parentheses");
      inner.push_back(toks[i++]);
    }
    if (i >= toks.size()) throw PatternError("pattern '" + p.name + "': unbalanced parentheses");
    ++i;  // ')'
    if (inner.size() == 2 && inner[1].rfind("matches-", 0) == 0) {
      PatternTerm v = parse_term(inner[0], true);
      if (v.kind != PatternTerm::Kind::Variable)
        throw PatternError("pattern '" + p.name + "': matches- clause needs a variable subject");
      std::string ref = inner[1].substr(std::string_view("matches-").size());
      if (ref.empty()) throw PatternError("pattern '" + p.name + "': empty pattern reference");
      p.clauses.emplace_back(ReferenceClause{v.value, ref});
    } else if (inner.size() == 3) {
      EdgeClause e{parse_term(inner[0], true), parse_predicate(inner[1]), parse_term(inner[2], false)};
      p.clauses.emplace_back(std::move(e));
    } else {
      throw PatternError("pattern '" + p.name + "': clause needs subject, predicate and object");
    }
    if (i == toks.size()) break;
    expect("&");
  }
  check_connected(p);
  return p;
}

// ---------------------------------------------------------------------------
// Registry

void PatternRegistry::add(Pattern p) {
  if (patterns_.count(p.name)) throw PatternError("pattern '" + p.name + "' registered twice");
  for (const auto& clause : p.clauses) {
    if (const auto* r = std::get_if<ReferenceClause>(&clause)) {
      if (r->pattern == p.name) throw PatternError("pattern '" + p.name + "' references itself");
      if (!patterns_.count(r->pattern))
        throw PatternError("pattern '" + p.name + "' references unknown pattern '" + r->pattern + "'");
    }
  }
  order_.push_back(p.name);
  std::string key = p.name;
  patterns_.emplace(std::move(key), std::move(p));
}

bool PatternRegistry::contains(std::string_view name) const { return patterns_.find(name) != patterns_.end(); }

const Pattern& PatternRegistry::get(std::string_view name) const {
  auto it = patterns_.find(name);
  if (it == patterns_.end()) throw PatternError("unknown pattern '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> PatternRegistry::names() const { return order_; }

PatternRegistry load_patterns(std::string_view text) {
  PatternRegistry reg;
  std::istringstream in{std::string(text)};
  std::string line, name, body;
  auto flush = [&] {
    if (name.empty()) {
      if (!trim(body).empty()) throw PatternError("clause text outside a 'pattern <name>:' block");
      body.clear();
      return;
    }
    if (trim(body).empty()) throw PatternError("pattern '" + name + "' has no clauses");
    reg.add(parse_pattern(name, body));
    name.clear();
    body.clear();
  };
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty() && t.front() == '#') continue;
    if (t.empty()) {
      if (!name.empty() && !trim(body).empty()) flush();
      continue;
    }
    if (t.rfind("pattern ", 0) == 0 && t.back() == ':') {
      flush();
      name = trim(std::string_view(t).substr(8, t.size() - 9));
      if (name.empty()) throw PatternError("pattern header without a name");
      continue;
    }
    body += t;
    body += ' ';
  }
  flush();
  return reg;
}

PatternRegistry load_patterns_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PatternError("pattern file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_patterns(ss.str());
}

std::string_view builtin_patterns_source() { return kBuiltinPatternSource; }

const PatternRegistry& builtin_patterns() {
  static const PatternRegistry reg = load_patterns(kBuiltinPatternSource);
  return reg;
}

// ---------------------------------------------------------------------------
// Matching: depth-first over clauses in source order with backtracking.

namespace {

class Matcher {
 public:
  Matcher(const MetadataGraph& g, const PatternRegistry& reg, const Pattern& p, bool first_only)
      : g_(g), reg_(reg), p_(p), first_only_(first_only) {}

  std::vector<Binding> run(const NodeId& n) {
    if (!g_.has_node(n)) return {};
    Binding b;
    b.emplace(std::string(kRootVariable), n);
    dfs(0, b);
    return std::move(out_);
  }

 private:
  bool done() const { return first_only_ && !out_.empty(); }

  bool distinct_ok(const std::string& var, const GraphTerm& value, const Binding& b) const {
    if (var == kRootVariable) return true;
    for (const auto& [name, bound] : b)
      if (name != kRootVariable && name != var && bound == value) return false;
    return true;
  }

  // Unifies term with value; returns the variable newly bound (empty if none) or nullopt on failure.
  std::optional<std::string> unify(const PatternTerm& term, const GraphTerm& value, Binding& b) const {
    switch (term.kind) {
      case PatternTerm::Kind::StaticNode: {
        const auto* n = std::get_if<NodeId>(&value);
        if (n && n->uri == term.value) return std::string();
        return std::nullopt;
      }
      case PatternTerm::Kind::TextLabel: {
        const auto* l = std::get_if<TextLabel>(&value);
        if (l && l->text == term.value) return std::string();
        return std::nullopt;
      }
      case PatternTerm::Kind::Variable: {
        auto it = b.find(term.value);
        if (it != b.end()) return it->second == value ? std::optional<std::string>(std::string()) : std::nullopt;
        if (term.label_only != std::holds_alternative<TextLabel>(value)) return std::nullopt;
        if (!distinct_ok(term.value, value, b)) return std::nullopt;
        b.emplace(term.value, value);
        return term.value;
      }
    }
    return std::nullopt;
  }

  // Value of a term if it is fixed under the current binding.
  std::optional<GraphTerm> resolved(const PatternTerm& term, const Binding& b) const {
    switch (term.kind) {
      case PatternTerm::Kind::StaticNode: return GraphTerm{NodeId{term.value}};
      case PatternTerm::Kind::TextLabel: return GraphTerm{TextLabel{term.value}};
      case PatternTerm::Kind::Variable: {
        auto it = b.find(term.value);
        if (it == b.end()) return std::nullopt;
        return it->second;
      }
    }
    return std::nullopt;
  }

  void try_triple(size_t ci, const EdgeClause& e, const Triple& t, Binding& b) {
    if (t.predicate != e.predicate) return;
    auto s = unify(e.subject, GraphTerm{t.subject}, b);
    if (!s) return;
    auto o = unify(e.object, t.object, b);
    if (o) {
      dfs(ci + 1, b);
      if (!o->empty()) b.erase(*o);
    }
    if (!s->empty()) b.erase(*s);
  }

  void dfs(size_t ci, Binding& b) {
    if (done()) return;
    if (ci == p_.clauses.size()) {
      out_.push_back(b);
      return;
    }
    const auto& clause = p_.clauses[ci];
    if (const auto* r = std::get_if<ReferenceClause>(&clause)) {
      const Pattern& sub = reg_.get(r->pattern);
      auto check = [&](const NodeId& node) { return Matcher(g_, reg_, sub, true).run(node).size() == 1; };
      auto it = b.find(r->variable);
      if (it != b.end()) {
        const auto* node = std::get_if<NodeId>(&it->second);
        if (node && check(*node)) dfs(ci + 1, b);
        return;
      }
      for (const NodeId& node : g_.nodes()) {
        GraphTerm value{node};
        if (!distinct_ok(r->variable, value, b) || !check(node)) continue;
        b.emplace(r->variable, value);
        dfs(ci + 1, b);
        b.erase(r->variable);
        if (done()) return;
      }
      return;
    }

    const auto& e = std::get<EdgeClause>(clause);
    const auto& triples = g_.triples();
    auto subj = resolved(e.subject, b);
    if (subj) {
      const auto* node = std::get_if<NodeId>(&*subj);
      if (!node || !g_.has_node(*node)) return;
      for (size_t idx : g_.outgoing_ids(*node)) {
        try_triple(ci, e, triples[idx], b);
        if (done()) return;
      }
      return;
    }
    auto obj = resolved(e.object, b);
    if (obj) {
      if (const auto* node = std::get_if<NodeId>(&*obj)) {
        if (!g_.has_node(*node)) return;
        for (size_t idx : g_.incoming_ids(*node)) {
          try_triple(ci, e, triples[idx], b);
          if (done()) return;
        }
        return;
      }
    }
    for (const Triple& t : triples) {
      try_triple(ci, e, t, b);
      if (done()) return;
    }
  }

  const MetadataGraph& g_;
  const PatternRegistry& reg_;
  const Pattern& p_;
  bool first_only_;
  std::vector<Binding> out_;
};

}  // namespace

std::vector<Binding> match_at(const MetadataGraph& g, const PatternRegistry& reg, const Pattern& p,
                              const NodeId& n) {
  auto out = Matcher(g, reg, p, false).run(n);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool matches(const MetadataGraph& g, const PatternRegistry& reg, const Pattern& p, const NodeId& n) {
  return !Matcher(g, reg, p, true).run(n).empty();
}

std::vector<std::pair<NodeId, Binding>> match_all(const MetadataGraph& g, const PatternRegistry& reg,
                                                  const Pattern& p) {
  std::vector<std::pair<NodeId, Binding>> out;
  for (const NodeId& n : g.nodes())
    for (auto& b : match_at(g, reg, p, n)) out.emplace_back(n, std::move(b));
  return out;
}

}  // namespace ksdw
