#include "ksdw/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "ksdw/text.hpp"

namespace ksdw {

constexpr size_t kNoGroup = static_cast<size_t>(-1);

double LayerWeights::weight(Layer l) const {
  switch (l) {
    case Layer::Ontology: return ontology;
    case Layer::Conceptual: return conceptual;
    case Layer::Logical: return logical;
    case Layer::Physical: return physical;
    case Layer::BaseData:
    case Layer::BaseDataRef: return base_data;
    case Layer::Synonym: return synonym;
  }
  return physical;
}

std::string_view to_string(SlotRole r) {
  switch (r) {
    case SlotRole::Keyword: return "keyword";
    case SlotRole::PredicateLeft: return "predicate";
    case SlotRole::AggAttribute: return "aggregation";
    case SlotRole::GroupBy: return "group-by";
  }
  return "keyword";
}

std::string_view to_string(FilterSource s) {
  switch (s) {
    case FilterSource::Query: return "query";
    case FilterSource::BaseData: return "base-data";
    case FilterSource::Metadata: return "metadata";
  }
  return "query";
}

Condition FilterCondition::condition() const {
  Condition c;
  for (const auto& v : values) c.disjuncts.push_back(Comparison{target, op, v});
  return c;
}

LookupResult lookup(const QueryAst& ast, const SearchContext& ctx, const PipelineOptions& opts) {
  LookupResult r;
  bool mandatory_missing = false;

  auto add = [&](const KeywordGroup& words, SlotRole last_role, size_t source, bool mandatory, const std::string& what) {
    auto cls = classify(ctx.classification, ctx.inverted, ctx.store, words);
    for (const auto& w : cls.unmatched) r.unmatched.push_back(w);
    if (cls.groups.empty()) {
      r.diagnostics.push_back(what + " '" + join(words, " ") + "' matched nothing");
      if (mandatory) mandatory_missing = true;
      return;
    }
    if (!cls.unmatched.empty())
      r.diagnostics.push_back("ignored unmatched words in " + what + ": " + join(cls.unmatched, " "));
    for (size_t i = 0; i < cls.groups.size(); ++i) {
      auto& g = cls.groups[i];
      bool last = i + 1 == cls.groups.size();
      Slot s;
      s.role = last ? last_role : SlotRole::Keyword;
      s.source = (s.role == SlotRole::Keyword && last_role != SlotRole::Keyword) ? kNoGroup : source;
      s.words.assign(words.begin() + g.begin, words.begin() + g.end);
      s.alternatives = std::move(g.entries);
      r.slots.push_back(std::move(s));
    }
  };

  for (size_t i = 0; i < ast.keyword_groups.size(); ++i) add(ast.keyword_groups[i], SlotRole::Keyword, i, false, "keywords");
  for (size_t i = 0; i < ast.predicates.size(); ++i)
    add(ast.predicates[i].left, SlotRole::PredicateLeft, i, false, "predicate operand");
  if (ast.aggregation) {
    if (!ast.aggregation->counts_rows())
      add(ast.aggregation->attribute, SlotRole::AggAttribute, 0, true, "aggregation attribute");
    for (size_t i = 0; i < ast.aggregation->group_by.size(); ++i)
      add(ast.aggregation->group_by[i], SlotRole::GroupBy, i, true, "group-by attribute");
  }

  if (r.slots.empty() || mandatory_missing) return r;
  uint64_t product = 1;
  bool overflow = false;
  for (const auto& s : r.slots) {
    uint64_t n = s.alternatives.size();
    if (product > UINT64_MAX / n) overflow = true;
    product = overflow ? UINT64_MAX : product * n;
  }
  r.complexity = product;
  uint64_t limit = std::min<uint64_t>(product, opts.max_interpretations);
  if (limit < product)
    r.diagnostics.push_back("complexity " + std::to_string(product) + " exceeds the limit; only the first " +
                            std::to_string(limit) + " interpretations are considered");

  std::vector<size_t> odo(r.slots.size(), 0);
  for (uint64_t k = 0; k < limit; ++k) {
    Interpretation in;
    in.ordinal = static_cast<size_t>(k);
    for (size_t s = 0; s < r.slots.size(); ++s) in.entries.push_back(r.slots[s].alternatives[odo[s]]);
    r.interpretations.push_back(std::move(in));
    for (size_t s = r.slots.size(); s-- > 0;) {
      if (++odo[s] < r.slots[s].alternatives.size()) break;
      odo[s] = 0;
    }
  }
  return r;
}

uint64_t complexity(const QueryAst& ast, const SearchContext& ctx) {
  PipelineOptions opts;
  opts.max_interpretations = 0;
  return lookup(ast, ctx, opts).complexity;
}

double score(const Interpretation& i, const LayerWeights& w) {
  if (i.entries.empty()) return 0;
  double sum = 0;
  for (const auto& e : i.entries) sum += w.weight(e.layer);
  return sum / static_cast<double>(i.entries.size());
}

std::vector<RankedInterpretation> rank(const std::vector<Interpretation>& interps, size_t n, const LayerWeights& w,
                                       size_t offset) {
  std::vector<RankedInterpretation> all;
  all.reserve(interps.size());
  for (const auto& i : interps) all.push_back({i, score(i, w)});
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  if (offset >= all.size()) return {};
  size_t end = std::min(all.size(), offset + n);
  return {std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(offset)),
          std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(end))};
}

namespace {

template <typename T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

class TableCollector {
 public:
  TableCollector(const SearchContext& ctx, TableDiscovery& d) : ctx_(ctx), d_(d) {}

  void add_table(const std::string& name, bool direct) {
    if (direct) push_unique(d_.direct_tables, name);
    if (std::find(d_.tables.begin(), d_.tables.end(), name) != d_.tables.end()) return;
    if (!active_.insert(name).second) return;
    if (const CatalogTable* t = ctx_.catalog.find_table(name)) {
      for (const auto& parent : t->parents) {
        push_unique(d_.inheritance, std::make_pair(parent, name));
        add_table(parent, false);
      }
    }
    active_.erase(name);
    push_unique(d_.tables, name);
  }

 private:
  const SearchContext& ctx_;
  TableDiscovery& d_;
  std::set<std::string> active_;
};

}  // namespace

TableDiscovery discover_tables(const SearchContext& ctx, const std::vector<EntryPoint>& entries) {
  TableDiscovery d;
  TableCollector tables(ctx, d);
  const Pattern& filter_pattern = ctx.patterns.get(patterns::kMetadataFilter);

  for (const auto& e : entries) {
    EntryReach reach;
    if (!e.is_metadata()) {
      const auto& h = e.hit();
      tables.add_table(h.table, true);
      push_unique(reach.tables, h.table);
      ColumnRef c{h.table, h.column};
      push_unique(reach.columns, c);
      push_unique(d.columns, c);
      d.reach.push_back(std::move(reach));
      continue;
    }
    if (!ctx.graph.has_node(e.node())) throw UnknownNodeError(e.node().uri);
    std::deque<NodeId> queue{e.node()};
    std::set<NodeId> visited{e.node()};
    while (!queue.empty()) {
      NodeId n = std::move(queue.front());
      queue.pop_front();
      if (const CatalogTable* t = ctx.catalog.table_by_node(n)) {
        tables.add_table(t->name, true);
        push_unique(reach.tables, t->name);
        continue;
      }
      if (auto c = ctx.catalog.column_by_node(n)) {
        tables.add_table(c->table, true);
        push_unique(reach.columns, *c);
        push_unique(d.columns, *c);
        continue;
      }
      if (matches(ctx.graph, ctx.patterns, filter_pattern, n)) push_unique(d.filter_nodes, n);
      for (size_t i : ctx.graph.outgoing_ids(n)) {
        const auto* obj = std::get_if<NodeId>(&ctx.graph.triples()[i].object);
        if (obj && visited.insert(*obj).second) queue.push_back(*obj);
      }
    }
    d.reach.push_back(std::move(reach));
  }
  return d;
}

namespace {

struct JoinGraph {
  std::vector<JoinCondition> edges;
  std::map<std::string, std::vector<size_t>> adj;

  explicit JoinGraph(const SchemaCatalog& cat) {
    for (const auto& j : cat.joins()) {
      if (iequals(j.left.table, j.right.table)) continue;
      adj[j.left.table].push_back(edges.size());
      adj[j.right.table].push_back(edges.size());
      edges.push_back(j);
    }
  }

  const std::string& other(size_t e, const std::string& t) const {
    return edges[e].left.table == t ? edges[e].right.table : edges[e].left.table;
  }

  std::map<std::string, size_t> distances(const std::string& from) const {
    std::map<std::string, size_t> dist{{from, 0}};
    std::deque<std::string> q{from};
    while (!q.empty()) {
      std::string t = q.front();
      q.pop_front();
      auto it = adj.find(t);
      if (it == adj.end()) continue;
      for (size_t e : it->second) {
        const std::string& u = other(e, t);
        if (dist.emplace(u, dist[t] + 1).second) q.push_back(u);
      }
    }
    return dist;
  }

  // Every shortest path from `a` to `b` as a list of edges, at most `cap` of them.
  std::vector<std::vector<size_t>> shortest_paths(const std::string& a, const std::string& b, size_t cap) const {
    auto dist = distances(a);
    std::vector<std::vector<size_t>> out;
    if (!dist.count(b)) return out;
    std::vector<size_t> path;
    std::function<void(const std::string&)> walk = [&](const std::string& v) {
      if (out.size() >= cap) return;
      if (v == a) {
        out.emplace_back(path.rbegin(), path.rend());
        return;
      }
      auto it = adj.find(v);
      if (it == adj.end()) return;
      for (size_t e : it->second) {
        const std::string& u = other(e, v);
        auto du = dist.find(u);
        if (du == dist.end() || du->second + 1 != dist.at(v)) continue;
        path.push_back(e);
        walk(u);
        path.pop_back();
      }
    };
    walk(b);
    return out;
  }
};

}  // namespace

JoinDiscovery discover_joins(const SchemaCatalog& cat, const std::vector<std::string>& direct_tables,
                             const std::vector<std::pair<std::string, std::string>>& inheritance,
                             const std::vector<std::string>& table_order, size_t max_alternatives) {
  JoinDiscovery out;
  JoinGraph jg(cat);
  std::vector<std::string> direct;
  for (const auto& t : direct_tables) push_unique(direct, t);

  // Connectivity among the direct tables.
  if (direct.size() > 1) {
    std::vector<std::vector<std::string>> components;
    std::set<std::string> placed;
    for (const auto& t : direct) {
      if (placed.count(t)) continue;
      auto dist = jg.distances(t);
      std::vector<std::string> comp;
      for (const auto& u : direct)
        if (dist.count(u)) {
          comp.push_back(u);
          placed.insert(u);
        }
      components.push_back(std::move(comp));
    }
    if (components.size() > 1) {
      std::string msg = "tables are not connected by any join path:";
      for (size_t i = 0; i < components.size(); ++i) msg += (i ? " | {" : " {") + join(components[i], ", ") + "}";
      out.diagnostics.push_back(msg);
      return out;
    }
  }

  std::vector<std::set<size_t>> alts{{}};
  for (size_t i = 0; i < direct.size(); ++i) {
    for (size_t j = i + 1; j < direct.size(); ++j) {
      auto paths = jg.shortest_paths(direct[i], direct[j], max_alternatives);
      std::vector<std::set<size_t>> next;
      for (const auto& alt : alts) {
        for (const auto& p : paths) {
          std::set<size_t> merged = alt;
          merged.insert(p.begin(), p.end());
          if (std::find(next.begin(), next.end(), merged) == next.end()) next.push_back(std::move(merged));
          if (next.size() >= max_alternatives) break;
        }
        if (next.size() >= max_alternatives) break;
      }
      alts = std::move(next);
    }
  }

  std::vector<JoinCondition> extra;
  std::vector<std::string> extra_tables;
  for (const auto& b : cat.bridges()) {
    bool both = std::find(direct.begin(), direct.end(), b.left_table) != direct.end() &&
                std::find(direct.begin(), direct.end(), b.right_table) != direct.end();
    if (!both || std::find(direct.begin(), direct.end(), b.bridge) != direct.end()) continue;
    bool adjacent = false;
    for (const auto& e : jg.edges)
      if ((e.left.table == b.left_table && e.right.table == b.right_table) ||
          (e.left.table == b.right_table && e.right.table == b.left_table))
        adjacent = true;
    if (adjacent) continue;
    push_unique(extra, b.left_join);
    push_unique(extra, b.right_join);
    push_unique(extra_tables, b.bridge);
  }
  for (const auto& [parent, child] : inheritance) {
    bool found = false;
    for (const auto& e : cat.joins())
      if (e.kind == JoinKind::Inheritance && e.left.table == parent && e.right.table == child) {
        extra.push_back(e);
        found = true;
      }
    if (!found) out.diagnostics.push_back("no join condition for inheritance " + parent + " -> " + child);
    push_unique(extra_tables, parent);
  }

  for (const auto& alt : alts) {
    JoinPlan plan;
    std::vector<std::string> members = direct;
    for (size_t e : alt) {
      push_unique(members, jg.edges[e].left.table);
      push_unique(members, jg.edges[e].right.table);
    }
    for (const auto& t : extra_tables) push_unique(members, t);
    for (const auto& t : table_order)
      if (std::find(members.begin(), members.end(), t) != members.end()) push_unique(plan.tables, t);
    for (const auto& t : members) push_unique(plan.tables, t);

    std::vector<JoinCondition> joins;
    for (size_t e : alt) joins.push_back(jg.edges[e]);
    for (const auto& e : extra)  // the same condition can come from a path and a bridge with different kinds
      if (std::none_of(joins.begin(), joins.end(), [&](const auto& k) { return render(k) == render(e); })) joins.push_back(e);
    std::sort(joins.begin(), joins.end(), [](const auto& a, const auto& b) { return render(a) < render(b); });
    plan.joins = std::move(joins);
    out.alternatives.push_back(std::move(plan));
  }
  return out;
}

std::string candidate_id(const std::string& sql_text) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : sql_text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SqlStatement generate_sql(const Candidate& c, bool project_columns) {
  SqlStatement s;
  if (c.aggregation) {
    const auto& a = *c.aggregation;
    SelectItem agg{a.func, a.column};
    s.select.push_back(agg);
    for (const auto& g : a.group_by) s.select.push_back(SelectItem{std::nullopt, g});
    s.group_by = a.group_by;
    if (!a.group_by.empty() || a.top) s.order_by.push_back(OrderItem{agg, true});
    if (a.top) s.limit = static_cast<size_t>(*a.top);
  } else if (project_columns && !c.columns.empty()) {
    for (const auto& col : c.columns) s.select.push_back(SelectItem{std::nullopt, col});
  } else {
    s.select.push_back(SelectItem{});
  }
  s.from = c.tables;
  std::vector<Condition> joins;
  for (const auto& j : c.joins) joins.push_back(Condition{{j.comparison()}});
  std::sort(joins.begin(), joins.end(), [](const auto& a, const auto& b) { return render(a) < render(b); });
  s.where = std::move(joins);
  for (const auto& f : c.filters) s.where.push_back(f.condition());
  return s;
}

namespace {

std::optional<CompareOp> parse_filter_op(std::string_view text) {
  if (auto op = parse_compare_op(text)) return op;
  std::string t = to_lower_ascii(text);
  if (t == "gt") return CompareOp::GT;
  if (t == "ge") return CompareOp::GE;
  if (t == "eq") return CompareOp::EQ;
  if (t == "le") return CompareOp::LE;
  if (t == "lt") return CompareOp::LT;
  return std::nullopt;
}

std::optional<Value> typed_literal(const std::string& text, DataType t) {
  switch (t) {
    case DataType::Text: return Value{text};
    case DataType::Number:
      if (auto n = parse_number(trim(text))) return Value{*n};
      return std::nullopt;
    case DataType::Date:
      if (auto d = parse_date(trim(text))) return Value{*d};
      return std::nullopt;
  }
  return std::nullopt;
}

struct GroupSet {
  std::vector<bool> included;                      // per keyword group
  std::vector<std::pair<size_t, size_t>> merged;   // OR-ed groups folded into one filter
};

// Keyword-group slot of `group` when the group classified to exactly one base-data hit.
std::optional<size_t> single_base_data_slot(const LookupResult& lr, const Interpretation& in, size_t group) {
  std::optional<size_t> found;
  for (size_t s = 0; s < lr.slots.size(); ++s) {
    if (lr.slots[s].role != SlotRole::Keyword || lr.slots[s].source != group) continue;
    if (found || in.entries[s].is_metadata()) return std::nullopt;
    found = s;
  }
  return found;
}

// Connectives evaluated left to right: AND adds the next group to every alternative, OR
// starts a new alternative holding only the next group unless both sides are single
// base-data hits on the same column, which become one disjunctive filter.
std::vector<GroupSet> group_alternatives(const QueryAst& ast, const LookupResult& lr, const Interpretation& in) {
  size_t n = ast.keyword_groups.size();
  GroupSet first{std::vector<bool>(n, false), {}};
  if (n) first.included[0] = true;
  std::vector<GroupSet> sets{first};
  for (size_t k = 0; k + 1 < n; ++k) {
    Connective c = k < ast.connectives.size() ? ast.connectives[k] : Connective::And;
    size_t next = k + 1;
    bool merge = false;
    if (c == Connective::Or) {
      auto a = single_base_data_slot(lr, in, k), b = single_base_data_slot(lr, in, next);
      if (a && b) {
        const auto& ha = in.entries[*a].hit();
        const auto& hb = in.entries[*b].hit();
        merge = ha.table == hb.table && ha.column == hb.column;
      }
    }
    if (c == Connective::And || merge) {
      for (auto& s : sets) {
        s.included[next] = true;
        if (merge) s.merged.emplace_back(k, next);
      }
    } else {
      GroupSet alone{std::vector<bool>(n, false), {}};
      alone.included[next] = true;
      sets.push_back(std::move(alone));
    }
  }
  return sets;
}

class CandidateBuilder {
 public:
  CandidateBuilder(const QueryAst& ast, const LookupResult& lr, const SearchContext& ctx, const PipelineOptions& opts)
      : ast_(ast), lr_(lr), ctx_(ctx), opts_(opts) {}

  std::vector<Candidate> build(const RankedInterpretation& ri) {
    std::vector<Candidate> out;
    for (const auto& gs : group_alternatives(ast_, lr_, ri.interpretation)) build_for(ri, gs, out);
    return out;
  }

 private:
  void build_for(const RankedInterpretation& ri, const GroupSet& gs, std::vector<Candidate>& out) {
    const Interpretation& in = ri.interpretation;
    std::vector<size_t> slots;  // included slot indices
    for (size_t s = 0; s < lr_.slots.size(); ++s) {
      const Slot& sl = lr_.slots[s];
      if (sl.role == SlotRole::Keyword && sl.source != kNoGroup && !gs.included[sl.source]) continue;
      slots.push_back(s);
    }
    if (slots.empty()) return;

    Candidate base;
    base.score = ri.score;
    base.interpretation = in;
    std::vector<EntryPoint> entries;
    for (size_t s : slots) entries.push_back(in.entries[s]);

    TableDiscovery disc;
    try {
      disc = discover_tables(ctx_, entries);
    } catch (const std::exception& e) {
      base.diagnostics.push_back(e.what());
      base.flagged = true;
      out.push_back(std::move(base));
      return;
    }
    auto reach_of = [&](size_t slot) -> const EntryReach& {
      size_t k = static_cast<size_t>(std::find(slots.begin(), slots.end(), slot) - slots.begin());
      return disc.reach[k];
    };

    attach_filters(base, in, slots, gs, disc, reach_of);
    resolve_aggregation(base, in, slots, reach_of);
    base.columns = disc.columns;

    // Filter columns may come from metadata filters outside the discovered set.
    std::vector<std::string> direct = disc.direct_tables;
    std::vector<std::pair<std::string, std::string>> inheritance = disc.inheritance;
    std::vector<std::string> order = disc.tables;
    TableDiscovery extra;
    TableCollector more(ctx_, extra);
    for (const auto& f : base.filters)
      if (std::find(order.begin(), order.end(), f.target.table) == order.end()) more.add_table(f.target.table, true);
    for (const auto& t : extra.direct_tables) push_unique(direct, t);
    for (const auto& t : extra.tables) push_unique(order, t);
    for (const auto& p : extra.inheritance) push_unique(inheritance, p);

    // Aggregates only need parents that lie on a join path; SELECT * shows whole entities.
    if (base.aggregation) inheritance.clear();

    JoinDiscovery jd = discover_joins(ctx_.catalog, direct, inheritance, order, opts_.max_join_alternatives);
    for (const auto& d : jd.diagnostics) base.diagnostics.push_back(d);
    if (jd.alternatives.empty()) {
      base.tables = order;
      base.flagged = true;
      out.push_back(std::move(base));
      return;
    }
    for (const auto& plan : jd.alternatives) {
      Candidate c = base;
      c.tables = plan.tables;
      c.joins = plan.joins;
      finish(c);
      out.push_back(std::move(c));
    }
  }

  template <typename ReachOf>
  void attach_filters(Candidate& c, const Interpretation& in, const std::vector<size_t>& slots, const GroupSet& gs,
                      const TableDiscovery& disc, ReachOf reach_of) {
    std::set<size_t> merged_slots;
    for (const auto& [ga, gb] : gs.merged) {
      auto a = single_base_data_slot(lr_, in, ga), b = single_base_data_slot(lr_, in, gb);
      const auto& ha = in.entries[*a].hit();
      const auto& hb = in.entries[*b].hit();
      c.filters.push_back(FilterCondition{{ha.table, ha.column}, CompareOp::EQ, {Value{ha.value}, Value{hb.value}},
                                          FilterSource::BaseData});
      merged_slots.insert(*a);
      merged_slots.insert(*b);
    }
    for (size_t s : slots) {
      const Slot& sl = lr_.slots[s];
      const EntryPoint& e = in.entries[s];
      if (sl.role == SlotRole::Keyword && !e.is_metadata() && !merged_slots.count(s)) {
        const auto& h = e.hit();
        FilterCondition f{{h.table, h.column}, CompareOp::EQ, {Value{h.value}}, FilterSource::BaseData};
        // a repeated keyword yields the same condition once
        if (std::none_of(c.filters.begin(), c.filters.end(), [&](const auto& g) { return render(g.condition()) == render(f.condition()); }))
          c.filters.push_back(std::move(f));
      }
    }

    for (size_t p = 0; p < ast_.predicates.size(); ++p) {
      const Predicate& pred = ast_.predicates[p];
      std::string where = "predicate '" + join(pred.left, " ") + " " + std::string(to_string(pred.op)) + " ...'";
      std::optional<size_t> slot;
      for (size_t s : slots)
        if (lr_.slots[s].role == SlotRole::PredicateLeft && lr_.slots[s].source == p) slot = s;
      if (!slot) {
        c.diagnostics.push_back(where + ": left operand resolves to no column");
        c.flagged = true;
        continue;
      }
      const auto& cols = reach_of(*slot).columns;
      if (cols.empty()) {
        c.diagnostics.push_back(where + ": left operand resolves to no column");
        c.flagged = true;
        continue;
      }
      ColumnRef col = cols.front();
      auto type = ctx_.catalog.column_type(col);
      if (!type) {
        if (const Table* t = ctx_.store.find(col.table))
          if (auto idx = t->def.column_index(col.column)) type = t->def.columns[*idx].type;
      }
      if (!type) {
        c.diagnostics.push_back(where + ": column " + render(col) + " has no data");
        c.flagged = true;
        continue;
      }
      std::optional<Value> v;
      if (const auto* d = std::get_if<Date>(&pred.right)) {
        if (*type == DataType::Date) v = Value{*d};
      } else if (const auto* n = std::get_if<double>(&pred.right)) {
        if (*type == DataType::Number) v = Value{*n};
      } else {
        const auto& words = std::get<KeywordGroup>(pred.right);
        std::string raw = join(words, " ");
        if (*type == DataType::Text) {
          v = Value{raw};
          if (pred.op != CompareOp::LIKE) {
            for (const auto& h : ctx_.inverted.lookup_phrase(text_tokens(raw), ctx_.store))
              if (iequals(h.table, col.table) && iequals(h.column, col.column)) {
                v = Value{h.value};
                break;
              }
          }
        } else {
          v = typed_literal(raw, *type);
        }
      }
      if (pred.op == CompareOp::LIKE && *type != DataType::Text) v.reset();
      if (!v) {
        c.diagnostics.push_back(where + ": right operand is not a " + std::string(to_string(*type)) + " value for " +
                                render(col));
        c.flagged = true;
        continue;
      }
      c.filters.push_back(FilterCondition{col, pred.op, {*v}, FilterSource::Query});
    }

    const Pattern& fp = ctx_.patterns.get(patterns::kMetadataFilter);
    for (const auto& node : disc.filter_nodes) {
      for (const auto& b : match_at(ctx_.graph, ctx_.patterns, fp, node)) {
        auto col = ctx_.catalog.column_by_node(std::get<NodeId>(b.at("c")));
        std::string op_text = std::get<TextLabel>(b.at("o")).text;
        std::string value_text = std::get<TextLabel>(b.at("v")).text;
        auto op = parse_filter_op(op_text);
        auto type = col ? ctx_.catalog.column_type(*col) : std::nullopt;
        std::optional<Value> v = type ? typed_literal(value_text, *type) : std::optional<Value>(Value{value_text});
        if (!col || !op || !v) {
          c.diagnostics.push_back("metadata filter at " + node.uri + " is malformed");
          c.flagged = true;
          continue;
        }
        FilterCondition f{*col, *op, {*v}, FilterSource::Metadata};
        push_unique(c.filters, f);
      }
    }
  }

  template <typename ReachOf>
  void resolve_aggregation(Candidate& c, const Interpretation& in, const std::vector<size_t>& slots, ReachOf reach_of) {
    (void)in;
    if (!ast_.aggregation) return;
    const AggregationSpec& spec = *ast_.aggregation;
    ResolvedAggregation a;
    a.func = spec.func;
    a.top = spec.top;
    bool ok = true;
    if (!spec.counts_rows()) {
      std::optional<size_t> slot;
      for (size_t s : slots)
        if (lr_.slots[s].role == SlotRole::AggAttribute) slot = s;
      const EntryReach* r = slot ? &reach_of(*slot) : nullptr;
      std::string what = join(spec.attribute, " ");
      if (r && !r->columns.empty()) {
        a.column = r->columns.front();
      } else if (r && !r->tables.empty() && spec.func == AggFunc::Count) {
        const CatalogTable* t = ctx_.catalog.find_table(r->tables.front());
        auto pk = t ? t->primary_key() : std::vector<std::string>{};
        if (pk.empty()) {
          c.diagnostics.push_back("count(" + what + "): table " + r->tables.front() + " has no primary key");
          ok = false;
        } else {
          a.column = ColumnRef{t->name, pk.front()};
        }
      } else {
        c.diagnostics.push_back("aggregation attribute '" + what + "' does not resolve to a column");
        ok = false;
      }
      if (a.column && spec.func == AggFunc::Sum && ctx_.catalog.column_type(*a.column) != DataType::Number) {
        c.diagnostics.push_back("sum(" + what + "): " + render(*a.column) + " is not a number column");
        ok = false;
      }
    }
    for (size_t g = 0; g < spec.group_by.size(); ++g) {
      std::optional<size_t> slot;
      for (size_t s : slots)
        if (lr_.slots[s].role == SlotRole::GroupBy && lr_.slots[s].source == g) slot = s;
      const EntryReach* r = slot ? &reach_of(*slot) : nullptr;
      if (r && !r->columns.empty()) {
        a.group_by.push_back(r->columns.front());
      } else {
        c.diagnostics.push_back("group by '" + join(spec.group_by[g], " ") + "' does not resolve to a column");
        ok = false;
      }
    }
    if (ok) c.aggregation = std::move(a);
    else c.flagged = true;
  }

  void finish(Candidate& c) {
    if (ast_.aggregation && !c.aggregation) return;  // unresolved aggregation: no SQL
    c.sql = generate_sql(c, opts_.project_columns);
    c.sql_text = render(*c.sql);
    c.id = candidate_id(c.sql_text);
    if (!opts_.execute) return;
    try {
      ExecOptions eo;
      eo.cap = opts_.snippet_cap;
      c.snippet = execute(*c.sql, ctx_.store, eo);
    } catch (const std::exception& e) {
      c.diagnostics.push_back(std::string("execution failed: ") + e.what());
      c.flagged = true;
    }
  }

  const QueryAst& ast_;
  const LookupResult& lr_;
  const SearchContext& ctx_;
  const PipelineOptions& opts_;
};

}  // namespace

SearchResult run_pipeline(std::string_view raw, const SearchContext& ctx, const PipelineOptions& opts, size_t page) {
  auto t0 = std::chrono::steady_clock::now();
  SearchResult r;
  r.query = std::string(raw);
  r.page = page;
  r.ast = parse_query(raw);
  LookupResult lr = lookup(r.ast, ctx, opts);
  r.complexity = lr.complexity;
  r.interpretation_count = lr.interpretations.size();
  r.unmatched = lr.unmatched;
  r.diagnostics = lr.diagnostics;
  if (lr.interpretations.empty() && r.diagnostics.empty()) r.diagnostics.push_back("no entry points found");

  size_t n = std::max<size_t>(opts.top_n, 1);
  auto ranked = rank(lr.interpretations, n, opts.weights, page * n);
  CandidateBuilder builder(r.ast, lr, ctx, opts);
  for (const auto& ri : ranked) {
    for (auto& c : builder.build(ri)) {
      c.rank = page * n + r.candidates.size() + 1;
      r.candidates.push_back(std::move(c));
    }
  }
  r.pipeline_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace ksdw
