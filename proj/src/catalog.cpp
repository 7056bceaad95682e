#include "ksdw/catalog.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ksdw/text.hpp"

namespace ksdw {

std::string_view to_string(JoinKind k) {
  switch (k) {
    case JoinKind::ForeignKey: return "foreign-key";
    case JoinKind::JoinNode: return "join-node";
    case JoinKind::Inheritance: return "inheritance";
    case JoinKind::Bridge: return "bridge";
  }
  return "foreign-key";
}

std::string render(const JoinCondition& j) { return render(j.comparison()); }

const CatalogColumn* CatalogTable::column(std::string_view n) const {
  for (const auto& c : columns)
    if (iequals(c.name, n)) return &c;
  return nullptr;
}

std::vector<std::string> CatalogTable::primary_key() const {
  std::vector<std::string> out;
  for (const auto& c : columns)
    if (c.primary_key) out.push_back(c.name);
  return out;
}

namespace {

const NodeId* bound_node(const Binding& b, const std::string& var) {
  auto it = b.find(var);
  if (it == b.end()) return nullptr;
  return std::get_if<NodeId>(&it->second);
}

std::string bound_label(const Binding& b, const std::string& var) {
  auto it = b.find(var);
  if (it == b.end()) return {};
  if (const auto* l = std::get_if<TextLabel>(&it->second)) return l->text;
  return {};
}

}  // namespace

SchemaCatalog SchemaCatalog::build(const MetadataGraph& g, const PatternRegistry& reg, const RelationalStore* store) {
  SchemaCatalog cat;
  std::map<std::string, size_t> by_node;

  for (const auto& [node, b] : match_all(g, reg, reg.get(patterns::kTable))) {
    if (by_node.count(node.uri)) continue;
    CatalogTable t;
    t.name = bound_label(b, "y");
    t.node = node;
    by_node[node.uri] = cat.tables_.size();
    cat.tables_.push_back(std::move(t));
  }

  const NodeId pk_class{"primary_key"};
  std::set<std::string> seen_columns;
  for (const auto& [node, b] : match_all(g, reg, reg.get(patterns::kColumn))) {
    const NodeId* owner = bound_node(b, "z");
    if (!owner || !by_node.count(owner->uri) || !seen_columns.insert(node.uri).second) continue;
    CatalogColumn c;
    c.name = bound_label(b, "y");
    c.node = node;
    c.primary_key = g.contains(Triple{node, "type", pk_class});
    cat.tables_[by_node[owner->uri]].columns.push_back(std::move(c));
  }

  for (auto& t : cat.tables_) {
    const Table* st = store ? store->find(t.name) : nullptr;
    if (st) {
      for (auto& c : t.columns) {
        if (auto idx = st->def.column_index(c.name)) c.type = st->def.columns[*idx].type;
        else cat.warnings_.push_back("column " + t.name + "." + c.name + " is not in the data manifest");
      }
      // Manifest order; graph-only columns go last by name.
      std::stable_sort(t.columns.begin(), t.columns.end(), [&](const CatalogColumn& a, const CatalogColumn& b) {
        auto ia = st->def.column_index(a.name), ib = st->def.column_index(b.name);
        size_t ka = ia ? *ia : SIZE_MAX, kb = ib ? *ib : SIZE_MAX;
        if (ka != kb) return ka < kb;
        return a.name < b.name;
      });
      if (t.primary_key().empty())
        for (auto& c : t.columns)
          for (const auto& pk : st->def.primary_key)
            if (iequals(pk, c.name)) c.primary_key = true;
    } else {
      std::sort(t.columns.begin(), t.columns.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
      if (store) cat.warnings_.push_back("table " + t.name + " is not in the data manifest");
    }
  }

  auto col_ref = [&](const NodeId& n) { return cat.column_by_node(n); };
  std::vector<JoinCondition> joins;

  for (const auto& [node, b] : match_all(g, reg, reg.get(patterns::kForeignKey))) {
    const NodeId* pk = bound_node(b, "y");
    auto fk_col = col_ref(node);
    auto pk_col = pk ? col_ref(*pk) : std::nullopt;
    if (fk_col && pk_col) joins.push_back({*fk_col, *pk_col, JoinKind::ForeignKey});
  }
  for (const auto& [node, b] : match_all(g, reg, reg.get(patterns::kJoinRelationship))) {
    const NodeId* k = bound_node(b, "k");
    const NodeId* f = bound_node(b, "f");
    auto pk_col = k ? col_ref(*k) : std::nullopt;
    auto fk_col = f ? col_ref(*f) : std::nullopt;
    if (fk_col && pk_col) joins.push_back({*fk_col, *pk_col, JoinKind::JoinNode});
  }

  std::set<std::pair<std::string, std::string>> inheritance;
  for (const auto& [node, b] : match_all(g, reg, reg.get(patterns::kInheritanceChild))) {
    const NodeId* p = bound_node(b, "p");
    const CatalogTable* child = cat.table_by_node(node);
    const CatalogTable* parent = p ? cat.table_by_node(*p) : nullptr;
    if (child && parent) inheritance.emplace(parent->name, child->name);
  }
  for (const auto& [parent, child] : inheritance) {
    auto& pt = cat.tables_[by_node[cat.find_table(parent)->node.uri]];
    auto& ct = cat.tables_[by_node[cat.find_table(child)->node.uri]];
    pt.children.push_back(child);
    ct.parents.push_back(parent);
    auto ppk = pt.primary_key(), cpk = ct.primary_key();
    if (ppk.empty() || cpk.empty()) {
      cat.warnings_.push_back("inheritance " + parent + " -> " + child + " has no primary key to join on");
      continue;
    }
    joins.push_back({ColumnRef{parent, ppk.front()}, ColumnRef{child, cpk.front()}, JoinKind::Inheritance});
  }

  // One join per unordered column pair; the first kind found wins.
  std::set<std::pair<ColumnRef, ColumnRef>> pairs;
  for (auto& j : joins) {
    auto key = std::minmax(j.left, j.right);
    if (pairs.insert({key.first, key.second}).second) cat.joins_.push_back(j);
  }
  std::sort(cat.joins_.begin(), cat.joins_.end(),
            [](const JoinCondition& a, const JoinCondition& b) { return render(a) < render(b); });

  std::set<std::tuple<std::string, std::string, std::string>> seen_bridges;
  for (const auto& [node, b] : match_all(g, reg, reg.get(patterns::kBridgeTable))) {
    const CatalogTable* bridge = cat.table_by_node(node);
    const NodeId *a = bound_node(b, "a"), *bb = bound_node(b, "b"), *k1 = bound_node(b, "k1"), *k2 = bound_node(b, "k2");
    if (!bridge || !a || !bb || !k1 || !k2) continue;
    auto ca = col_ref(*a), cb = col_ref(*bb), c1 = col_ref(*k1), c2 = col_ref(*k2);
    if (!ca || !cb || !c1 || !c2 || c1->table == c2->table) continue;
    BridgeInfo info{bridge->name, c1->table, c2->table, {*ca, *c1, JoinKind::Bridge}, {*cb, *c2, JoinKind::Bridge}};
    if (info.left_table > info.right_table) {
      std::swap(info.left_table, info.right_table);
      std::swap(info.left_join, info.right_join);
    }
    if (seen_bridges.emplace(info.bridge, info.left_table, info.right_table).second) cat.bridges_.push_back(std::move(info));
  }

  std::sort(cat.tables_.begin(), cat.tables_.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
  for (auto& t : cat.tables_) {
    std::sort(t.parents.begin(), t.parents.end());
    std::sort(t.children.begin(), t.children.end());
  }
  return cat;
}

const CatalogTable* SchemaCatalog::find_table(std::string_view name) const {
  for (const auto& t : tables_)
    if (iequals(t.name, name)) return &t;
  return nullptr;
}

const CatalogTable* SchemaCatalog::table_by_node(const NodeId& n) const {
  for (const auto& t : tables_)
    if (t.node == n) return &t;
  return nullptr;
}

std::optional<ColumnRef> SchemaCatalog::column_by_node(const NodeId& n) const {
  for (const auto& t : tables_)
    for (const auto& c : t.columns)
      if (c.node == n) return ColumnRef{t.name, c.name};
  return std::nullopt;
}

std::optional<DataType> SchemaCatalog::column_type(const ColumnRef& c) const {
  const CatalogTable* t = find_table(c.table);
  if (!t) return std::nullopt;
  const CatalogColumn* col = t->column(c.column);
  return col ? col->type : std::nullopt;
}

std::vector<JoinCondition> SchemaCatalog::joins_of(std::string_view table) const {
  std::vector<JoinCondition> out;
  for (const auto& j : joins_)
    if (iequals(j.left.table, table) || iequals(j.right.table, table)) out.push_back(j);
  return out;
}

}  // namespace ksdw
