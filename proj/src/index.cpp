#include "ksdw/index.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "ksdw/text.hpp"

namespace ksdw {

std::string describe(const EntryPoint& e) {
  std::string words = join(e.words, " ");
  if (e.is_metadata()) return "'" + words + "' -> " + e.node().uri + " (" + std::string(to_string(e.layer)) + ")";
  const auto& h = e.hit();
  return "'" + words + "' -> " + h.table + "." + h.column + " = '" + h.value + "' (base-data)";
}

ClassificationIndex ClassificationIndex::build(const MetadataGraph& g) {
  ClassificationIndex ci;
  static const std::set<std::string, std::less<>> kLabelPredicates = {"tablename", "columnname", "concept_label"};
  for (const Triple& t : g.triples()) {
    if (!kLabelPredicates.count(t.predicate)) continue;
    const auto* label = std::get_if<TextLabel>(&t.object);
    if (!label) continue;
    std::string phrase = normalize_phrase(label->text);
    if (phrase.empty()) continue;
    Layer layer = g.layer(t.subject);
    bool resolved = false;
    if (layer == Layer::Synonym) {
      for (size_t i : g.outgoing_ids(t.subject)) {
        const Triple& s = g.triples()[i];
        if (s.predicate != "synonym_of") continue;
        if (const auto* target = std::get_if<NodeId>(&s.object)) {
          ci.terms_[phrase].push_back({*target, Layer::Synonym});
          resolved = true;
        }
      }
    }
    if (!resolved) ci.terms_[phrase].push_back({t.subject, layer});
  }
  for (auto& [term, entries] : ci.terms_) {
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  }
  return ci;
}

const std::vector<ClassificationEntry>& ClassificationIndex::find(std::string_view phrase) const {
  static const std::vector<ClassificationEntry> kEmpty;
  auto it = terms_.find(phrase);
  return it == terms_.end() ? kEmpty : it->second;
}

InvertedIndex InvertedIndex::build(const RelationalStore& store) {
  InvertedIndex ii;
  for (const Table& t : store.tables()) {
    for (size_t c = 0; c < t.def.columns.size(); ++c) {
      if (t.def.columns[c].type != DataType::Text) continue;
      for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto* cell = std::get_if<std::string>(&t.rows[r][c]);
        if (!cell) continue;
        auto tokens = text_tokens(*cell);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (auto& tok : tokens) ii.terms_[tok].push_back(Posting{t.def.name, t.def.columns[c].name, r});
      }
    }
  }
  for (auto& [term, postings] : ii.terms_) std::sort(postings.begin(), postings.end());
  return ii;
}

const std::vector<Posting>& InvertedIndex::postings(std::string_view token) const {
  static const std::vector<Posting> kEmpty;
  auto it = terms_.find(token);
  return it == terms_.end() ? kEmpty : it->second;
}

size_t InvertedIndex::posting_count() const {
  size_t n = 0;
  for (const auto& [term, p] : terms_) n += p.size();
  return n;
}

std::vector<BaseDataHit> InvertedIndex::lookup_phrase(const std::vector<std::string>& tokens,
                                                      const RelationalStore& store) const {
  if (tokens.empty()) return {};
  // Intersect postings starting from the rarest token, then verify contiguity on the cell.
  std::vector<const std::vector<Posting>*> lists;
  for (const auto& tok : tokens) {
    const auto& p = postings(tok);
    if (p.empty()) return {};
    lists.push_back(&p);
  }
  std::sort(lists.begin(), lists.end(), [](auto* a, auto* b) { return a->size() < b->size(); });
  std::vector<Posting> candidates = *lists.front();
  for (size_t i = 1; i < lists.size() && !candidates.empty(); ++i) {
    std::vector<Posting> next;
    std::set_intersection(candidates.begin(), candidates.end(), lists[i]->begin(), lists[i]->end(),
                          std::back_inserter(next));
    candidates = std::move(next);
  }
  std::set<BaseDataHit> hits;
  for (const Posting& p : candidates) {
    const Table& t = store.table(p.table);
    size_t c = *t.def.column_index(p.column);
    const auto& cell = std::get<std::string>(t.rows[p.row][c]);
    if (tokens.size() > 1) {
      auto cell_tokens = text_tokens(cell);
      if (std::search(cell_tokens.begin(), cell_tokens.end(), tokens.begin(), tokens.end()) == cell_tokens.end())
        continue;
    }
    hits.insert(BaseDataHit{t.def.name, t.def.columns[c].name, cell});
  }
  return {hits.begin(), hits.end()};
}

std::vector<EntryPoint> lookup_phrase(const ClassificationIndex& ci, const InvertedIndex& ii,
                                      const RelationalStore& store, const KeywordGroup& words) {
  std::vector<EntryPoint> out;
  std::string phrase = normalize_phrase(join(words, " "));
  for (const auto& e : ci.find(phrase)) out.push_back(EntryPoint{words, e.node, e.layer});
  for (auto& h : ii.lookup_phrase(text_tokens(phrase), store)) out.push_back(EntryPoint{words, std::move(h), Layer::BaseData});
  return out;
}

Classification classify(const ClassificationIndex& ci, const InvertedIndex& ii, const RelationalStore& store,
                        const KeywordGroup& words) {
  Classification out;
  std::function<void(size_t, size_t)> rec = [&](size_t lo, size_t hi) {
    for (size_t len = hi - lo; len >= 1 && hi > lo; --len) {
      for (size_t start = lo; start + len <= hi; ++start) {
        KeywordGroup window(words.begin() + start, words.begin() + start + len);
        auto entries = lookup_phrase(ci, ii, store, window);
        if (entries.empty()) continue;
        rec(lo, start);
        out.groups.push_back({start, start + len, std::move(entries)});
        rec(start + len, hi);
        return;
      }
    }
    for (size_t i = lo; i < hi; ++i) out.unmatched.push_back(words[i]);
  };
  rec(0, words.size());
  return out;
}

}  // namespace ksdw
