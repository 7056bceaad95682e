#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ksdw/graph.hpp"
#include "ksdw/query.hpp"
#include "ksdw/store.hpp"

namespace ksdw {

/// A base-data cell that matched a keyword group; `value` is the original cell text.
struct BaseDataHit {
  std::string table;
  std::string column;
  std::string value;

  auto operator<=>(const BaseDataHit&) const = default;
};

struct EntryPoint {
  KeywordGroup words;
  std::variant<NodeId, BaseDataHit> target;
  Layer layer = Layer::Physical;  // BaseData for base-data hits

  bool is_metadata() const { return std::holds_alternative<NodeId>(target); }
  const NodeId& node() const { return std::get<NodeId>(target); }
  const BaseDataHit& hit() const { return std::get<BaseDataHit>(target); }
  bool operator==(const EntryPoint&) const = default;
};

std::string describe(const EntryPoint& e);

struct ClassificationEntry {
  NodeId node;
  Layer layer = Layer::Physical;

  auto operator<=>(const ClassificationEntry&) const = default;
};

/// Normalized label phrase -> metadata nodes, built from `tablename`, `columnname` and
/// `concept_label` labels. A synonym node's label maps to its `synonym_of` target with layer
/// synonym.
class ClassificationIndex {
 public:
  static ClassificationIndex build(const MetadataGraph& g);

  /// Entries for an already normalized phrase, sorted by node; empty when absent.
  const std::vector<ClassificationEntry>& find(std::string_view phrase) const;
  const std::map<std::string, std::vector<ClassificationEntry>, std::less<>>& terms() const { return terms_; }
  size_t term_count() const { return terms_.size(); }

 private:
  std::map<std::string, std::vector<ClassificationEntry>, std::less<>> terms_;
};

struct Posting {
  std::string table;
  std::string column;
  size_t row = 0;

  auto operator<=>(const Posting&) const = default;
};

/// Folded token -> cells of text columns containing it.
class InvertedIndex {
 public:
  static InvertedIndex build(const RelationalStore& store);

  const std::vector<Posting>& postings(std::string_view token) const;

  /// Distinct cells whose token sequence contains `tokens` contiguously, sorted.
  std::vector<BaseDataHit> lookup_phrase(const std::vector<std::string>& tokens, const RelationalStore& store) const;

  const std::map<std::string, std::vector<Posting>, std::less<>>& terms() const { return terms_; }
  size_t term_count() const { return terms_.size(); }
  size_t posting_count() const;

 private:
  std::map<std::string, std::vector<Posting>, std::less<>> terms_;
};

/// Matched sub-groups of a keyword group, in word order, plus the words left over.
struct Classification {
  struct Group {
    size_t begin = 0;  // word range [begin, end) within the input group
    size_t end = 0;
    std::vector<EntryPoint> entries;
  };
  std::vector<Group> groups;
  std::vector<std::string> unmatched;
};

/// Longest-combination matching: the whole group first, then contiguous windows, longest
/// first and leftmost on ties, recursing into the words on either side of a match.
Classification classify(const ClassificationIndex& ci, const InvertedIndex& ii, const RelationalStore& store,
                        const KeywordGroup& words);

/// All entry points for exactly this phrase: metadata hits by node, then base-data hits.
std::vector<EntryPoint> lookup_phrase(const ClassificationIndex& ci, const InvertedIndex& ii,
                                      const RelationalStore& store, const KeywordGroup& words);

}  // namespace ksdw
