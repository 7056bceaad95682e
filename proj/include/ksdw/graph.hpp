#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ksdw {

/// Opaque node identifier (a URI with prefixes removed).
struct NodeId {
  std::string uri;

  auto operator<=>(const NodeId&) const = default;
};

/// Text-label leaf of the graph.
struct TextLabel {
  std::string text;

  auto operator<=>(const TextLabel&) const = default;
};

/// Object position of a triple, and the value a pattern variable binds to.
using GraphTerm = std::variant<NodeId, TextLabel>;

inline bool is_node(const GraphTerm& t) { return std::holds_alternative<NodeId>(t); }
std::string to_string(const GraphTerm& t);

struct Triple {
  NodeId subject;
  std::string predicate;
  GraphTerm object;

  auto operator<=>(const Triple&) const = default;
};

enum class Layer { Conceptual, Logical, Physical, Ontology, Synonym, BaseDataRef, BaseData };

std::string_view to_string(Layer layer);
std::optional<Layer> parse_layer(std::string_view text);

/// Malformed graph source; carries the 1-based line number.
class GraphFormatError : public std::runtime_error {
 public:
  GraphFormatError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

class UnknownNodeError : public std::out_of_range {
 public:
  explicit UnknownNodeError(const std::string& uri) : std::out_of_range("unknown node: " + uri) {}
};

/// Immutable set of triples with per-node adjacency and layer tags.
class MetadataGraph {
 public:
  MetadataGraph() = default;

  /// Builds the graph from a triple list; duplicates collapse. Nodes without a
  /// `layer` triple default to physical.
  static MetadataGraph from_triples(std::vector<Triple> triples);

  const std::vector<Triple>& triples() const { return triples_; }
  size_t node_count() const { return nodes_.size(); }
  bool has_node(const NodeId& n) const { return nodes_.count(n.uri) != 0; }

  /// All node ids in lexicographic order.
  std::vector<NodeId> nodes() const;

  /// Triples with subject n, sorted by predicate then object. Throws UnknownNodeError.
  std::vector<Triple> outgoing(const NodeId& n) const;
  /// Triples whose object is node n, sorted by predicate then subject. Throws UnknownNodeError.
  std::vector<Triple> incoming(const NodeId& n) const;

  /// Index-only views (no copies) for hot loops.
  const std::vector<size_t>& outgoing_ids(const NodeId& n) const;
  const std::vector<size_t>& incoming_ids(const NodeId& n) const;

  Layer layer(const NodeId& n) const;
  /// Nodes that had no explicit layer triple.
  const std::vector<NodeId>& defaulted_layer_nodes() const { return defaulted_; }

  /// First text label reached via `predicate` from n, if any.
  std::optional<std::string> label(const NodeId& n, std::string_view predicate) const;

  bool contains(const Triple& t) const;

 private:
  struct NodeEntry {
    std::vector<size_t> out;
    std::vector<size_t> in;
    Layer layer = Layer::Physical;
  };
  const NodeEntry& entry(const NodeId& n) const;

  std::vector<Triple> triples_;  // sorted, unique
  std::map<std::string, NodeEntry, std::less<>> nodes_;
  std::vector<NodeId> defaulted_;
};

struct GraphLoadResult {
  MetadataGraph graph;
  std::vector<std::string> warnings;
};

/// Parses the tab-separated triple format: `subject<TAB>predicate<TAB>object`,
/// object `<uri>` for nodes or bare text for labels; `#` starts a comment line.
GraphLoadResult load_graph(std::istream& in);
GraphLoadResult load_graph_file(const std::string& path);
GraphLoadResult load_graph_text(std::string_view text);

}  // namespace ksdw
