#include "ksdw/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace ksdw {

std::string to_string(const GraphTerm& t) {
  if (const auto* n = std::get_if<NodeId>(&t)) return "<" + n->uri + ">";
  return "t:" + std::get<TextLabel>(t).text;
}

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::Conceptual: return "conceptual";
    case Layer::Logical: return "logical";
    case Layer::Physical: return "physical";
    case Layer::Ontology: return "ontology";
    case Layer::Synonym: return "synonym";
    case Layer::BaseDataRef: return "base-data-ref";
    case Layer::BaseData: return "base-data";
  }
  return "physical";
}

std::optional<Layer> parse_layer(std::string_view text) {
  if (text == "conceptual") return Layer::Conceptual;
  if (text == "logical") return Layer::Logical;
  if (text == "physical") return Layer::Physical;
  if (text == "ontology") return Layer::Ontology;
  if (text == "synonym") return Layer::Synonym;
  if (text == "base-data-ref") return Layer::BaseDataRef;
  return std::nullopt;
}

MetadataGraph MetadataGraph::from_triples(std::vector<Triple> triples) {
  MetadataGraph g;
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  g.triples_ = std::move(triples);

  std::set<std::string> explicit_layer;
  for (size_t i = 0; i < g.triples_.size(); ++i) {
    const Triple& t = g.triples_[i];
    auto& subj = g.nodes_[t.subject.uri];
    subj.out.push_back(i);
    if (const auto* obj = std::get_if<NodeId>(&t.object)) g.nodes_[obj->uri].in.push_back(i);
    if (t.predicate == "layer") {
      if (const auto* lbl = std::get_if<TextLabel>(&t.object)) {
        if (auto l = parse_layer(lbl->text)) {
          subj.layer = *l;
          explicit_layer.insert(t.subject.uri);
        }
      }
    }
  }
  // Triples are sorted by (subject, predicate, object), so `out` lists are already in
  // contract order. `in` lists need (predicate, subject) order.
  for (auto& [uri, e] : g.nodes_) {
    std::sort(e.in.begin(), e.in.end(), [&](size_t a, size_t b) {
      const Triple& x = g.triples_[a];
      const Triple& y = g.triples_[b];
      return std::tie(x.predicate, x.subject) < std::tie(y.predicate, y.subject);
    });
    if (!explicit_layer.count(uri)) g.defaulted_.push_back(NodeId{uri});
  }
  return g;
}

std::vector<NodeId> MetadataGraph::nodes() const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  for (const auto& [uri, e] : nodes_) out.push_back(NodeId{uri});
  return out;
}

const MetadataGraph::NodeEntry& MetadataGraph::entry(const NodeId& n) const {
  auto it = nodes_.find(n.uri);
  if (it == nodes_.end()) throw UnknownNodeError(n.uri);
  return it->second;
}

const std::vector<size_t>& MetadataGraph::outgoing_ids(const NodeId& n) const { return entry(n).out; }
const std::vector<size_t>& MetadataGraph::incoming_ids(const NodeId& n) const { return entry(n).in; }

std::vector<Triple> MetadataGraph::outgoing(const NodeId& n) const {
  std::vector<Triple> out;
  for (size_t i : entry(n).out) out.push_back(triples_[i]);
  return out;
}

std::vector<Triple> MetadataGraph::incoming(const NodeId& n) const {
  std::vector<Triple> out;
  for (size_t i : entry(n).in) out.push_back(triples_[i]);
  return out;
}

Layer MetadataGraph::layer(const NodeId& n) const { return entry(n).layer; }

std::optional<std::string> MetadataGraph::label(const NodeId& n, std::string_view predicate) const {
  auto it = nodes_.find(n.uri);
  if (it == nodes_.end()) return std::nullopt;
  for (size_t i : it->second.out) {
    const Triple& t = triples_[i];
    if (t.predicate != predicate) continue;
    if (const auto* l = std::get_if<TextLabel>(&t.object)) return l->text;
  }
  return std::nullopt;
}

bool MetadataGraph::contains(const Triple& t) const {
  return std::binary_search(triples_.begin(), triples_.end(), t);
}

namespace {

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

GraphLoadResult load_graph(std::istream& in) {
  std::vector<Triple> triples;
  std::set<Triple> seen;
  std::vector<std::string> warnings;
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw GraphFormatError(line_no, "expected three tab-separated fields");
    std::string_view subject = line.substr(0, t1);
    std::string_view predicate = line.substr(t1 + 1, t2 - t1 - 1);
    std::string_view object = line.substr(t2 + 1);
    if (object.find('\t') != std::string_view::npos)
      throw GraphFormatError(line_no, "expected three tab-separated fields");
    if (subject.empty() || has_whitespace(subject)) throw GraphFormatError(line_no, "invalid subject node id");
    if (predicate.empty() || has_whitespace(predicate)) throw GraphFormatError(line_no, "invalid predicate");
    if (object.empty()) throw GraphFormatError(line_no, "empty object");

    GraphTerm obj;
    if (object.front() == '<') {
      if (object.size() < 3 || object.back() != '>') throw GraphFormatError(line_no, "unterminated node reference");
      std::string_view uri = object.substr(1, object.size() - 2);
      if (has_whitespace(uri)) throw GraphFormatError(line_no, "node id contains whitespace");
      obj = NodeId{std::string(uri)};
    } else {
      obj = TextLabel{std::string(object)};
    }
    if (predicate == "layer") {
      const auto* lbl = std::get_if<TextLabel>(&obj);
      if (!lbl || !parse_layer(lbl->text)) throw GraphFormatError(line_no, "unknown layer '" + std::string(object) + "'");
    }
    Triple t{NodeId{std::string(subject)}, std::string(predicate), std::move(obj)};
    if (!seen.insert(t).second) {
      warnings.push_back("line " + std::to_string(line_no) + ": duplicate triple ignored");
      continue;
    }
    triples.push_back(std::move(t));
  }
  GraphLoadResult result{MetadataGraph::from_triples(std::move(triples)), std::move(warnings)};
  for (const auto& n : result.graph.defaulted_layer_nodes())
    result.warnings.push_back("node " + n.uri + " has no layer triple; defaulting to physical");
  return result;
}

GraphLoadResult load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("graph file not found: " + path);
  return load_graph(in);
}

GraphLoadResult load_graph_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_graph(in);
}

}  // namespace ksdw
