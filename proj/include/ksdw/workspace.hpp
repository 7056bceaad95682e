#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ksdw/catalog.hpp"
#include "ksdw/graph.hpp"
#include "ksdw/index.hpp"
#include "ksdw/pattern.hpp"
#include "ksdw/pipeline.hpp"
#include "ksdw/store.hpp"

namespace ksdw {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Workspace settings. Paths are absolute once loaded; relative paths in a config file are
/// resolved against the file's directory.
struct WorkspaceConfig {
  std::string graph;
  std::string patterns;  // empty: built-in patterns
  std::string manifest;
  std::string csv_dir;
  std::string suite;
  std::string feedback_log;
  size_t top_n = 10;
  size_t snippet_cap = 20;
  bool project_columns = false;
  LayerWeights weights;

  PipelineOptions pipeline_options() const;
};

/// Sets one key (`graph`, `top_n`, `weight.ontology`, ...). Relative paths resolve against
/// `base_dir`. Throws ConfigError on unknown keys or bad values.
void apply_setting(WorkspaceConfig& cfg, std::string_view key, std::string_view value, const std::string& base_dir);

/// `key = value` lines, `#` comments.
WorkspaceConfig parse_config(std::string_view text, const std::string& base_dir);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

/// KSDW_GRAPH, KSDW_TOP_N, KSDW_WEIGHT_ONTOLOGY, ...; relative paths resolve against the
/// working directory.
void apply_env(WorkspaceConfig& cfg, const EnvLookup& env = process_env);

/// Reads the file (when non-empty) and applies the environment on top.
WorkspaceConfig load_config(const std::string& path, const EnvLookup& env = process_env);

/// Checks ranges and that every referenced path exists ("manifest not found: ...").
void validate(const WorkspaceConfig& cfg, bool need_suite = false);

/// Everything the pipeline reads, built once and then immutable.
class Workspace {
 public:
  static std::unique_ptr<Workspace> load(const WorkspaceConfig& cfg);

  const WorkspaceConfig& config() const { return cfg_; }
  const MetadataGraph& graph() const { return graph_; }
  const PatternRegistry& patterns() const { return patterns_; }
  const RelationalStore& store() const { return store_; }
  const SchemaCatalog& catalog() const { return catalog_; }
  const ClassificationIndex& classification() const { return classification_; }
  const InvertedIndex& inverted() const { return inverted_; }
  const IngestReport& ingest() const { return ingest_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  SearchContext context() const {
    return SearchContext{graph_, patterns_, catalog_, classification_, inverted_, store_};
  }
  SearchResult search(std::string_view query, size_t page = 0) const;

 private:
  Workspace() = default;
  WorkspaceConfig cfg_;
  MetadataGraph graph_;
  PatternRegistry patterns_;
  RelationalStore store_;
  SchemaCatalog catalog_;
  ClassificationIndex classification_;
  InvertedIndex inverted_;
  IngestReport ingest_;
  std::vector<std::string> warnings_;
};

}  // namespace ksdw
