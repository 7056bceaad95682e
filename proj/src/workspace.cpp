#include "ksdw/workspace.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ksdw/text.hpp"

namespace fs = std::filesystem;

namespace ksdw {

PipelineOptions WorkspaceConfig::pipeline_options() const {
  PipelineOptions o;
  o.top_n = top_n;
  o.snippet_cap = snippet_cap;
  o.weights = weights;
  o.project_columns = project_columns;
  return o;
}

namespace {

std::string resolve(std::string_view value, const std::string& base_dir) {
  fs::path p{std::string(value)};
  if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
  return p.lexically_normal().string();
}

size_t parse_count(std::string_view key, std::string_view value) {
  std::string v = trim(value);
  size_t used = 0;
  long long n = -1;
  try {
    n = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || n < 0) throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + v + "'");
  return static_cast<size_t>(n);
}

bool parse_bool(std::string_view key, std::string_view value) {
  std::string v = to_lower_ascii(trim(value));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + v + "'");
}

}  // namespace

void apply_setting(WorkspaceConfig& cfg, std::string_view key_in, std::string_view value_in, const std::string& base_dir) {
  std::string key = to_lower_ascii(trim(key_in));
  std::string value = trim(value_in);
  if (key == "graph") cfg.graph = resolve(value, base_dir);
  else if (key == "patterns") cfg.patterns = value.empty() ? "" : resolve(value, base_dir);
  else if (key == "manifest") cfg.manifest = resolve(value, base_dir);
  else if (key == "csv_dir") cfg.csv_dir = resolve(value, base_dir);
  else if (key == "suite") cfg.suite = resolve(value, base_dir);
  else if (key == "feedback_log") cfg.feedback_log = value.empty() ? "" : resolve(value, base_dir);
  else if (key == "top_n") cfg.top_n = parse_count(key, value);
  else if (key == "snippet_cap") cfg.snippet_cap = parse_count(key, value);
  else if (key == "project_columns") cfg.project_columns = parse_bool(key, value);
  else if (key.rfind("weight.", 0) == 0) {
    auto w = parse_number(value);
    if (!w || *w < 0) throw ConfigError(key + ": expected a non-negative number, got '" + value + "'");
    std::string layer = key.substr(7);
    if (layer == "ontology") cfg.weights.ontology = *w;
    else if (layer == "conceptual") cfg.weights.conceptual = *w;
    else if (layer == "logical") cfg.weights.logical = *w;
    else if (layer == "physical") cfg.weights.physical = *w;
    else if (layer == "base_data") cfg.weights.base_data = *w;
    else if (layer == "synonym") cfg.weights.synonym = *w;
    else throw ConfigError("unknown layer weight '" + key + "'");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

WorkspaceConfig parse_config(std::string_view text, const std::string& base_dir) {
  WorkspaceConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1), base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

void apply_env(WorkspaceConfig& cfg, const EnvLookup& env) {
  static const char* kKeys[] = {"graph", "patterns", "manifest", "csv_dir", "suite", "feedback_log", "top_n",
                                "snippet_cap", "project_columns"};
  static const char* kLayers[] = {"ontology", "conceptual", "logical", "physical", "base_data", "synonym"};
  std::string cwd = fs::current_path().string();
  auto upper = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  };
  for (const char* k : kKeys) {
    std::string name = "KSDW_" + upper(k);
    if (auto v = env(name)) {
      try {
        apply_setting(cfg, k, *v, cwd);
      } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
      }
    }
  }
  for (const char* l : kLayers) {
    std::string name = "KSDW_WEIGHT_" + upper(l);
    if (auto v = env(name)) {
      try {
        apply_setting(cfg, std::string("weight.") + l, *v, cwd);
      } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
      }
    }
  }
}

WorkspaceConfig load_config(const std::string& path, const EnvLookup& env) {
  WorkspaceConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    fs::path dir = fs::absolute(fs::path(path)).parent_path();
    cfg = parse_config(ss.str(), dir.string());
  }
  apply_env(cfg, env);
  return cfg;
}

void validate(const WorkspaceConfig& cfg, bool need_suite) {
  auto require = [](const std::string& path, const char* what, bool dir) {
    if (path.empty()) throw ConfigError(std::string("no ") + what + " configured");
    std::error_code ec;
    bool ok = dir ? fs::is_directory(path, ec) : fs::is_regular_file(path, ec);
    if (!ok) throw ConfigError(std::string(what) + " not found: " + path);
  };
  require(cfg.graph, "graph", false);
  require(cfg.manifest, "manifest", false);
  require(cfg.csv_dir, "csv_dir", true);
  if (!cfg.patterns.empty()) require(cfg.patterns, "patterns", false);
  if (need_suite) require(cfg.suite, "suite", false);
  if (cfg.top_n < 1) throw ConfigError("top_n must be at least 1");
}

std::unique_ptr<Workspace> Workspace::load(const WorkspaceConfig& cfg) {
  validate(cfg);
  std::unique_ptr<Workspace> ws(new Workspace());
  ws->cfg_ = cfg;
  auto g = load_graph_file(cfg.graph);
  ws->graph_ = std::move(g.graph);
  ws->warnings_ = std::move(g.warnings);
  ws->patterns_ = cfg.patterns.empty() ? builtin_patterns() : load_patterns_file(cfg.patterns);
  ws->ingest_ = load_store(ws->store_, cfg.manifest, cfg.csv_dir);
  ws->catalog_ = SchemaCatalog::build(ws->graph_, ws->patterns_, &ws->store_);
  for (const auto& w : ws->catalog_.warnings()) ws->warnings_.push_back(w);
  ws->classification_ = ClassificationIndex::build(ws->graph_);
  ws->inverted_ = InvertedIndex::build(ws->store_);
  return ws;
}

SearchResult Workspace::search(std::string_view query, size_t page) const {
  return run_pipeline(query, context(), cfg_.pipeline_options(), page);
}

}  // namespace ksdw
