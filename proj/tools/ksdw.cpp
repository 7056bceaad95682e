// ksdw: build indexes, run keyword queries, evaluate the benchmark suite, serve the HTTP API.
#include <pthread.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "ksdw/eval.hpp"
#include "ksdw/service.hpp"
#include "ksdw/text.hpp"
#include "ksdw/workspace.hpp"

using namespace ksdw;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kParse = 3, kBind = 4 };

struct Overrides {
  std::string config;
  std::string graph, patterns, manifest, csv_dir, suite, feedback_log;
  std::optional<size_t> top_n, snippet_cap;
};

WorkspaceConfig make_config(const Overrides& o, bool need_suite = false) {
  std::string path = o.config;
  if (path.empty()) path = process_env("KSDW_CONFIG").value_or("");
  WorkspaceConfig cfg = load_config(path);
  std::string cwd = std::filesystem::current_path().string();
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) apply_setting(cfg, key, v, cwd);
  };
  set("graph", o.graph);
  set("patterns", o.patterns);
  set("manifest", o.manifest);
  set("csv_dir", o.csv_dir);
  set("suite", o.suite);
  set("feedback_log", o.feedback_log);
  if (o.top_n) cfg.top_n = *o.top_n;
  if (o.snippet_cap) cfg.snippet_cap = *o.snippet_cap;
  validate(cfg, need_suite);
  return cfg;
}

std::unique_ptr<Workspace> open_workspace(const WorkspaceConfig& cfg) {
  auto ws = Workspace::load(cfg);
  for (const auto& w : ws->warnings()) std::cerr << "warning: " << w << "\n";
  return ws;
}

std::string text_table(const ResultSet& rs) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(rs.headers);
  for (const auto& r : rs.rows) {
    std::vector<std::string> line;
    for (const auto& v : r) line.push_back(display(v));
    cells.push_back(std::move(line));
  }
  std::vector<size_t> width(rs.headers.size(), 0);
  for (const auto& line : cells)
    for (size_t c = 0; c < line.size() && c < width.size(); ++c) width[c] = std::max(width[c], line[c].size());
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    std::string l = "    ";
    for (size_t c = 0; c < cells[i].size(); ++c) {
      l += cells[i][c];
      if (c + 1 < cells[i].size()) l += std::string(width[c] - cells[i][c].size() + 2, ' ');
    }
    out += l + "\n";
  }
  return out;
}

int cmd_index(const Overrides& o) {
  auto ws = open_workspace(make_config(o));
  size_t rows = 0;
  for (const auto& [t, n] : ws->ingest().rows_per_table) rows += n;
  std::cout << "tables: " << ws->catalog().tables().size() << "\n"
            << "data tables: " << ws->store().tables().size() << "\n"
            << "rows: " << rows << "\n"
            << "joins: " << ws->catalog().joins().size() << "\n"
            << "classification terms: " << ws->classification().term_count() << "\n"
            << "postings: " << ws->inverted().posting_count() << "\n";
  for (const auto& [t, n] : ws->ingest().rows_per_table) std::cout << "  " << t << ": " << n << " rows\n";
  return kOk;
}

int cmd_query(const Overrides& o, const std::string& text, size_t page, bool sql_only, bool as_json) {
  parse_query(text);  // grammar errors before any I/O
  auto ws = open_workspace(make_config(o));
  SearchResult r = ws->search(text, page);
  if (as_json) {
    std::cout << search_response_json(r).dump(2) << "\n";
    return kOk;
  }
  if (r.candidates.empty()) {
    std::cout << "no results\n";
    if (!r.unmatched.empty()) std::cout << "unmatched: " << join(r.unmatched, ", ") << "\n";
    for (const auto& d : r.diagnostics) std::cout << "note: " << d << "\n";
    return kOk;
  }
  for (const auto& c : r.candidates) {
    if (sql_only) {
      if (!c.sql_text.empty()) std::cout << c.sql_text << "\n\n";
      continue;
    }
    char head[96];
    std::snprintf(head, sizeof head, "#%zu  score %.3f  id %s%s", c.rank, c.score, c.id.c_str(),
                  c.flagged ? "  (incomplete)" : "");
    std::cout << head << "\n";
    for (const auto& e : c.interpretation.entries) std::cout << "  " << describe(e) << "\n";
    if (!c.sql_text.empty()) {
      std::string indented = "  " + c.sql_text;
      for (size_t p = 0; (p = indented.find('\n', p)) != std::string::npos; p += 3) indented.replace(p, 1, "\n  ");
      std::cout << indented << "\n";
    }
    for (const auto& d : c.diagnostics) std::cout << "  note: " << d << "\n";
    if (c.snippet) {
      std::cout << "  " << c.snippet->rows.size() << " row(s)" << (c.snippet->rows.size() >= ws->config().snippet_cap ? " shown" : "") << "\n";
      if (!c.snippet->rows.empty()) std::cout << text_table(*c.snippet);
    }
    std::cout << "\n";
  }
  for (const auto& d : r.diagnostics) std::cout << "note: " << d << "\n";
  return kOk;
}

int cmd_eval(const Overrides& o, bool as_json, const std::string& json_out) {
  WorkspaceConfig cfg = make_config(o, true);
  auto suite = load_suite_file(cfg.suite);
  auto ws = open_workspace(cfg);
  EvalReport report = run_benchmark(suite, *ws);
  if (as_json) std::cout << report_json(report) << "\n";
  else std::cout << format_report(report);
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    if (!out) throw ConfigError("cannot write " + json_out);
    out << report_json(report) << "\n";
  }
  return report.all_passed() ? kOk : kFailed;
}

int cmd_serve(const Overrides& o, const std::string& host, int port) {
  WorkspaceConfig cfg = make_config(o);
  auto ws = open_workspace(cfg);
  FeedbackLog log(cfg.feedback_log);
  SearchService service(*ws, log);
  HttpServer server(service);

  // SIGINT/SIGTERM go to a watcher thread. A signal can arrive before listen() is running,
  // when stop() is still a no-op, so the watcher retries until listen() has returned.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  int bound = 0;
  try {
    bound = server.bind(host, port);
  } catch (const BindError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBind;
  }
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    while (!done) {
      server.stop();
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  });
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  server.listen();
  done = true;
  pthread_kill(watcher.native_handle(), SIGTERM);  // wakes the watcher when listen() ended on its own
  watcher.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyword search over a relational warehouse: keywords in, ranked SQL out."};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("-c,--config", o.config, "workspace config file (default: $KSDW_CONFIG)");
  app.add_option("--graph", o.graph, "metadata graph file");
  app.add_option("--patterns", o.patterns, "pattern file (default: built-in patterns)");
  app.add_option("--manifest", o.manifest, "data manifest");
  app.add_option("--csv-dir", o.csv_dir, "directory with <table>.csv files");
  app.add_option("--suite", o.suite, "benchmark suite file");
  app.add_option("--feedback-log", o.feedback_log, "feedback log (newline-delimited JSON)");
  app.add_option("--top-n", o.top_n, "interpretations per page")->check(CLI::PositiveNumber);
  app.add_option("--snippet-cap", o.snippet_cap, "rows per snippet")->check(CLI::NonNegativeNumber);

  auto* index = app.add_subcommand("index", "load the workspace and print index statistics");

  auto* query = app.add_subcommand("query", "run one keyword query");
  std::string text;
  size_t page = 0;
  bool sql_only = false, as_json = false;
  query->add_option("text", text, "query text")->required();
  query->add_option("--page", page, "result page (0-based)");
  query->add_flag("--sql-only", sql_only, "print only the SQL of each candidate");
  query->add_flag("--json", as_json, "print the service response JSON");

  auto* eval = app.add_subcommand("eval", "evaluate the benchmark suite");
  bool eval_json = false;
  std::string json_out;
  eval->add_flag("--json", eval_json, "print the JSON report instead of tables");
  eval->add_option("--json-out", json_out, "also write the JSON report to this file");

  auto* serve = app.add_subcommand("serve", "serve the HTTP API");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "port (0 picks a free port)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*index) return cmd_index(o);
    if (*query) return cmd_query(o, text, page, sql_only, as_json);
    if (*eval) return cmd_eval(o, eval_json, json_out);
    if (*serve) return cmd_serve(o, host, port);
  } catch (const QueryError& e) {
    std::cerr << "query error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
