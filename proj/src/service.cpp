#include "ksdw/service.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <httplib.h>

namespace ksdw {

using nlohmann::json;

json value_json(const Value& v) {
  if (is_null(v)) return nullptr;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return to_string(std::get<Date>(v));
}

json result_set_json(const ResultSet& rs) {
  json rows = json::array();
  for (const auto& r : rs.rows) {
    json row = json::array();
    for (const auto& v : r) row.push_back(value_json(v));
    rows.push_back(std::move(row));
  }
  return {{"headers", rs.headers}, {"rows", rows}};
}

json candidate_json(const Candidate& c) {
  json joins = json::array();
  for (const auto& j : c.joins) joins.push_back({{"sql", render(j)}, {"kind", std::string(to_string(j.kind))}});
  json filters = json::array();
  for (const auto& f : c.filters) {
    json values = json::array();
    for (const auto& v : f.values) values.push_back(value_json(v));
    filters.push_back({{"column", render(f.target)},
                       {"op", std::string(to_string(f.op))},
                       {"values", values},
                       {"source", std::string(to_string(f.source))},
                       {"sql", render(f.condition())}});
  }
  json entries = json::array();
  for (const auto& e : c.interpretation.entries)
    entries.push_back({{"words", e.words}, {"layer", std::string(to_string(e.layer))}, {"target", describe(e)}});
  json out = {{"id", c.id},
              {"rank", c.rank},
              {"score", c.score},
              {"sql", c.sql_text},
              {"tables", c.tables},
              {"joins", joins},
              {"filters", filters},
              {"entries", entries},
              {"snippet", c.snippet ? result_set_json(*c.snippet) : json(nullptr)},
              {"diagnostics", c.diagnostics},
              {"flagged", c.flagged}};
  return out;
}

json search_response_json(const SearchResult& r) {
  json cands = json::array();
  for (const auto& c : r.candidates) cands.push_back(candidate_json(c));
  return {{"query", r.query},
          {"complexity", r.complexity},
          {"page", r.page},
          {"interpretationCount", r.interpretation_count},
          {"candidates", cands},
          {"unmatched", r.unmatched},
          {"diagnostics", r.diagnostics},
          {"pipelineMs", r.pipeline_ms}};
}

json table_json(const SchemaCatalog& cat, const CatalogTable& t) {
  json cols = json::array();
  for (const auto& c : t.columns)
    cols.push_back({{"name", c.name},
                    {"type", c.type ? json(std::string(to_string(*c.type))) : json(nullptr)},
                    {"primaryKey", c.primary_key}});
  json neighbors = json::array();
  for (const auto& j : cat.joins_of(t.name)) {
    const std::string& other = j.left.table == t.name ? j.right.table : j.left.table;
    neighbors.push_back({{"table", other}, {"kind", std::string(to_string(j.kind))}, {"sql", render(j)}});
  }
  return {{"name", t.name}, {"columns", cols}, {"parents", t.parents}, {"children", t.children}, {"joins", neighbors}};
}

json FeedbackRecord::to_json() const {
  return {{"timestamp", timestamp}, {"query", query}, {"candidateId", candidate_id}, {"verdict", verdict}};
}

FeedbackLog::FeedbackLog(std::string path) : path_(std::move(path)) {}

void FeedbackLog::append(const FeedbackRecord& r) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error("cannot open feedback log " + path_);
    out << r.to_json().dump() << "\n";
    if (!out) throw std::runtime_error("cannot write feedback log " + path_);
  }
  records_.push_back(r);
}

std::vector<FeedbackRecord> FeedbackLog::records() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

namespace {

HttpResponse error(int status, const std::string& msg, const std::string& kind) {
  return {status, json{{"error", msg}, {"kind", kind}}.dump()};
}

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace

HttpResponse SearchService::search(const std::string& body) const {
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error(400, "request body must be a JSON object", "request");
  if (!req.contains("query") || !req["query"].is_string()) return error(400, "'query' must be a string", "request");
  size_t page = 0;
  if (req.contains("page")) {
    if (!req["page"].is_number_integer() || req["page"].get<long long>() < 0)
      return error(400, "'page' must be a non-negative integer", "request");
    page = req["page"].get<size_t>();
  }
  try {
    return {200, search_response_json(ws_.search(req["query"].get<std::string>(), page)).dump()};
  } catch (const QueryError& e) {
    return error(400, e.what(), "parse");
  } catch (const std::exception& e) {
    return error(500, e.what(), "internal");
  }
}

HttpResponse SearchService::feedback(const std::string& body) {
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error(400, "request body must be a JSON object", "request");
  for (const char* k : {"query", "candidateId", "verdict"})
    if (!req.contains(k) || !req[k].is_string()) return error(400, std::string("'") + k + "' must be a string", "request");
  std::string verdict = req["verdict"].get<std::string>();
  if (verdict != "like" && verdict != "dislike") return error(400, "verdict must be 'like' or 'dislike'", "request");
  try {
    log_.append({req["candidateId"].get<std::string>(), req["query"].get<std::string>(), verdict, utc_now()});
  } catch (const std::exception& e) {
    return error(500, e.what(), "internal");
  }
  return {204, "", "application/json"};
}

HttpResponse SearchService::tables() const {
  json out = json::array();
  for (const auto& t : ws_.catalog().tables()) out.push_back(table_json(ws_.catalog(), t));
  return {200, out.dump()};
}

HttpResponse SearchService::table(const std::string& name) const {
  const CatalogTable* t = ws_.catalog().find_table(name);
  if (!t) return error(404, "unknown table '" + name + "'", "not-found");
  return {200, table_json(ws_.catalog(), *t).dump()};
}

struct HttpServer::Impl {
  SearchService& service;
  httplib::Server server;

  explicit Impl(SearchService& s) : service(s) {
    // httplib's default sets SO_REUSEPORT, which lets a second server share a busy port.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    auto send = [](httplib::Response& res, const HttpResponse& r) {
      res.status = r.status;
      if (r.status != 204) res.set_content(r.body, r.content_type);
    };
    server.Post("/search", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.search(req.body));
    });
    server.Post("/feedback", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.feedback(req.body));
    });
    server.Get("/schema/tables", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, service.tables());
    });
    server.Get(R"(/schema/table/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.table(req.matches[1]));
    });
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }
};

HttpServer::HttpServer(SearchService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int p = impl_->server.bind_to_any_port(host);
    if (p < 0) throw BindError("cannot bind " + host + " to a free port");
    return p;
  }
  if (!impl_->server.bind_to_port(host, port)) throw BindError("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }

}  // namespace ksdw
