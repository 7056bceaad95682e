#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ksdw/pipeline.hpp"
#include "ksdw/workspace.hpp"

namespace ksdw {

nlohmann::json value_json(const Value& v);
nlohmann::json result_set_json(const ResultSet& rs);
nlohmann::json candidate_json(const Candidate& c);
/// The SearchResponse shape shared by POST /search and `ksdw query --json`.
nlohmann::json search_response_json(const SearchResult& r);
nlohmann::json table_json(const SchemaCatalog& cat, const CatalogTable& t);

struct FeedbackRecord {
  std::string candidate_id;
  std::string query;
  std::string verdict;  // like | dislike
  std::string timestamp;  // UTC, ISO 8601

  nlohmann::json to_json() const;
};

/// Append-only; one JSON object per line. Appends are serialized. Without a path records are
/// only kept in memory.
class FeedbackLog {
 public:
  explicit FeedbackLog(std::string path = {});
  void append(const FeedbackRecord& r);
  std::vector<FeedbackRecord> records() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::vector<FeedbackRecord> records_;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Request handlers, independent of the HTTP transport. Read handlers are const and safe to
/// call concurrently.
class SearchService {
 public:
  SearchService(const Workspace& ws, FeedbackLog& log) : ws_(ws), log_(log) {}

  HttpResponse search(const std::string& body) const;
  HttpResponse feedback(const std::string& body);
  HttpResponse tables() const;
  HttpResponse table(const std::string& name) const;

 private:
  const Workspace& ws_;
  FeedbackLog& log_;
};

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// cpp-httplib front end with CORS headers on every response.
class HttpServer {
 public:
  explicit HttpServer(SearchService& service);
  ~HttpServer();

  /// Binds and returns the bound port (port 0 picks a free one). Throws BindError.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ksdw
