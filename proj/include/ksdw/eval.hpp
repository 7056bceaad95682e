#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ksdw/sql.hpp"
#include "ksdw/workspace.hpp"

namespace ksdw {

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
  std::string diagnostic;  // set when the column sets do not overlap
};

/// Rows are projected onto the shared (case-folded) column names and compared as sets.
/// Precision is 0 for an empty candidate, recall 0 for an empty gold set.
PrecisionRecall compare_results(const ResultSet& candidate, const ResultSet& gold);

class SuiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thresholds from `expect:` lines; the query passes when every set bound holds for its best
/// candidate.
struct Expectation {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<size_t> min_candidates;
};

struct GoldStandard {
  std::string id;
  std::string query;
  std::string gold_sql;
  std::vector<std::string> types;  // B, S, D, I, P, A
  std::string note;
  std::optional<Expectation> expect;
};

/// Blocks of `id:`, `query:`, `type:`, `note:` and `gold:` (SQL on the following lines, up to
/// a blank line), separated by blank lines; `expect: <id> p=1 r=1 candidates>=2` lines anywhere.
/// Throws SuiteError with the line number; an expectation naming an unknown id is an error.
std::vector<GoldStandard> parse_suite(std::string_view text);
std::vector<GoldStandard> load_suite_file(const std::string& path);

struct CandidateEval {
  size_t rank = 0;
  std::string id;
  std::string sql;
  double precision = 0;
  double recall = 0;
  size_t rows = 0;
  std::string diagnostic;
};

struct QueryEval {
  std::string id;
  std::string query;
  std::vector<std::string> types;
  uint64_t complexity = 0;
  std::vector<CandidateEval> candidates;
  std::optional<size_t> best;  // index of max P + R, first on ties
  double best_precision = 0;
  double best_recall = 0;
  size_t positive = 0;  // candidates with P > 0 and R > 0
  size_t zero = 0;      // candidates with P = 0 and R = 0
  size_t gold_rows = 0;
  double pipeline_ms = 0;
  double total_ms = 0;
  std::vector<std::string> diagnostics;
  std::optional<Expectation> expect;
  bool passed = true;  // expectation met (true without one)
};

struct EvalReport {
  std::vector<QueryEval> queries;
  bool all_passed() const;
};

EvalReport run_benchmark(const std::vector<GoldStandard>& suite, const Workspace& ws);

/// Aligned text: a precision/recall table, then a runtime table.
std::string format_report(const EvalReport& r);
std::string report_json(const EvalReport& r);

}  // namespace ksdw
