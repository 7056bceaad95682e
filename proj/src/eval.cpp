#include "ksdw/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ksdw/text.hpp"

namespace ksdw {

PrecisionRecall compare_results(const ResultSet& candidate, const ResultSet& gold) {
  PrecisionRecall pr;
  std::vector<std::pair<size_t, size_t>> shared;  // (candidate column, gold column)
  std::set<std::string> used;
  for (size_t i = 0; i < candidate.headers.size(); ++i) {
    std::string h = fold(candidate.headers[i]);
    if (used.count(h)) continue;
    for (size_t j = 0; j < gold.headers.size(); ++j) {
      if (fold(gold.headers[j]) == h) {
        shared.emplace_back(i, j);
        used.insert(h);
        break;
      }
    }
  }
  if (shared.empty()) {
    pr.diagnostic = "no shared columns between candidate and gold";
    return pr;
  }
  auto project = [&](const ResultSet& rs, bool cand) {
    std::set<Row> out;
    for (const auto& row : rs.rows) {
      Row p;
      for (const auto& [ci, gi] : shared) p.push_back(row[cand ? ci : gi]);
      out.insert(std::move(p));
    }
    return out;
  };
  auto c = project(candidate, true);
  auto g = project(gold, false);
  size_t common = 0;
  for (const auto& row : c) common += g.count(row);
  pr.precision = c.empty() ? 0.0 : static_cast<double>(common) / static_cast<double>(c.size());
  pr.recall = g.empty() ? 0.0 : static_cast<double>(common) / static_cast<double>(g.size());
  return pr;
}

namespace {

std::optional<Expectation> parse_expectation(const std::vector<std::string>& words, size_t line) {
  Expectation e;
  for (size_t i = 1; i < words.size(); ++i) {
    const std::string& w = words[i];
    auto bad = [&] { return SuiteError("suite line " + std::to_string(line) + ": bad expectation '" + w + "'"); };
    size_t pos = w.find(">=");
    size_t skip = 2;
    if (pos == std::string::npos) {
      pos = w.find('=');
      skip = 1;
    }
    if (pos == std::string::npos) throw bad();
    std::string key = to_lower_ascii(w.substr(0, pos));
    auto v = parse_number(w.substr(pos + skip));
    if (!v || *v < 0) throw bad();
    if (key == "p" || key == "precision") e.precision = *v;
    else if (key == "r" || key == "recall") e.recall = *v;
    else if (key == "candidates") e.min_candidates = static_cast<size_t>(*v);
    else throw bad();
  }
  return e;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

std::vector<GoldStandard> parse_suite(std::string_view text) {
  std::vector<GoldStandard> out;
  std::vector<std::pair<std::vector<std::string>, size_t>> expects;
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t line_no = 0;
  std::optional<GoldStandard> cur;
  bool in_gold = false;

  auto finish = [&] {
    if (!cur) return;
    if (cur->id.empty()) throw SuiteError("suite line " + std::to_string(line_no) + ": block without id");
    if (trim(cur->query).empty()) throw SuiteError("suite query " + cur->id + ": missing query");
    if (trim(cur->gold_sql).empty()) throw SuiteError("suite query " + cur->id + ": missing gold SQL");
    for (const auto& q : out)
      if (q.id == cur->id) throw SuiteError("suite query " + cur->id + ": duplicate id");
    out.push_back(std::move(*cur));
    cur.reset();
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = trim(raw);
    if (line.empty()) {
      in_gold = false;
      finish();
      continue;
    }
    if (line.front() == '#') continue;
    auto colon = line.find(':');
    std::string key = colon == std::string::npos ? "" : to_lower_ascii(trim(line.substr(0, colon)));
    static const std::set<std::string> kKeys = {"id", "query", "type", "note", "gold", "expect"};
    if (in_gold && !kKeys.count(key)) {
      cur->gold_sql += (cur->gold_sql.empty() ? "" : "\n") + line;
      continue;
    }
    in_gold = false;
    if (!kKeys.count(key)) throw SuiteError("suite line " + std::to_string(line_no) + ": expected 'key: value'");
    std::string value = trim(line.substr(colon + 1));
    if (key == "expect") {
      expects.emplace_back(split_words(value), line_no);
      continue;
    }
    if (!cur) cur.emplace();
    if (key == "id") {
      if (!cur->id.empty()) throw SuiteError("suite line " + std::to_string(line_no) + ": second id in one block");
      cur->id = value;
    } else if (key == "query") {
      cur->query = value;
    } else if (key == "note") {
      cur->note = value;
    } else if (key == "type") {
      for (char c : value) {
        if (c == ',' || c == ' ') continue;
        if (std::string("BSDIPA").find(c) == std::string::npos)
          throw SuiteError("suite line " + std::to_string(line_no) + ": unknown type tag '" + std::string(1, c) + "'");
        cur->types.emplace_back(1, c);
      }
    } else {
      cur->gold_sql = value;
      in_gold = true;
    }
  }
  finish();

  for (const auto& [words, line] : expects) {
    if (words.empty()) throw SuiteError("suite line " + std::to_string(line) + ": expect needs a query id");
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& q) { return q.id == words[0]; });
    if (it == out.end()) throw SuiteError("suite line " + std::to_string(line) + ": unknown query id '" + words[0] + "'");
    it->expect = parse_expectation(words, line);
  }
  return out;
}

std::vector<GoldStandard> load_suite_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SuiteError("suite not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_suite(ss.str());
}

bool EvalReport::all_passed() const {
  return std::all_of(queries.begin(), queries.end(), [](const auto& q) { return q.passed; });
}

EvalReport run_benchmark(const std::vector<GoldStandard>& suite, const Workspace& ws) {
  using clock = std::chrono::steady_clock;
  EvalReport report;
  for (const auto& gs : suite) {
    auto t0 = clock::now();
    QueryEval q;
    q.id = gs.id;
    q.query = gs.query;
    q.types = gs.types;
    q.expect = gs.expect;

    std::optional<ResultSet> gold;
    try {
      gold = execute(parse_sql(gs.gold_sql), ws.store());
      q.gold_rows = gold->rows.size();
    } catch (const std::exception& e) {
      q.diagnostics.push_back(std::string("gold SQL failed: ") + e.what());
    }

    if (gold) {
      try {
        PipelineOptions opts = ws.config().pipeline_options();
        opts.execute = false;
        SearchResult r = run_pipeline(gs.query, ws.context(), opts);
        q.complexity = r.complexity;
        q.pipeline_ms = r.pipeline_ms;
        for (const auto& d : r.diagnostics) q.diagnostics.push_back(d);
        for (const auto& c : r.candidates) {
          CandidateEval ce;
          ce.rank = c.rank;
          ce.id = c.id;
          ce.sql = c.sql_text;
          if (!c.sql) {
            ce.diagnostic = c.diagnostics.empty() ? "no SQL" : c.diagnostics.front();
          } else {
            try {
              ResultSet rs = execute(*c.sql, ws.store());
              ce.rows = rs.rows.size();
              auto pr = compare_results(rs, *gold);
              ce.precision = pr.precision;
              ce.recall = pr.recall;
              ce.diagnostic = pr.diagnostic;
            } catch (const std::exception& e) {
              ce.diagnostic = e.what();
            }
          }
          if (ce.precision > 0 && ce.recall > 0) ++q.positive;
          if (ce.precision == 0 && ce.recall == 0) ++q.zero;
          q.candidates.push_back(std::move(ce));
        }
      } catch (const std::exception& e) {
        q.diagnostics.push_back(e.what());
      }
    }

    for (size_t i = 0; i < q.candidates.size(); ++i) {
      const auto& c = q.candidates[i];
      if (!q.best || c.precision + c.recall > q.best_precision + q.best_recall) {
        q.best = i;
        q.best_precision = c.precision;
        q.best_recall = c.recall;
      }
    }
    if (q.expect) {
      constexpr double eps = 1e-9;
      const auto& e = *q.expect;
      if (!gold) q.passed = false;
      if (e.precision && q.best_precision + eps < *e.precision) q.passed = false;
      if (e.recall && q.best_recall + eps < *e.recall) q.passed = false;
      if (e.min_candidates) {
        std::set<std::string> distinct;
        for (const auto& c : q.candidates)
          if (!c.sql.empty()) distinct.insert(c.sql);
        if (distinct.size() < *e.min_candidates) q.passed = false;
      }
    }
    q.total_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    report.queries.push_back(std::move(q));
  }
  return report;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string table(const std::vector<std::string>& headers, const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width(headers.size());
  for (size_t c = 0; c < headers.size(); ++c) width[c] = headers[c].size();
  for (const auto& r : rows)
    for (size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    std::string l;
    for (size_t c = 0; c < cells.size(); ++c) {
      if (c) l += "  ";
      l += cells[c] + std::string(width[c] - cells[c].size(), ' ');
    }
    while (!l.empty() && l.back() == ' ') l.pop_back();
    out += l + "\n";
  };
  line(headers);
  std::vector<std::string> rule;
  for (size_t w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& r : rows) line(r);
  return out;
}

}  // namespace

std::string format_report(const EvalReport& r) {
  std::vector<std::vector<std::string>> pr_rows, rt_rows;
  for (const auto& q : r.queries) {
    std::string status = !q.expect ? "" : q.passed ? "ok" : "MISS";
    pr_rows.push_back({q.id, join(q.types, ","), q.query, std::to_string(q.complexity),
                       std::to_string(q.candidates.size()), fixed(q.best_precision, 2), fixed(q.best_recall, 2),
                       std::to_string(q.positive), std::to_string(q.zero), status});
    rt_rows.push_back({q.id, fixed(q.pipeline_ms, 2), fixed(q.total_ms, 2)});
  }
  std::string out = "Precision and recall (best candidate)\n";
  out += table({"id", "type", "query", "complexity", "#results", "P", "R", "#P,R>0", "#P,R=0", "expect"}, pr_rows);
  out += "\nRuntime (ms)\n";
  out += table({"id", "pipeline", "total"}, rt_rows);
  for (const auto& q : r.queries)
    for (const auto& d : q.diagnostics) out += q.id + ": " + d + "\n";
  return out;
}

std::string report_json(const EvalReport& r) {
  using nlohmann::json;
  json queries = json::array();
  for (const auto& q : r.queries) {
    json cands = json::array();
    for (const auto& c : q.candidates)
      cands.push_back({{"rank", c.rank}, {"id", c.id}, {"sql", c.sql}, {"precision", c.precision},
                       {"recall", c.recall}, {"rows", c.rows}, {"diagnostic", c.diagnostic}});
    json jq = {{"id", q.id},
               {"query", q.query},
               {"types", q.types},
               {"complexity", q.complexity},
               {"candidates", cands},
               {"best", q.best ? json(*q.best) : json(nullptr)},
               {"bestPrecision", q.best_precision},
               {"bestRecall", q.best_recall},
               {"positive", q.positive},
               {"zero", q.zero},
               {"goldRows", q.gold_rows},
               {"pipelineMs", q.pipeline_ms},
               {"totalMs", q.total_ms},
               {"diagnostics", q.diagnostics},
               {"passed", q.passed}};
    queries.push_back(std::move(jq));
  }
  return json{{"queries", queries}, {"passed", r.all_passed()}}.dump(2);
}

}  // namespace ksdw
