#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "fixture.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with a clean KSDW_ environment; stderr is folded into the output.
Run run_cli(const std::string& args) {
  std::string cmd = "env -u KSDW_CONFIG " + std::string(KSDW_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string conf() { return "-c " + ksdw::testing::data_path("minibank/workspace.conf"); }

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    auto p = path / name;
    fs::create_directories(p.parent_path());
    std::ofstream(p) << content;
    return p.string();
  }
};

}  // namespace

TEST(CliIndex, Fixture) {
  auto r = run_cli(conf() + " index");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "tables: 8\n")) << r.out;
  EXPECT_TRUE(contains(r.out, "rows: 570\n")) << r.out;
}

TEST(CliIndex, MissingManifest) {
  auto r = run_cli(conf() + " --manifest /nonexistent/manifest.txt index");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "manifest not found")) << r.out;
}

TEST(CliIndex, EmptyCsvs) {
  TempDir dir("ksdw_cli_empty");
  std::ifstream manifest(ksdw::testing::data_path("minibank/manifest.txt"));
  std::string table, line;
  std::map<std::string, std::string> headers;
  while (std::getline(manifest, line)) {
    if (line.rfind("table ", 0) == 0) table = line.substr(6);
    else if (line.rfind("column ", 0) == 0) {
      std::string col = line.substr(7, line.find(' ', 7) - 7);
      headers[table] += (headers[table].empty() ? "" : ",") + col;
    }
  }
  for (const auto& [t, h] : headers) dir.file("csv/" + t + ".csv", h + "\n");
  auto r = run_cli(conf() + " --csv-dir " + (dir.path / "csv").string() + " index");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "postings: 0\n")) << r.out;
  EXPECT_TRUE(contains(r.out, "rows: 0\n")) << r.out;
}

TEST(CliQuery, QueryOne) {
  auto r = run_cli(conf() + " query 'Sara Guttinger'");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "#1 ")) << r.out;
  EXPECT_TRUE(contains(r.out, "  SELECT *\n  FROM parties, individuals\n  WHERE parties.id = individuals.id\n"
                              "  AND individuals.firstName = 'Sara'\n  AND individuals.lastName = 'Guttinger'\n"))
      << r.out;
}

TEST(CliQuery, SqlOnlyQueryThree) {
  auto r = run_cli(conf() + " query --sql-only 'sum (amount) group by (transaction date)'");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.rfind("SELECT sum(fi_transactions.amount), fi_transactions.transactiondate\nFROM fi_transactions\n"
                        "GROUP BY fi_transactions.transactiondate\n",
                        0),
            0u)
      << r.out;
}

TEST(CliQuery, ExitCodes) {
  EXPECT_EQ(run_cli(conf() + " query ''").code, 3);
  EXPECT_EQ(run_cli(conf() + " query 'x >'").code, 3);
  auto none = run_cli(conf() + " query qzx");
  EXPECT_EQ(none.code, 0);
  EXPECT_TRUE(contains(none.out, "no results")) << none.out;
  EXPECT_TRUE(contains(none.out, "unmatched: qzx")) << none.out;
  EXPECT_EQ(run_cli("-c /nonexistent/ws.conf query Sara").code, 2);
  EXPECT_EQ(run_cli(conf() + " bogus").code, 2);
  EXPECT_EQ(run_cli("").code, 2);
}

TEST(CliQuery, ConfigFromEnvironment) {
  std::string cmd = "KSDW_CONFIG=" + ksdw::testing::data_path("minibank/workspace.conf") + " " +
                    std::string(KSDW_CLI_PATH) + " query --sql-only 'Sara Guttinger' 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  ASSERT_NE(p, nullptr);
  std::string out;
  char buf[1024];
  for (size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  EXPECT_EQ(pclose(p), 0);
  EXPECT_EQ(out.rfind("SELECT *\nFROM parties, individuals\n", 0), 0u) << out;
}

TEST(CliEval, Fixture) {
  auto r = run_cli(conf() + " eval");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "q1.0")) << r.out;
  EXPECT_TRUE(contains(r.out, "Precision and recall")) << r.out;
}

TEST(CliEval, UnknownExpectationId) {
  TempDir dir("ksdw_cli_suite");
  auto suite = dir.file("suite.txt", "id: a\nquery: Sara\ngold:\nSELECT * FROM individuals\n\nexpect: zz p=1\n");
  auto r = run_cli(conf() + " --suite " + suite + " eval");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "unknown query id")) << r.out;
}

TEST(CliEval, EmptySuite) {
  TempDir dir("ksdw_cli_empty_suite");
  auto suite = dir.file("suite.txt", "# no queries\n");
  EXPECT_EQ(run_cli(conf() + " --suite " + suite + " eval").code, 0);
}

TEST(CliEval, MissedExpectation) {
  TempDir dir("ksdw_cli_miss");
  auto suite = dir.file("suite.txt",
                        "id: a\nquery: Sara\ngold:\nSELECT * FROM individuals WHERE individuals.lastName = 'Keller'\n\n"
                        "expect: a p=1 r=1\n");
  auto r = run_cli(conf() + " --suite " + suite + " eval --json");
  EXPECT_EQ(r.code, 1) << r.out;
}

TEST(CliServe, InvalidConfigExitsBeforeBinding) {
  auto r = run_cli(conf() + " --graph /nonexistent/graph.tsv serve --port 0");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "graph not found")) << r.out;
}

TEST(CliServe, PortZeroPrintsBoundPort) {
  int fds[2];
  ASSERT_EQ(pipe(fds), 0);
  std::string cfg = ksdw::testing::data_path("minibank/workspace.conf");
  pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    unsetenv("KSDW_CONFIG");
    execl(KSDW_CLI_PATH, "ksdw", "-c", cfg.c_str(), "serve", "--port", "0", static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  std::string banner;
  char ch;
  while (read(fds[0], &ch, 1) == 1 && ch != '\n') banner.push_back(ch);
  close(fds[0]);
  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  EXPECT_TRUE(WIFEXITED(status) && WEXITSTATUS(status) == 0) << status;
  const std::string prefix = "listening on http://127.0.0.1:";
  ASSERT_EQ(banner.rfind(prefix, 0), 0u) << banner;
  int port = std::atoi(banner.c_str() + prefix.size());
  EXPECT_GT(port, 0);
  EXPECT_NE(port, 8080);
}
