#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined

  std::string first_line() const {
    auto eol = output.find('\n');
    return eol == std::string::npos ? output : output.substr(0, eol);
  }
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(MBRG_CLI) + " " + args + " 2>&1";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buffer;
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string fixture(const char* name) { return std::string(FIXTURES_DIR) + "/" + name; }

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "mbrg-cli-test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("verify: verdicts, witnesses and exit codes") {
  RunResult a = run("verify " + fixture("fix-a.pnet"));
  CHECK(a.exit_code == 1);
  CHECK(a.first_line() == "BLOCKING (obstructed at [1,0,0])");

  RunResult b = run("verify " + fixture("fix-b.pnet"));
  CHECK(b.exit_code == 1);
  CHECK(b.first_line() == "BLOCKING (non-final deadlock [0,0,0])");

  RunResult t = run("verify " + fixture("fix-t.pnet"));
  CHECK(t.exit_code == 0);
  CHECK(t.first_line() == "NONBLOCKING");

  RunResult ok = run("verify " + fixture("fix-a-allfinal.pnet"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.first_line() == "NONBLOCKING");
}

TEST_CASE("verify: cross-check, deadlock listing, fast mode") {
  RunResult a = run("verify --cross-check " + fixture("fix-a.pnet"));
  CHECK(a.exit_code == 1);  // blocking, but the oracle agrees
  CHECK(a.output.find("cross-check: oracle agrees") != std::string::npos);

  RunResult all = run("verify --all-deadlocks " + fixture("fix-b.pnet"));
  CHECK(all.output.find("non-final deadlocks (1): [0,0,0]") != std::string::npos);

  RunResult fast = run("verify --fast " + fixture("fix-b.pnet"));
  CHECK(fast.exit_code == 1);
  CHECK(fast.first_line() == "BLOCKING (non-final deadlock [0,0,0])");
}

TEST_CASE("verify: reports and deterministic output") {
  auto dir = temp_dir();
  auto report = dir / "report.json";

  RunResult r1 = run("verify --deterministic --report " + report.string() + " " +
                     fixture("fix-b.pnet"));
  CHECK(r1.exit_code == 1);
  std::string bytes1 = slurp(report);
  auto doc = nlohmann::json::parse(bytes1);
  CHECK(doc["verdict"] == "BLOCKING");
  CHECK(doc["reason"] == "NON_FINAL_DEADLOCK");
  CHECK(doc["witness"] == nlohmann::json({{"p1", 0}, {"p2", 0}, {"p3", 0}}));

  RunResult r2 = run("verify --deterministic --report " + report.string() + " " +
                     fixture("fix-b.pnet"));
  CHECK(r1.output == r2.output);
  CHECK(bytes1 == slurp(report));
}

TEST_CASE("brg: node and edge counts with pluralization") {
  CHECK(run("brg --minimax " + fixture("fix-a.pnet")).first_line() == "2 nodes, 3 edges");
  CHECK(run("brg --classical " + fixture("fix-a.pnet")).first_line() == "1 node, 1 edge");
  CHECK(run("brg --minimax " + fixture("fix-t.pnet")).first_line() == "1 node, 1 edge");
  CHECK(run("brg " + fixture("fix-b.pnet")).first_line() == "2 nodes, 4 edges");

  auto dir = temp_dir();
  auto dot = dir / "graph.dot";
  auto json = dir / "graph.json";
  RunResult r = run("brg --minimax --dot " + dot.string() + " --json " + json.string() + " " +
                    fixture("fix-a.pnet"));
  CHECK(r.exit_code == 0);
  CHECK(slurp(dot).find("digraph minimax_brg") == 0);
  CHECK(nlohmann::json::parse(slurp(json))["edges"].size() == 3);
}

TEST_CASE("oracle: reach size and classification counts") {
  CHECK(run("oracle " + fixture("fix-a.pnet")).first_line() == "|R|=5, blocking=2, dead=0");
  CHECK(run("oracle " + fixture("fix-b.pnet")).first_line() == "|R|=4, blocking=1, dead=1");
  CHECK(run("oracle " + fixture("fix-t.pnet")).first_line() == "|R|=1, blocking=0, dead=0");
}

TEST_CASE("gen: corpora are reproducible") {
  auto dir = temp_dir();
  auto out1 = dir / "corpus1";
  auto out2 = dir / "corpus2";
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);

  RunResult r1 = run("gen --seed 7 --count 12 --out " + out1.string());
  RunResult r2 = run("gen --seed 7 --count 12 --out " + out2.string());
  CHECK(r1.exit_code == 0);
  CHECK(r1.first_line().find("12 instances written") == 0);

  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(out1)) {
    ++files;
    auto other = out2 / entry.path().filename();
    REQUIRE(std::filesystem::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
    // every generated file is itself a valid verification input
    RunResult check = run("verify " + entry.path().string());
    CHECK((check.exit_code == 0 || check.exit_code == 1));
  }
  CHECK(files == 12);
}

TEST_CASE("error paths exit with code 2") {
  auto dir = temp_dir();
  auto bad = dir / "bad.pnet";
  std::ofstream(bad) << "places p1 p1\n";
  RunResult syntax = run("verify " + bad.string());
  CHECK(syntax.exit_code == 2);
  CHECK(syntax.output.find("line 1") != std::string::npos);

  RunResult missing = run("verify " + (dir / "nope.pnet").string());
  CHECK(missing.exit_code == 2);

  RunResult budget = run("verify --budget 1 " + fixture("fix-a.pnet"));
  CHECK(budget.exit_code == 2);
  CHECK(budget.output.find("budget") != std::string::npos);

  RunResult usage = run("frobnicate");
  CHECK(usage.exit_code == 2);
}
