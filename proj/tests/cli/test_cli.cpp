// Exit-code and file contract of the command-line tool. Exercised against
// the real binary; paths come in via PQSIM_BIN.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(PQSIM_BIN) + " " + args + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string capture_stderr(const std::string& args) {
  fs::path tmp = fs::temp_directory_path() / "pqsim_cli_err.txt";
  std::string cmd = std::string(PQSIM_BIN) + " " + args + " 2>" + tmp.string() +
                    " >/dev/null";
  int rc = std::system(cmd.c_str());
  (void)rc;  // callers assert on the captured text
  std::ifstream in(tmp);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path workdir() {
  fs::path dir = fs::temp_directory_path() / "pqsim_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gen writes deterministic traces and rejects unknown kernels") {
  fs::path dir = workdir();
  auto a = dir / "a.jsonl";
  auto b = dir / "b.jsonl";
  CHECK(run_cli("gen --kernel table1 --iters 2 --seed 7 --out " + a.string()) == 0);
  CHECK(run_cli("gen --kernel table1 --iters 2 --seed 7 --out " + b.string()) == 0);
  std::string text = slurp(a);
  CHECK(text == slurp(b));
  size_t lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == 24);
  CHECK(run_cli("gen --kernel bogus --iters 2 --out " + a.string()) == 1);
}

TEST_CASE("run writes stats and fails cleanly on bad configs") {
  fs::path dir = workdir();
  auto trace = dir / "t.jsonl";
  REQUIRE(run_cli("gen --kernel stream --iters 50 --seed 1 --out " +
                  trace.string()) == 0);
  auto good = dir / "good.cfg";
  {
    std::ofstream out(good);
    out << "core = proposed\n";
  }
  auto stats = dir / "out.txt";
  CHECK(run_cli("run --trace " + trace.string() + " --config " + good.string() +
                " --out " + stats.string()) == 0);
  std::string text = slurp(stats);
  CHECK(text.find("ipc=") != std::string::npos);
  CHECK(text.find("cycles=") != std::string::npos);

  auto bad = dir / "bad.cfg";
  {
    std::ofstream out(bad);
    out << "core = proposed\nl1-sise = 32K\n";
  }
  CHECK(run_cli("run --trace " + trace.string() + " --config " + bad.string() +
                " --out " + stats.string()) == 1);
  std::string err = capture_stderr("run --trace " + trace.string() +
                                   " --config " + bad.string() + " --out " +
                                   stats.string());
  CHECK(err.find("l1-sise") != std::string::npos);  // message names the key
}

TEST_CASE("run emits a parseable event log") {
  fs::path dir = workdir();
  auto trace = dir / "t2.jsonl";
  REQUIRE(run_cli("gen --kernel table1 --iters 2 --seed 1 --out " +
                  trace.string()) == 0);
  auto cfg = dir / "c.cfg";
  {
    std::ofstream out(cfg);
    out << "core = proposed\nwarm-caches = on\n";
  }
  auto stats = dir / "s.txt";
  auto events = dir / "e.jsonl";
  CHECK(run_cli("run --trace " + trace.string() + " --config " + cfg.string() +
                " --out " + stats.string() + " --events " + events.string()) == 0);
  std::ifstream in(events);
  std::string line;
  size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(line.find("\"seq\":") != std::string::npos);
    CHECK(line.find("\"issue\":") != std::string::npos);
  }
  CHECK(lines == 24);
}

TEST_CASE("compare rejects a missing baseline label") {
  fs::path dir = workdir();
  auto trace = dir / "t3.jsonl";
  REQUIRE(run_cli("gen --kernel stream --iters 20 --seed 1 --out " +
                  trace.string()) == 0);
  auto cfg = dir / "one.cfg";
  {
    std::ofstream out(cfg);
    out << "core = inorder\n";
  }
  auto csv = dir / "out.csv";
  CHECK(run_cli("compare --traces " + trace.string() + " --configs " +
                cfg.string() + " --baseline nosuch --csv " + csv.string()) == 1);
  CHECK(run_cli("compare --traces " + trace.string() + " --configs " +
                cfg.string() + " --baseline one --csv " + csv.string()) == 0);
  std::string text = slurp(csv);
  CHECK(text.rfind("trace,config,core,policy,cycles,committed,ipc,ipc_rel\n", 0) == 0);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("run --trace nope.jsonl") == 1);          // missing flags
  CHECK(run_cli("frobnicate") == 1);                      // unknown subcommand
  CHECK(run_cli("run --trace /does/not/exist.jsonl --config also-missing "
                "--out x.txt") == 1);
}
