#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pqsim/config.hpp"
#include "pqsim/cores.hpp"
#include "pqsim/error.hpp"
#include "pqsim/stats.hpp"
#include "pqsim/table1.hpp"
#include "pqsim/trace.hpp"

namespace fs = std::filesystem;
using namespace pqsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInternal = 2;
constexpr int kExitGoldenMismatch = 3;

bool wildcard_match(const std::string& pattern, const std::string& name) {
  size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  if (pattern.find('*') == std::string::npos &&
      pattern.find('?') == std::string::npos)
    return {pattern};
  fs::path p(pattern);
  fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  std::string name_pattern = p.filename().string();
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (wildcard_match(name_pattern, entry.path().filename().string()))
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string label_of(const std::string& path) {
  return fs::path(path).stem().string();
}

int cmd_run(const std::string& trace_path, const std::string& config_path,
            const std::string& core_name, const std::string& policy_name,
            const std::string& events_path, const std::string& out_path) {
  Trace trace = load_trace(trace_path);
  CoreConfig cfg = load_config(config_path);
  if (!core_name.empty()) {
    auto k = core_kind_from_name(core_name);
    if (!k) throw ValidationError("unknown core: " + core_name);
    cfg.core = *k;
  }
  if (!policy_name.empty()) {
    auto p = delay_selector_from_name(policy_name);
    if (!p) throw ValidationError("unknown policy: " + policy_name);
    cfg.policy.selector = *p;
  }
  RunResult res = run_core(trace, cfg);
  {
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot open output file: " + out_path);
    write_stats(res.stats, out);
  }
  if (!events_path.empty()) {
    std::ofstream out(events_path);
    if (!out) throw ValidationError("cannot open event log file: " + events_path);
    write_event_log(res.log, out);
  }
  write_stats(res.stats, std::cout);
  return kExitOk;
}

int cmd_gen(const std::string& kernel, uint64_t iters, uint64_t seed,
            const std::string& out_path) {
  Trace trace = gen_kernel(kernel, iters, seed);
  save_trace(trace, out_path);
  std::cout << trace.ops.size() << " ops -> " << out_path << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& traces_glob,
                const std::vector<std::string>& config_paths,
                const std::string& baseline, const std::string& csv_path,
                unsigned jobs) {
  std::vector<std::string> trace_paths = expand_glob(traces_glob);
  if (trace_paths.empty())
    throw ValidationError("no traces match: " + traces_glob);
  if (config_paths.empty()) throw ValidationError("no configs given");

  struct Job {
    std::string trace_path, config_path;
  };
  std::vector<Job> grid;
  for (const auto& t : trace_paths)
    for (const auto& c : config_paths) grid.push_back({t, c});

  std::vector<std::optional<RunRow>> results(grid.size());
  std::vector<std::string> failures(grid.size());

  // Runs share nothing mutable, so the grid fans out freely; results land in
  // indexed slots to keep output order independent of the job count.
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      try {
        Trace trace = load_trace(grid[i].trace_path);
        CoreConfig cfg = load_config(grid[i].config_path);
        RunResult res = run_core(trace, cfg);
        RunRow row;
        row.label = label_of(grid[i].config_path);
        row.trace = label_of(grid[i].trace_path);
        row.core = core_kind_name(cfg.core);
        row.policy = delay_selector_name(cfg.policy.selector);
        row.stats = res.stats;
        results[i] = std::move(row);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<RunRow> rows;
  std::vector<std::string> failed;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (results[i])
      rows.push_back(*results[i]);
    else
      failed.push_back(grid[i].trace_path + " x " + grid[i].config_path + ": " +
                       failures[i]);
  }
  if (rows.empty()) throw ValidationError("all runs failed");

  CompareTable table = compare_runs(rows, baseline);
  {
    std::ofstream out(csv_path);
    if (!out) throw ValidationError("cannot open csv file: " + csv_path);
    write_compare_csv(table, out);
  }
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << rows.size() << " runs -> " << csv_path << "\n";
  if (!failed.empty()) {
    std::cerr << failed.size() << " runs failed:\n";
    for (const auto& f : failed) std::cerr << "  " << f << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_table1() {
  Table1Result r = run_table1_check();
  print_table1(r, std::cout);
  return r.ok ? kExitOk : kExitGoldenMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pqsim: trace-driven simulator of an issue-time-predicting core"};
  app.require_subcommand(1);

  std::string trace_path, config_path, core_name, policy_name, events_path,
      out_path;
  auto* run = app.add_subcommand("run", "Simulate one trace under one config");
  run->add_option("--trace", trace_path, "Trace file (.jsonl)")->required();
  run->add_option("--config", config_path, "Config file (key=value)")->required();
  run->add_option("--core", core_name, "Override core: proposed|inorder|ooo");
  run->add_option("--policy", policy_name,
                  "Override delay policy: learned|static-l1|hitmiss-l2|"
                  "hitmiss-dram|dependence-only");
  run->add_option("--events", events_path, "Write per-op event log (.jsonl)");
  run->add_option("--out", out_path, "Stats output file")->required();

  std::string kernel;
  uint64_t iters = 1, seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic kernel trace");
  gen->add_option("--kernel", kernel,
                  "table1|stream|pointer-chase|mixed-latency|random-dag")
      ->required();
  gen->add_option("--iters", iters, "Loop iterations")->required();
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out", out_path, "Trace output file")->required();

  std::string traces_glob, baseline, csv_path;
  std::vector<std::string> config_paths;
  unsigned jobs = 1;
  auto* compare = app.add_subcommand("compare", "Run a (trace, config) grid");
  compare->add_option("--traces", traces_glob, "Trace file or glob")->required();
  compare->add_option("--configs", config_paths, "Config files")->required();
  compare->add_option("--baseline", baseline, "Baseline config label")->required();
  compare->add_option("--csv", csv_path, "Comparison CSV output")->required();
  compare->add_option("--jobs", jobs, "Parallel runs");

  auto* table1 = app.add_subcommand("table1", "Check the built-in example schedule");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (run->parsed())
      return cmd_run(trace_path, config_path, core_name, policy_name,
                     events_path, out_path);
    if (gen->parsed()) return cmd_gen(kernel, iters, seed, out_path);
    if (compare->parsed())
      return cmd_compare(traces_glob, config_paths, baseline, csv_path, jobs);
    if (table1->parsed()) return cmd_table1();
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
