#include "pqsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pqsim/error.hpp"

namespace pqsim {

RunStats reduce(const EventLog& log, const RunCounters& counters) {
  RunStats s;
  s.head_stall_cycles = counters.head_stall_cycles;
  s.head_stall_per_queue = counters.head_stall_per_queue;
  s.delaycache_hit_rate = counters.delaycache_hit_rate;
  s.repeat_accuracy = counters.repeat_accuracy;
  s.l1_hits = counters.mem.l1_hits;
  s.l2_hits = counters.mem.l2_hits;
  s.dram_accesses = counters.mem.dram_accesses;

  uint64_t abs_err_sum = 0;
  for (const EventRecord& r : log) {
    internal_check(r.dispatch <= r.issue, "event log: issue before dispatch at op " +
                                              std::to_string(r.seq));
    internal_check(r.issue < r.complete, "event log: complete not after issue at op " +
                                             std::to_string(r.seq));
    internal_check(r.complete <= r.commit, "event log: commit before complete at op " +
                                               std::to_string(r.seq));
    s.cycles = std::max(s.cycles, r.commit);
    ++s.committed;
    uint64_t exec = r.complete - r.issue;
    if (r.debut) {
      ++s.debut_ops;
      s.debut_cycles += exec;
    } else {
      ++s.repeated_ops;
      s.repeated_cycles += exec;
    }
    if (counters.has_predictions)
      abs_err_sum += r.pred > r.issue ? r.pred - r.issue : r.issue - r.pred;
  }
  if (s.cycles > 0) s.ipc = static_cast<double>(s.committed) / static_cast<double>(s.cycles);
  if (counters.has_predictions && s.committed > 0)
    s.mae_issue_prediction =
        static_cast<double>(abs_err_sum) / static_cast<double>(s.committed);
  return s;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string("n/a");
}

}  // namespace

void write_stats(const RunStats& s, std::ostream& out) {
  out << "cycles=" << s.cycles << "\n";
  out << "committed=" << s.committed << "\n";
  out << "ipc=" << fmt_double(s.ipc) << "\n";
  out << "head_stall_cycles=" << s.head_stall_cycles << "\n";
  out << "debut_cycles=" << s.debut_cycles << "\n";
  out << "repeated_cycles=" << s.repeated_cycles << "\n";
  out << "delaycache_hit_rate=" << fmt_opt(s.delaycache_hit_rate) << "\n";
  out << "repeat_accuracy=" << fmt_opt(s.repeat_accuracy) << "\n";
  out << "mae_issue_prediction=" << fmt_opt(s.mae_issue_prediction) << "\n";
  out << "l1_hits=" << s.l1_hits << "\n";
  out << "l2_hits=" << s.l2_hits << "\n";
  out << "dram_accesses=" << s.dram_accesses << "\n";
  out << "debut_ops=" << s.debut_ops << "\n";
  out << "repeated_ops=" << s.repeated_ops << "\n";
  for (size_t i = 0; i < s.head_stall_per_queue.size(); ++i)
    out << "head_stall_q" << i << "=" << s.head_stall_per_queue[i] << "\n";
}

std::string stats_to_string(const RunStats& s) {
  std::ostringstream os;
  write_stats(s, os);
  return os.str();
}

void write_event_log(const EventLog& log, std::ostream& out) {
  for (const EventRecord& r : log) {
    nlohmann::json j;
    std::ostringstream pc;
    pc << "0x" << std::hex << r.pc;
    j["seq"] = r.seq;
    j["pc"] = pc.str();
    j["kind"] = op_kind_name(r.kind);
    j["dispatch"] = r.dispatch;
    j["issue"] = r.issue;
    j["complete"] = r.complete;
    j["commit"] = r.commit;
    if (r.queue >= 0) j["queue"] = r.queue;
    j["priority"] = r.priority;
    j["pred"] = r.pred;
    j["debut"] = r.debut;
    if (r.level) j["level"] = mem_level_name(*r.level);
    out << j.dump() << "\n";
  }
}

CompareTable compare_runs(const std::vector<RunRow>& rows,
                          const std::string& baseline_label) {
  if (rows.empty()) throw ValidationError("compare needs at least one run");
  CompareTable table;
  table.rows = rows;
  table.ipc_rel.resize(rows.size(), 0.0);

  bool baseline_seen = false;
  for (const RunRow& r : rows)
    if (r.label == baseline_label) baseline_seen = true;
  if (!baseline_seen)
    throw ValidationError("baseline label not found: " + baseline_label);

  // Per-label trace sets should agree; differing sets usually mean a typo'd
  // sweep, so flag them.
  std::vector<std::string> labels;
  for (const RunRow& r : rows)
    if (std::find(labels.begin(), labels.end(), r.label) == labels.end())
      labels.push_back(r.label);
  auto traces_of = [&](const std::string& label) {
    std::vector<std::string> t;
    for (const RunRow& r : rows)
      if (r.label == label) t.push_back(r.trace);
    std::sort(t.begin(), t.end());
    return t;
  };
  auto base_traces = traces_of(labels.front());
  for (size_t i = 1; i < labels.size(); ++i) {
    if (traces_of(labels[i]) != base_traces)
      table.warnings.push_back("trace sets differ between '" + labels.front() +
                               "' and '" + labels[i] + "'");
  }

  for (size_t i = 0; i < rows.size(); ++i) {
    const RunRow& r = rows[i];
    double base_ipc = 0.0;
    for (const RunRow& b : rows) {
      if (b.label == baseline_label && b.trace == r.trace) {
        base_ipc = b.stats.ipc;
        break;
      }
    }
    table.ipc_rel[i] = base_ipc > 0.0 ? r.stats.ipc / base_ipc : 0.0;
  }
  return table;
}

void write_compare_csv(const CompareTable& table, std::ostream& out) {
  out << "trace,config,core,policy,cycles,committed,ipc,ipc_rel\n";
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const RunRow& r = table.rows[i];
    out << r.trace << "," << r.label << "," << r.core << "," << r.policy << ","
        << r.stats.cycles << "," << r.stats.committed << ","
        << fmt_double(r.stats.ipc) << "," << fmt_double(table.ipc_rel[i]) << "\n";
  }
}

const std::vector<std::string> kSeriesMetrics = {
    "ipc-vs-pq-size", "ipc-vs-delaycache", "ipc-vs-units",
    "ipc-vs-training-interval"};

std::string series_csv(const std::string& metric,
                       const std::vector<std::pair<double, RunStats>>& points) {
  if (std::find(kSeriesMetrics.begin(), kSeriesMetrics.end(), metric) ==
      kSeriesMetrics.end())
    throw ValidationError("unknown series metric: " + metric);
  std::string x_name = metric.substr(std::string("ipc-vs-").size());
  std::ostringstream os;
  os << x_name << ",ipc\n";
  for (const auto& [x, stats] : points) {
    double rounded = std::round(x);
    if (rounded == x)
      os << static_cast<long long>(rounded);
    else
      os << fmt_double(x);
    os << "," << fmt_double(stats.ipc) << "\n";
  }
  return os.str();
}

}  // namespace pqsim
