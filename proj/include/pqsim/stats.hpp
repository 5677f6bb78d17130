#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pqsim/memhier.hpp"
#include "pqsim/trace.hpp"

namespace pqsim {

struct EventRecord {
  uint64_t seq = 0;
  uint64_t pc = 0;
  OpKind kind = OpKind::Nop;
  uint64_t dispatch = 0;
  uint64_t issue = 0;
  uint64_t complete = 0;
  uint64_t commit = 0;
  int32_t queue = -1;    // -1 on cores without per-unit queues
  uint64_t priority = 0; // queue ordering key (proposed core)
  uint64_t pred = 0;     // predicted issue cycle, when the core predicts
  bool debut = false;    // first instance of the pc, or DelayCache miss
  std::optional<MemLevel> level;
};

using EventLog = std::vector<EventRecord>;

// Counters a run exports alongside its log; these are not reconstructible
// from per-op records alone.
struct RunCounters {
  uint64_t head_stall_cycles = 0;
  std::vector<uint64_t> head_stall_per_queue;
  std::optional<double> delaycache_hit_rate;
  std::optional<double> repeat_accuracy;
  bool has_predictions = false;
  MemStats mem;
};

struct RunStats {
  uint64_t cycles = 0;
  uint64_t committed = 0;
  double ipc = 0.0;
  uint64_t head_stall_cycles = 0;
  std::vector<uint64_t> head_stall_per_queue;
  uint64_t debut_cycles = 0;
  uint64_t repeated_cycles = 0;
  uint64_t debut_ops = 0;
  uint64_t repeated_ops = 0;
  std::optional<double> delaycache_hit_rate;
  std::optional<double> repeat_accuracy;
  std::optional<double> mae_issue_prediction;
  uint64_t l1_hits = 0;
  uint64_t l2_hits = 0;
  uint64_t dram_accesses = 0;
};

// Pure reduction of a finished run. Throws InternalError when a record
// violates dispatch <= issue < complete <= commit.
RunStats reduce(const EventLog& log, const RunCounters& counters);

// Stable key=value serialization (fixed key order, 6-decimal floats,
// undefined ratios printed as n/a).
void write_stats(const RunStats& s, std::ostream& out);
std::string stats_to_string(const RunStats& s);

void write_event_log(const EventLog& log, std::ostream& out);

struct RunRow {
  std::string label;   // config label
  std::string trace;
  std::string core;
  std::string policy;
  RunStats stats;
};

struct CompareTable {
  std::vector<RunRow> rows;                 // input order preserved
  std::vector<double> ipc_rel;              // vs baseline label, same trace
  std::vector<std::string> warnings;
};

CompareTable compare_runs(const std::vector<RunRow>& rows,
                          const std::string& baseline_label);
void write_compare_csv(const CompareTable& table, std::ostream& out);

// Plot-ready (x, ipc) rows for the sensitivity sweeps.
extern const std::vector<std::string> kSeriesMetrics;
std::string series_csv(const std::string& metric,
                       const std::vector<std::pair<double, RunStats>>& points);

}  // namespace pqsim
