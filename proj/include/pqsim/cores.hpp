#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pqsim/backend.hpp"
#include "pqsim/memhier.hpp"
#include "pqsim/predictor.hpp"
#include "pqsim/stats.hpp"
#include "pqsim/trace.hpp"

namespace pqsim {

enum class CoreKind { Proposed, InOrder, OutOfOrder };

const char* core_kind_name(CoreKind k);
std::optional<CoreKind> core_kind_from_name(const std::string& name);

struct CoreConfig {
  CoreKind core = CoreKind::Proposed;
  unsigned issue_width = 4;
  unsigned dispatch_width = 0;  // 0 = issue width
  unsigned commit_width = 0;    // 0 = issue width
  unsigned rob_size = 128;
  unsigned rs_size = 64;  // out-of-order only
  unsigned pq_size = 13;  // per-queue capacity, proposed only
  unsigned int_units = 2;
  unsigned fp_units = 1;
  unsigned branch_units = 1;
  unsigned ls_units = 1;
  DelayPolicy policy;
  SteeringScheme steering = SteeringScheme::TailDependencies;
  uint64_t int_mul_latency = 3;
  uint64_t fp_latency = 3;
  CacheLevelConfig l1{32 * 1024, 8, 64, 4, 8};
  CacheLevelConfig l2{512 * 1024, 8, 64, 8, 12};
  DramConfig dram{80, 4096, 40, 8, 8, 1};
  bool prefetcher = false;
  uint32_t prefetcher_streams = 16;
  std::optional<uint64_t> branch_penalty;  // default 8; 6 on the in-order core
  uint32_t delaycache_entries = 512;
  bool warmup_program_order = false;  // first instance of each pc issues in
                                      // program order (golden-example mode)
  bool warm_caches = false;           // install all trace lines before cycle 1
  uint64_t seed = 1;

  unsigned dispatch_w() const { return dispatch_width ? dispatch_width : issue_width; }
  unsigned commit_w() const { return commit_width ? commit_width : issue_width; }
  uint64_t branch_pen() const {
    if (branch_penalty) return *branch_penalty;
    return core == CoreKind::InOrder ? 6 : 8;
  }
  StaticDelayTable static_delays() const;
  void validate() const;
};

struct RunResult {
  RunStats stats;
  EventLog log;
  RunCounters counters;
};

RunResult run_proposed(const Trace& trace, const CoreConfig& config);
RunResult run_inorder(const Trace& trace, const CoreConfig& config);
RunResult run_ooo(const Trace& trace, const CoreConfig& config);

// run_proposed with the given delay policy selector.
RunResult run_variant(const Trace& trace, const CoreConfig& config,
                      DelaySelector selector);

// Dispatches on config.core.
RunResult run_core(const Trace& trace, const CoreConfig& config);

}  // namespace pqsim
