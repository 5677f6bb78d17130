#pragma once

// Shared per-run machinery for the three pipeline drivers.

#include <map>
#include <optional>
#include <vector>

#include "pqsim/cores.hpp"
#include "pqsim/error.hpp"
#include "pqsim/rename.hpp"

namespace pqsim {
namespace detail {

// Per-op timing state, indexed by trace seq.
struct OpState {
  uint64_t dispatch = 0;
  uint64_t issue = 0;
  uint64_t complete = 0;
  uint64_t commit = 0;
  uint64_t pred = 0;
  uint64_t priority = 0;
  int32_t queue = -1;
  uint64_t instance = 1;        // k-th dynamic execution of this pc
  bool dispatched = false;
  bool issued = false;
  bool probe_missed = false;    // DelayCache had no entry at dispatch
  bool missed_l1 = false;
  std::optional<MemLevel> level;
  uint64_t mem_witness = 0;
  std::vector<PhysReg> src_phys;
  PhysReg dst_phys = kNoPhysReg;
  PhysReg prev_dst_phys = kNoPhysReg;
};

class CompletionQueue {
public:
  void schedule(uint64_t cycle, uint64_t seq) { events_[cycle].push_back(seq); }

  std::vector<uint64_t> pop_due(uint64_t cycle) {
    std::vector<uint64_t> out;
    auto it = events_.begin();
    while (it != events_.end() && it->first <= cycle) {
      out.insert(out.end(), it->second.begin(), it->second.end());
      it = events_.erase(it);
    }
    return out;
  }

  std::optional<uint64_t> next_cycle() const {
    if (events_.empty()) return std::nullopt;
    return events_.begin()->first;
  }

private:
  std::map<uint64_t, std::vector<uint64_t>> events_;
};

// Tracks per-pc dynamic instance numbers.
class InstanceCounter {
public:
  uint64_t next(uint64_t pc) { return ++counts_[pc]; }

private:
  std::unordered_map<uint64_t, uint64_t> counts_;
};

inline void check_trace_runnable(const Trace& trace, const CoreConfig& cfg) {
  auto violations = validate_trace(trace);
  if (!violations.empty())
    throw ValidationError("invalid trace: op " +
                          std::to_string(violations.front().seq) + ": " +
                          violations.front().rule);
  for (const MicroOp& op : trace.ops) {
    unsigned units = 0;
    switch (op.kind) {
      case OpKind::IntAlu:
      case OpKind::IntMul:
      case OpKind::Nop: units = cfg.int_units; break;
      case OpKind::Fp: units = cfg.fp_units; break;
      case OpKind::Branch: units = cfg.branch_units; break;
      case OpKind::Load:
      case OpKind::Store: units = cfg.ls_units; break;
    }
    if (units == 0)
      throw ValidationError(std::string("trace uses kind '") +
                            op_kind_name(op.kind) + "' but no unit is configured");
  }
}

inline void warm_all(MemoryHierarchy& mem, const Trace& trace) {
  for (const MicroOp& op : trace.ops)
    if (op.addr) mem.warm(*op.addr);
}

inline EventLog build_log(const Trace& trace, const std::vector<OpState>& ops) {
  EventLog log;
  log.reserve(trace.ops.size());
  for (size_t i = 0; i < trace.ops.size(); ++i) {
    const MicroOp& op = trace.ops[i];
    const OpState& s = ops[i];
    EventRecord r;
    r.seq = op.seq;
    r.pc = op.pc;
    r.kind = op.kind;
    r.dispatch = s.dispatch;
    r.issue = s.issue;
    r.complete = s.complete;
    r.commit = s.commit;
    r.queue = s.queue;
    r.priority = s.priority;
    r.pred = s.pred;
    r.debut = s.instance == 1 ||
              (op.kind == OpKind::Load && s.missed_l1 && s.probe_missed);
    r.level = s.level;
    log.push_back(r);
  }
  return log;
}

constexpr uint64_t kMaxRunCycles = 1ull << 40;  // runaway-simulation guard

}  // namespace detail
}  // namespace pqsim
