#include <algorithm>
#include <array>

#include "core_internal.hpp"
#include "pqsim/cores.hpp"
#include "pqsim/rename.hpp"

namespace pqsim {

using detail::CompletionQueue;
using detail::InstanceCounter;
using detail::OpState;

namespace {

struct UnitBudget {
  unsigned int_u, fp_u, br_u, ls_u;

  explicit UnitBudget(const CoreConfig& cfg)
      : int_u(cfg.int_units), fp_u(cfg.fp_units), br_u(cfg.branch_units),
        ls_u(cfg.ls_units) {}

  unsigned& of(OpKind k) {
    switch (k) {
      case OpKind::IntAlu:
      case OpKind::IntMul:
      case OpKind::Nop: return int_u;
      case OpKind::Fp: return fp_u;
      case OpKind::Branch: return br_u;
      case OpKind::Load:
      case OpKind::Store: return ls_u;
    }
    return int_u;
  }
};

}  // namespace

// Scoreboarded stall-on-use pipeline: strict program-order issue, completion
// out of order, in-order commit. Shares the memory model with the other
// cores so schedule differences come from scheduling alone.
RunResult run_inorder(const Trace& trace, const CoreConfig& cfg) {
  cfg.validate();
  detail::check_trace_runnable(trace, cfg);

  const size_t n_ops = trace.ops.size();
  const StaticDelayTable delays = cfg.static_delays();

  MemoryHierarchy mem(cfg.l1, cfg.l2, cfg.dram);
  if (cfg.warm_caches) detail::warm_all(mem, trace);
  const uint64_t line_sz = mem.line_size();

  StridePrefetcher prefetcher(cfg.prefetcher_streams);
  LoadStoreTracker lst;
  RepeatAccuracyTracker repeat;
  ReorderBuffer rob(cfg.rob_size);
  CompletionQueue comp;
  InstanceCounter instances;

  std::vector<OpState> ops(n_ops);
  std::array<uint64_t, kArchRegCount> avail{};  // value-ready cycle per register

  size_t cursor = 0;        // next op to dispatch
  uint64_t next_issue = 0;  // next op to issue, in program order
  uint64_t committed = 0;
  uint64_t dispatch_blocked_until = 0;
  uint64_t stall_cycles = 0;
  uint64_t cycle = 1;

  auto line_of = [&](const MicroOp& op) { return *op.addr / line_sz; };

  while (committed < n_ops) {
    internal_check(cycle < detail::kMaxRunCycles, "simulation did not converge");

    for (uint64_t seq : comp.pop_due(cycle)) {
      const MicroOp& op = trace.ops[seq];
      OpState& s = ops[seq];
      rob.mark_completed(seq, cycle);
      if (op.kind == OpKind::Store) lst.store_completed(seq, cycle);
      if (op.kind == OpKind::Load && s.missed_l1)
        repeat.observe(op.pc, cycle - s.issue);
    }

    bool committed_any = false;
    for (uint64_t seq : rob.commit(cycle, cfg.commit_w())) {
      const MicroOp& op = trace.ops[seq];
      OpState& s = ops[seq];
      s.commit = cycle;
      if (op.kind == OpKind::Store) lst.store_committed(seq);
      if (op.kind == OpKind::Load) {
        LoadStoreTracker::check_commit(seq, s.issue, s.mem_witness);
        if (cfg.prefetcher)
          for (uint64_t pf : prefetcher.observe(op.pc, *op.addr))
            mem.access(pf, static_cast<uint32_t>(line_sz), cycle,
                       AccessKind::Prefetch);
      }
      ++committed;
      committed_any = true;
    }

    unsigned dispatched = 0;
    while (dispatched < cfg.dispatch_w() && cursor < n_ops &&
           cycle > dispatch_blocked_until && !rob.full()) {
      const MicroOp& op = trace.ops[cursor];
      OpState& s = ops[cursor];
      s.dispatched = true;
      s.dispatch = cycle;
      s.instance = instances.next(op.pc);
      if (op.kind == OpKind::Store) lst.store_dispatched(op.seq, line_of(op));
      rob.push(op.seq);
      ++cursor;
      ++dispatched;
    }

    // Program-order issue, stopping at the first op that is not ready.
    // A stall-on-use block wastes every remaining issue slot of the cycle;
    // those lost slots are the in-order stall metric.
    bool issued_any = false;
    bool dep_blocked = false;
    UnitBudget budget(cfg);
    for (unsigned n = 0; n < cfg.issue_width; ++n) {
      if (next_issue >= n_ops) break;
      const MicroOp& op = trace.ops[next_issue];
      OpState& s = ops[next_issue];
      if (!s.dispatched || s.dispatch >= cycle) break;
      bool deps_ready = true;
      for (RegId r : op.srcs)
        if (avail[r] > cycle) { deps_ready = false; break; }
      if (deps_ready && op.kind == OpKind::Load &&
          !lst.load_ready(op.seq, line_of(op), cycle))
        deps_ready = false;
      if (!deps_ready) {
        dep_blocked = true;
        stall_cycles += cfg.issue_width - n;
        break;
      }
      if (budget.of(op.kind) == 0) break;
      --budget.of(op.kind);

      s.issue = cycle;
      s.issued = true;
      uint64_t latency;
      if (is_mem(op.kind)) {
        AccessResult res = mem.access(*op.addr, op.size.value_or(8), cycle,
                                      op.kind == OpKind::Load ? AccessKind::Load
                                                              : AccessKind::Store);
        latency = res.latency;
        s.level = res.level;
        s.missed_l1 = res.level != MemLevel::L1;
        if (op.kind == OpKind::Load)
          s.mem_witness = lst.load_issue_witness(op.seq, line_of(op));
      } else {
        latency = delays.delay_for(op.kind);
      }
      s.complete = cycle + latency;
      comp.schedule(s.complete, op.seq);
      if (op.dst) avail[*op.dst] = s.complete;
      if (op.token) avail[*op.token] = s.complete;
      if (op.kind == OpKind::Branch && op.mispred.value_or(false))
        dispatch_blocked_until =
            std::max(dispatch_blocked_until, cycle + cfg.branch_pen());
      ++next_issue;
      issued_any = true;
    }

    uint64_t next = cycle + 1;
    if (!issued_any && !committed_any && dispatched == 0 &&
        !rob.front_completed()) {
      bool dispatch_live = cursor < n_ops && !rob.full();
      auto nc = comp.next_cycle();
      if (!dispatch_live && nc) {
        next = std::max(next, *nc);
      } else if (dispatch_live && dispatch_blocked_until >= cycle + 1) {
        uint64_t target = dispatch_blocked_until + 1;
        if (nc) target = std::min(target, *nc);
        next = std::max(next, target);
      }
      if (next > cycle + 1 && dep_blocked)
        stall_cycles += (next - cycle - 1) * cfg.issue_width;
    }
    cycle = next;
  }

  RunResult result;
  result.counters.head_stall_cycles = stall_cycles;
  result.counters.head_stall_per_queue = {stall_cycles};
  result.counters.repeat_accuracy = repeat.accuracy();
  result.counters.has_predictions = false;
  result.counters.mem = mem.stats();
  result.log = detail::build_log(trace, ops);
  result.stats = reduce(result.log, result.counters);
  return result;
}

// Unified reservation station: wakeup on completion, oldest-first select
// among ready ops, same ROB / load-store ordering / commit as the others.
RunResult run_ooo(const Trace& trace, const CoreConfig& cfg) {
  cfg.validate();
  detail::check_trace_runnable(trace, cfg);

  const size_t n_ops = trace.ops.size();
  const StaticDelayTable delays = cfg.static_delays();

  MemoryHierarchy mem(cfg.l1, cfg.l2, cfg.dram);
  if (cfg.warm_caches) detail::warm_all(mem, trace);
  const uint64_t line_sz = mem.line_size();

  StridePrefetcher prefetcher(cfg.prefetcher_streams);
  RenameMap rename;
  LoadStoreTracker lst;
  RepeatAccuracyTracker repeat;
  ReorderBuffer rob(cfg.rob_size);
  CompletionQueue comp;
  InstanceCounter instances;

  std::vector<OpState> ops(n_ops);
  std::vector<uint64_t> rs;  // unissued in-flight ops, kept in seq order

  size_t cursor = 0;
  uint64_t committed = 0;
  uint64_t dispatch_blocked_until = 0;
  uint64_t cycle = 1;

  auto line_of = [&](const MicroOp& op) { return *op.addr / line_sz; };

  while (committed < n_ops) {
    internal_check(cycle < detail::kMaxRunCycles, "simulation did not converge");

    for (uint64_t seq : comp.pop_due(cycle)) {
      const MicroOp& op = trace.ops[seq];
      OpState& s = ops[seq];
      if (s.dst_phys != kNoPhysReg) rename.mark_completed(s.dst_phys, cycle);
      rob.mark_completed(seq, cycle);
      if (op.kind == OpKind::Store) lst.store_completed(seq, cycle);
      if (op.kind == OpKind::Load && s.missed_l1)
        repeat.observe(op.pc, cycle - s.issue);
    }

    bool committed_any = false;
    for (uint64_t seq : rob.commit(cycle, cfg.commit_w())) {
      const MicroOp& op = trace.ops[seq];
      OpState& s = ops[seq];
      s.commit = cycle;
      if (s.dst_phys != kNoPhysReg) rename.release(s.prev_dst_phys);
      if (op.kind == OpKind::Store) lst.store_committed(seq);
      if (op.kind == OpKind::Load) {
        LoadStoreTracker::check_commit(seq, s.issue, s.mem_witness);
        if (cfg.prefetcher)
          for (uint64_t pf : prefetcher.observe(op.pc, *op.addr))
            mem.access(pf, static_cast<uint32_t>(line_sz), cycle,
                       AccessKind::Prefetch);
      }
      ++committed;
      committed_any = true;
    }

    unsigned dispatched = 0;
    while (dispatched < cfg.dispatch_w() && cursor < n_ops &&
           cycle > dispatch_blocked_until && !rob.full() &&
           rs.size() < cfg.rs_size) {
      const MicroOp& op = trace.ops[cursor];
      if ((op.dst || op.token) && rename.free_count() == 0) break;
      auto renamed = rename.rename(op);
      internal_check(renamed.has_value(), "rename failed after free-list check");
      OpState& s = ops[cursor];
      s.dispatched = true;
      s.dispatch = cycle;
      s.instance = instances.next(op.pc);
      s.src_phys = renamed->src_phys;
      s.dst_phys = renamed->dst_phys;
      s.prev_dst_phys = renamed->prev_dst_phys;
      if (op.kind == OpKind::Store) lst.store_dispatched(op.seq, line_of(op));
      rob.push(op.seq);
      rs.push_back(op.seq);
      ++cursor;
      ++dispatched;
    }

    // Select: oldest ready first, capped by width and per-kind units.
    bool issued_any = false;
    UnitBudget budget(cfg);
    unsigned width_left = cfg.issue_width;
    for (size_t i = 0; i < rs.size() && width_left > 0;) {
      uint64_t seq = rs[i];
      const MicroOp& op = trace.ops[seq];
      OpState& s = ops[seq];
      bool ready = s.dispatch < cycle;
      if (ready)
        for (PhysReg r : s.src_phys)
          if (!rename.completed(r, cycle)) { ready = false; break; }
      if (ready && op.kind == OpKind::Load &&
          !lst.load_ready(op.seq, line_of(op), cycle))
        ready = false;
      if (!ready || budget.of(op.kind) == 0) {
        ++i;
        continue;
      }
      --budget.of(op.kind);
      --width_left;

      s.issue = cycle;
      s.issued = true;
      uint64_t latency;
      if (is_mem(op.kind)) {
        AccessResult res = mem.access(*op.addr, op.size.value_or(8), cycle,
                                      op.kind == OpKind::Load ? AccessKind::Load
                                                              : AccessKind::Store);
        latency = res.latency;
        s.level = res.level;
        s.missed_l1 = res.level != MemLevel::L1;
        if (op.kind == OpKind::Load)
          s.mem_witness = lst.load_issue_witness(op.seq, line_of(op));
      } else {
        latency = delays.delay_for(op.kind);
      }
      s.complete = cycle + latency;
      comp.schedule(s.complete, op.seq);
      if (op.kind == OpKind::Branch && op.mispred.value_or(false))
        dispatch_blocked_until =
            std::max(dispatch_blocked_until, cycle + cfg.branch_pen());
      rs.erase(rs.begin() + static_cast<long>(i));
      issued_any = true;
    }

    uint64_t next = cycle + 1;
    if (!issued_any && !committed_any && dispatched == 0 &&
        !rob.front_completed()) {
      bool dispatch_live = cursor < n_ops && !rob.full() && rs.size() < cfg.rs_size;
      auto nc = comp.next_cycle();
      if (!dispatch_live && nc) {
        next = std::max(next, *nc);
      } else if (dispatch_live && dispatch_blocked_until >= cycle + 1) {
        uint64_t target = dispatch_blocked_until + 1;
        if (nc) target = std::min(target, *nc);
        next = std::max(next, target);
      }
    }
    cycle = next;
  }

  RunResult result;
  result.counters.has_predictions = false;
  result.counters.repeat_accuracy = repeat.accuracy();
  result.counters.mem = mem.stats();
  result.log = detail::build_log(trace, ops);
  result.stats = reduce(result.log, result.counters);
  return result;
}

}  // namespace pqsim
