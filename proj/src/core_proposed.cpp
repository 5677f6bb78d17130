#include <algorithm>

#include "core_internal.hpp"
#include "pqsim/cores.hpp"
#include "pqsim/rename.hpp"

namespace pqsim {

using detail::CompletionQueue;
using detail::InstanceCounter;
using detail::OpState;

namespace {

struct QueuePlan {
  std::vector<size_t> int_q, fp_q, br_q, ls_q;
  size_t count = 0;

  static QueuePlan make(const CoreConfig& cfg) {
    QueuePlan p;
    size_t idx = 0;
    for (unsigned i = 0; i < cfg.int_units; ++i) p.int_q.push_back(idx++);
    for (unsigned i = 0; i < cfg.fp_units; ++i) p.fp_q.push_back(idx++);
    for (unsigned i = 0; i < cfg.branch_units; ++i) p.br_q.push_back(idx++);
    for (unsigned i = 0; i < cfg.ls_units; ++i) p.ls_q.push_back(idx++);
    p.count = idx;
    return p;
  }

  const std::vector<size_t>& admissible(OpKind k) const {
    switch (k) {
      case OpKind::IntAlu:
      case OpKind::IntMul:
      case OpKind::Nop: return int_q;
      case OpKind::Fp: return fp_q;
      case OpKind::Branch: return br_q;
      case OpKind::Load:
      case OpKind::Store: return ls_q;
    }
    return int_q;
  }

  // Round-robin rotation is kept per admissibility class.
  size_t rr_class(OpKind k) const {
    switch (k) {
      case OpKind::IntAlu:
      case OpKind::IntMul:
      case OpKind::Nop: return 0;
      case OpKind::Fp: return 1;
      case OpKind::Branch: return 2;
      case OpKind::Load:
      case OpKind::Store: return 3;
    }
    return 0;
  }
};

}  // namespace

RunResult run_proposed(const Trace& trace, const CoreConfig& cfg) {
  cfg.validate();
  detail::check_trace_runnable(trace, cfg);

  const size_t n_ops = trace.ops.size();
  const StaticDelayTable delays = cfg.static_delays();
  const uint64_t l1_hit = cfg.l1.hit_latency;
  const uint64_t l2_delay = cfg.l1.hit_latency + cfg.l2.hit_latency;
  const bool fifo_mode = cfg.policy.selector == DelaySelector::DependenceOnly;

  MemoryHierarchy mem(cfg.l1, cfg.l2, cfg.dram);
  if (cfg.warm_caches) detail::warm_all(mem, trace);
  const uint64_t dram_delay = mem.dram_total_latency();
  const uint64_t line_sz = mem.line_size();

  StridePrefetcher prefetcher(cfg.prefetcher_streams);
  RenameMap rename;
  DependencyTable dt(rename.phys_count());
  MemProducerTable mpt;
  LoadStoreTracker lst;
  DelayCache dcache(cfg.delaycache_entries, l1_hit);
  RepeatAccuracyTracker repeat;
  ReorderBuffer rob(cfg.rob_size);
  CompletionQueue comp;
  InstanceCounter instances;

  QueuePlan plan = QueuePlan::make(cfg);
  std::vector<SystolicPQ> queues(plan.count, SystolicPQ(cfg.pq_size));
  std::array<uint32_t, 4> rr_state{};
  std::vector<uint64_t> stall_per_queue(plan.count, 0);

  std::vector<OpState> ops(n_ops);

  // Warmup pedagogy mode: first instances issue in program order. The next
  // unissued first-instance seq gates readiness of the others.
  std::vector<uint64_t> debut_order;
  size_t debut_ptr = 0;

  size_t cursor = 0;
  uint64_t committed = 0;
  uint64_t dispatch_blocked_until = 0;
  uint64_t cycle = 1;

  auto line_of = [&](const MicroOp& op) { return *op.addr / line_sz; };

  auto srcs_ready = [&](const MicroOp& op, const OpState& s, uint64_t t) {
    for (PhysReg r : s.src_phys)
      if (!rename.completed(r, t)) return false;
    if (op.kind == OpKind::Load && !lst.load_ready(op.seq, line_of(op), t))
      return false;
    if (cfg.warmup_program_order && s.instance == 1) {
      if (debut_ptr >= debut_order.size() || debut_order[debut_ptr] != op.seq)
        return false;
    }
    return true;
  };

  while (committed < n_ops) {
    internal_check(cycle < detail::kMaxRunCycles, "simulation did not converge");

    // Completions scheduled for this cycle.
    for (uint64_t seq : comp.pop_due(cycle)) {
      const MicroOp& op = trace.ops[seq];
      OpState& s = ops[seq];
      if (s.dst_phys != kNoPhysReg) rename.mark_completed(s.dst_phys, cycle);
      rob.mark_completed(seq, cycle);
      if (op.kind == OpKind::Store) {
        lst.store_completed(seq, cycle);
        mpt.store_completed(line_of(op), seq);
      }
      if (op.kind == OpKind::Load) {
        dcache.train(op.pc, s.issue, cycle, s.missed_l1, s.instance, cfg.policy);
        if (s.missed_l1) repeat.observe(op.pc, cycle - s.issue);
      }
    }

    // In-order commit.
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

    // Dispatch: rename, predict, steer, insert.
    unsigned dispatched = 0;
    while (dispatched < cfg.dispatch_w() && cursor < n_ops &&
           cycle > dispatch_blocked_until) {
      const MicroOp& op = trace.ops[cursor];
      if (rob.full()) break;
      if ((op.dst || op.token) && rename.free_count() == 0) break;

      OpState& s = ops[cursor];
      RenamedOp probe;
      probe.seq = op.seq;
      for (RegId r : op.srcs) probe.src_phys.push_back(rename.current_mapping(r));

      auto producers = dt.producers(probe, rename, cycle);
      std::vector<uint64_t> steering_pcs;
      for (const auto& p : producers)
        if (!p.completed) steering_pcs.push_back(p.pc);
      if (op.kind == OpKind::Load)
        if (auto mp = mpt.producer(line_of(op))) steering_pcs.push_back(mp->pc);

      auto queue = steer(queues, plan.admissible(op.kind), steering_pcs,
                         cfg.steering, rr_state[plan.rr_class(op.kind)]);
      if (!queue) break;  // target queue full

      std::vector<ProducerTiming> timings;
      std::vector<uint64_t> inflight_producers;
      for (const auto& p : producers) {
        uint64_t d;
        if (p.kind == OpKind::Load) {
          bool oracle_hit = false;
          if (cfg.policy.selector == DelaySelector::HitMissL2 ||
              cfg.policy.selector == DelaySelector::HitMissDram)
            oracle_hit = mem.peek_l1(*trace.ops[p.op_seq].addr);
          d = delay_lookup(dcache, p.pc, cfg.policy, l1_hit, l2_delay,
                           dram_delay, oracle_hit);
        } else {
          d = delays.delay_for(p.kind);
        }
        timings.push_back({p.pred, d, p.completed});
        if (!p.completed) inflight_producers.push_back(p.op_seq);
      }
      if (op.kind == OpKind::Load) {
        // Price every store this load will wait on, not just the newest
        // one; an unpriced store could end up behind the load in the queue
        // and block it for good.
        for (uint64_t st : lst.older_inflight_stores(op.seq, line_of(op))) {
          uint64_t timebase =
              cfg.policy.use_dispatch_time ? ops[st].dispatch : ops[st].pred;
          timings.push_back({timebase, delays.delay_for(OpKind::Store), false});
          inflight_producers.push_back(st);
        }
      }
      uint64_t pred = predict_issue(cycle, timings);
      // Keep priorities consistent with the wait-for order: an op never
      // sorts at or ahead of a producer it can stall on. With issue-time
      // predictions the max rule already guarantees this; the dispatch-time
      // variant needs the explicit floor.
      for (uint64_t ip : inflight_producers)
        pred = std::max(pred, ops[ip].priority + 1);

      auto renamed = rename.rename(op);
      internal_check(renamed.has_value(), "rename failed after free-list check");

      s.dispatched = true;
      s.dispatch = cycle;
      s.instance = instances.next(op.pc);
      s.pred = pred;
      s.src_phys = renamed->src_phys;
      s.dst_phys = renamed->dst_phys;
      s.prev_dst_phys = renamed->prev_dst_phys;
      s.queue = static_cast<int32_t>(*queue);
      if (op.kind == OpKind::Load) s.probe_missed = !dcache.probe(op.pc);

      bool warmup_debut = cfg.warmup_program_order && s.instance == 1;
      if (warmup_debut) debut_order.push_back(op.seq);
      if (fifo_mode || warmup_debut)
        s.priority = cycle;  // dispatch order, i.e. a FIFO
      else
        s.priority = pred;

      uint64_t dt_time = cfg.policy.use_dispatch_time ? cycle : pred;
      if (s.dst_phys != kNoPhysReg)
        dt.record(s.dst_phys, op.pc, dt_time, op.kind, op.seq);
      if (op.kind == OpKind::Store) {
        mpt.store_dispatched(line_of(op), op.pc, dt_time, op.seq);
        lst.store_dispatched(op.seq, line_of(op));
      }

      queues[*queue].insert({op.seq, s.priority, op.seq, op.pc, cycle});
      rob.push(op.seq);
      ++cursor;
      ++dispatched;
    }

    // Head-stall snapshot: queues whose eligible head is blocked by
    // dependencies, memory order or the warmup constraint. Each blocked
    // queue is one lost issue opportunity this cycle.
    std::vector<bool> blocked_now(queues.size(), false);
    for (size_t q = 0; q < queues.size(); ++q) {
      const PQEntry* h = queues[q].head(cycle);
      if (h && !srcs_ready(trace.ops[h->op_id], ops[h->op_id], cycle)) {
        blocked_now[q] = true;
        ++stall_per_queue[q];
      }
    }

    // Issue up to width ready heads in (priority, dispatch order).
    bool issued_any = false;
    std::vector<bool> queue_used(queues.size(), false);
    for (unsigned n = 0; n < cfg.issue_width; ++n) {
      int best_q = -1;
      const PQEntry* best = nullptr;
      for (size_t q = 0; q < queues.size(); ++q) {
        if (queue_used[q]) continue;
        const PQEntry* h = queues[q].head(cycle);
        if (!h) continue;
        if (!srcs_ready(trace.ops[h->op_id], ops[h->op_id], cycle)) continue;
        if (!best || h->priority < best->priority ||
            (h->priority == best->priority &&
             h->dispatch_order < best->dispatch_order)) {
          best = h;
          best_q = static_cast<int>(q);
        }
      }
      if (!best) break;
      PQEntry e = queues[best_q].pop_head(cycle);
      queue_used[best_q] = true;
      issued_any = true;

      const MicroOp& op = trace.ops[e.op_id];
      OpState& s = ops[e.op_id];
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
      comp.schedule(s.complete, e.op_id);
      if (op.kind == OpKind::Branch && op.mispred.value_or(false))
        dispatch_blocked_until =
            std::max(dispatch_blocked_until, cycle + cfg.branch_pen());
      if (cfg.warmup_program_order && s.instance == 1 &&
          debut_ptr < debut_order.size() && debut_order[debut_ptr] == op.seq)
        ++debut_ptr;
    }

    // Idle stretches advance straight to the next completion when neither
    // dispatch, issue nor commit can make progress before one.
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
      if (next > cycle + 1) {
        // Queue states are frozen across the skipped stretch; blocked heads
        // stay blocked.
        for (size_t q = 0; q < queues.size(); ++q)
          if (blocked_now[q]) stall_per_queue[q] += next - cycle - 1;
      }
    }
    cycle = next;
  }

  RunResult result;
  result.counters.head_stall_per_queue = stall_per_queue;
  for (uint64_t v : stall_per_queue) result.counters.head_stall_cycles += v;
  result.counters.delaycache_hit_rate = dcache.hit_rate();
  result.counters.repeat_accuracy = repeat.accuracy();
  result.counters.has_predictions = true;
  result.counters.mem = mem.stats();
  result.log = detail::build_log(trace, ops);
  result.stats = reduce(result.log, result.counters);
  return result;
}

RunResult run_variant(const Trace& trace, const CoreConfig& config,
                      DelaySelector selector) {
  CoreConfig cfg = config;
  cfg.core = CoreKind::Proposed;
  cfg.policy.selector = selector;
  return run_proposed(trace, cfg);
}

}  // namespace pqsim
