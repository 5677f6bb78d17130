#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pqsim/trace.hpp"

namespace pqsim {

using PhysReg = uint16_t;
constexpr PhysReg kNoPhysReg = 0xffff;
constexpr unsigned kPhysRegCount = 256;

struct RenamedOp {
  uint64_t seq = 0;
  std::vector<PhysReg> src_phys;
  PhysReg dst_phys = kNoPhysReg;       // fresh register for dst or store token
  PhysReg prev_dst_phys = kNoPhysReg;  // displaced mapping, freed at commit
  std::optional<RegId> dst_arch;
};

// Architectural-to-physical mapping plus the per-physical-register
// scoreboard (ready cycle). Registers are reclaimed when the next writer of
// the same architectural register commits.
class RenameMap {
public:
  explicit RenameMap(unsigned arch_regs = kArchRegCount,
                     unsigned phys_regs = kPhysRegCount);

  // Maps sources through the current table and allocates a fresh register
  // for the destination (or store token). Returns nullopt when the free
  // list is empty; the caller retries next cycle.
  std::optional<RenamedOp> rename(const MicroOp& op);

  void mark_completed(PhysReg r, uint64_t cycle);
  bool completed(PhysReg r, uint64_t cycle) const;
  uint64_t completion_cycle(PhysReg r) const;  // max() while in flight
  void release(PhysReg r);

  unsigned phys_count() const { return phys_regs_; }
  size_t free_count() const { return free_.size(); }
  PhysReg current_mapping(RegId arch) const { return map_[arch]; }

private:
  unsigned arch_regs_;
  unsigned phys_regs_;
  std::vector<PhysReg> map_;
  std::vector<PhysReg> free_;
  std::vector<uint64_t> ready_at_;
};

// Per-physical-register record of the last writer: its pc, its predicted
// issue cycle and what kind of instruction it is. Queried with a consumer's
// renamed sources to find in-flight producers.
class DependencyTable {
public:
  struct Producer {
    uint64_t pc = 0;
    uint64_t pred = 0;
    OpKind kind = OpKind::Nop;
    uint64_t op_seq = 0;
    bool completed = false;
  };

  explicit DependencyTable(unsigned phys_regs = kPhysRegCount);

  void record(PhysReg dst, uint64_t pc, uint64_t pred, OpKind kind,
              uint64_t op_seq);

  // One record per source register with a recorded writer; writers that
  // already completed are flagged so the predictor can skip them.
  std::vector<Producer> producers(const RenamedOp& op, const RenameMap& map,
                                  uint64_t cycle) const;

  size_t entry_count() const { return entries_.size(); }

private:
  struct Entry {
    bool valid = false;
    Producer info;
  };
  std::vector<Entry> entries_;
};

// Last store to each cache line, kept while the store is in flight. Supplies
// the memory producer for loads (trace addresses make disambiguation exact).
class MemProducerTable {
public:
  struct Producer {
    uint64_t pc = 0;
    uint64_t pred = 0;
    uint64_t op_seq = 0;
  };

  void store_dispatched(uint64_t line_addr, uint64_t pc, uint64_t pred,
                        uint64_t op_seq);
  void store_completed(uint64_t line_addr, uint64_t op_seq);
  std::optional<Producer> producer(uint64_t line_addr) const;

private:
  std::unordered_map<uint64_t, Producer> inflight_;
};

}  // namespace pqsim
