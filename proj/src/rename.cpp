#include "pqsim/rename.hpp"

#include <limits>

#include "pqsim/error.hpp"

namespace pqsim {

constexpr uint64_t kInFlight = std::numeric_limits<uint64_t>::max();

RenameMap::RenameMap(unsigned arch_regs, unsigned phys_regs)
    : arch_regs_(arch_regs), phys_regs_(phys_regs) {
  internal_check(phys_regs > arch_regs, "need more physical than architectural registers");
  map_.resize(arch_regs);
  ready_at_.assign(phys_regs, 0);  // architected initial values: always ready
  for (unsigned i = 0; i < arch_regs; ++i) map_[i] = static_cast<PhysReg>(i);
  for (unsigned i = phys_regs; i-- > arch_regs;) free_.push_back(static_cast<PhysReg>(i));
}

std::optional<RenamedOp> RenameMap::rename(const MicroOp& op) {
  std::optional<RegId> dst_arch = op.dst ? op.dst : op.token;
  if (dst_arch && free_.empty()) return std::nullopt;  // structural stall

  RenamedOp r;
  r.seq = op.seq;
  for (RegId s : op.srcs) r.src_phys.push_back(map_[s]);
  if (dst_arch) {
    r.dst_arch = dst_arch;
    r.prev_dst_phys = map_[*dst_arch];
    r.dst_phys = free_.back();
    free_.pop_back();
    map_[*dst_arch] = r.dst_phys;
    ready_at_[r.dst_phys] = kInFlight;
  }
  return r;
}

void RenameMap::mark_completed(PhysReg r, uint64_t cycle) {
  ready_at_[r] = cycle;
}

bool RenameMap::completed(PhysReg r, uint64_t cycle) const {
  return ready_at_[r] <= cycle;
}

uint64_t RenameMap::completion_cycle(PhysReg r) const { return ready_at_[r]; }

void RenameMap::release(PhysReg r) {
  if (r == kNoPhysReg) return;
  ready_at_[r] = 0;
  free_.push_back(r);
}

DependencyTable::DependencyTable(unsigned phys_regs) {
  entries_.resize(phys_regs);
}

void DependencyTable::record(PhysReg dst, uint64_t pc, uint64_t pred,
                             OpKind kind, uint64_t op_seq) {
  Entry& e = entries_[dst];
  e.valid = true;
  e.info = {pc, pred, kind, op_seq, false};
}

std::vector<DependencyTable::Producer> DependencyTable::producers(
    const RenamedOp& op, const RenameMap& map, uint64_t cycle) const {
  std::vector<Producer> out;
  for (PhysReg s : op.src_phys) {
    const Entry& e = entries_[s];
    if (!e.valid) continue;  // architected initial value, never written
    Producer p = e.info;
    p.completed = map.completed(s, cycle);
    out.push_back(p);
  }
  return out;
}

void MemProducerTable::store_dispatched(uint64_t line_addr, uint64_t pc,
                                        uint64_t pred, uint64_t op_seq) {
  inflight_[line_addr] = {pc, pred, op_seq};
}

void MemProducerTable::store_completed(uint64_t line_addr, uint64_t op_seq) {
  auto it = inflight_.find(line_addr);
  if (it != inflight_.end() && it->second.op_seq == op_seq) inflight_.erase(it);
}

std::optional<MemProducerTable::Producer> MemProducerTable::producer(
    uint64_t line_addr) const {
  auto it = inflight_.find(line_addr);
  if (it == inflight_.end()) return std::nullopt;
  return it->second;
}

}  // namespace pqsim
