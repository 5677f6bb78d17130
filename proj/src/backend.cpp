#include "pqsim/backend.hpp"

#include <algorithm>

namespace pqsim {

SystolicPQ::SystolicPQ(uint32_t capacity) : capacity_(capacity) {
  internal_check(capacity >= 1, "queue capacity must be >= 1");
  slots_.resize(capacity);
  for (uint32_t i = capacity; i-- > 0;) free_.push_back(i);
}

void SystolicPQ::insert(const PQEntry& e) {
  internal_check(!full(), "insert into full priority queue");
  uint32_t slot = free_.back();
  free_.pop_back();
  slots_[slot].used = true;
  slots_[slot].entry = e;
}

int SystolicPQ::head_slot(uint64_t cycle) const {
  int best = -1;
  for (size_t i = 0; i < slots_.size(); ++i) {
    const Slot& s = slots_[i];
    if (!s.used || s.entry.insert_cycle >= cycle) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const PQEntry& b = slots_[best].entry;
    if (s.entry.priority < b.priority ||
        (s.entry.priority == b.priority &&
         s.entry.dispatch_order < b.dispatch_order))
      best = static_cast<int>(i);
  }
  return best;
}

const PQEntry* SystolicPQ::head(uint64_t cycle) const {
  int slot = head_slot(cycle);
  return slot < 0 ? nullptr : &slots_[slot].entry;
}

PQEntry SystolicPQ::pop_head(uint64_t cycle) {
  int slot = head_slot(cycle);
  internal_check(slot >= 0, "pop from queue without an eligible head");
  PQEntry out = slots_[slot].entry;
  slots_[slot].used = false;
  free_.push_back(static_cast<uint32_t>(slot));
  return out;
}

std::optional<uint64_t> SystolicPQ::tail_pc() const {
  const PQEntry* last = nullptr;
  for (const Slot& s : slots_) {
    if (!s.used) continue;
    if (!last || s.entry.dispatch_order > last->dispatch_order) last = &s.entry;
  }
  if (!last) return std::nullopt;
  return last->pc;
}

bool SystolicPQ::contains_pc(uint64_t pc) const {
  for (const Slot& s : slots_)
    if (s.used && s.entry.pc == pc) return true;
  return false;
}

std::vector<PQEntry> SystolicPQ::residents() const {
  std::vector<PQEntry> out;
  for (const Slot& s : slots_)
    if (s.used) out.push_back(s.entry);
  return out;
}

const char* steering_scheme_name(SteeringScheme s) {
  switch (s) {
    case SteeringScheme::TailDependencies: return "tail-dependencies";
    case SteeringScheme::AllDependencies: return "all-dependencies";
    case SteeringScheme::RoundRobin: return "round-robin";
  }
  return "?";
}

std::optional<SteeringScheme> steering_scheme_from_name(const std::string& n) {
  if (n == "tail-dependencies") return SteeringScheme::TailDependencies;
  if (n == "all-dependencies") return SteeringScheme::AllDependencies;
  if (n == "round-robin") return SteeringScheme::RoundRobin;
  return std::nullopt;
}

namespace {

bool is_producer(const std::vector<uint64_t>& producer_pcs, uint64_t pc) {
  return std::find(producer_pcs.begin(), producer_pcs.end(), pc) !=
         producer_pcs.end();
}

size_t least_occupied(const std::vector<SystolicPQ>& queues,
                      const std::vector<size_t>& admissible) {
  size_t best = admissible[0];
  for (size_t q : admissible)
    if (queues[q].size() < queues[best].size()) best = q;
  return best;
}

}  // namespace

std::optional<size_t> steer(const std::vector<SystolicPQ>& queues,
                            const std::vector<size_t>& admissible,
                            const std::vector<uint64_t>& producer_pcs,
                            SteeringScheme scheme, uint32_t& rr_state) {
  internal_check(!admissible.empty(), "op admits no queue");
  size_t pick = admissible[0];
  switch (scheme) {
    case SteeringScheme::TailDependencies: {
      bool found = false;
      for (size_t q : admissible) {
        auto tail = queues[q].tail_pc();
        if (tail && is_producer(producer_pcs, *tail)) {
          pick = q;
          found = true;
          break;
        }
      }
      if (!found) pick = least_occupied(queues, admissible);
      break;
    }
    case SteeringScheme::AllDependencies: {
      bool found = false;
      for (size_t q : admissible) {
        for (uint64_t pc : producer_pcs) {
          if (queues[q].contains_pc(pc)) {
            pick = q;
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (!found) pick = least_occupied(queues, admissible);
      break;
    }
    case SteeringScheme::RoundRobin: {
      pick = admissible[rr_state % admissible.size()];
      if (queues[pick].full()) return std::nullopt;  // retry same queue
      ++rr_state;
      return pick;
    }
  }
  if (queues[pick].full()) return std::nullopt;
  return pick;
}

void ReorderBuffer::push(uint64_t seq) {
  internal_check(!full(), "push into full ROB");
  internal_check(entries_.empty() || entries_.back().seq + 1 == seq,
                 "ROB entries must arrive in program order");
  entries_.push_back({seq});
}

void ReorderBuffer::mark_completed(uint64_t seq, uint64_t cycle) {
  internal_check(!entries_.empty() && seq >= entries_.front().seq,
                 "completion for op not in ROB");
  size_t idx = static_cast<size_t>(seq - entries_.front().seq);
  internal_check(idx < entries_.size(), "completion for op not in ROB");
  Entry& e = entries_[idx];
  internal_check(!e.completed, "op completed twice");
  e.completed = true;
  e.completion = cycle;
}

std::vector<uint64_t> ReorderBuffer::commit(uint64_t cycle, unsigned width) {
  std::vector<uint64_t> out;
  while (out.size() < width && !entries_.empty() && entries_.front().completed) {
    internal_check(entries_.front().completion <= cycle,
                   "commit before completion");
    out.push_back(entries_.front().seq);
    entries_.pop_front();
  }
  return out;
}

void LoadStoreTracker::store_dispatched(uint64_t seq, uint64_t line) {
  stores_[seq] = {line};
}

void LoadStoreTracker::store_completed(uint64_t seq, uint64_t completion) {
  auto it = stores_.find(seq);
  internal_check(it != stores_.end(), "completion for untracked store");
  it->second.completed = true;
  it->second.completion = completion;
}

void LoadStoreTracker::store_committed(uint64_t seq) { stores_.erase(seq); }

bool LoadStoreTracker::load_ready(uint64_t load_seq, uint64_t line,
                                  uint64_t cycle) const {
  for (const auto& [seq, rec] : stores_) {
    if (seq >= load_seq) break;
    if (rec.line != line) continue;
    if (!rec.completed || rec.completion > cycle) return false;
  }
  return true;
}

std::vector<uint64_t> LoadStoreTracker::older_inflight_stores(
    uint64_t load_seq, uint64_t line) const {
  std::vector<uint64_t> out;
  for (const auto& [seq, rec] : stores_) {
    if (seq >= load_seq) break;
    if (rec.line == line && !rec.completed) out.push_back(seq);
  }
  return out;
}

uint64_t LoadStoreTracker::load_issue_witness(uint64_t load_seq,
                                              uint64_t line) const {
  uint64_t witness = 0;
  for (const auto& [seq, rec] : stores_) {
    if (seq >= load_seq) break;
    if (rec.line == line && rec.completed)
      witness = std::max(witness, rec.completion);
  }
  return witness;
}

void LoadStoreTracker::check_commit(uint64_t load_seq, uint64_t issue_cycle,
                                    uint64_t witness) {
  internal_check(issue_cycle >= witness,
                 "memory ordering violation at commit of op " +
                     std::to_string(load_seq));
}

}  // namespace pqsim
