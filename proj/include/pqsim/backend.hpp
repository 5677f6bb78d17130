#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pqsim/error.hpp"

namespace pqsim {

struct PQEntry {
  uint64_t op_id = 0;          // trace seq
  uint64_t priority = 0;       // predicted issue cycle
  uint64_t dispatch_order = 0; // tie break
  uint64_t pc = 0;
  uint64_t insert_cycle = 0;
};

// Fixed-capacity priority queue with head-only access. The head is the
// minimum (priority, dispatch order) entry; an entry inserted at cycle t
// becomes visible at the head from cycle t+1, which is what gives
// back-to-back execution after dispatch. Entries live in a slot array with
// a free list, as in the hardware organization.
class SystolicPQ {
public:
  explicit SystolicPQ(uint32_t capacity = 13);

  bool full() const { return free_.empty(); }
  bool empty() const { return size() == 0; }
  size_t size() const { return capacity_ - free_.size(); }
  uint32_t capacity() const { return capacity_; }
  size_t free_slots() const { return free_.size(); }

  void insert(const PQEntry& e);

  // Minimum entry among those inserted before `cycle`; nullptr when empty
  // or when every resident was inserted this cycle.
  const PQEntry* head(uint64_t cycle) const;
  PQEntry pop_head(uint64_t cycle);

  // Most recently inserted resident (steering looks at the queue tail).
  std::optional<uint64_t> tail_pc() const;
  bool contains_pc(uint64_t pc) const;

  std::vector<PQEntry> residents() const;  // unspecified order

private:
  struct Slot {
    bool used = false;
    PQEntry entry;
  };
  int head_slot(uint64_t cycle) const;

  uint32_t capacity_;
  std::vector<Slot> slots_;
  std::vector<uint32_t> free_;
};

enum class SteeringScheme { TailDependencies, AllDependencies, RoundRobin };

const char* steering_scheme_name(SteeringScheme s);
std::optional<SteeringScheme> steering_scheme_from_name(const std::string& n);

// Picks a queue among `admissible` (indices into `queues`). Returns nullopt
// when the selected queue is full (dispatch stall). `rr_state` is the
// per-class rotation counter for round-robin.
std::optional<size_t> steer(const std::vector<SystolicPQ>& queues,
                            const std::vector<size_t>& admissible,
                            const std::vector<uint64_t>& producer_pcs,
                            SteeringScheme scheme, uint32_t& rr_state);

// In-order dispatch, out-of-order completion, in-order release. Ops enter
// with consecutive seq numbers.
class ReorderBuffer {
public:
  explicit ReorderBuffer(size_t capacity) : capacity_(capacity) {}

  bool full() const { return entries_.size() >= capacity_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

  void push(uint64_t seq);
  void mark_completed(uint64_t seq, uint64_t cycle);
  bool front_completed() const {
    return !entries_.empty() && entries_.front().completed;
  }

  // Pops up to `width` oldest completed entries.
  std::vector<uint64_t> commit(uint64_t cycle, unsigned width);

private:
  struct Entry {
    uint64_t seq;
    bool completed = false;
    uint64_t completion = 0;
  };
  size_t capacity_;
  std::deque<Entry> entries_;
};

// Perfect store-to-load ordering at cache-line granularity: a load may issue
// only once every older in-flight store to its line has completed. The
// witness recorded at issue is re-checked when the load commits.
class LoadStoreTracker {
public:
  void store_dispatched(uint64_t seq, uint64_t line);
  void store_completed(uint64_t seq, uint64_t completion);
  void store_committed(uint64_t seq);

  bool load_ready(uint64_t load_seq, uint64_t line, uint64_t cycle) const;

  // Stores older than the load to the same line that have not completed.
  // These are exactly the producers a load's issue prediction must price;
  // leaving one out can park the load ahead of it in the queue, and a
  // blocked head never lets the store behind it issue.
  std::vector<uint64_t> older_inflight_stores(uint64_t load_seq,
                                              uint64_t line) const;

  // Latest completion among stores older than the load to the same line;
  // 0 when there is none. Valid while older stores are still tracked.
  uint64_t load_issue_witness(uint64_t load_seq, uint64_t line) const;

  static void check_commit(uint64_t load_seq, uint64_t issue_cycle,
                           uint64_t witness);

private:
  struct StoreRec {
    uint64_t line;
    bool completed = false;
    uint64_t completion = 0;
  };
  std::map<uint64_t, StoreRec> stores_;  // seq -> record, pruned at commit
};

}  // namespace pqsim
