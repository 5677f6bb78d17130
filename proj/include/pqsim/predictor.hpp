#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pqsim/trace.hpp"

namespace pqsim {

enum class DelaySelector {
  Learned,         // delays tracked at runtime in the DelayCache
  StaticL1,        // every load assumed an L1 hit
  HitMissL2,       // L1 hit/miss oracle; misses assumed L2
  HitMissDram,     // L1 hit/miss oracle; misses assumed DRAM
  DependenceOnly,  // no delay information, FIFO queues
};

const char* delay_selector_name(DelaySelector s);
std::optional<DelaySelector> delay_selector_from_name(const std::string& name);

struct DelayPolicy {
  DelaySelector selector = DelaySelector::Learned;
  uint32_t training_interval = 1;    // train every k-th execution of a pc
  uint32_t saturating_threshold = 0; // 0 = update immediately
  bool use_dispatch_time = false;    // predict from dispatch instead of issue
};

struct StaticDelayTable {
  uint64_t int_alu = 1;
  uint64_t int_mul = 3;
  uint64_t fp = 3;
  uint64_t branch = 1;
  uint64_t nop = 1;
  uint64_t mem_l1 = 4;  // load/store L1-hit service time

  uint64_t delay_for(OpKind k) const;
};

// Direct-mapped, pc-indexed store of the last observed delay of loads that
// missed the L1, with optional saturating-counter confirmation.
class DelayCache {
public:
  explicit DelayCache(uint32_t entries = 512, uint64_t l1_hit_delay = 4);

  // Learned-policy lookup; miss falls back to the L1 hit value. Counted in
  // the hit-rate statistics.
  uint64_t lookup(uint64_t pc);

  // Non-counting probe used for debut/repeated classification.
  bool probe(uint64_t pc) const;
  std::optional<uint64_t> stored_delay(uint64_t pc) const;

  // Called at every load completion. No-op for L1 hits and for executions
  // outside the training interval. With a saturating threshold T the stored
  // delay changes only after the same new delay is seen T times in a row.
  void train(uint64_t pc, uint64_t issue, uint64_t completion, bool missed_l1,
             uint64_t iteration, const DelayPolicy& policy);

  uint64_t lookups() const { return lookups_; }
  uint64_t hits() const { return hits_; }
  std::optional<double> hit_rate() const;
  uint32_t entry_count() const { return static_cast<uint32_t>(entries_.size()); }

private:
  struct Entry {
    bool valid = false;
    uint64_t tag = 0;
    uint64_t delay = 0;
    uint64_t candidate = 0;
    uint32_t confirm = 0;
  };
  std::vector<Entry> entries_;
  uint64_t l1_hit_delay_;
  uint64_t lookups_ = 0;
  uint64_t hits_ = 0;
};

// Delay of one executed instruction.
uint64_t compute_delay(uint64_t issue_cycle, uint64_t completion_cycle);

struct ProducerTiming {
  uint64_t pred = 0;   // producer predicted issue (or dispatch, per policy)
  uint64_t delay = 0;  // producer delay per the active policy
  bool completed = false;
};

// Predicted issue = max over in-flight producers of pred + delay, floored at
// dispatch + 1. Completed producers contribute nothing.
uint64_t predict_issue(uint64_t dispatch_cycle,
                       const std::vector<ProducerTiming>& producers);

// Resolves a load producer's delay under the active policy.
// `oracle_predicts_l1_hit` is consulted only by the hit/miss policies.
uint64_t delay_lookup(DelayCache& cache, uint64_t pc, const DelayPolicy& policy,
                      uint64_t l1_hit_delay, uint64_t l2_delay,
                      uint64_t dram_delay, bool oracle_predicts_l1_hit);

// Fraction of L1-missing load executions whose delay equals the same pc's
// previous missing delay.
class RepeatAccuracyTracker {
public:
  void observe(uint64_t pc, uint64_t delay);
  std::optional<double> accuracy() const;
  uint64_t samples() const { return total_; }

private:
  std::unordered_map<uint64_t, uint64_t> last_delay_;
  uint64_t total_ = 0;
  uint64_t repeats_ = 0;
};

}  // namespace pqsim
