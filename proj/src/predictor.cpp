#include "pqsim/predictor.hpp"

#include <algorithm>

#include "pqsim/error.hpp"

namespace pqsim {

const char* delay_selector_name(DelaySelector s) {
  switch (s) {
    case DelaySelector::Learned: return "learned";
    case DelaySelector::StaticL1: return "static-l1";
    case DelaySelector::HitMissL2: return "hitmiss-l2";
    case DelaySelector::HitMissDram: return "hitmiss-dram";
    case DelaySelector::DependenceOnly: return "dependence-only";
  }
  return "?";
}

std::optional<DelaySelector> delay_selector_from_name(const std::string& name) {
  if (name == "learned") return DelaySelector::Learned;
  if (name == "static-l1") return DelaySelector::StaticL1;
  if (name == "hitmiss-l2") return DelaySelector::HitMissL2;
  if (name == "hitmiss-dram") return DelaySelector::HitMissDram;
  if (name == "dependence-only") return DelaySelector::DependenceOnly;
  return std::nullopt;
}

uint64_t StaticDelayTable::delay_for(OpKind k) const {
  switch (k) {
    case OpKind::IntAlu: return int_alu;
    case OpKind::IntMul: return int_mul;
    case OpKind::Fp: return fp;
    case OpKind::Branch: return branch;
    case OpKind::Nop: return nop;
    case OpKind::Load:
    case OpKind::Store: return mem_l1;
  }
  return 1;
}

DelayCache::DelayCache(uint32_t entries, uint64_t l1_hit_delay)
    : l1_hit_delay_(l1_hit_delay) {
  internal_check(entries > 0, "DelayCache needs at least one entry");
  entries_.resize(entries);
}

uint64_t DelayCache::lookup(uint64_t pc) {
  ++lookups_;
  const Entry& e = entries_[pc % entries_.size()];
  if (e.valid && e.tag == pc) {
    ++hits_;
    return e.delay;
  }
  return l1_hit_delay_;
}

bool DelayCache::probe(uint64_t pc) const {
  const Entry& e = entries_[pc % entries_.size()];
  return e.valid && e.tag == pc;
}

std::optional<uint64_t> DelayCache::stored_delay(uint64_t pc) const {
  const Entry& e = entries_[pc % entries_.size()];
  if (e.valid && e.tag == pc) return e.delay;
  return std::nullopt;
}

void DelayCache::train(uint64_t pc, uint64_t issue, uint64_t completion,
                       bool missed_l1, uint64_t iteration,
                       const DelayPolicy& policy) {
  if (!missed_l1) return;
  if (policy.training_interval > 1 && iteration % policy.training_interval != 0)
    return;
  uint64_t delay = compute_delay(issue, completion);
  Entry& e = entries_[pc % entries_.size()];
  if (!e.valid || e.tag != pc) {
    // Cold or conflicting entry: take it over unconditionally.
    e = {true, pc, delay, 0, 0};
    return;
  }
  if (policy.saturating_threshold == 0) {
    e.delay = delay;
    e.confirm = 0;
    return;
  }
  if (delay == e.delay) {
    e.confirm = 0;  // current value re-confirmed; drop any candidate
    return;
  }
  if (e.confirm > 0 && e.candidate == delay) {
    ++e.confirm;
  } else {
    e.candidate = delay;
    e.confirm = 1;
  }
  if (e.confirm >= policy.saturating_threshold) {
    e.delay = delay;
    e.confirm = 0;
  }
}

std::optional<double> DelayCache::hit_rate() const {
  if (lookups_ == 0) return std::nullopt;
  return static_cast<double>(hits_) / static_cast<double>(lookups_);
}

uint64_t compute_delay(uint64_t issue_cycle, uint64_t completion_cycle) {
  internal_check(completion_cycle >= issue_cycle,
                 "completion before issue in delay computation");
  return completion_cycle - issue_cycle;
}

uint64_t predict_issue(uint64_t dispatch_cycle,
                       const std::vector<ProducerTiming>& producers) {
  uint64_t pred = dispatch_cycle + 1;
  for (const ProducerTiming& p : producers) {
    if (p.completed) continue;
    pred = std::max(pred, p.pred + p.delay);
  }
  return pred;
}

uint64_t delay_lookup(DelayCache& cache, uint64_t pc, const DelayPolicy& policy,
                      uint64_t l1_hit_delay, uint64_t l2_delay,
                      uint64_t dram_delay, bool oracle_predicts_l1_hit) {
  switch (policy.selector) {
    case DelaySelector::Learned: return cache.lookup(pc);
    case DelaySelector::StaticL1: return l1_hit_delay;
    case DelaySelector::HitMissL2:
      return oracle_predicts_l1_hit ? l1_hit_delay : l2_delay;
    case DelaySelector::HitMissDram:
      return oracle_predicts_l1_hit ? l1_hit_delay : dram_delay;
    case DelaySelector::DependenceOnly: return 0;
  }
  return l1_hit_delay;
}

void RepeatAccuracyTracker::observe(uint64_t pc, uint64_t delay) {
  auto it = last_delay_.find(pc);
  if (it != last_delay_.end()) {
    ++total_;
    if (it->second == delay) ++repeats_;
    it->second = delay;
  } else {
    last_delay_.emplace(pc, delay);
  }
}

std::optional<double> RepeatAccuracyTracker::accuracy() const {
  if (total_ == 0) return std::nullopt;
  return static_cast<double>(repeats_) / static_cast<double>(total_);
}

}  // namespace pqsim
