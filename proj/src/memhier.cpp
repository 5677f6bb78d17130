#include "pqsim/memhier.hpp"

#include <algorithm>

#include "pqsim/error.hpp"
#include "pqsim/rng.hpp"

namespace pqsim {

const char* mem_level_name(MemLevel lvl) {
  switch (lvl) {
    case MemLevel::L1: return "L1";
    case MemLevel::L2: return "L2";
    case MemLevel::Dram: return "DRAM";
  }
  return "?";
}

void CacheLevelConfig::validate(const char* which) const {
  auto fail = [&](const std::string& why) {
    throw ValidationError(std::string(which) + ": " + why);
  };
  if (line == 0 || (line & (line - 1)) != 0) fail("line size must be a power of two");
  if (associativity == 0) fail("associativity must be >= 1");
  if (capacity == 0 || capacity % (uint64_t(associativity) * line) != 0)
    fail("capacity must be divisible by associativity * line");
  if (hit_latency < 1) fail("hit latency must be >= 1");
  if (outstanding < 1) fail("outstanding limit must be >= 1");
}

void DramConfig::validate() const {
  if (row_hit_latency > base_latency)
    throw ValidationError("dram: row hit latency must be <= base latency");
  if (row_buffer == 0 || banks == 0)
    throw ValidationError("dram: row buffer and bank count must be >= 1");
}

MemoryHierarchy::MemoryHierarchy(const CacheLevelConfig& l1,
                                 const CacheLevelConfig& l2,
                                 const DramConfig& dram)
    : l1_cfg_(l1), dram_(dram) {
  l1.validate("l1");
  l2.validate("l2");
  dram.validate();
  if (l1.line != l2.line)
    throw ValidationError("l1 and l2 line sizes must match");
  auto init = [](LevelState& lvl, const CacheLevelConfig& cfg) {
    lvl.cfg = cfg;
    lvl.sets = static_cast<uint32_t>(cfg.capacity / (uint64_t(cfg.associativity) * cfg.line));
    lvl.ways.assign(size_t(lvl.sets) * cfg.associativity, SetWay{});
  };
  init(l1_, l1);
  init(l2_, l2);
  open_row_.assign(dram_.banks, 0);
}

bool MemoryHierarchy::lookup_and_touch(LevelState& lvl, uint64_t line_addr) {
  uint32_t set = static_cast<uint32_t>(line_addr % lvl.sets);
  SetWay* base = &lvl.ways[size_t(set) * lvl.cfg.associativity];
  for (uint32_t w = 0; w < lvl.cfg.associativity; ++w) {
    if (base[w].valid && base[w].tag == line_addr) {
      base[w].lru = ++lru_clock_;
      return true;
    }
  }
  return false;
}

bool MemoryHierarchy::present(const LevelState& lvl, uint64_t line_addr) const {
  uint32_t set = static_cast<uint32_t>(line_addr % lvl.sets);
  const SetWay* base = &lvl.ways[size_t(set) * lvl.cfg.associativity];
  for (uint32_t w = 0; w < lvl.cfg.associativity; ++w)
    if (base[w].valid && base[w].tag == line_addr) return true;
  return false;
}

void MemoryHierarchy::fill(LevelState& lvl, uint64_t line_addr) {
  uint32_t set = static_cast<uint32_t>(line_addr % lvl.sets);
  SetWay* base = &lvl.ways[size_t(set) * lvl.cfg.associativity];
  SetWay* victim = &base[0];
  for (uint32_t w = 0; w < lvl.cfg.associativity; ++w) {
    if (!base[w].valid) {
      victim = &base[w];
      break;
    }
    if (base[w].lru < victim->lru) victim = &base[w];
  }
  victim->valid = true;
  victim->tag = line_addr;
  victim->lru = ++lru_clock_;
}

uint64_t MemoryHierarchy::mshr_wait(LevelState& lvl, uint64_t cycle) {
  auto& act = lvl.mshr_completions;
  act.erase(std::remove_if(act.begin(), act.end(),
                           [&](uint64_t c) { return c <= cycle; }),
            act.end());
  if (act.size() < lvl.cfg.outstanding) return 0;
  // Wait until enough in-flight misses retire to free a slot.
  std::vector<uint64_t> sorted(act);
  std::sort(sorted.begin(), sorted.end());
  uint64_t free_at = sorted[sorted.size() - lvl.cfg.outstanding];
  return free_at - cycle;
}

void MemoryHierarchy::mshr_occupy(LevelState& lvl, uint64_t completion) {
  lvl.mshr_completions.push_back(completion);
}

uint64_t MemoryHierarchy::dram_latency(uint64_t line_addr) {
  uint64_t byte_addr = line_addr * l1_cfg_.line;
  uint64_t row = byte_addr / dram_.row_buffer;
  uint32_t bank = static_cast<uint32_t>(row % dram_.banks);
  bool row_hit = open_row_[bank] == row + 1;
  open_row_[bank] = row + 1;
  uint64_t lat = row_hit ? dram_.row_hit_latency : dram_.base_latency;
  if (dram_.jitter_amplitude > 0)
    lat += splitmix64(line_addr ^ dram_.seed) % (dram_.jitter_amplitude + 1);
  return lat;
}

AccessResult MemoryHierarchy::access(uint64_t addr, uint32_t size, uint64_t cycle,
                                     AccessKind kind) {
  (void)size;  // accesses are modeled at line granularity
  internal_check(cycle >= last_cycle_, "memory access cycles must be monotonic");
  last_cycle_ = cycle;

  uint64_t line_addr = addr / l1_cfg_.line;
  bool demand = kind != AccessKind::Prefetch;
  if (!demand) ++stats_.prefetches;

  AccessResult res;

  if (auto it = pending_.find(line_addr); it != pending_.end()) {
    // Fill already in flight: merge onto it.
    if (it->second.completion <= cycle) {
      pending_.erase(it);
    } else {
      res.level = it->second.level;
      res.merged = true;
      res.latency = std::max(l1_.cfg.hit_latency, it->second.completion - cycle);
      res.completion = cycle + res.latency;
      if (demand) {
        if (res.level == MemLevel::L2) ++stats_.l2_hits;
        else ++stats_.dram_accesses;
      }
      return res;
    }
  }

  if (lookup_and_touch(l1_, line_addr)) {
    res.level = MemLevel::L1;
    res.latency = l1_.cfg.hit_latency;
    res.completion = cycle + res.latency;
    if (demand) ++stats_.l1_hits;
    return res;
  }

  uint64_t l1_wait = mshr_wait(l1_, cycle);
  uint64_t latency = l1_wait + l1_.cfg.hit_latency;

  if (lookup_and_touch(l2_, line_addr)) {
    res.level = MemLevel::L2;
    latency += l2_.cfg.hit_latency;
    if (demand) ++stats_.l2_hits;
  } else {
    res.level = MemLevel::Dram;
    uint64_t l2_wait = mshr_wait(l2_, cycle + l1_wait);
    latency += l2_wait + l2_.cfg.hit_latency + dram_latency(line_addr);
    mshr_occupy(l2_, cycle + latency);
    fill(l2_, line_addr);
    if (demand) ++stats_.dram_accesses;
  }

  mshr_occupy(l1_, cycle + latency);
  fill(l1_, line_addr);
  pending_[line_addr] = {cycle + latency, res.level};

  res.latency = latency;
  res.completion = cycle + latency;
  return res;
}

bool MemoryHierarchy::peek_l1(uint64_t addr) const {
  uint64_t line_addr = addr / l1_cfg_.line;
  if (pending_.count(line_addr)) return false;
  return present(l1_, line_addr);
}

void MemoryHierarchy::warm(uint64_t addr) {
  uint64_t line_addr = addr / l1_cfg_.line;
  if (!present(l1_, line_addr)) fill(l1_, line_addr);
  if (!present(l2_, line_addr)) fill(l2_, line_addr);
}

uint64_t MemoryHierarchy::dram_total_latency() const {
  return l1_.cfg.hit_latency + l2_.cfg.hit_latency + dram_.base_latency;
}

std::vector<uint64_t> StridePrefetcher::observe(uint64_t pc, uint64_t addr) {
  ++clock_;
  for (Stream& s : streams_) {
    if (s.pc != pc) continue;
    s.lru = clock_;
    int64_t stride = static_cast<int64_t>(addr) - static_cast<int64_t>(s.last_addr);
    if (stride != 0 && stride == s.stride) {
      if (s.confirmations < 2) ++s.confirmations;
    } else {
      s.stride = stride;
      s.confirmations = stride != 0 ? 1 : 0;
    }
    s.last_addr = addr;
    if (s.confirmations >= 2)
      return {static_cast<uint64_t>(static_cast<int64_t>(addr) + s.stride)};
    return {};
  }
  // New stream; evict the least recently used slot if the table is full.
  if (streams_.size() < max_streams_) {
    streams_.push_back({pc, addr, 0, 0, clock_});
  } else {
    Stream* victim = &streams_[0];
    for (Stream& s : streams_)
      if (s.lru < victim->lru) victim = &s;
    *victim = {pc, addr, 0, 0, clock_};
  }
  return {};
}

std::map<MemLevel, uint64_t> latency_histogram(const MemStats& stats) {
  std::map<MemLevel, uint64_t> h;
  if (stats.l1_hits) h[MemLevel::L1] = stats.l1_hits;
  if (stats.l2_hits) h[MemLevel::L2] = stats.l2_hits;
  if (stats.dram_accesses) h[MemLevel::Dram] = stats.dram_accesses;
  return h;
}

}  // namespace pqsim
