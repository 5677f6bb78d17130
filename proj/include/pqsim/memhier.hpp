#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pqsim/trace.hpp"

namespace pqsim {

enum class MemLevel { L1, L2, Dram };
const char* mem_level_name(MemLevel lvl);

struct CacheLevelConfig {
  uint64_t capacity = 0;       // bytes
  uint32_t associativity = 0;  // ways
  uint32_t line = 64;          // bytes
  uint64_t hit_latency = 1;    // cycles
  uint32_t outstanding = 1;    // max concurrent misses

  void validate(const char* which) const;
};

struct DramConfig {
  uint64_t base_latency = 80;     // closed-row access
  uint64_t row_buffer = 4096;     // bytes
  uint64_t row_hit_latency = 40;  // open-row access
  uint32_t banks = 8;
  uint64_t jitter_amplitude = 0;  // extra cycles in [0, amplitude]
  uint64_t seed = 1;

  void validate() const;
};

struct AccessResult {
  MemLevel level = MemLevel::L1;
  uint64_t latency = 0;     // cycles from issue to data return
  uint64_t completion = 0;  // issue cycle + latency
  bool merged = false;      // served by an already in-flight fill
};

enum class AccessKind { Load, Store, Prefetch };

struct MemStats {
  uint64_t l1_hits = 0;  // demand accesses served by each level
  uint64_t l2_hits = 0;
  uint64_t dram_accesses = 0;
  uint64_t prefetches = 0;
};

// Two cache levels over an abstract DRAM. Misses occupy an MSHR slot at each
// level until the fill completes; a miss beyond the outstanding limit is
// charged the wait until a slot frees. Accesses to a line with a fill in
// flight merge onto that fill. Lines are write-allocate, LRU, non-inclusive.
class MemoryHierarchy {
public:
  MemoryHierarchy(const CacheLevelConfig& l1, const CacheLevelConfig& l2,
                  const DramConfig& dram);

  // `cycle` must be monotonically non-decreasing across calls.
  AccessResult access(uint64_t addr, uint32_t size, uint64_t cycle,
                      AccessKind kind);

  // Non-mutating L1 presence probe (the hit/miss oracle for the
  // hit-prediction delay policies). Lines with an in-flight fill count as
  // absent.
  bool peek_l1(uint64_t addr) const;

  // Installs a line into both levels without timing or statistics; used to
  // start runs with a warm working set.
  void warm(uint64_t addr);

  const MemStats& stats() const { return stats_; }
  uint64_t dram_total_latency() const;  // closed-row end-to-end miss cost
  uint64_t line_size() const { return l1_cfg_.line; }

private:
  struct SetWay {
    uint64_t tag = 0;
    bool valid = false;
    uint64_t lru = 0;  // last-touch stamp
  };
  struct LevelState {
    CacheLevelConfig cfg;
    uint32_t sets = 0;
    std::vector<SetWay> ways;               // sets * associativity
    std::vector<uint64_t> mshr_completions;  // in-flight miss completion cycles
  };
  struct PendingFill {
    uint64_t completion;
    MemLevel level;
  };

  bool lookup_and_touch(LevelState& lvl, uint64_t line_addr);
  void fill(LevelState& lvl, uint64_t line_addr);
  bool present(const LevelState& lvl, uint64_t line_addr) const;
  uint64_t mshr_wait(LevelState& lvl, uint64_t cycle);
  void mshr_occupy(LevelState& lvl, uint64_t completion);
  uint64_t dram_latency(uint64_t line_addr);

  CacheLevelConfig l1_cfg_;
  LevelState l1_;
  LevelState l2_;
  DramConfig dram_;
  std::vector<uint64_t> open_row_;  // per bank; row id + 1, 0 = closed
  std::unordered_map<uint64_t, PendingFill> pending_;
  MemStats stats_;
  uint64_t lru_clock_ = 0;
  uint64_t last_cycle_ = 0;
};

// Per-PC stride detector with a fixed number of LRU-managed streams. After
// two consecutive equal strides it emits the next address in the pattern.
class StridePrefetcher {
public:
  explicit StridePrefetcher(uint32_t streams = 16) : max_streams_(streams) {}

  std::vector<uint64_t> observe(uint64_t pc, uint64_t addr);

private:
  struct Stream {
    uint64_t pc = 0;
    uint64_t last_addr = 0;
    int64_t stride = 0;
    uint32_t confirmations = 0;
    uint64_t lru = 0;
  };
  uint32_t max_streams_;
  std::vector<Stream> streams_;
  uint64_t clock_ = 0;
};

// Demand access counts by serving level; empty map when nothing was accessed.
std::map<MemLevel, uint64_t> latency_histogram(const MemStats& stats);

}  // namespace pqsim
