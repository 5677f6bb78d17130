#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pqsim {

enum class OpKind { IntAlu, IntMul, Fp, Load, Store, Branch, Nop };

const char* op_kind_name(OpKind k);
std::optional<OpKind> op_kind_from_name(const std::string& name);

inline bool is_mem(OpKind k) { return k == OpKind::Load || k == OpKind::Store; }

using RegId = uint8_t;

constexpr unsigned kArchRegCount = 64;
constexpr unsigned kMaxSrcs = 3;

// One trace record. `token` is a store-only register written when the store
// becomes visible; it lets later instructions wait on store completion
// without giving stores a real destination.
struct MicroOp {
  uint64_t seq = 0;  // ordinal position in the trace, assigned on parse/gen
  uint64_t pc = 0;
  OpKind kind = OpKind::Nop;
  std::vector<RegId> srcs;
  std::optional<RegId> dst;
  std::optional<RegId> token;  // store completion token
  std::optional<uint64_t> addr;
  std::optional<uint32_t> size;
  std::optional<bool> mispred;  // branch only

  bool operator==(const MicroOp&) const = default;
};

struct TraceMeta {
  std::string name;
  uint64_t seed = 0;
  bool operator==(const TraceMeta&) const = default;
};

// Equality ignores meta: metadata is an in-memory annotation and is not part
// of the on-disk format (one JSON object per op line).
struct Trace {
  TraceMeta meta;
  std::vector<MicroOp> ops;

  bool operator==(const Trace& o) const { return ops == o.ops; }
};

struct TraceViolation {
  uint64_t seq;
  std::string rule;
};

// Parses the line-oriented trace format. Throws ValidationError naming the
// line and field on malformed input or invariant violations.
Trace parse_trace(std::istream& in);
Trace load_trace(const std::string& path);

// Inverse of parse_trace: one JSON object per op, no metadata line.
void write_trace(const Trace& trace, std::ostream& out);
void save_trace(const Trace& trace, const std::string& path);

// Violations are data, not failures; empty result means the trace is valid.
std::vector<TraceViolation> validate_trace(const Trace& trace,
                                           unsigned arch_regs = kArchRegCount);

// Deterministic synthetic kernels:
//   table1        annotated two-chain loop (the built-in golden example)
//   stream        two independent streaming load chains plus a store
//   pointer-chase serial loop-carried load chain over a shuffled region
//   mixed-latency three chains hitting L1 / L2 / DRAM respectively
//   random-dag    seeded random block repeated per iteration
Trace gen_kernel(const std::string& name, uint64_t iterations, uint64_t seed);

const std::vector<std::string>& kernel_names();

}  // namespace pqsim
