#include "pqsim/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pqsim/error.hpp"
#include "pqsim/rng.hpp"

namespace pqsim {

using nlohmann::json;

const char* op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::IntAlu: return "int-alu";
    case OpKind::IntMul: return "int-mul";
    case OpKind::Fp: return "fp";
    case OpKind::Load: return "load";
    case OpKind::Store: return "store";
    case OpKind::Branch: return "branch";
    case OpKind::Nop: return "nop";
  }
  return "?";
}

std::optional<OpKind> op_kind_from_name(const std::string& name) {
  if (name == "int-alu") return OpKind::IntAlu;
  if (name == "int-mul") return OpKind::IntMul;
  if (name == "fp") return OpKind::Fp;
  if (name == "load") return OpKind::Load;
  if (name == "store") return OpKind::Store;
  if (name == "branch") return OpKind::Branch;
  if (name == "nop") return OpKind::Nop;
  return std::nullopt;
}

namespace {

uint64_t parse_hex(const json& v, uint64_t line, const char* field) {
  if (!v.is_string())
    throw ValidationError("line " + std::to_string(line) + ": field '" + field +
                          "' must be a hex string");
  const std::string& s = v.get_ref<const std::string&>();
  try {
    size_t pos = 0;
    uint64_t out = std::stoull(s, &pos, 16);
    if (pos != s.size()) throw std::invalid_argument(s);
    return out;
  } catch (const std::exception&) {
    throw ValidationError("line " + std::to_string(line) + ": field '" + field +
                          "' is not a valid hex value: " + s);
  }
}

std::string hex_str(uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

void check_op(const MicroOp& op, uint64_t line) {
  auto fail = [&](const std::string& why) {
    throw ValidationError("line " + std::to_string(line) + ": " + why);
  };
  if (is_mem(op.kind) != op.addr.has_value())
    fail(is_mem(op.kind) ? "memory op missing addr" : "addr on non-memory op");
  if (op.dst && (op.kind == OpKind::Store || op.kind == OpKind::Branch ||
                 op.kind == OpKind::Nop))
    fail(std::string(op_kind_name(op.kind)) + " has destination");
  if (op.token && op.kind != OpKind::Store) fail("token on non-store op");
  if (op.mispred && op.kind != OpKind::Branch) fail("mispred on non-branch op");
  if (op.srcs.size() > kMaxSrcs) fail("more than 3 source registers");
  if (op.size) {
    uint32_t s = *op.size;
    if (s < 1 || s > 64 || (s & (s - 1)) != 0)
      fail("size must be a power of two in [1,64]");
    if (!is_mem(op.kind)) fail("size on non-memory op");
  }
  for (RegId r : op.srcs)
    if (r >= kArchRegCount) fail("source register out of range");
  if (op.dst && *op.dst >= kArchRegCount) fail("destination register out of range");
  if (op.token && *op.token >= kArchRegCount) fail("token register out of range");
}

}  // namespace

Trace parse_trace(std::istream& in) {
  Trace trace;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError("line " + std::to_string(lineno) +
                            ": malformed JSON: " + e.what());
    }
    if (!j.is_object())
      throw ValidationError("line " + std::to_string(lineno) + ": not an object");

    MicroOp op;
    op.seq = trace.ops.size();
    for (auto& [key, value] : j.items()) {
      if (key == "pc") {
        op.pc = parse_hex(value, lineno, "pc");
      } else if (key == "kind") {
        if (!value.is_string())
          throw ValidationError("line " + std::to_string(lineno) +
                                ": field 'kind' must be a string");
        auto k = op_kind_from_name(value.get<std::string>());
        if (!k)
          throw ValidationError("line " + std::to_string(lineno) +
                                ": unknown kind '" + value.get<std::string>() + "'");
        op.kind = *k;
      } else if (key == "srcs") {
        if (!value.is_array())
          throw ValidationError("line " + std::to_string(lineno) +
                                ": field 'srcs' must be an array");
        for (auto& s : value) {
          if (!s.is_number_unsigned() || s.get<uint64_t>() > 255)
            throw ValidationError("line " + std::to_string(lineno) +
                                  ": field 'srcs' has a bad register id");
          op.srcs.push_back(static_cast<RegId>(s.get<uint64_t>()));
        }
      } else if (key == "dst") {
        if (!value.is_number_unsigned() || value.get<uint64_t>() > 255)
          throw ValidationError("line " + std::to_string(lineno) +
                                ": field 'dst' has a bad register id");
        op.dst = static_cast<RegId>(value.get<uint64_t>());
      } else if (key == "token") {
        if (!value.is_number_unsigned() || value.get<uint64_t>() > 255)
          throw ValidationError("line " + std::to_string(lineno) +
                                ": field 'token' has a bad register id");
        op.token = static_cast<RegId>(value.get<uint64_t>());
      } else if (key == "addr") {
        op.addr = parse_hex(value, lineno, "addr");
      } else if (key == "size") {
        if (!value.is_number_unsigned())
          throw ValidationError("line " + std::to_string(lineno) +
                                ": field 'size' must be an unsigned integer");
        op.size = value.get<uint32_t>();
      } else if (key == "mispred") {
        if (!value.is_boolean())
          throw ValidationError("line " + std::to_string(lineno) +
                                ": field 'mispred' must be a boolean");
        op.mispred = value.get<bool>();
      } else {
        throw ValidationError("line " + std::to_string(lineno) +
                              ": unknown field '" + key + "'");
      }
    }
    check_op(op, lineno);
    trace.ops.push_back(std::move(op));
  }
  return trace;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trace file: " + path);
  return parse_trace(in);
}

void write_trace(const Trace& trace, std::ostream& out) {
  for (const MicroOp& op : trace.ops) {
    json j;
    j["pc"] = hex_str(op.pc);
    j["kind"] = op_kind_name(op.kind);
    j["srcs"] = op.srcs;
    if (op.dst) j["dst"] = *op.dst;
    if (op.token) j["token"] = *op.token;
    if (op.addr) j["addr"] = hex_str(*op.addr);
    if (op.size) j["size"] = *op.size;
    if (op.mispred) j["mispred"] = *op.mispred;
    out << j.dump() << "\n";
  }
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  write_trace(trace, out);
}

std::vector<TraceViolation> validate_trace(const Trace& trace, unsigned arch_regs) {
  std::vector<TraceViolation> v;
  uint64_t expect_seq = 0;
  for (const MicroOp& op : trace.ops) {
    auto add = [&](const std::string& rule) { v.push_back({op.seq, rule}); };
    if (op.seq != expect_seq) add("seq not consecutive");
    ++expect_seq;
    if (is_mem(op.kind) && !op.addr) add("memory op missing addr");
    if (!is_mem(op.kind) && op.addr) add("addr on non-memory op");
    if (op.dst && (op.kind == OpKind::Store || op.kind == OpKind::Branch ||
                   op.kind == OpKind::Nop))
      add(std::string(op_kind_name(op.kind)) + " has destination");
    if (op.token && op.kind != OpKind::Store) add("token on non-store op");
    if (op.mispred && op.kind != OpKind::Branch) add("mispred on non-branch op");
    if (op.srcs.size() > kMaxSrcs) add("more than 3 source registers");
    for (RegId r : op.srcs)
      if (r >= arch_regs) add("source register out of range");
    if (op.dst && *op.dst >= arch_regs) add("destination register out of range");
    if (op.token && *op.token >= arch_regs) add("token register out of range");
    if (op.size) {
      uint32_t s = *op.size;
      if (s < 1 || s > 64 || (s & (s - 1)) != 0)
        add("size must be a power of two in [1,64]");
    }
  }
  return v;
}

namespace {

// Register plan for the table1 kernel. Address registers of the three chain
// root loads are never written, so every iteration restarts the chains.
constexpr RegId kT1Base0 = 1;   // I1 addr base
constexpr RegId kT1Base1 = 2;   // I1/I5 index
constexpr RegId kT1Base2 = 4;   // I4 addr base
constexpr RegId kT1Base3 = 6;   // I5 addr base
constexpr RegId kT1C = 10;      // chain 1 value
constexpr RegId kT1B = 11;      // I4 result
constexpr RegId kT1F = 12;      // I5/I6 result
constexpr RegId kT1G3 = 13;     // I3 store completion token
constexpr RegId kT1G = 14;      // I7 result
constexpr RegId kT1K = 15;      // loop counter
constexpr RegId kT1M = 16;      // loop condition

void emit_table1_iteration(Trace& t) {
  constexpr uint64_t pc0 = 0x400;
  auto push = [&](OpKind kind, std::vector<RegId> srcs, std::optional<RegId> dst,
                  std::optional<uint64_t> addr, std::optional<RegId> token) {
    MicroOp op;
    op.seq = t.ops.size();
    op.pc = pc0 + 4 * (t.ops.size() % 12);
    op.kind = kind;
    op.srcs = std::move(srcs);
    op.dst = dst;
    op.token = token;
    op.addr = addr;
    if (addr) op.size = 4;
    if (kind == OpKind::Branch) op.mispred = false;
    t.ops.push_back(std::move(op));
  };
  // I1..I9: two independent chains, the second fed by loads I4 and I5.
  push(OpKind::Load, {kT1Base0, kT1Base1}, kT1C, 0x1000, {});        // I1
  push(OpKind::IntAlu, {kT1C}, kT1C, {}, {});                        // I2
  push(OpKind::Store, {kT1C}, {}, 0x2000, kT1G3);                    // I3
  push(OpKind::Load, {kT1Base2}, kT1B, 0x3000, {});                  // I4
  push(OpKind::Load, {kT1Base3, kT1Base1}, kT1F, 0x4000, {});        // I5
  push(OpKind::IntAlu, {kT1B, kT1F}, kT1F, {}, {});                  // I6
  push(OpKind::IntAlu, {kT1G3, kT1F}, kT1G, {}, {});                 // I7
  push(OpKind::IntAlu, {kT1G}, kT1C, {}, {});                        // I8
  push(OpKind::Store, {kT1C}, {}, 0x2000, {});                       // I9
  // F1..F3: loop control, three serial single-cycle ops.
  push(OpKind::IntAlu, {kT1K}, kT1K, {}, {});                        // F1
  push(OpKind::IntAlu, {kT1K}, kT1M, {}, {});                        // F2
  push(OpKind::Branch, {kT1M}, {}, {}, {});                          // F3
}

void emit_stream_iteration(Trace& t, uint64_t i) {
  constexpr uint64_t pc0 = 0x1000;
  auto push = [&](OpKind kind, std::vector<RegId> srcs, std::optional<RegId> dst,
                  std::optional<uint64_t> addr) {
    MicroOp op;
    op.seq = t.ops.size();
    op.pc = pc0 + 4 * (t.ops.size() % 7);
    op.kind = kind;
    op.srcs = std::move(srcs);
    op.dst = dst;
    op.addr = addr;
    if (addr) op.size = 8;
    if (kind == OpKind::Branch) op.mispred = false;
    t.ops.push_back(std::move(op));
  };
  push(OpKind::Load, {1}, 20, 0x100000 + i * 64);    // stream A
  push(OpKind::IntAlu, {20, 21}, 21, {});
  push(OpKind::Load, {2}, 22, 0x4000000 + i * 64);   // stream B
  push(OpKind::IntAlu, {22, 23}, 23, {});
  push(OpKind::Store, {21}, {}, 0x8000000 + i * 64);
  push(OpKind::IntAlu, {24}, 24, {});
  push(OpKind::Branch, {24}, {}, {});
}

void emit_pointer_chase_iteration(Trace& t, uint64_t i, uint64_t seed) {
  constexpr uint64_t pc0 = 0x2000;
  constexpr uint64_t region_lines = (4u << 20) / 64;  // 4MB walk
  uint64_t line = splitmix64(seed ^ (i * 0x9e37ULL)) % region_lines;
  auto push = [&](OpKind kind, std::vector<RegId> srcs, std::optional<RegId> dst,
                  std::optional<uint64_t> addr) {
    MicroOp op;
    op.seq = t.ops.size();
    op.pc = pc0 + 4 * (t.ops.size() % 3);
    op.kind = kind;
    op.srcs = std::move(srcs);
    op.dst = dst;
    op.addr = addr;
    if (addr) op.size = 8;
    if (kind == OpKind::Branch) op.mispred = false;
    t.ops.push_back(std::move(op));
  };
  // The load reads its own previous value: a fully serial chain.
  push(OpKind::Load, {30}, 30, 0x10000000 + line * 64);
  push(OpKind::IntAlu, {30}, 31, {});
  push(OpKind::Branch, {31}, {}, {});
}

void emit_mixed_latency_iteration(Trace& t, uint64_t i) {
  constexpr uint64_t pc0 = 0x3000;
  auto push = [&](OpKind kind, std::vector<RegId> srcs, std::optional<RegId> dst,
                  std::optional<uint64_t> addr) {
    MicroOp op;
    op.seq = t.ops.size();
    op.pc = pc0 + 4 * (t.ops.size() % 11);
    op.kind = kind;
    op.srcs = std::move(srcs);
    op.dst = dst;
    op.addr = addr;
    if (addr) op.size = 8;
    if (kind == OpKind::Branch) op.mispred = false;
    t.ops.push_back(std::move(op));
  };
  push(OpKind::Load, {3}, 40, 0x10000 + (i % 8) * 64);        // L1 resident
  push(OpKind::IntAlu, {40, 41}, 41, {});
  push(OpKind::Load, {4}, 42, 0x200000 + (i % 1024) * 64);    // L2 resident
  push(OpKind::IntAlu, {42, 43}, 43, {});
  push(OpKind::Load, {5}, 44, 0x10000000 + i * 64);           // cold stream
  push(OpKind::IntAlu, {44, 45}, 45, {});
  push(OpKind::Load, {6}, 47, 0x18000000 + i * 64);           // second stream
  push(OpKind::IntAlu, {47, 48}, 48, {});
  push(OpKind::Store, {41}, {}, 0x20000000);                  // L1-resident sink
  push(OpKind::IntAlu, {46}, 46, {});
  push(OpKind::Branch, {46}, {}, {});
}

struct DagSlot {
  OpKind kind;
  std::vector<RegId> srcs;
  std::optional<RegId> dst;
  bool stream_addr = false;  // else picked from the shared line pool
  uint64_t pool_line = 0;
  bool mispred = false;
};

// The block shape is a pure function of the seed; iteration only advances
// streaming addresses, so shorter generations are prefixes of longer ones.
std::vector<DagSlot> build_dag_block(uint64_t seed) {
  Rng rng(seed ^ 0xda6ULL);
  size_t n = 16 + rng.below(25);  // 16..40 ops per block
  std::vector<DagSlot> block;
  block.reserve(n);
  for (size_t j = 0; j < n; ++j) {
    DagSlot s;
    uint64_t roll = rng.below(100);
    if (roll < 45) s.kind = OpKind::IntAlu;
    else if (roll < 63) s.kind = OpKind::Load;
    else if (roll < 75) s.kind = OpKind::Store;
    else if (roll < 81) s.kind = OpKind::IntMul;
    else if (roll < 85) s.kind = OpKind::Fp;
    else if (roll < 90) s.kind = OpKind::Nop;
    else s.kind = OpKind::Branch;

    size_t nsrc = 1 + rng.below(2);
    for (size_t k = 0; k < nsrc; ++k)
      s.srcs.push_back(static_cast<RegId>(rng.below(24)));  // 0..7 stay roots
    if (s.kind == OpKind::IntAlu || s.kind == OpKind::IntMul ||
        s.kind == OpKind::Fp || s.kind == OpKind::Load)
      s.dst = static_cast<RegId>(8 + rng.below(16));
    if (is_mem(s.kind)) {
      s.stream_addr = rng.chance(3, 10);
      s.pool_line = rng.below(8);
    }
    if (s.kind == OpKind::Branch) s.mispred = rng.chance(1, 8);
    block.push_back(std::move(s));
  }
  return block;
}

void emit_random_dag_iteration(Trace& t, const std::vector<DagSlot>& block,
                               uint64_t i) {
  constexpr uint64_t pc0 = 0x4000;
  for (size_t j = 0; j < block.size(); ++j) {
    const DagSlot& s = block[j];
    MicroOp op;
    op.seq = t.ops.size();
    op.pc = pc0 + 4 * j;
    op.kind = s.kind;
    op.srcs = s.srcs;
    op.dst = s.dst;
    if (is_mem(s.kind)) {
      op.addr = s.stream_addr ? 0x20000000 + (i * block.size() + j) * 64
                              : 0x1000 + s.pool_line * 64;
      op.size = 8;
    }
    if (s.kind == OpKind::Branch) op.mispred = s.mispred;
    t.ops.push_back(std::move(op));
  }
}

}  // namespace

const std::vector<std::string>& kernel_names() {
  static const std::vector<std::string> names = {
      "table1", "stream", "pointer-chase", "mixed-latency", "random-dag"};
  return names;
}

Trace gen_kernel(const std::string& name, uint64_t iterations, uint64_t seed) {
  if (iterations < 1) throw ValidationError("iterations must be >= 1");
  Trace t;
  t.meta.name = name;
  t.meta.seed = seed;
  if (name == "table1") {
    for (uint64_t i = 0; i < iterations; ++i) emit_table1_iteration(t);
  } else if (name == "stream") {
    for (uint64_t i = 0; i < iterations; ++i) emit_stream_iteration(t, i);
  } else if (name == "pointer-chase") {
    for (uint64_t i = 0; i < iterations; ++i)
      emit_pointer_chase_iteration(t, i, seed);
  } else if (name == "mixed-latency") {
    for (uint64_t i = 0; i < iterations; ++i) emit_mixed_latency_iteration(t, i);
  } else if (name == "random-dag") {
    auto block = build_dag_block(seed);
    for (uint64_t i = 0; i < iterations; ++i)
      emit_random_dag_iteration(t, block, i);
  } else {
    throw ValidationError("unknown kernel name: " + name);
  }
  return t;
}

}  // namespace pqsim
