#include "pqsim/cores.hpp"

#include "pqsim/error.hpp"

namespace pqsim {

const char* core_kind_name(CoreKind k) {
  switch (k) {
    case CoreKind::Proposed: return "proposed";
    case CoreKind::InOrder: return "inorder";
    case CoreKind::OutOfOrder: return "ooo";
  }
  return "?";
}

std::optional<CoreKind> core_kind_from_name(const std::string& name) {
  if (name == "proposed") return CoreKind::Proposed;
  if (name == "inorder") return CoreKind::InOrder;
  if (name == "ooo") return CoreKind::OutOfOrder;
  return std::nullopt;
}

StaticDelayTable CoreConfig::static_delays() const {
  StaticDelayTable t;
  t.int_mul = int_mul_latency;
  t.fp = fp_latency;
  t.mem_l1 = l1.hit_latency;
  return t;
}

void CoreConfig::validate() const {
  auto fail = [](const std::string& why) { throw ValidationError("config: " + why); };
  if (issue_width < 1) fail("issue-width must be >= 1");
  if (rob_size < 1) fail("rob-size must be >= 1");
  if (rs_size < 1) fail("rs-size must be >= 1");
  if (pq_size < 1) fail("pq-size must be >= 1");
  if (int_units + fp_units + branch_units + ls_units == 0)
    fail("at least one functional unit is required");
  if (policy.training_interval < 1) fail("training-interval must be >= 1");
  if (delaycache_entries < 1) fail("delaycache-entries must be >= 1");
  if (int_mul_latency < 1 || fp_latency < 1) fail("static delays must be >= 1");
  l1.validate("l1");
  l2.validate("l2");
  dram.validate();
}

RunResult run_core(const Trace& trace, const CoreConfig& config) {
  switch (config.core) {
    case CoreKind::Proposed: return run_proposed(trace, config);
    case CoreKind::InOrder: return run_inorder(trace, config);
    case CoreKind::OutOfOrder: return run_ooo(trace, config);
  }
  throw ValidationError("unknown core kind");
}

}  // namespace pqsim
