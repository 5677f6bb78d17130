#include "pqsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pqsim/error.hpp"

namespace pqsim {

namespace {

uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::string v = value;
  uint64_t scale = 1;
  if (!v.empty() && (v.back() == 'k' || v.back() == 'K')) {
    scale = 1024;
    v.pop_back();
  } else if (!v.empty() && (v.back() == 'm' || v.back() == 'M')) {
    scale = 1024 * 1024;
    v.pop_back();
  }
  try {
    size_t pos = 0;
    uint64_t out = std::stoull(v, &pos, 10);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out * scale;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': bad integer '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw ValidationError("config key '" + key + "': bad boolean '" + value + "'");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "core", "issue-width", "dispatch-width", "commit-width", "rob-size",
      "rs-size", "pq-size", "int-units", "fp-units", "branch-units", "ls-units",
      "l1-capacity", "l1-ways", "l1-line", "l1-hit-latency", "l1-outstanding",
      "l2-capacity", "l2-ways", "l2-line", "l2-hit-latency", "l2-outstanding",
      "dram-base-latency", "dram-row-buffer", "dram-row-hit-latency",
      "dram-banks", "dram-jitter", "prefetcher", "prefetcher-streams", "policy",
      "training-interval", "saturating-threshold", "use-dispatch-time",
      "steering", "warmup-program-order", "branch-penalty",
      "delaycache-entries", "seed", "warm-caches", "int-mul-latency",
      "fp-latency"};
  return keys;
}

CoreConfig parse_config(std::istream& in, const std::string& source_name) {
  CoreConfig cfg;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(source_name + ":" + std::to_string(lineno) +
                            ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ValidationError(source_name + ":" + std::to_string(lineno) +
                            ": expected key=value");

    if (key == "core") {
      auto k = core_kind_from_name(value);
      if (!k) throw ValidationError("config key 'core': unknown core '" + value + "'");
      cfg.core = *k;
    } else if (key == "issue-width") {
      cfg.issue_width = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "dispatch-width") {
      cfg.dispatch_width = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "commit-width") {
      cfg.commit_width = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "rob-size") {
      cfg.rob_size = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "rs-size") {
      cfg.rs_size = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "pq-size") {
      cfg.pq_size = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "int-units") {
      cfg.int_units = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "fp-units") {
      cfg.fp_units = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "branch-units") {
      cfg.branch_units = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "ls-units") {
      cfg.ls_units = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "l1-capacity") {
      cfg.l1.capacity = parse_u64(key, value);
    } else if (key == "l1-ways") {
      cfg.l1.associativity = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "l1-line") {
      cfg.l1.line = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "l1-hit-latency") {
      cfg.l1.hit_latency = parse_u64(key, value);
    } else if (key == "l1-outstanding") {
      cfg.l1.outstanding = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "l2-capacity") {
      cfg.l2.capacity = parse_u64(key, value);
    } else if (key == "l2-ways") {
      cfg.l2.associativity = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "l2-line") {
      cfg.l2.line = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "l2-hit-latency") {
      cfg.l2.hit_latency = parse_u64(key, value);
    } else if (key == "l2-outstanding") {
      cfg.l2.outstanding = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "dram-base-latency") {
      cfg.dram.base_latency = parse_u64(key, value);
    } else if (key == "dram-row-buffer") {
      cfg.dram.row_buffer = parse_u64(key, value);
    } else if (key == "dram-row-hit-latency") {
      cfg.dram.row_hit_latency = parse_u64(key, value);
    } else if (key == "dram-banks") {
      cfg.dram.banks = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "dram-jitter") {
      cfg.dram.jitter_amplitude = parse_u64(key, value);
    } else if (key == "prefetcher") {
      cfg.prefetcher = parse_bool(key, value);
    } else if (key == "prefetcher-streams") {
      cfg.prefetcher_streams = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "policy") {
      auto p = delay_selector_from_name(value);
      if (!p) throw ValidationError("config key 'policy': unknown policy '" + value + "'");
      cfg.policy.selector = *p;
    } else if (key == "training-interval") {
      cfg.policy.training_interval = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "saturating-threshold") {
      cfg.policy.saturating_threshold = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "use-dispatch-time") {
      cfg.policy.use_dispatch_time = parse_bool(key, value);
    } else if (key == "steering") {
      auto s = steering_scheme_from_name(value);
      if (!s)
        throw ValidationError("config key 'steering': unknown scheme '" + value + "'");
      cfg.steering = *s;
    } else if (key == "warmup-program-order") {
      cfg.warmup_program_order = parse_bool(key, value);
    } else if (key == "branch-penalty") {
      cfg.branch_penalty = parse_u64(key, value);
    } else if (key == "delaycache-entries") {
      cfg.delaycache_entries = static_cast<uint32_t>(parse_u64(key, value));
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, value);
    } else if (key == "warm-caches") {
      cfg.warm_caches = parse_bool(key, value);
    } else if (key == "int-mul-latency") {
      cfg.int_mul_latency = parse_u64(key, value);
    } else if (key == "fp-latency") {
      cfg.fp_latency = parse_u64(key, value);
    } else {
      throw ValidationError(source_name + ":" + std::to_string(lineno) +
                            ": unknown config key '" + key + "'");
    }
  }
  cfg.dram.seed = cfg.seed;
  return cfg;
}

CoreConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  return parse_config(in, path);
}

}  // namespace pqsim
