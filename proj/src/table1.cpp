#include "pqsim/table1.hpp"

#include <ostream>
#include <sstream>

namespace pqsim {

const std::array<uint64_t, 9> kTable1InorderIter1 = {2, 6, 7, 8, 9, 13, 14, 15, 16};
const std::array<uint64_t, 9> kTable1ProposedIter2 = {20, 24, 25, 21, 22, 26, 29, 30, 31};
const std::array<int64_t, 9> kTable1Delta = {0, 0, 0, -5, -5, -5, -3, -3, -3};

CoreConfig table1_config(CoreKind core) {
  CoreConfig cfg;
  cfg.core = core;
  cfg.issue_width = 1;
  cfg.int_units = 2;
  cfg.fp_units = 0;
  cfg.branch_units = 1;
  cfg.ls_units = 1;
  cfg.warm_caches = true;  // every access is an L1 hit
  cfg.dram.jitter_amplitude = 0;
  cfg.warmup_program_order = core == CoreKind::Proposed;
  return cfg;
}

Table1Result run_table1_check() {
  Trace trace = gen_kernel("table1", 2, 1);
  RunResult in_order = run_inorder(trace, table1_config(CoreKind::InOrder));
  RunResult proposed = run_proposed(trace, table1_config(CoreKind::Proposed));

  Table1Result r;
  for (size_t i = 0; i < 9; ++i) {
    r.inorder_iter1[i] = in_order.log[i].issue;
    r.inorder_iter2[i] = in_order.log[12 + i].issue;
    r.proposed_iter2[i] = proposed.log[12 + i].issue;
    r.delta[i] = static_cast<int64_t>(r.proposed_iter2[i]) -
                 static_cast<int64_t>(r.inorder_iter2[i]);
  }

  r.ok = true;
  auto mismatch = [&](const std::string& what, size_t i, int64_t got,
                      int64_t want) {
    if (r.ok) {
      std::ostringstream os;
      os << what << " of I" << (i + 1) << ": got " << got << ", expected " << want;
      r.first_mismatch = os.str();
      r.ok = false;
    }
  };
  for (size_t i = 0; i < 9; ++i) {
    if (r.inorder_iter1[i] != kTable1InorderIter1[i])
      mismatch("in-order iteration-1 issue", i, r.inorder_iter1[i],
               kTable1InorderIter1[i]);
    if (r.proposed_iter2[i] != kTable1ProposedIter2[i])
      mismatch("proposed iteration-2 issue", i, r.proposed_iter2[i],
               kTable1ProposedIter2[i]);
    if (r.delta[i] != kTable1Delta[i])
      mismatch("delta", i, r.delta[i], kTable1Delta[i]);
  }
  return r;
}

void print_table1(const Table1Result& r, std::ostream& out) {
  out << "op   inorder(it1)  inorder(it2)  proposed(it2)  delta\n";
  for (size_t i = 0; i < 9; ++i) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "I%zu  %12llu  %12llu  %13llu  %5lld\n",
                  i + 1, static_cast<unsigned long long>(r.inorder_iter1[i]),
                  static_cast<unsigned long long>(r.inorder_iter2[i]),
                  static_cast<unsigned long long>(r.proposed_iter2[i]),
                  static_cast<long long>(r.delta[i]));
    out << buf;
  }
  out << (r.ok ? "table1 check: PASS\n" : "table1 check: FAIL (" + r.first_mismatch + ")\n");
}

}  // namespace pqsim
