#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "pqsim/cores.hpp"

namespace pqsim {

// Built-in check of the annotated two-iteration example: a width-1 stall-on-
// use core against the priority-queue core in first-instance program-order
// mode, all memory accesses warm L1 hits.
struct Table1Result {
  std::array<uint64_t, 9> inorder_iter1{};
  std::array<uint64_t, 9> inorder_iter2{};
  std::array<uint64_t, 9> proposed_iter2{};
  std::array<int64_t, 9> delta{};  // proposed vs in-order, second iteration
  bool ok = false;
  std::string first_mismatch;  // empty when ok
};

extern const std::array<uint64_t, 9> kTable1InorderIter1;
extern const std::array<uint64_t, 9> kTable1ProposedIter2;
extern const std::array<int64_t, 9> kTable1Delta;

CoreConfig table1_config(CoreKind core);
Table1Result run_table1_check();
void print_table1(const Table1Result& r, std::ostream& out);

}  // namespace pqsim
