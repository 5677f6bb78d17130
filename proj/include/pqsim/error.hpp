#pragma once

#include <stdexcept>
#include <string>

namespace pqsim {

// Bad input: malformed traces, invalid configs, unknown names.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A broken internal invariant (simulator bug). CLI exit code 2.
class InternalError : public std::logic_error {
public:
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

inline void internal_check(bool cond, const std::string& msg) {
  if (!cond) throw InternalError(msg);
}

}  // namespace pqsim
