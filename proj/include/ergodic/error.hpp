#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ergodic {

enum class ErrorCode {
  budget_exceeded,
  precision_stall,
  invalid_nesting,
  unsupported_instance,
  unsupported_pair,
  no_mass,
  invalid_input,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::budget_exceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::precision_stall: return "PRECISION_STALL";
    case ErrorCode::invalid_nesting: return "INVALID_NESTING";
    case ErrorCode::unsupported_instance: return "UNSUPPORTED_INSTANCE";
    case ErrorCode::unsupported_pair: return "UNSUPPORTED_PAIR";
    case ErrorCode::no_mass: return "NO_MASS";
    case ErrorCode::invalid_input: return "INVALID_INPUT";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_input, what);
}

// Work caps. One process-wide default, adjustable by the CLI; every
// unbounded search charges against one of these.
struct Limits {
  std::uint64_t steps = std::uint64_t(1) << 28;
  std::uint64_t cylinders = std::uint64_t(1) << 24;
  std::uint64_t pieces = std::uint64_t(1) << 22;
  unsigned max_precision = 1u << 20;
  std::uint64_t max_p = std::uint64_t(1) << 56;
};

inline Limits& limits() {
  static Limits l;
  return l;
}

class StepBudget {
 public:
  explicit StepBudget(std::uint64_t cap = limits().steps) : cap_(cap) {}
  void charge(std::uint64_t n, const char* what) {
    used_ += n;
    if (used_ > cap_) fail(ErrorCode::budget_exceeded, std::string(what) + " exceeded step budget");
  }
  std::uint64_t used() const { return used_; }

 private:
  std::uint64_t cap_;
  std::uint64_t used_ = 0;
};

}  // namespace ergodic
