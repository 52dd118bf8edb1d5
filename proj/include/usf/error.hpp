#pragma once

#include <stdexcept>
#include <string>

namespace usf {

enum class ErrorKind {
  invalid_argument,
  empty_set,
  set_not_hit,
  capacity_exceeded,   // exact-solver or memory caps
  conditioning_failed, // rejection sampler ran out of trials
  ill_conditioned,
  partial_forest,
  geometry,            // shell constraints violated without override
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_argument, what);
}

}  // namespace usf
