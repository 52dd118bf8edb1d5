#pragma once

#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

namespace usf {

enum class Exec { serial, openmp };

/// Per-replica results in index order. Replica i must derive all its
/// randomness from i, so the output never depends on scheduling. The
/// exception of the lowest failing index is rethrown.
template <class Fn>
auto map_replicas(std::uint64_t count, Fn&& fn, Exec exec = Exec::openmp) {
  using T = decltype(fn(std::uint64_t{0}));
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errs(count);
  const auto n = static_cast<std::int64_t>(count);
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::uint64_t>(i));
    return out;
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::uint64_t>(i));
    } catch (...) {
      errs[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

inline int worker_count() { return omp_get_max_threads(); }

/// Stream id for replica i of an experiment stage.
constexpr std::uint64_t stream_id(std::uint64_t tag, std::uint64_t i) { return (tag << 40) + i; }

}  // namespace usf
