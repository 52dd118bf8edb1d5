#pragma once

#include <cstdint>
#include <optional>

#include "usf/lattice.hpp"
#include "usf/path.hpp"
#include "usf/rng.hpp"

namespace usf {

/// Compound stopping rule. The walk stops at the first index where any
/// clause fires; when several fire together, hit_set wins over exit_domain.
struct StopRule {
  std::optional<Domain> exit_domain;  // τ_D: first index outside the domain
  const VertexSet* hit_set = nullptr;  // T_A; must outlive the walk
  bool hit_set_positive = false;       // T_A^+: ignore index 0
  std::optional<std::uint64_t> step_cap;

  bool has_clause() const { return exit_domain || hit_set || step_cap; }
};

enum class StopCause { exited_domain, hit_set, step_cap };

struct WalkOutcome {
  Path path;
  StopCause cause = StopCause::step_cap;
};

WalkOutcome run_walk(const Point& start, const StopRule& rule, RngStream& rng);

struct ConditionedOutcome {
  WalkOutcome walk;
  std::uint64_t trials = 0;  // attempts including the accepted one
};

/// Walk from start conditioned on {τ_D < T^+_avoid}, by rejection.
ConditionedOutcome run_conditioned_walk(const Point& start, const VertexSet& avoid, const Domain& d,
                                        std::uint64_t trial_cap, RngStream& rng);

/// Loop erasure of the walk from start stopped on exiting D.
Path sample_lerw(const Point& start, const Domain& d, RngStream& rng);

struct EscapeOutcome {
  bool hit = false;
  std::uint64_t steps = 0;
  Path path;  // empty unless requested
};

/// Walk until it hits target or leaves Q(center(target), escape_radius).
/// The centre is the midpoint of target's bounding box.
EscapeOutcome hits_before_escape(const Point& start, const VertexSet& target, int escape_radius, RngStream& rng,
                                 bool keep_path = true);

/// Same event for a single target point, without hashing.
EscapeOutcome hits_point_before_escape(const Point& start, const Point& target, int escape_radius, RngStream& rng,
                                       bool keep_path = false);

}  // namespace usf
