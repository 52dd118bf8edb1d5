#include "usf/walker.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace usf {

WalkOutcome run_walk(const Point& start, const StopRule& rule, RngStream& rng) {
  if (!rule.has_clause()) fail(ErrorKind::invalid_argument, "stop rule needs at least one clause");
  const Domain* dom = rule.exit_domain ? &*rule.exit_domain : nullptr;
  if (dom) {
    require(dom->dim() == start.dim(), "start dimension does not match domain");
    require(dom->contains(start), "walk start outside exit domain");
  }
  const Lattice lat(start.dim());
  const std::uint32_t ndir = static_cast<std::uint32_t>(lat.num_directions());
  const MembershipProbe inside(dom);
  const VertexSet* hs = rule.hit_set;
  const std::uint64_t cap = rule.step_cap.value_or(~std::uint64_t{0});

  WalkOutcome out;
  out.path.dim = start.dim();
  Key k = lat.pack(start);
  Point p = start;
  out.path.v.push_back(k);
  if (hs && !rule.hit_set_positive && hs->contains(k)) {
    out.cause = StopCause::hit_set;
    return out;
  }
  for (std::uint64_t n = 0;; ++n) {
    if (n >= cap) {
      out.cause = StopCause::step_cap;
      return out;
    }
    const int dir = static_cast<int>(rng.uniform_int(ndir));
    k = lat.step(k, dir);
    Lattice::apply(p, dir);
    if (std::abs(p[Lattice::axis_of(dir)]) > lat.max_abs_coord())
      fail(ErrorKind::invalid_argument, "walk left the packable coordinate range");
    out.path.v.push_back(k);
    if (hs && hs->contains(k)) {
      out.cause = StopCause::hit_set;
      return out;
    }
    if (!inside(p, Lattice::axis_of(dir))) {
      out.cause = StopCause::exited_domain;
      return out;
    }
  }
}

ConditionedOutcome run_conditioned_walk(const Point& start, const VertexSet& avoid, const Domain& d,
                                        std::uint64_t trial_cap, RngStream& rng) {
  require(d.finite(), "conditioned walk needs a finite domain");
  StopRule rule;
  rule.exit_domain = d;
  rule.hit_set = avoid.empty() ? nullptr : &avoid;
  rule.hit_set_positive = true;
  ConditionedOutcome res;
  while (res.trials < trial_cap) {
    ++res.trials;
    WalkOutcome w = run_walk(start, rule, rng);
    if (w.cause == StopCause::exited_domain) {
      res.walk = std::move(w);
      return res;
    }
  }
  std::ostringstream os;
  os << "conditioning failed: 0 accepted out of " << res.trials << " trials (acceptance rate < "
     << 1.0 / static_cast<double>(res.trials) << ")";
  fail(ErrorKind::conditioning_failed, os.str());
}

Path sample_lerw(const Point& start, const Domain& d, RngStream& rng) {
  require(d.finite(), "LERW needs a finite domain");
  require(d.contains(start), "LERW start outside domain");
  const Lattice lat(start.dim());
  const std::uint32_t ndir = static_cast<std::uint32_t>(lat.num_directions());
  const MembershipProbe inside(&d);
  LoopEraser er(start.dim());
  Key k = lat.pack(start);
  Point p = start;
  er.push(k);
  while (true) {
    const int dir = static_cast<int>(rng.uniform_int(ndir));
    k = lat.step(k, dir);
    Lattice::apply(p, dir);
    er.push(k);
    if (!inside(p, Lattice::axis_of(dir))) break;
  }
  return er.take();
}

EscapeOutcome hits_before_escape(const Point& start, const VertexSet& target, int escape_radius, RngStream& rng,
                                 bool keep_path) {
  require(!target.empty(), "empty target");
  const Lattice lat(start.dim());
  const int d = lat.dim();
  Point lo = lat.unpack(*target.begin()), hi = lo;
  for (Key t : target) {
    const Point q = lat.unpack(t);
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], q[i]);
      hi[i] = std::max(hi[i], q[i]);
    }
  }
  Point c(d);
  for (int i = 0; i < d; ++i) {
    c[i] = (lo[i] + hi[i]) / 2;
    if (std::abs(c[i]) + escape_radius + 1 > lat.max_abs_coord())
      fail(ErrorKind::invalid_argument, "escape box overflows packed coordinates");
  }
  const std::uint32_t ndir = static_cast<std::uint32_t>(lat.num_directions());
  EscapeOutcome out;
  Key k = lat.pack(start);
  Point p = start;
  if (keep_path) out.path = Path(d, {k});
  if (target.contains(k)) {
    out.hit = true;
    return out;
  }
  if (linf_distance(p, c) > escape_radius) return out;
  while (true) {
    const int dir = static_cast<int>(rng.uniform_int(ndir));
    k = lat.step(k, dir);
    Lattice::apply(p, dir);
    ++out.steps;
    if (keep_path) out.path.v.push_back(k);
    if (target.contains(k)) {
      out.hit = true;
      return out;
    }
    const int a = Lattice::axis_of(dir);
    if (std::abs(p[a] - c[a]) > escape_radius) return out;
  }
}

EscapeOutcome hits_point_before_escape(const Point& start, const Point& target, int escape_radius, RngStream& rng,
                                       bool keep_path) {
  const Lattice lat(start.dim());
  const int d = lat.dim();
  for (int i = 0; i < d; ++i)
    if (std::abs(target[i]) + escape_radius + 1 > lat.max_abs_coord())
      fail(ErrorKind::invalid_argument, "escape box overflows packed coordinates");
  const std::uint32_t ndir = static_cast<std::uint32_t>(lat.num_directions());
  EscapeOutcome out;
  Point p = start;
  Point rel = start - target;
  if (keep_path) out.path = Path(d, {lat.pack(start)});
  if (rel == Point(d)) {
    out.hit = true;
    return out;
  }
  if (norms(rel).linf > escape_radius) return out;
  // Track the number of nonzero relative coordinates so the hit test is O(1).
  int nonzero = 0;
  for (int i = 0; i < d; ++i) nonzero += rel[i] != 0;
  while (true) {
    const int dir = static_cast<int>(rng.uniform_int(ndir));
    const int a = Lattice::axis_of(dir);
    const int before = rel[a];
    rel[a] += Lattice::sign_of(dir);
    nonzero += (rel[a] != 0) - (before != 0);
    ++out.steps;
    if (keep_path) {
      Lattice::apply(p, dir);
      out.path.v.push_back(lat.pack(p));
    }
    if (nonzero == 0) {
      out.hit = true;
      return out;
    }
    if (std::abs(rel[a]) > escape_radius) return out;
  }
}

}  // namespace usf
