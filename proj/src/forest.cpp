#include "usf/forest.hpp"

#include <algorithm>
#include <ostream>

namespace usf {

WiredGraph::WiredGraph(Domain d) : domain(std::move(d)) {
  require(domain.finite() && domain.wired(), "wired graph needs a finite wired domain");
}

Key SpanningForest::parent(Key k) const {
  auto it = parent_.find(k);
  if (it == parent_.end()) fail(ErrorKind::partial_forest, "partial forest: vertex not revealed");
  return it->second;
}

std::vector<Key> SpanningForest::path_to_root(Key k) const {
  std::vector<Key> out{k};
  while (k != kRootKey) {
    k = parent(k);
    out.push_back(k);
    if (out.size() > parent_.size() + 2) fail(ErrorKind::internal, "cycle in forest");
  }
  return out;
}

void SpanningForest::validate() const {
  // Each vertex is resolved once; chains are pointer-chased with marks.
  absl::flat_hash_map<Key, std::uint8_t> state;  // 1 = on current chain, 2 = reaches root
  state.reserve(parent_.size());
  std::vector<Key> chain;
  for (const auto& kv : parent_) {
    Key u = kv.first;
    chain.clear();
    while (u != kRootKey) {
      auto it = state.find(u);
      if (it != state.end()) {
        if (it->second == 1) fail(ErrorKind::internal, "cycle in forest");
        break;
      }
      state[u] = 1;
      chain.push_back(u);
      u = parent(u);
    }
    for (Key c : chain) state[c] = 2;
  }
}

bool operator==(const SpanningForest& a, const SpanningForest& b) {
  return a.dim() == b.dim() && a.parents() == b.parents() && a.parent_dir == b.parent_dir;
}

WilsonBuilder::WilsonBuilder(const WiredGraph& g, DirectionSource& src, std::size_t vertex_cap, bool record_dirs)
    : g_(g), lat_(g.dim()), src_(src), cap_(vertex_cap), record_dirs_(record_dirs), forest_(g.dim()) {}

Key WilsonBuilder::add_branch(Key start) {
  if (forest_.revealed(start)) return start;
  const MembershipProbe inside(&g_.domain);
  const int nd = lat_.num_directions();
  Point p = lat_.unpack(start);
  if (!g_.domain.contains(p)) fail(ErrorKind::invalid_argument, "start outside domain: " + p.to_string());
  forest_.start_order.push_back(start);

  Key u = start;
  while (true) {
    const int dir = src_.next(u, nd);
    ++steps_;
    last_exit_[u] = static_cast<std::int8_t>(dir);
    Lattice::apply(p, dir);
    if (!inside(p, Lattice::axis_of(dir))) break;
    u = lat_.step(u, dir);
    if (forest_.revealed(u)) break;
  }

  u = start;
  p = lat_.unpack(start);
  while (true) {
    auto it = last_exit_.find(u);
    const int dir = it->second;
    last_exit_.erase(it);
    if (record_dirs_) forest_.parent_dir[u] = static_cast<std::int8_t>(dir);
    Lattice::apply(p, dir);
    if (!inside(p, Lattice::axis_of(dir))) {
      forest_.set_parent(u, kRootKey);
      u = kRootKey;
      break;
    }
    const Key v = lat_.step(u, dir);
    const bool old = forest_.revealed(v);
    forest_.set_parent(u, v);
    u = v;
    if (old) break;
  }
  if (cap_ && forest_.size() > cap_)
    fail(ErrorKind::capacity_exceeded, "forest exceeds vertex cap with " + std::to_string(forest_.size()) + " revealed");
  return u;
}

SpanningForest wilson_sample(const WiredGraph& g, const std::vector<Point>& starts, DirectionSource& src,
                             bool record_dirs) {
  WilsonBuilder b(g, src, 0, record_dirs);
  const Lattice lat(g.dim());
  for (const auto& s : starts) b.add_branch(lat.pack(s));
  return b.take();
}

SpanningForest wilson_sample(const WiredGraph& g, const std::vector<Point>& starts, RngStream& rng) {
  StreamDirections src(rng);
  return wilson_sample(g, starts, src);
}

SpanningForest pop_all_cycles(StackSystem& s, const WiredGraph& g, RngStream& order_rng, std::uint64_t pop_cap) {
  const Lattice lat(g.dim());
  const int nd = lat.num_directions();
  std::vector<Key> keys;
  for (const auto& p : g.domain.vertices()) keys.push_back(lat.pack(p));
  const VertexSet dom(keys.begin(), keys.end());
  auto succ = [&](Key v) {
    const Key w = lat.step(v, s.top_direction(v, nd));
    return dom.contains(w) ? w : kRootKey;
  };

  VertexSet acyclic;
  std::vector<Key> queue = keys;
  std::vector<Key> seq;
  absl::flat_hash_map<Key, std::size_t> pos;
  std::uint64_t pops = 0;
  const std::size_t bound = 2 * keys.size() + 2;
  while (!queue.empty()) {
    const std::size_t i = order_rng.uniform_int(static_cast<std::uint32_t>(queue.size()));
    const Key v = queue[i];
    queue[i] = queue.back();
    queue.pop_back();
    if (acyclic.contains(v)) continue;
    seq.clear();
    pos.clear();
    Key u = v;
    while (true) {
      if (u == kRootKey || acyclic.contains(u)) {
        acyclic.insert(seq.begin(), seq.end());
        break;
      }
      auto it = pos.find(u);
      if (it != pos.end()) {
        std::vector<Key> cycle(seq.begin() + static_cast<std::ptrdiff_t>(it->second), seq.end());
        for (Key c : cycle) ++s.top[c];
        s.pop_log.push_back(std::move(cycle));
        if (++pops > pop_cap) fail(ErrorKind::internal, "cycle popping exceeded its pop cap");
        queue.push_back(v);
        break;
      }
      pos.emplace(u, seq.size());
      seq.push_back(u);
      if (seq.size() > bound) fail(ErrorKind::internal, "pointer chase exceeded its step bound");
      u = succ(u);
    }
  }
  SpanningForest f(g.dim());
  for (Key k : keys) {
    f.set_parent(k, succ(k));
    f.parent_dir[k] = static_cast<std::int8_t>(s.top_direction(k, nd));
  }
  return f;
}

VertexSet component(const SpanningForest& f, const Point& x, const std::vector<Key>& within) {
  const Lattice lat(x.dim());
  const Key kx = lat.pack(x);
  if (!f.revealed(kx)) fail(ErrorKind::partial_forest, "partial forest");
  absl::flat_hash_map<Key, bool> label;
  for (Key k : f.path_to_root(kx))
    if (k != kRootKey) label[k] = true;
  VertexSet out;
  std::vector<Key> seq;
  for (Key y : within) {
    if (!f.revealed(y)) fail(ErrorKind::partial_forest, "partial forest");
    seq.clear();
    Key u = y;
    bool in = false;
    while (true) {
      if (u == kRootKey) break;
      auto it = label.find(u);
      if (it != label.end()) {
        in = it->second;
        break;
      }
      seq.push_back(u);
      u = f.parent(u);
    }
    for (Key s : seq) label[s] = in;
    if (in) out.insert(y);
  }
  return out;
}

std::optional<std::int64_t> tree_distance(const SpanningForest& f, const Point& x, const Point& y) {
  const Lattice lat(x.dim());
  const Key kx = lat.pack(x), ky = lat.pack(y);
  if (!f.revealed(kx) || !f.revealed(ky)) fail(ErrorKind::partial_forest, "partial forest");
  absl::flat_hash_map<Key, std::int64_t> depth_x;
  std::int64_t i = 0;
  for (Key k : f.path_to_root(kx)) depth_x.emplace(k, i++);
  std::int64_t j = 0;
  for (Key u = ky;; u = f.parent(u), ++j) {
    if (u == kRootKey) return std::nullopt;
    auto it = depth_x.find(u);
    if (it != depth_x.end()) return it->second + j;
  }
}

BallResult intrinsic_ball(const Domain& d, int n, DirectionSource& src, const BallOptions& opt) {
  require(n >= 0, "ball radius must be non-negative");
  const Box* b = d.single_box();
  require(d.finite(), "intrinsic ball needs a finite domain");
  const Point origin(d.dim());
  if (b && norms(b->center).linf + 4 * n > b->radius)
    fail(ErrorKind::geometry, "domain must contain Q(0, 4n)");
  const WiredGraph g(d);
  const Lattice lat(d.dim());
  WilsonBuilder w(g, src, opt.vertex_cap);
  const Key k0 = lat.pack(origin);
  w.add_branch(k0);
  if (opt.full_starts)
    for (const auto& p : cube(d.dim(), n).vertices())
      if (d.contains(p)) w.add_branch(lat.pack(p));

  BallResult r;
  r.center = origin;
  r.radius_intrinsic = n;
  r.domain_used = d;
  r.members.emplace(k0, 0);
  std::vector<Key> layer{k0}, next;
  for (int k = 0; k < n && !layer.empty(); ++k) {
    next.clear();
    for (Key u : layer) {
      const Point pu = lat.unpack(u);
      Key nbs[2 * kMaxDim];
      int cnt = 0;
      for (int dir = 0; dir < lat.num_directions(); ++dir) {
        Point q = pu;
        Lattice::apply(q, dir);
        if (!d.contains(q)) continue;
        const Key v = lat.step(u, dir);
        w.add_branch(v);
        nbs[cnt++] = v;
      }
      const SpanningForest& f = w.forest();
      auto visit = [&](Key v) {
        if (r.members.try_emplace(v, k + 1).second) next.push_back(v);
      };
      const Key pu_parent = f.parent(u);
      if (pu_parent != kRootKey) visit(pu_parent);
      for (int i = 0; i < cnt; ++i)
        if (f.parent(nbs[i]) == u) visit(nbs[i]);
    }
    layer.swap(next);
  }
  for (const auto& [key, dist] : r.members)
    if (norms(lat.unpack(key)).linf > dist) fail(ErrorKind::internal, "ball member outside Q_n");
  r.revealed = w.forest().size();
  r.walk_steps = w.steps();
  return r;
}

BallResult intrinsic_ball(const Domain& d, int n, RngStream& rng, const BallOptions& opt) {
  StreamDirections src(rng);
  return intrinsic_ball(d, n, src, opt);
}

void dump_forest(std::ostream& os, const SpanningForest& f) {
  std::vector<std::pair<Key, Key>> edges(f.parents().begin(), f.parents().end());
  std::sort(edges.begin(), edges.end());
  for (const auto& [k, p] : edges) os << k << ' ' << p << '\n';
}

}  // namespace usf
