#include "usf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "usf/walker.hpp"

namespace usf {

TinyGraph cycle_graph(int n) {
  TinyGraph g;
  g.n = n;
  for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
  return g;
}

TinyGraph complete_graph(int n) {
  TinyGraph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
  return g;
}

WiredTiny wired_tiny_graph(const Domain& d) {
  require(d.finite() && d.wired(), "wired tiny graph needs a finite wired domain");
  const Lattice lat(d.dim());
  WiredTiny w;
  for (const auto& p : d.vertices()) w.keys.push_back(lat.pack(p));
  std::sort(w.keys.begin(), w.keys.end());
  for (std::size_t i = 0; i < w.keys.size(); ++i) w.index.emplace(w.keys[i], static_cast<int>(i));
  const int n = static_cast<int>(w.keys.size());
  w.g.n = n + 1;
  w.g.root = n;
  w.edge_of.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(lat.num_directions()), -1));
  for (int i = 0; i < n; ++i)
    for (int dir = 0; dir < lat.num_directions(); ++dir) {
      auto& slot = w.edge_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(dir)];
      if (slot >= 0) continue;
      const Key nb = lat.step(w.keys[static_cast<std::size_t>(i)], dir);
      auto it = w.index.find(nb);
      slot = static_cast<int>(w.g.edges.size());
      if (it == w.index.end()) {
        w.g.edges.emplace_back(i, n);
      } else {
        w.g.edges.emplace_back(i, it->second);
        w.edge_of[static_cast<std::size_t>(it->second)][static_cast<std::size_t>(dir ^ 1)] = slot;
      }
    }
  return w;
}

namespace {

std::vector<std::vector<std::pair<int, int>>> incidence(const TinyGraph& g) {
  std::vector<std::vector<std::pair<int, int>>> inc(static_cast<std::size_t>(g.n));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [a, b] = g.edges[e];
    if (a == b) continue;
    inc[static_cast<std::size_t>(a)].emplace_back(static_cast<int>(e), b);
    inc[static_cast<std::size_t>(b)].emplace_back(static_cast<int>(e), a);
  }
  return inc;
}

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace

std::vector<std::vector<int>> enumerate_spanning_trees(const TinyGraph& g, std::uint64_t max_assignments) {
  const int root = g.root >= 0 ? g.root : 0;
  const auto inc = incidence(g);
  std::vector<int> order;
  for (int v = 0; v < g.n; ++v)
    if (v != root) order.push_back(v);
  double product = 1;
  for (int v : order) product *= static_cast<double>(inc[static_cast<std::size_t>(v)].size());
  if (product > static_cast<double>(max_assignments))
    fail(ErrorKind::capacity_exceeded, "exhaustive tree enumeration exceeds its assignment cap");

  std::vector<std::vector<int>> trees;
  std::vector<int> choice(order.size(), 0);
  std::vector<int> target(static_cast<std::size_t>(g.n), -1);
  std::vector<int> mark(static_cast<std::size_t>(g.n), 0);
  int stamp = 0;
  while (true) {
    for (std::size_t i = 0; i < order.size(); ++i)
      target[static_cast<std::size_t>(order[i])] = inc[static_cast<std::size_t>(order[i])][static_cast<std::size_t>(choice[i])].second;
    bool ok = true;
    std::vector<char> good(static_cast<std::size_t>(g.n), 0);
    good[static_cast<std::size_t>(root)] = 1;
    for (int v : order) {
      ++stamp;
      int u = v;
      std::vector<int> chain;
      while (!good[static_cast<std::size_t>(u)]) {
        if (mark[static_cast<std::size_t>(u)] == stamp) {
          ok = false;
          break;
        }
        mark[static_cast<std::size_t>(u)] = stamp;
        chain.push_back(u);
        u = target[static_cast<std::size_t>(u)];
      }
      if (!ok) break;
      for (int c : chain) good[static_cast<std::size_t>(c)] = 1;
    }
    if (ok) {
      std::vector<int> t(order.size());
      for (std::size_t i = 0; i < order.size(); ++i)
        t[i] = inc[static_cast<std::size_t>(order[i])][static_cast<std::size_t>(choice[i])].first;
      trees.push_back(std::move(t));
    }
    std::size_t i = 0;
    for (; i < order.size(); ++i) {
      if (++choice[i] < static_cast<int>(inc[static_cast<std::size_t>(order[i])].size())) break;
      choice[i] = 0;
    }
    if (i == order.size()) break;
  }
  return trees;
}

BigInt count_spanning_trees(const TinyGraph& g, CountMethod method) {
  require(g.n >= 1, "graph needs a vertex");
  if (method == CountMethod::exhaustive) {
    if (g.n > 16) fail(ErrorKind::capacity_exceeded, "exhaustive counting limited to 16 vertices");
    return BigInt(enumerate_spanning_trees(g).size());
  }
  if (g.n > 200) fail(ErrorKind::capacity_exceeded, "determinant counting limited to 200 vertices");
  const int root = g.root >= 0 ? g.root : 0;
  std::vector<std::vector<BigInt>> lap(static_cast<std::size_t>(g.n), std::vector<BigInt>(static_cast<std::size_t>(g.n), 0));
  for (const auto& [a, b] : g.edges) {
    if (a == b) continue;
    lap[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] += 1;
    lap[static_cast<std::size_t>(b)][static_cast<std::size_t>(b)] += 1;
    lap[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] -= 1;
    lap[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] -= 1;
  }
  std::vector<std::vector<BigInt>> red;
  for (int i = 0; i < g.n; ++i) {
    if (i == root) continue;
    std::vector<BigInt> row;
    for (int j = 0; j < g.n; ++j)
      if (j != root) row.push_back(lap[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    red.push_back(std::move(row));
  }
  return bareiss_determinant(std::move(red));
}

std::vector<int> tree_signature(const WiredTiny& w, const SpanningForest& f) {
  std::vector<int> sig(w.keys.size());
  for (std::size_t i = 0; i < w.keys.size(); ++i) {
    auto it = f.parent_dir.find(w.keys[i]);
    if (it == f.parent_dir.end()) fail(ErrorKind::partial_forest, "forest lacks parent directions");
    sig[i] = w.edge_of[i][static_cast<std::size_t>(it->second)];
  }
  return sig;
}

// ---------------------------------------------------------------------------

LerwLaw::LerwLaw(const Domain& d) : d_(d), lat_(d.dim()) {
  require(d.finite(), "exact LERW law needs a finite domain");
  for (const auto& p : d.vertices()) keys_.push_back(lat_.pack(p));
  if (keys_.size() > 500) fail(ErrorKind::capacity_exceeded, "exact LERW law limited to 500 sites");
  std::sort(keys_.begin(), keys_.end());
  for (std::size_t i = 0; i < keys_.size(); ++i) index_.emplace(keys_[i], static_cast<int>(i));
}

double LerwLaw::green_diag(const std::vector<char>& removed, int v) const {
  std::string key(removed.begin(), removed.end());
  key.push_back(static_cast<char>(v & 0xff));
  key.push_back(static_cast<char>(v >> 8));
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  std::vector<int> live;
  std::vector<int> pos(keys_.size(), -1);
  for (std::size_t i = 0; i < keys_.size(); ++i)
    if (!removed[i]) {
      pos[i] = static_cast<int>(live.size());
      live.push_back(static_cast<int>(i));
    }
  const auto n = static_cast<Eigen::Index>(live.size());
  const double w = 1.0 / lat_.num_directions();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (int dir = 0; dir < lat_.num_directions(); ++dir) {
      const int j = index(lat_.step(keys_[static_cast<std::size_t>(live[static_cast<std::size_t>(a)])], dir));
      if (j >= 0 && pos[static_cast<std::size_t>(j)] >= 0) m(a, pos[static_cast<std::size_t>(j)]) -= w;
    }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(pos[static_cast<std::size_t>(v)]) = 1.0;
  const double g = m.llt().solve(e)(pos[static_cast<std::size_t>(v)]);
  memo_.emplace(std::move(key), g);
  return g;
}

bool LerwLaw::admissible(const Path& g) const {
  if (g.v.size() < 2 || g.dim != d_.dim()) return false;
  if (!g.is_nearest_neighbour() || !g.is_self_avoiding()) return false;
  for (std::size_t i = 0; i + 1 < g.v.size(); ++i)
    if (index(g.v[i]) < 0) return false;
  return index(g.v.back()) < 0;
}

double LerwLaw::probability(const Path& g) const {
  if (!admissible(g)) return 0.0;
  std::vector<char> removed(keys_.size(), 0);
  double p = 1.0;
  const double w = 1.0 / lat_.num_directions();
  for (std::size_t j = 0; j + 1 < g.v.size(); ++j) {
    const int v = index(g.v[j]);
    p *= w * green_diag(removed, v);
    removed[static_cast<std::size_t>(v)] = 1;
  }
  return p;
}

double LerwLaw::escape_plus(const Path& alpha) const {
  std::vector<char> removed(keys_.size(), 0);
  for (Key k : alpha.v) {
    const int i = index(k);
    if (i >= 0) removed[static_cast<std::size_t>(i)] = 1;
  }
  // u(y) = P^y(τ_D < T_α) on D minus α.
  std::vector<int> live, pos(keys_.size(), -1);
  for (std::size_t i = 0; i < keys_.size(); ++i)
    if (!removed[i]) {
      pos[i] = static_cast<int>(live.size());
      live.push_back(static_cast<int>(i));
    }
  const double w = 1.0 / lat_.num_directions();
  Eigen::VectorXd u;
  if (!live.empty()) {
    const auto n = static_cast<Eigen::Index>(live.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (int dir = 0; dir < lat_.num_directions(); ++dir) {
        const int j = index(lat_.step(keys_[static_cast<std::size_t>(live[static_cast<std::size_t>(a)])], dir));
        if (j < 0)
          b(a) += w;
        else if (pos[static_cast<std::size_t>(j)] >= 0)
          m(a, pos[static_cast<std::size_t>(j)]) -= w;
      }
    u = m.llt().solve(b);
  }
  double h = 0.0;
  for (int dir = 0; dir < lat_.num_directions(); ++dir) {
    const int j = index(lat_.step(alpha.back(), dir));
    if (j < 0)
      h += w;
    else if (pos[static_cast<std::size_t>(j)] >= 0)
      h += w * u(pos[static_cast<std::size_t>(j)]);
  }
  return h;
}

double LerwLaw::conditioned_probability(const Path& alpha, const Path& beta) const {
  require(!alpha.v.empty() && !beta.v.empty(), "empty path");
  if (beta.front() != alpha.back()) return 0.0;
  if (!admissible(beta)) return 0.0;
  std::vector<char> removed(keys_.size(), 0);
  for (Key k : alpha.v) {
    const int i = index(k);
    if (i >= 0) removed[static_cast<std::size_t>(i)] = 1;
  }
  for (std::size_t j = 1; j < beta.v.size(); ++j)
    for (Key k : alpha.v)
      if (k == beta.v[j]) return 0.0;
  const double w = 1.0 / lat_.num_directions();
  double p = w;  // the first step leaves α's endpoint
  for (std::size_t j = 1; j + 1 < beta.v.size(); ++j) {
    const int v = index(beta.v[j]);
    p *= w * green_diag(removed, v);
    removed[static_cast<std::size_t>(v)] = 1;
  }
  return p / escape_plus(alpha);
}

void LerwLaw::dfs(std::vector<Key>& path, std::vector<char>& removed, double prob, bool loops_here,
                  const std::function<void(const Path&, double)>& fn) const {
  const Key v = path.back();
  const int vi = index(v);
  const double w = 1.0 / lat_.num_directions();
  const double factor = loops_here ? w * green_diag(removed, vi) : w;
  removed[static_cast<std::size_t>(vi)] = 1;
  for (int dir = 0; dir < lat_.num_directions(); ++dir) {
    const Key nb = lat_.step(v, dir);
    const int ni = index(nb);
    if (ni >= 0 && removed[static_cast<std::size_t>(ni)]) continue;
    path.push_back(nb);
    if (ni < 0)
      fn(Path(d_.dim(), path), prob * factor);
    else
      dfs(path, removed, prob * factor, true, fn);
    path.pop_back();
  }
  removed[static_cast<std::size_t>(vi)] = 0;
}

void LerwLaw::for_each_path(const Point& start, const std::function<void(const Path&, double)>& fn) const {
  const Key s = lat_.pack(start);
  require(index(s) >= 0, "start outside domain");
  std::vector<Key> path{s};
  std::vector<char> removed(keys_.size(), 0);
  dfs(path, removed, 1.0, true, fn);
}

void LerwLaw::for_each_continuation(const Path& alpha, const std::function<void(const Path&, double)>& fn) const {
  require(index(alpha.back()) >= 0, "prefix already left the domain");
  std::vector<char> removed(keys_.size(), 0);
  for (Key k : alpha.v) removed[static_cast<std::size_t>(index(k))] = 1;
  const double h = escape_plus(alpha);
  std::vector<Key> path{alpha.back()};
  removed[static_cast<std::size_t>(index(alpha.back()))] = 0;  // dfs marks it itself
  dfs(path, removed, 1.0 / h, false, fn);
}

double lerw_exact_law(const Domain& d, const Path& g) { return LerwLaw(d).probability(g); }

double empirical_tv(const std::vector<std::pair<double, std::uint64_t>>& exact_and_counts, std::uint64_t total) {
  double diff = 0, mass = 0;
  for (const auto& [p, c] : exact_and_counts) {
    diff += std::abs(static_cast<double>(c) / static_cast<double>(total) - p);
    mass += p;
  }
  return 0.5 * (diff + std::max(0.0, 1.0 - mass));
}

DmpReport dmp_check(const Domain& d, int k, std::uint64_t samples, std::uint64_t seed, std::uint64_t min_samples,
                    const Eraser& eraser) {
  require(k >= 0, "prefix length must be non-negative");
  const LerwLaw law(d);
  const Point origin(d.dim());
  StopRule rule;
  rule.exit_domain = d;
  // prefix -> (continuation -> count)
  std::map<std::vector<Key>, std::map<std::vector<Key>, std::uint64_t>> tally;
  const auto ku = static_cast<std::size_t>(k);
  for (std::uint64_t i = 0; i < samples; ++i) {
    RngStream rng(seed, i);
    const Path l = eraser(run_walk(origin, rule, rng).path);
    if (l.v.size() <= ku + 1) continue;  // prefix would reach the boundary
    std::vector<Key> a(l.v.begin(), l.v.begin() + static_cast<std::ptrdiff_t>(ku) + 1);
    std::vector<Key> b(l.v.begin() + static_cast<std::ptrdiff_t>(ku), l.v.end());
    ++tally[a][b];
  }
  DmpReport rep;
  for (const auto& [a, conts] : tally) {
    DmpItem item;
    item.alpha = Path(d.dim(), a);
    for (const auto& [b, c] : conts) item.samples += c;
    if (item.samples >= min_samples) {
      std::vector<std::pair<double, std::uint64_t>> pc;
      bool impossible = false;
      for (const auto& [b, c] : conts) {
        pc.emplace_back(law.conditioned_probability(item.alpha, Path(d.dim(), b)), c);
        impossible |= pc.back().first == 0.0;
      }
      if (impossible) ++rep.zero_probability_prefixes;
      item.tv = empirical_tv(pc, item.samples);
      item.tested = true;
      rep.max_tv = std::max(rep.max_tv, item.tv);
      ++rep.tested;
    }
    rep.items.push_back(std::move(item));
  }
  return rep;
}

}  // namespace usf
