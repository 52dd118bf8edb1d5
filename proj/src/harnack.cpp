#include <cmath>

#include "usf/harmonic.hpp"

namespace usf {

namespace {

// Solution on the solver's domain of (I - P)u = 0 with u = bnd outside it.
template <class F>
Eigen::VectorXd extend(const LaplacianSolver& s, F&& bnd) {
  const Lattice lat(s.dim());
  const double w = 1.0 / lat.num_directions();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.keys().size(); ++i)
    for (int dir = 0; dir < lat.num_directions(); ++dir) {
      const Key nb = lat.step(s.keys()[i], dir);
      if (s.index(nb) < 0) b(static_cast<Eigen::Index>(i)) += w * bnd(nb);
    }
  return s.solve(b);
}

VertexSet minus(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  for (Key k : a)
    if (!b.contains(k)) out.insert(k);
  return out;
}

double value_at(const LaplacianSolver& s, const Eigen::VectorXd& u, Key k) {
  const int i = s.index(k);
  return i < 0 ? 0.0 : u(i);
}

}  // namespace

double harnack_exit_ratio(int dim, int m, const VertexSet& k, const SolverLimits& lim) {
  require(m >= 2, "harnack ratio needs m >= 2");
  if (k.empty()) fail(ErrorKind::empty_set, "empty set");
  const Lattice lat(dim);
  for (Key x : k) {
    const Point p = lat.unpack(x);
    require(p[0] <= 0 && p[0] >= -m + 1 && norms(p).linf <= m - 1, "obstacle outside the left half box");
  }
  const VertexSet u = minus(cube(dim, m - 1).vertex_set(), k);
  const LaplacianSolver s(dim, u, lim);
  const auto face = extend(s, [&](Key nb) { return !k.contains(nb) && lat.unpack(nb)[0] == m ? 1.0 : 0.0; });
  const auto esc = extend(s, [&](Key nb) { return k.contains(nb) ? 0.0 : 1.0; });
  const Key o = lat.pack(Point(dim));
  double num = 0, den = 0;
  for (int dir = 0; dir < lat.num_directions(); ++dir) {
    const Key y = lat.step(o, dir);
    num += value_at(s, face, y);
    den += value_at(s, esc, y);
  }
  if (!(den > 0)) fail(ErrorKind::conditioning_failed, "conditioning event has probability 0");
  return num / den;
}

double avoid_box_ratio(const Box& d, const VertexSet& k, const Point& x0, int m, const SolverLimits& lim) {
  const int dim = x0.dim();
  const Lattice lat(dim);
  require(m >= 2, "m must be at least 2");
  require(k.contains(lat.pack(x0)), "x0 must lie in K");
  const Point z0 = x0 + Point::unit(dim, 0) * m;
  require(d.contains(z0) && !k.contains(lat.pack(z0)), "z0 must lie in D outside K");
  const Box near{x0, m / 2};
  const VertexSet dom = d.vertex_set();
  const VertexSet free_k = minus(dom, k);
  VertexSet free_kb;
  for (Key x : free_k)
    if (!near.contains(lat.unpack(x))) free_kb.insert(x);
  const LaplacianSolver s1(dim, free_kb, lim);
  const auto u = extend(s1, [&](Key nb) { return dom.contains(nb) ? 0.0 : 1.0; });
  const LaplacianSolver s2(dim, free_k, lim);
  const auto v = extend(s2, [&](Key nb) { return dom.contains(nb) ? 0.0 : 1.0; });
  const Key kz = lat.pack(z0);
  const double den = value_at(s2, v, kz);
  if (!(den > 0)) fail(ErrorKind::conditioning_failed, "conditioning event has probability 0");
  return value_at(s1, u, kz) / den;
}

double exit_face_ratio(const Box& d, const VertexSet& k, const Point& x0, int m, const SolverLimits& lim) {
  const int dim = x0.dim();
  const Lattice lat(dim);
  require(m >= 2, "m must be at least 2");
  const Box inner{x0, m - 1};
  for (const auto& p : boundary(inner, BoundaryKind::outer)) require(d.contains(lat.unpack(p)), "Q(x0, m) must lie in D");
  const VertexSet dom = d.vertex_set();
  const LaplacianSolver sg(dim, minus(dom, k), lim);
  const auto g = extend(sg, [&](Key nb) { return dom.contains(nb) ? 0.0 : 1.0; });
  auto gval = [&](Key x) {
    if (k.contains(x)) return 0.0;
    if (!dom.contains(x)) return 1.0;
    return value_at(sg, g, x);
  };
  const LaplacianSolver sf(dim, minus(inner.vertex_set(), k), lim);
  const int right = x0[0] + m;
  const auto f = extend(sf, [&](Key nb) { return !k.contains(nb) && lat.unpack(nb)[0] == right ? gval(nb) : 0.0; });
  const Key kx = lat.pack(x0);
  double num = 0, den = 0;
  for (int dir = 0; dir < lat.num_directions(); ++dir) {
    const Key y = lat.step(kx, dir);
    num += value_at(sf, f, y);
    den += gval(y);
  }
  if (!(den > 0)) fail(ErrorKind::conditioning_failed, "conditioning event has probability 0");
  return num / den;
}

Field escape_avoiding(const Box& d, const VertexSet& alpha, const SolverLimits& lim) {
  const int dim = d.center.dim();
  const VertexSet dom = d.vertex_set();
  const LaplacianSolver s(dim, minus(dom, alpha), lim);
  const auto h = extend(s, [&](Key nb) { return dom.contains(nb) ? 0.0 : 1.0; });
  Field out;
  for (std::size_t i = 0; i < s.keys().size(); ++i) out[s.keys()[i]] = h(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<double> gtilde(const Box& d, const Path& alpha, const std::vector<Point>& targets,
                           const SolverLimits& lim) {
  require(!alpha.v.empty(), "empty prefix");
  const int dim = alpha.dim;
  const Lattice lat(dim);
  const VertexSet dom = d.vertex_set();
  const VertexSet a(alpha.v.begin(), alpha.v.end());
  for (Key x : a) require(dom.contains(x), "prefix must lie in D");
  const LaplacianSolver s(dim, minus(dom, a), lim);
  const auto h = extend(s, [&](Key nb) { return dom.contains(nb) ? 0.0 : 1.0; });
  const Key x0 = alpha.back();
  const double w = 1.0 / lat.num_directions();
  Eigen::VectorXd ind = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size()));
  double hplus = 0;
  for (int dir = 0; dir < lat.num_directions(); ++dir) {
    const Key y = lat.step(x0, dir);
    if (!dom.contains(y)) {
      hplus += w;
    } else if (const int i = s.index(y); i >= 0) {
      hplus += w * h(i);
      ind(i) += 1.0;
    }
  }
  if (!(hplus > 0)) fail(ErrorKind::conditioning_failed, "conditioning event has probability 0");
  const Eigen::VectorXd gsum = s.solve(ind);
  std::vector<double> out;
  for (const auto& z : targets) {
    const int i = s.index(lat.pack(z));
    require(i >= 0, "target must lie in D outside the prefix");
    out.push_back(h(i) * w * gsum(i) / hplus);
  }
  return out;
}

}  // namespace usf
