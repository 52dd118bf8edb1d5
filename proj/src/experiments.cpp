#include "usf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "usf/forest.hpp"
#include "usf/harmonic.hpp"
#include "usf/path.hpp"
#include "usf/walker.hpp"

namespace usf {

namespace {

enum Tag : std::uint64_t {
  kTagSeparation = 1,
  kTagLerwLength = 2,
  kTagTwoPoint = 16,   // + index of r
  kTagPairLength = 3,
  kTagBall = 64,       // + index of n
  kTagBoxVolume = 4,
  kTagShell = 5,
  kTagShellPilot = 6,
  kTagShellNested = 7,
};

Estimate scaled(Estimate e, double f) {
  e.value *= f;
  e.stderr_ *= f;
  e.ci_lo *= f;
  e.ci_hi *= f;
  if (e.ci_lo > e.ci_hi) std::swap(e.ci_lo, e.ci_hi);
  return e;
}

template <class Pred>
Estimate count_freq(const std::vector<std::uint64_t>& xs, Pred&& pred) {
  std::uint64_t k = 0;
  for (auto x : xs) k += pred(x) ? 1 : 0;
  return frequency_estimate(k, xs.size());
}

double min_dist2(const Point& p, const Path& g, std::size_t from) {
  const Lattice lat(p.dim());
  double best = 1e300;
  for (std::size_t i = from; i < g.v.size(); ++i) {
    const Point q = lat.unpack(g.v[i]);
    double s = 0;
    for (int a = 0; a < p.dim(); ++a) s += double(q[a] - p[a]) * double(q[a] - p[a]);
    best = std::min(best, s);
  }
  return best;
}

Row row(std::vector<std::pair<std::string, std::string>> params, std::string q, const Estimate& e) {
  return Row{std::move(params), std::move(q), e};
}

Estimate exact_value(double v, std::uint64_t n = 0) {
  Estimate e;
  e.value = v;
  e.ci_lo = v;
  e.ci_hi = v;
  e.n_samples = n;
  return e;
}

std::string str(long long v) { return std::to_string(v); }

void append_fit_rows(Record& rec, std::vector<std::pair<std::string, std::string>> params, const FitResult& f) {
  Estimate s;
  s.value = f.slope;
  s.stderr_ = f.slope_stderr;
  s.ci_lo = f.ci_lo;
  s.ci_hi = f.ci_hi;
  s.n_samples = f.used_x.size();
  rec.rows.push_back(row(params, "fit_" + model_name(f.model) + "_slope", s));
  rec.rows.push_back(row(params, "fit_" + model_name(f.model) + "_intercept", exact_value(f.intercept)));
  rec.rows.push_back(row(std::move(params), "fit_" + model_name(f.model) + "_residual", exact_value(f.residual)));
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_csv(std::ostream& os, const Record& r) {
  std::vector<std::string> names;
  if (!r.rows.empty())
    for (const auto& [k, v] : r.rows.front().params) names.push_back(k);
  for (const auto& n : names) os << n << ',';
  os << "quantity,estimate,stderr,ci_lo,ci_hi,n_samples,seed,code_version\n";
  for (const auto& row : r.rows) {
    for (const auto& n : names) {
      std::string v;
      for (const auto& [k, val] : row.params)
        if (k == n) v = val;
      os << v << ',';
    }
    os << row.quantity << ',' << format_real(row.est.value) << ',' << format_real(row.est.stderr_) << ','
       << format_real(row.est.ci_lo) << ',' << format_real(row.est.ci_hi) << ',' << row.est.n_samples << ','
       << r.seed << ',' << kCodeVersion << '\n';
  }
}

// ---------------------------------------------------------------------------

SeparationResult exp_separation(int dim, int n, std::uint64_t samples, const RunOpts& o, bool swap_roles) {
  require(dim >= 5, "separation experiment needs d >= 5");
  require(n >= 8, "separation experiment needs n >= 8");
  require(samples > 0, "need at least one sample");
  const Domain q = Domain::box(cube(dim, n), false);
  const Point origin(dim);
  struct Out {
    std::uint8_t disjoint = 0, separated = 0;
  };
  const auto outs = map_replicas(
      samples,
      [&](std::uint64_t i) {
        RngStream rng(o.seed, stream_id(kTagSeparation, i));
        StopRule rule;
        rule.exit_domain = q;
        Path s = run_walk(origin, rule, rng).path;
        Path t = run_walk(origin, rule, rng).path;
        if (swap_roles) std::swap(s, t);
        const VertexSet a(s.v.begin() + 1, s.v.end());
        Out out;
        for (std::size_t j = 1; j < t.v.size(); ++j)
          if (a.contains(t.v[j])) return out;
        out.disjoint = 1;
        const Lattice lat(dim);
        const double z2 = std::max(min_dist2(lat.unpack(s.back()), t, 1), min_dist2(lat.unpack(t.back()), s, 0));
        out.separated = 4 * z2 >= double(n) * n ? 1 : 0;
        return out;
      },
      o.exec);
  std::uint64_t acc = 0, sep = 0;
  for (const auto& x : outs) {
    acc += x.disjoint;
    sep += x.separated;
  }
  SeparationResult r;
  r.n = n;
  r.pairs = samples;
  r.acceptance = frequency_estimate(acc, samples);
  if (double(acc) < 1e-3 * double(samples))
    fail(ErrorKind::conditioning_failed, "non-intersection acceptance " + format_real(r.acceptance.value) +
                                             " below 1e-3; check the walk engine");
  r.conditional = frequency_estimate(sep, acc);
  return r;
}

Record to_record(const SeparationResult& r, int dim, std::uint64_t seed) {
  Record rec{"separation", seed, {}, {}};
  const std::vector<std::pair<std::string, std::string>> p{{"d", str(dim)}, {"n", str(r.n)}};
  rec.rows.push_back(row(p, "p_separated_given_disjoint", r.conditional));
  rec.rows.push_back(row(p, "p_disjoint", r.acceptance));
  rec.meta["acceptance_rate"] = r.acceptance.value;
  return rec;
}

// ---------------------------------------------------------------------------

LerwLengthResult exp_lerw_length(int dim, int N, const std::vector<double>& lower_grid,
                                 const std::vector<double>& upper_grid, std::uint64_t samples, const RunOpts& o) {
  require(dim >= 5, "length experiment needs d >= 5");
  require(N >= 1, "N must be positive");
  require(samples > 0, "need at least one sample");
  const Domain d = Domain::box(cube(dim, 4 * N));
  const Point origin(dim);
  LerwLengthResult r;
  r.N = N;
  r.lengths = map_replicas(
      samples,
      [&](std::uint64_t i) -> std::uint64_t {
        RngStream rng(o.seed, stream_id(kTagLerwLength, i));
        const Path l = sample_lerw(origin, d, rng);
        const Lattice lat(dim);
        for (std::size_t j = 0; j < l.v.size(); ++j)
          if (norms(lat.unpack(l.v[j])).linf == N) return j;
        fail(ErrorKind::internal, "loop-erased walk never reached the inner boundary");
      },
      o.exec);
  const double n2 = double(N) * N;
  Tally t1, t2;
  for (auto m : r.lengths) {
    t1.add(double(m) / n2);
    t2.add(double(m) * double(m) / (n2 * n2));
  }
  r.mean_scaled = t1.estimate();
  r.second_scaled = t2.estimate();
  for (double lam : lower_grid)
    r.lower.push_back({lam, count_freq(r.lengths, [&](std::uint64_t m) { return double(m) < lam * n2; })});
  for (double lam : upper_grid)
    r.upper.push_back({lam, count_freq(r.lengths, [&](std::uint64_t m) { return double(m) >= lam * n2; })});
  return r;
}

Record to_record(const LerwLengthResult& r, int dim, std::uint64_t seed) {
  Record rec{"lerw-length", seed, {}, {}};
  auto p = [&](const std::string& lam) {
    return std::vector<std::pair<std::string, std::string>>{{"d", str(dim)}, {"N", str(r.N)}, {"lambda", lam}};
  };
  rec.rows.push_back(row(p(""), "mean_M_over_N2", r.mean_scaled));
  rec.rows.push_back(row(p(""), "second_moment_M_over_N4", r.second_scaled));
  for (const auto& t : r.lower) rec.rows.push_back(row(p(format_real(t.lambda)), "p_M_lt_lambda_N2", t.p));
  for (const auto& t : r.upper) rec.rows.push_back(row(p(format_real(t.lambda)), "p_M_ge_lambda_N2", t.p));
  rec.meta["domain_radius"] = 4 * r.N;
  return rec;
}

// ---------------------------------------------------------------------------

TwoPointResult exp_two_point(int dim, int N, const std::vector<int>& r_grid, std::uint64_t samples, const RunOpts& o) {
  require(dim >= 3, "two-point experiment needs a transient lattice");
  require(samples > 0, "need at least one sample");
  for (int r : r_grid) require(r >= 0 && 2 * r <= N, "r must lie in [0, N/2]");
  const Domain d = Domain::box(cube(dim, 4 * N));
  const WiredGraph g(d);
  const Lattice lat(dim);
  TwoPointResult res;
  res.N = N;
  res.r = r_grid;
  for (std::size_t j = 0; j < r_grid.size(); ++j) {
    const int r = r_grid[j];
    const Key y = lat.pack(Point::unit(dim, 0) * r);
    const Key o0 = lat.pack(Point(dim));
    const auto hits = map_replicas(
        samples,
        [&](std::uint64_t i) -> std::uint8_t {
          RngStream rng(o.seed, stream_id(kTagTwoPoint + j, i));
          StreamDirections src(rng);
          WilsonBuilder w(g, src);
          w.add_branch(o0);
          if (r == 0) return 1;
          return w.add_branch(y) != kRootKey ? 1 : 0;
        },
        o.exec);
    std::uint64_t k = 0;
    for (auto h : hits) k += h;
    res.p.push_back(frequency_estimate(k, samples));
  }
  std::vector<FitPoint> pts;
  for (std::size_t j = 0; j < r_grid.size(); ++j)
    if (r_grid[j] > 0) pts.push_back({double(r_grid[j]), res.p[j]});
  try {
    res.fit = fit_tail(pts, TailModel::power);
    res.fitted = true;
  } catch (const Error&) {
    res.fitted = false;
  }
  return res;
}

Record to_record(const TwoPointResult& r, int dim, std::uint64_t seed) {
  Record rec{"two-point", seed, {}, {}};
  for (std::size_t j = 0; j < r.r.size(); ++j)
    rec.rows.push_back(row({{"d", str(dim)}, {"N", str(r.N)}, {"r", str(r.r[j])}}, "p_connected", r.p[j]));
  if (r.fitted) append_fit_rows(rec, {{"d", str(dim)}, {"N", str(r.N)}, {"r", "fit"}}, r.fit);
  rec.meta["domain_radius"] = 4 * r.N;
  return rec;
}

// ---------------------------------------------------------------------------

PairLengthResult exp_path_length_pair(const Point& x, const std::vector<std::int64_t>& n_grid, std::uint64_t samples,
                                      const RunOpts& o, int escape_factor) {
  const int dim = x.dim();
  require(dim >= 5, "pair-length experiment needs d >= 5");
  require(!(x == Point(dim)), "x must differ from the origin");
  require(samples > 0, "need at least one sample");
  require(escape_factor >= 2, "escape factor must be at least 2");
  PairLengthResult r;
  r.x = x;
  r.n = n_grid;
  r.escape_radius = escape_factor * norms(x).linf;
  const Point origin(dim);
  const auto lens = map_replicas(
      samples,
      [&](std::uint64_t i) -> std::int64_t {
        RngStream rng(o.seed, stream_id(kTagPairLength, i));
        const EscapeOutcome e = hits_point_before_escape(origin, x, r.escape_radius, rng, true);
        if (!e.hit) return -1;
        return static_cast<std::int64_t>(loop_erase(e.path).length());
      },
      o.exec);
  std::uint64_t hit = 0;
  for (auto l : lens) {
    if (l >= 0) ++hit;
    r.max_length = std::max(r.max_length, l);
  }
  for (auto n : n_grid) {
    std::uint64_t k = 0;
    for (auto l : lens) k += (l >= 0 && l <= n) ? 1 : 0;
    r.p.push_back(frequency_estimate(k, samples));
  }
  r.plateau = frequency_estimate(hit, samples);
  const double g0 = green_free(origin), gx = green_free(x);
  r.green_ratio = gx / g0;
  r.green_ratio_err = r.green_ratio * (green_free_error(x) / gx + green_free_error(origin) / g0);
  r.escape_bias = green_free_asymptotic(Point::unit(dim, 0) * (r.escape_radius + 1)) / gx;
  return r;
}

Record to_record(const PairLengthResult& r, std::uint64_t seed) {
  Record rec{"pair-length", seed, {}, {}};
  const std::string xs = "\"" + r.x.to_string() + "\"";
  for (std::size_t j = 0; j < r.n.size(); ++j)
    rec.rows.push_back(row({{"d", str(r.x.dim())}, {"x", xs}, {"n", str(r.n[j])}}, "p_F", r.p[j]));
  rec.rows.push_back(row({{"d", str(r.x.dim())}, {"x", xs}, {"n", "inf"}}, "p_hit", r.plateau));
  Estimate g = exact_value(r.green_ratio);
  g.stderr_ = r.green_ratio_err;
  g.ci_lo = r.green_ratio - 2 * r.green_ratio_err;
  g.ci_hi = r.green_ratio + 2 * r.green_ratio_err;
  rec.rows.push_back(row({{"d", str(r.x.dim())}, {"x", xs}, {"n", "inf"}}, "green_ratio", g));
  rec.meta["escape_radius"] = r.escape_radius;
  rec.meta["escape_relative_bias_bound"] = r.escape_bias;
  rec.meta["max_observed_length"] = r.max_length;
  return rec;
}

// ---------------------------------------------------------------------------

std::vector<BallStats> exp_ball(int dim, const std::vector<int>& n_grid, const std::vector<double>& upper_grid,
                                const std::vector<double>& lower_grid, std::uint64_t samples, const RunOpts& o,
                                const BallOpts& b) {
  require(dim >= 3, "ball experiment needs a transient lattice");
  require(samples > 0, "need at least one sample");
  std::vector<BallStats> out;
  for (std::size_t j = 0; j < n_grid.size(); ++j) {
    const int n = n_grid[j];
    require(n >= 0, "ball radius must be non-negative");
    const Domain d = Domain::box(cube(dim, std::max(1, b.box_factor * n)));
    struct One {
      std::uint64_t size = 0, violations = 0, revealed = 0, steps = 0;
    };
    const auto ones = map_replicas(
        samples,
        [&](std::uint64_t i) {
          RngStream rng(o.seed, stream_id(kTagBall + j, i));
          BallOptions bo;
          bo.full_starts = b.full_starts;
          const BallResult br = intrinsic_ball(d, n, rng, bo);
          const Lattice lat(dim);
          One x;
          x.size = br.members.size();
          for (const auto& [k, dist] : br.members)
            if (norms(lat.unpack(k)).linf > n || dist > n) ++x.violations;
          x.revealed = br.revealed;
          x.steps = br.walk_steps;
          return x;
        },
        o.exec);
    BallStats s;
    s.n = n;
    const double n2 = n > 0 ? double(n) * n : 1.0;
    Tally t1, t2;
    double rev = 0, steps = 0;
    for (const auto& x : ones) {
      s.volumes.push_back(x.size);
      s.containment_violations += x.violations;
      t1.add(double(x.size) / n2);
      t2.add(double(x.size) * double(x.size) / (n2 * n2));
      rev += double(x.revealed);
      steps += double(x.steps);
    }
    s.mean_scaled = t1.estimate();
    s.second_scaled = t2.estimate();
    s.moment_ratio = s.second_scaled.value / (2 * s.mean_scaled.value * s.mean_scaled.value);
    s.mean_revealed = rev / double(samples);
    s.mean_walk_steps = steps / double(samples);
    for (double lam : upper_grid)
      s.upper.push_back({lam, count_freq(s.volumes, [&](std::uint64_t v) { return double(v) >= lam * n2; })});
    for (double lam : lower_grid)
      s.lower.push_back({lam, count_freq(s.volumes, [&](std::uint64_t v) { return double(v) <= lam * n2; })});
    out.push_back(std::move(s));
  }
  return out;
}

Record to_record(const std::vector<BallStats>& r, int dim, std::uint64_t seed) {
  Record rec{"ball", seed, {}, {}};
  for (const auto& s : r) {
    auto p = [&](const std::string& lam) {
      return std::vector<std::pair<std::string, std::string>>{{"d", str(dim)}, {"n", str(s.n)}, {"lambda", lam}};
    };
    rec.rows.push_back(row(p(""), "mean_B_over_n2", s.mean_scaled));
    rec.rows.push_back(row(p(""), "second_moment_B_over_n4", s.second_scaled));
    rec.rows.push_back(row(p(""), "moment_ratio_k2", exact_value(s.moment_ratio, s.volumes.size())));
    rec.rows.push_back(row(p(""), "containment_violations", exact_value(double(s.containment_violations))));
    for (const auto& t : s.upper) rec.rows.push_back(row(p(format_real(t.lambda)), "p_B_ge_lambda_n2", t.p));
    for (const auto& t : s.lower) rec.rows.push_back(row(p(format_real(t.lambda)), "p_B_le_lambda_n2", t.p));
    rec.meta["mean_revealed"][std::to_string(s.n)] = s.mean_revealed;
    rec.meta["mean_walk_steps"][std::to_string(s.n)] = s.mean_walk_steps;
  }
  return rec;
}

// ---------------------------------------------------------------------------

std::uint64_t box_volume_sample(int dim, int N, int box_factor, std::uint64_t seed, std::uint64_t stream) {
  const Domain d = Domain::box(cube(dim, box_factor * N));
  const WiredGraph g(d);
  const Lattice lat(dim);
  RngStream rng(seed, stream);
  StreamDirections src(rng);
  WilsonBuilder w(g, src);
  w.add_branch(lat.pack(Point(dim)));
  std::vector<Key> within;
  for (const auto& p : cube(dim, N).vertices()) {
    const Key k = lat.pack(p);
    w.add_branch(k);
    within.push_back(k);
  }
  return component(w.forest(), Point(dim), within).size();
}

BoxVolumeResult exp_box_volume(int dim, int N, const std::vector<double>& lambda_grid, std::uint64_t samples,
                               const RunOpts& o, int box_factor) {
  require(dim >= 3, "box-volume experiment needs a transient lattice");
  require(N >= 1 && box_factor >= 1, "N and box factor must be positive");
  require(samples > 0, "need at least one sample");
  BoxVolumeResult r;
  r.N = N;
  r.volumes = map_replicas(
      samples,
      [&](std::uint64_t i) {
        RngStream rng(o.seed, stream_id(kTagBoxVolume, i));
        return box_component_dense(dim, N, box_factor, rng);
      },
      o.exec);
  const double n4 = std::pow(double(N), 4);
  std::vector<double> v;
  for (auto x : r.volumes) v.push_back(double(x) / n4);
  r.median_scaled = quantile(v, 0.5);
  r.q10_scaled = quantile(v, 0.1);
  r.q90_scaled = quantile(v, 0.9);
  r.mean_scaled = mean_estimate(v);
  for (double lam : lambda_grid)
    r.lower.push_back({lam, count_freq(r.volumes, [&](std::uint64_t x) { return double(x) <= lam * n4; })});
  return r;
}

Record to_record(const BoxVolumeResult& r, int dim, std::uint64_t seed) {
  Record rec{"box-volume", seed, {}, {}};
  auto p = [&](const std::string& lam) {
    return std::vector<std::pair<std::string, std::string>>{{"d", str(dim)}, {"N", str(r.N)}, {"lambda", lam}};
  };
  rec.rows.push_back(row(p(""), "median_vol_over_N4", exact_value(r.median_scaled, r.volumes.size())));
  rec.rows.push_back(row(p(""), "q10_vol_over_N4", exact_value(r.q10_scaled, r.volumes.size())));
  rec.rows.push_back(row(p(""), "q90_vol_over_N4", exact_value(r.q90_scaled, r.volumes.size())));
  rec.rows.push_back(row(p(""), "mean_vol_over_N4", r.mean_scaled));
  for (const auto& t : r.lower) rec.rows.push_back(row(p(format_real(t.lambda)), "p_vol_le_lambda_N4", t.p));
  return rec;
}

// ---------------------------------------------------------------------------

void ShellGeometry::validate() const {
  require(dim >= 3, "shell experiment needs a transient lattice");
  if (!(m >= 4 && n >= 1 && n + m <= N && 2 * m <= N))
    fail(ErrorKind::geometry, "shell geometry needs m >= 4, n + m <= N and 2m <= N");
  if (!in_regime() && !override_regime)
    fail(ErrorKind::geometry, "shell geometry outside 16 <= n < n+m <= N, m <= n/8; pass the regime override to run it");
}

int ShellGeometry::k_shells() const {
  const int k = (N + 2 * m - 1) / (2 * m);
  return (k + 1) * m < N ? k : std::max(1, (N - m - 1) / m);
}

namespace {

struct ShellPiece {
  Point x0, x1, x2;
  std::vector<Key> beta;
};

// Piece of l between its first hit of ∂_i Q_radius and the next hit of ∂_i Q(x0, m).
ShellPiece shell_piece(const Path& l, int radius, int m) {
  const int dim = l.dim;
  const Lattice lat(dim);
  std::size_t i0 = 0;
  while (i0 < l.v.size() && norms(lat.unpack(l.v[i0])).linf != radius) ++i0;
  if (i0 == l.v.size()) fail(ErrorKind::internal, "walk never reached the shell");
  ShellPiece s;
  s.x0 = lat.unpack(l.v[i0]);
  std::size_t i1 = i0;
  while (i1 < l.v.size() && linf_distance(lat.unpack(l.v[i1]), s.x0) != m) ++i1;
  if (i1 == l.v.size()) fail(ErrorKind::internal, "walk ended inside Q(x0, m)");
  s.beta.assign(l.v.begin() + static_cast<std::ptrdiff_t>(i0), l.v.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
  int axis = 0;
  while (std::abs(s.x0[axis]) != radius) ++axis;
  const int sign = s.x0[axis] > 0 ? 1 : -1;
  s.x1 = s.x0 + Point::unit(dim, axis, sign) * (m / 2);
  const int side = (axis + 1) % dim;
  s.x2 = s.x1 + Point::unit(dim, side, s.x0[side] <= 0 ? 1 : -1) * m;
  return s;
}

VertexSet a_cap_beta(const ShellPiece& s, int m) {
  const Box a{s.x1, m / 4};
  const Lattice lat(s.x0.dim());
  VertexSet out;
  for (Key k : s.beta)
    if (a.contains(lat.unpack(k))) out.insert(k);
  return out;
}

double hit_from(const Point& z, const VertexSet& k) {
  if (k.empty()) return 0.0;
  return hit_probability(z, equilibrium_measure(z.dim(), k));
}

double theta_of(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  double best = 0;
  for (std::size_t k = 0; k < v.size(); ++k) best = std::max(best, std::min(v[k], double(k + 1) / double(v.size())));
  return best;
}

}  // namespace

ShellSample shell_sample(const ShellGeometry& g, std::uint64_t seed, std::uint64_t stream, std::uint32_t nested,
                         int nested_escape_factor) {
  const int dim = g.dim;
  const Domain d = Domain::box(cube(dim, 4 * g.N));
  RngStream rng(seed, stream);
  const Path l = sample_lerw(Point(dim), d, rng);
  const Lattice lat(dim);
  ShellSample out;
  const ShellPiece s = shell_piece(l, g.n, g.m);
  const Box a{s.x1, g.m / 4};
  for (Key k : s.beta) out.hits += a.contains(lat.unpack(k)) ? 1 : 0;
  const VertexSet ab = a_cap_beta(s, g.m);
  out.capacity = ab.empty() ? 0.0 : capacity_exact(dim, ab);
  out.center_hit = std::find(s.beta.begin(), s.beta.end(), lat.pack(s.x1)) != s.beta.end();
  out.x2_hit = hit_from(s.x2, ab);
  if (nested > 0) {
    RngStream inner(seed, stream_id(kTagShellNested, stream & ((1ull << 40) - 1)));
    std::uint32_t hits = 0;
    if (!ab.empty())
      for (std::uint32_t t = 0; t < nested; ++t)
        hits += hits_before_escape(s.x2, ab, nested_escape_factor * g.m, inner, false).hit ? 1 : 0;
    out.x2_hit_nested = double(hits) / nested;
  }
  for (int j = 1; j <= g.k_shells(); ++j) {
    const ShellPiece sj = shell_piece(l, j * g.m, g.m);
    out.shell_hit.push_back(hit_from(sj.x2, a_cap_beta(sj, g.m)));
    out.shell_size.push_back(sj.beta.size());
  }
  return out;
}

ShellResult exp_shell(const ShellGeometry& g, std::uint64_t samples, const RunOpts& o, const ShellOpts& so) {
  g.validate();
  require(samples > 0 && so.pilot > 0, "need samples and pilot samples");
  const double m = g.m, m2 = m * m, md4 = std::pow(m, g.dim - 4), md2 = std::pow(m, g.dim - 2);
  const auto pilot = map_replicas(
      so.pilot, [&](std::uint64_t i) { return shell_sample(g, o.seed, stream_id(kTagShellPilot, i)); }, o.exec);
  std::vector<double> ph, phit, psize;
  for (const auto& s : pilot) {
    ph.push_back(double(s.hits) / m2);
    for (double h : s.shell_hit) phit.push_back(h * md4);
    for (auto z : s.shell_size) psize.push_back(double(z) / m2);
  }
  ShellResult r;
  r.geom = g;
  r.samples = samples;
  r.theta = theta_of(ph);
  r.c1 = quantile(phit, 0.2);
  r.C2 = quantile(psize, 0.8);

  r.per_sample = map_replicas(
      samples,
      [&](std::uint64_t i) {
        return shell_sample(g, o.seed, stream_id(kTagShell, i), so.nested, so.nested_escape_factor);
      },
      o.exec);
  Tally h1, h2, x2, good;
  std::uint64_t above = 0, zero = 0, center = 0, gev = 0;
  std::vector<double> caps;
  const int k = g.k_shells();
  Tally nest_within, nest_diff;
  for (const auto& s : r.per_sample) {
    h1.add(double(s.hits) / m2);
    h2.add(double(s.hits) * double(s.hits) / (m2 * m2));
    above += double(s.hits) >= r.theta * m2 ? 1 : 0;
    zero += s.capacity == 0.0 ? 1 : 0;
    center += s.center_hit ? 1 : 0;
    caps.push_back(s.capacity / m2);
    x2.add(s.x2_hit * md4);
    int ng = 0;
    for (int j = 0; j < k; ++j)
      ng += (s.shell_hit[static_cast<std::size_t>(j)] * md4 >= r.c1 &&
             double(s.shell_size[static_cast<std::size_t>(j)]) <= r.C2 * m2)
                ? 1
                : 0;
    good.add(double(ng) / k);
    gev += 2 * ng >= k ? 1 : 0;
    if (s.x2_hit_nested >= 0) {
      nest_within.add(s.x2_hit_nested * (1 - s.x2_hit_nested) / so.nested);
      nest_diff.add(s.x2_hit_nested - s.x2_hit);
    }
  }
  r.hits_scaled = h1.estimate();
  r.hits_sq_scaled = h2.estimate();
  r.above_theta = frequency_estimate(above, samples);
  r.cap_median_scaled = quantile(caps, 0.5);
  r.cap_zero = frequency_estimate(zero, samples);
  r.center_hit = frequency_estimate(center, samples);
  r.center_hit_scaled = scaled(r.center_hit, md2);
  r.x2_hit_scaled = x2.estimate();
  r.good_fraction = good.estimate();
  r.g_event = frequency_estimate(gev, samples);
  if (nest_within.n > 0) {
    r.nested_variance_within = nest_within.sum / double(nest_within.n);
    r.nested_variance_between = x2.estimate().stderr_ * x2.estimate().stderr_ * double(samples) / (md4 * md4);
  }
  return r;
}

Record to_record(const ShellResult& r, std::uint64_t seed) {
  Record rec{"shell", seed, {}, {}};
  const auto& g = r.geom;
  const std::vector<std::pair<std::string, std::string>> p{
      {"d", str(g.dim)}, {"n", str(g.n)}, {"m", str(g.m)}, {"N", str(g.N)}, {"in_regime", g.in_regime() ? "1" : "0"}};
  rec.rows.push_back(row(p, "mean_H_over_m2", r.hits_scaled));
  rec.rows.push_back(row(p, "mean_H2_over_m4", r.hits_sq_scaled));
  rec.rows.push_back(row(p, "theta_pilot", exact_value(r.theta)));
  rec.rows.push_back(row(p, "p_H_ge_theta_m2", r.above_theta));
  rec.rows.push_back(row(p, "median_cap_over_m2", exact_value(r.cap_median_scaled, r.samples)));
  rec.rows.push_back(row(p, "p_A_beta_empty", r.cap_zero));
  rec.rows.push_back(row(p, "p_center_in_beta", r.center_hit));
  rec.rows.push_back(row(p, "p_center_in_beta_times_m_d_minus_2", r.center_hit_scaled));
  rec.rows.push_back(row(p, "mean_x2_hit_times_m_d_minus_4", r.x2_hit_scaled));
  rec.rows.push_back(row(p, "c1_pilot", exact_value(r.c1)));
  rec.rows.push_back(row(p, "C2_pilot", exact_value(r.C2)));
  rec.rows.push_back(row(p, "good_shell_fraction", r.good_fraction));
  rec.rows.push_back(row(p, "p_G_event_half", r.g_event));
  rec.meta["k_shells"] = g.k_shells();
  rec.meta["domain_radius"] = 4 * g.N;
  rec.meta["out_of_regime"] = !g.in_regime();
  if (r.nested_variance_within > 0) {
    rec.meta["nested_variance_within"] = r.nested_variance_within;
    rec.meta["nested_variance_between"] = r.nested_variance_between;
  }
  return rec;
}

// ---------------------------------------------------------------------------

bool TopologyTree::valid() const {
  const int nv = 2 * k + 2;
  if (static_cast<int>(edges.size()) != nv - 1) return false;
  std::vector<int> deg(static_cast<std::size_t>(nv), 0), root(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) root[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (root[static_cast<std::size_t>(x)] != x) x = root[static_cast<std::size_t>(x)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
    return x;
  };
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= nv || b >= nv) return false;
    ++deg[static_cast<std::size_t>(a)];
    ++deg[static_cast<std::size_t>(b)];
    const int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    root[static_cast<std::size_t>(ra)] = rb;
  }
  if (deg[1] != 1) return false;
  for (int i = 1; i <= k; ++i)
    if (deg[static_cast<std::size_t>(2 * i)] != 1 || deg[static_cast<std::size_t>(2 * i + 1)] != 3) return false;
  return true;
}

std::string TopologyTree::to_string() const {
  auto name = [](int v) {
    if (v == 0) return std::string("0");
    if (v == 1) return std::string("inf");
    return (v % 2 ? "b" : "") + std::to_string(v / 2);
  };
  std::string s;
  for (const auto& [a, b] : edges) s += (s.empty() ? "" : " ") + name(a) + "-" + name(b);
  return s;
}

std::vector<TopologyTree> enumerate_topologies(int k) {
  require(k >= 1, "k must be at least 1");
  if (k > 8) fail(ErrorKind::capacity_exceeded, "topology enumeration limited to k <= 8");
  std::vector<TopologyTree> cur{TopologyTree{0, {{0, 1}}}};
  for (int i = 1; i <= k; ++i) {
    std::vector<TopologyTree> next;
    for (const auto& t : cur)
      for (std::size_t e = 0; e < t.edges.size(); ++e) {
        TopologyTree u{i, {}};
        for (std::size_t f = 0; f < t.edges.size(); ++f)
          if (f != e) u.edges.push_back(t.edges[f]);
        const auto [a, b] = t.edges[e];
        u.edges.emplace_back(a, 2 * i + 1);
        u.edges.emplace_back(2 * i + 1, b);
        u.edges.emplace_back(2 * i + 1, 2 * i);
        next.push_back(std::move(u));
      }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace usf
