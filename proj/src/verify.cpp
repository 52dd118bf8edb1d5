#include "usf/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>

#include "usf/experiments.hpp"
#include "usf/forest.hpp"
#include "usf/harmonic.hpp"
#include "usf/walker.hpp"

namespace usf {

namespace {

enum VTag : std::uint64_t {
  kVWilson = 200,
  kVLerw = 201,
  kVPopOrder = 202,
  kVStacks = 203,
  kVHarnack = 204,
  kVErasure = 205,
  kVCapSets = 206,
  kVCapMc = 207,
};

// Derived seeds keep the criteria statistically independent of each other.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t salt) { return splitmix64(seed ^ (salt * 0x9e3779b97f4a7c15ull)); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string g6(double x) { return fmt("%.6g", x); }

template <class F>
Check timed(std::string id, std::string name, F&& body) {
  Check c;
  c.id = std::move(id);
  c.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.statistic += std::string(c.statistic.empty() ? "" : "; ") + "error: " + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

void note(Check& c, const std::string& s) { c.statistic += (c.statistic.empty() ? "" : "; ") + s; }

// Counts of nested events ordered so that each should be rarer than the last.
// Strict decrease is required wherever the previous count is at least min_count.
bool strictly_thinning(const std::vector<std::uint64_t>& counts, std::uint64_t min_count = 5) {
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i - 1] >= min_count && counts[i] >= counts[i - 1]) return false;
  return true;
}

std::uint64_t count_of(const Estimate& e) { return static_cast<std::uint64_t>(std::llround(e.value * double(e.n_samples))); }

std::string counts_str(const std::vector<std::uint64_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

double band(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

std::vector<Key> naive_erase(const std::vector<Key>& w) {
  std::vector<Key> out;
  for (Key x : w) {
    auto it = std::find(out.begin(), out.end(), x);
    if (it != out.end())
      out.erase(it + 1, out.end());
    else
      out.push_back(x);
  }
  return out;
}

Domain q2_plane() { return Domain::box(cube(2, 2)); }

}  // namespace

double null_expected_tv(const std::vector<double>& p, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  double total = 0;
  for (double q : p) {
    if (q <= 0) continue;
    const double mu = nn * q;
    if (mu > 200) {
      total += std::sqrt(2 * q * (1 - q) / (M_PI * nn));
      continue;
    }
    const boost::math::binomial_distribution<double> b(nn, std::min(q, 1.0));
    const auto hi = static_cast<std::uint64_t>(mu + 12 * std::sqrt(mu) + 40);
    double mad = 0;
    for (std::uint64_t k = 0; k <= std::min(hi, n); ++k) mad += boost::math::pdf(b, double(k)) * std::abs(double(k) - mu);
    total += mad / nn;
  }
  return 0.5 * total;
}

// ---------------------------------------------------------------------------

Check check_wilson_uniform(const VerifyOpts& o, std::uint64_t samples) {
  return timed("A1", criterion_name("A1"), [&](Check& c) {
    const Domain d = Domain::box(cube(2, 1));
    const WiredTiny w = wired_tiny_graph(d);
    const auto trees = enumerate_spanning_trees(w.g);
    const BigInt det = count_spanning_trees(w.g, CountMethod::determinant);
    std::map<std::vector<int>, int> idx;
    for (std::size_t i = 0; i < trees.size(); ++i) idx.emplace(trees[i], static_cast<int>(i));
    const WiredGraph g(d);
    const auto starts = d.vertices();
    const std::uint64_t seed = sub_seed(o.seed, 1);
    const auto hits = map_replicas(
        samples,
        [&](std::uint64_t i) {
          RngStream rng(seed, stream_id(kVWilson, i));
          StreamDirections src(rng);
          const auto f = wilson_sample(g, starts, src, true);
          auto it = idx.find(tree_signature(w, f));
          return it == idx.end() ? -1 : it->second;
        },
        o.exec);
    std::vector<std::uint64_t> counts(trees.size(), 0);
    std::uint64_t unknown = 0;
    for (int h : hits) {
      if (h < 0)
        ++unknown;
      else
        ++counts[static_cast<std::size_t>(h)];
    }
    const Chi2Result chi = chi2_uniform(counts);
    const bool count_ok = BigInt(trees.size()) == det && idx.size() == trees.size();
    c.pass = count_ok && unknown == 0 && chi.p > 1e-3;
    note(c, "trees enumerated=" + std::to_string(trees.size()) + " determinant=" + det.str());
    note(c, "chi2=" + g6(chi.stat) + " dof=" + g6(chi.dof) + " p=" + g6(chi.p) + " (need > 0.001)");
    if (unknown) note(c, std::to_string(unknown) + " samples were not spanning trees");
  });
}

namespace {

struct LawStats {
  double tv = 0, floor = 0, mass = 0;
  Chi2Result chi;
  std::uint64_t outside = 0;
  std::size_t support = 0;
};

LawStats lerw_law_stats(const VerifyOpts& o, std::uint64_t samples) {
  const Domain d = q2_plane();
  const LerwLaw law(d);
  const Point origin(2);
  std::map<std::vector<Key>, double> exact;
  law.for_each_path(origin, [&](const Path& g, double p) { exact.emplace(g.v, p); });
  StopRule rule;
  rule.exit_domain = d;
  const std::uint64_t seed = sub_seed(o.seed, 2);
  const auto paths = map_replicas(
      samples,
      [&](std::uint64_t i) {
        RngStream rng(seed, stream_id(kVLerw, i));
        return o.eraser(run_walk(origin, rule, rng).path).v;
      },
      o.exec);
  std::map<std::vector<Key>, std::uint64_t> counts;
  for (const auto& p : paths) ++counts[p];
  LawStats st;
  std::vector<std::pair<double, std::uint64_t>> pc;
  for (const auto& [g, k] : counts) {
    auto it = exact.find(g);
    if (it == exact.end())
      st.outside += k;
    else
      pc.emplace_back(it->second, k);
  }
  st.tv = empirical_tv(pc, samples);
  std::vector<double> ps;
  for (const auto& [g, p] : exact) {
    ps.push_back(p);
    st.mass += p;
  }
  st.support = exact.size();
  st.floor = null_expected_tv(ps, samples);
  st.chi = chi2_against(pc, samples);
  return st;
}

void note_law(Check& c, const LawStats& st) {
  note(c, "expected TV of an exact sampler at this size=" + g6(st.floor));
  note(c, "support=" + std::to_string(st.support) + " paths, exact mass=" + fmt("%.12f", st.mass));
  note(c, "pooled chi2 p=" + g6(st.chi.p) + " dof=" + g6(st.chi.dof));
  if (st.outside) note(c, std::to_string(st.outside) + " samples outside the exact support");
}

}  // namespace

Check check_lerw_law(const VerifyOpts& o, std::uint64_t samples, double tv_max) {
  return timed("A2", criterion_name("A2"), [&](Check& c) {
    const LawStats st = lerw_law_stats(o, samples);
    c.pass = st.outside == 0 && st.tv < tv_max;
    note(c, "TV=" + g6(st.tv) + " (need < " + g6(tv_max) + ")");
    note_law(c, st);
  });
}

Check check_domain_markov(const VerifyOpts& o, std::uint64_t samples) {
  return timed("A3", criterion_name("A3"), [&](Check& c) {
    const DmpReport r = dmp_check(q2_plane(), 1, samples, sub_seed(o.seed, 3), 500, o.eraser);
    c.pass = r.tested > 0 && r.max_tv < 0.02 && r.zero_probability_prefixes == 0;
    note(c, "max conditional TV=" + g6(r.max_tv) + " over " + std::to_string(r.tested) + " prefixes (need < 0.02)");
    if (r.zero_probability_prefixes)
      note(c, std::to_string(r.zero_probability_prefixes) + " prefixes with impossible continuations");
  });
}

Check check_cycle_popping(const VerifyOpts& o, int systems, int orders) {
  return timed("A4", criterion_name("A4"), [&](Check& c) {
    const Domain d = q2_plane();
    const WiredGraph g(d);
    const auto starts = d.vertices();
    const std::uint64_t seed = sub_seed(o.seed, 4);
    struct Out {
      int mismatched_orders = 0;
      int wilson_mismatch = 0;
    };
    const auto outs = map_replicas(
        static_cast<std::uint64_t>(systems),
        [&](std::uint64_t i) {
          Out out;
          std::optional<SpanningForest> first;
          for (int j = 0; j < orders; ++j) {
            StackSystem s(seed, stream_id(kVStacks, i));
            RngStream order(seed, stream_id(kVPopOrder, i * 1000 + static_cast<std::uint64_t>(j)));
            SpanningForest f = pop_all_cycles(s, g, order);
            if (!first)
              first = std::move(f);
            else if (!(f == *first))
              ++out.mismatched_orders;
          }
          StackDirections src(KeyedStacks(seed, stream_id(kVStacks, i)));
          SpanningForest w = wilson_sample(g, starts, src, true);
          if (!(w == *first)) ++out.wilson_mismatch;
          return out;
        },
        o.exec);
    int bad = 0, wbad = 0;
    for (const auto& x : outs) {
      bad += x.mismatched_orders;
      wbad += x.wilson_mismatch;
    }
    c.pass = bad == 0 && wbad == 0;
    note(c, std::to_string(systems) + " stack systems x " + std::to_string(orders) + " orders, mismatches=" +
                std::to_string(bad));
    note(c, "Wilson on the same stacks mismatches=" + std::to_string(wbad));
  });
}

Check check_boundary_harnack(const VerifyOpts& o, int sets_per_case) {
  return timed("A5", criterion_name("A5"), [&](Check& c) {
    struct Case {
      int d, m;
    };
    std::vector<Case> cases;
    for (int d : {2, 3})
      for (int m : {3, 4, 5}) cases.push_back({d, m});
    const std::uint64_t seed = sub_seed(o.seed, 5);
    struct Out {
      double ratio = 0;
      char skipped = 0;
    };
    int violations = 0, skipped = 0, solved = 0;
    double worst = 1e300;
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
      const auto [dim, m] = cases[ci];
      const double bound = 1.0 / (2.0 * dim) - 1e-10;
      const auto outs = map_replicas(
          static_cast<std::uint64_t>(sets_per_case),
          [&](std::uint64_t t) {
            RngStream rng(seed, stream_id(kVHarnack, ci * 100000 + t));
            const Lattice lat(dim);
            const double q = 0.05 + 0.45 * rng.uniform01();
            VertexSet k;
            for (const auto& p : cube(dim, m - 1).vertices())
              if (p[0] <= 0 && rng.uniform01() < q) k.insert(lat.pack(p));
            if (k.empty()) k.insert(lat.pack(Point::unit(dim, 0, -1)));
            Out out;
            try {
              out.ratio = harnack_exit_ratio(dim, m, k);
            } catch (const Error& e) {
              if (e.kind() != ErrorKind::conditioning_failed) throw;
              out.skipped = 1;
            }
            return out;
          },
          o.exec);
      for (const auto& x : outs) {
        if (x.skipped) {
          ++skipped;
          continue;
        }
        ++solved;
        worst = std::min(worst, x.ratio * 2.0 * dim);
        violations += x.ratio < bound ? 1 : 0;
      }
    }
    c.pass = violations == 0 && solved > 0;
    note(c, "solved=" + std::to_string(solved) + " violations=" + std::to_string(violations) +
                " skipped(zero-probability conditioning)=" + std::to_string(skipped));
    note(c, "min ratio x 2d=" + g6(worst) + " (need >= 1)");
  });
}

Check check_two_point(const VerifyOpts& o, std::uint64_t samples) {
  return timed("A6", criterion_name("A6"), [&](Check& c) {
    RunOpts ro{sub_seed(o.seed, 6), o.exec};
    const std::vector<int> rs{2, 4, 8};
    const TwoPointResult a = exp_two_point(5, 16, rs, samples, ro);
    RunOpts rd{sub_seed(o.seed, 66), o.exec};
    const TwoPointResult b = exp_two_point(5, 32, rs, samples, rd);
    const bool slope_ok = a.fitted && a.fit.slope >= -1.5 && a.fit.slope <= -0.6;
    double worst_z = 0;
    std::vector<double> sand;
    for (std::size_t j = 0; j < rs.size(); ++j) {
      const double s = std::hypot(a.p[j].stderr_, b.p[j].stderr_);
      const double z = s > 0 ? std::abs(a.p[j].value - b.p[j].value) / s : 0.0;
      worst_z = std::max(worst_z, z);
      sand.push_back(a.p[j].value * rs[j]);
    }
    c.pass = slope_ok && worst_z < 3.0;
    note(c, "P(r)=" + g6(a.p[0].value) + "," + g6(a.p[1].value) + "," + g6(a.p[2].value));
    if (a.fitted)
      note(c, "slope=" + g6(a.fit.slope) + " ci=[" + g6(a.fit.ci_lo) + "," + g6(a.fit.ci_hi) + "] (need in [-1.5,-0.6])");
    note(c, "box doubling max |z|=" + g6(worst_z) + " (need < 3)");
    note(c, "P*r band=" + g6(band(sand)));
  });
}

Check check_lerw_length(const VerifyOpts& o, std::uint64_t samples) {
  return timed("A7", criterion_name("A7"), [&](Check& c) {
    const std::vector<double> lower{0.4, 0.3, 0.2, 0.15, 0.1, 0.05};
    const std::vector<double> upper{1, 2, 3, 4, 5, 6};
    std::vector<double> means;
    bool upper_ok = true, lower_ok = true;
    for (int N : {8, 16, 32}) {
      RunOpts ro{sub_seed(o.seed, 700 + static_cast<std::uint64_t>(N)), o.exec};
      const auto r = exp_lerw_length(5, N, lower, upper, samples, ro);
      means.push_back(r.mean_scaled.value);
      std::vector<std::uint64_t> up;
      for (const auto& t : r.upper) up.push_back(count_of(t.p));
      const bool u = strictly_thinning(up);
      upper_ok &= u;
      double smallest = -1, best = 0;
      bool positive = true;
      for (const auto& t : r.lower) {
        const std::uint64_t k = count_of(t.p);
        if (k == 0) continue;
        const double prod = k == samples ? 0.0 : t.lambda * std::log(1.0 / t.p.value);
        positive &= prod > 0;
        best = std::max(best, prod);
        smallest = prod;
      }
      const bool l = smallest < 0 || (positive && smallest >= 0.5 * best);
      lower_ok &= l;
      note(c, "N=" + std::to_string(N) + " E M/N^2=" + g6(r.mean_scaled.value) + " upper counts=" + counts_str(up) +
                  " lower product at smallest observed lambda=" + g6(smallest) + " max=" + g6(best));
    }
    const double bnd = band(means);
    c.pass = bnd <= 3.0 && upper_ok && lower_ok;
    note(c, "mean band=" + g6(bnd) + " (need <= 3)");
  });
}

Check check_shell(const VerifyOpts& o, std::uint64_t samples, std::uint64_t pilot) {
  return timed("A8", criterion_name("A8"), [&](Check& c) {
    std::vector<ShellGeometry> gs(2);
    gs[0].n = 32, gs[0].m = 4, gs[0].N = 40;
    gs[1].n = 64, gs[1].m = 8, gs[1].N = 80;
    std::vector<double> means, caps;
    bool theta_ok = true, g_ok = true;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      RunOpts ro{sub_seed(o.seed, 800 + i), o.exec};
      ShellOpts so;
      so.pilot = pilot;
      const ShellResult r = exp_shell(gs[i], samples, ro, so);
      means.push_back(r.hits_scaled.value);
      caps.push_back(r.cap_median_scaled);
      theta_ok &= r.above_theta.value >= 0.05;
      g_ok &= r.g_event.value >= 0.5;
      note(c, "(n,m,N)=(" + std::to_string(gs[i].n) + "," + std::to_string(gs[i].m) + "," + std::to_string(gs[i].N) +
                  ") E H/m^2=" + g6(r.hits_scaled.value) + " theta=" + g6(r.theta) +
                  " P(H>=theta m^2)=" + g6(r.above_theta.value) + " median cap/m^2=" + g6(r.cap_median_scaled) +
                  " good fraction=" + g6(r.good_fraction.value) + " P(G)=" + g6(r.g_event.value) +
                  " P(x1 in beta) m^3=" + g6(r.center_hit_scaled.value));
      std::vector<double> hit_caps;
      for (const auto& sm : r.per_sample)
        if (sm.capacity > 0) hit_caps.push_back(sm.capacity / (gs[i].m * gs[i].m));
      note(c, "  P(A cap beta empty)=" + g6(r.cap_zero.value) + " median cap/m^2 given nonempty=" +
                  (hit_caps.empty() ? std::string("n/a") : g6(quantile(hit_caps, 0.5))));
    }
    const double hb = band(means), cb = band(caps);
    c.pass = hb <= 4.0 && cb <= 4.0 && theta_ok && g_ok;
    note(c, "hit band=" + g6(hb) + " cap band=" + g6(cb) + " (need <= 4)");
  });
}

Check check_pair_length(const VerifyOpts& o, std::uint64_t samples_near, std::uint64_t samples_far) {
  return timed("A9", criterion_name("A9"), [&](Check& c) {
    std::vector<double> prods;
    bool mono = true, match = true;
    for (int xr : {3, 6}) {
      std::vector<std::int64_t> grid;
      for (std::int64_t n = xr; n <= (std::int64_t{1} << 24); n *= 2) grid.push_back(n);
      RunOpts ro{sub_seed(o.seed, 900 + static_cast<std::uint64_t>(xr)), o.exec};
      const auto r = exp_path_length_pair(Point::unit(5, 0) * xr, grid, xr == 3 ? samples_near : samples_far, ro);
      int viol = 0;
      for (std::size_t j = 1; j < r.p.size(); ++j) {
        const double s = std::hypot(r.p[j].stderr_, r.p[j - 1].stderr_);
        if (r.p[j].value < r.p[j - 1].value - 3 * s || r.p[j].value < r.p[j - 1].value) ++viol;
      }
      mono &= viol == 0;
      const bool spans = r.max_length <= grid.back() && r.p.back().value == r.plateau.value;
      const double err = std::hypot(r.plateau.stderr_, r.green_ratio_err) + r.escape_bias * r.green_ratio;
      const double z = err > 0 ? std::abs(r.plateau.value - r.green_ratio) / err : 0.0;
      match &= spans && z < 3.0;
      prods.push_back(r.plateau.value * std::pow(double(xr), 3));
      note(c, "|x|=" + std::to_string(xr) + " plateau=" + g6(r.plateau.value) + "+-" + g6(r.plateau.stderr_) +
                  " G(x)/G(0)=" + g6(r.green_ratio) + " z=" + g6(z) + " monotone violations=" + std::to_string(viol) +
                  " max length=" + std::to_string(r.max_length));
    }
    const double b = band(prods);
    c.pass = b <= 4.0 && mono && match;
    note(c, "plateau*|x|^3 band=" + g6(b) + " (need <= 4)");
  });
}

Check check_ball(const VerifyOpts& o, std::uint64_t samples) {
  return timed("A10", criterion_name("A10"), [&](Check& c) {
    const std::vector<double> upper{0.5, 1, 1.5, 2, 2.5, 3};
    const std::vector<double> lower{0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
    RunOpts ro{sub_seed(o.seed, 10), o.exec};
    const auto res = exp_ball(5, {4, 8, 16}, upper, lower, samples, ro);
    std::vector<double> means;
    bool tails = true;
    std::uint64_t viol = 0;
    for (const auto& s : res) {
      means.push_back(s.mean_scaled.value);
      viol += s.containment_violations;
      std::vector<std::uint64_t> up, lo;
      for (const auto& t : s.upper) up.push_back(count_of(t.p));
      for (const auto& t : s.lower) lo.push_back(count_of(t.p));
      tails &= strictly_thinning(up) && strictly_thinning(lo);
      note(c, "n=" + std::to_string(s.n) + " E|B|/n^2=" + g6(s.mean_scaled.value) + " k=2 ratio=" + g6(s.moment_ratio) +
                  " upper=" + counts_str(up) + " lower=" + counts_str(lo));
    }
    const double b = band(means);
    c.pass = b <= 2.0 && tails && viol == 0;
    note(c, "mean band=" + g6(b) + " (need <= 2), containment violations=" + std::to_string(viol));
  });
}

Check check_box_volume(const VerifyOpts& o, std::uint64_t samples) {
  return timed("A11", criterion_name("A11"), [&](Check& c) {
    const std::vector<double> lambda{2, 1, 0.5, 0.25, 0.125, 0.0625};
    std::vector<double> medians;
    bool tail = true;
    for (int N : {6, 8}) {
      RunOpts ro{sub_seed(o.seed, 1100 + static_cast<std::uint64_t>(N)), o.exec};
      const auto r = exp_box_volume(5, N, lambda, samples, ro);
      medians.push_back(r.median_scaled);
      std::vector<std::uint64_t> lo;
      for (const auto& t : r.lower) lo.push_back(count_of(t.p));
      tail &= strictly_thinning(lo);
      const auto mn = *std::min_element(r.volumes.begin(), r.volumes.end());
      tail &= mn >= 1;
      note(c, "N=" + std::to_string(N) + " median/N^4=" + g6(r.median_scaled) + " q10=" + g6(r.q10_scaled) +
                  " q90=" + g6(r.q90_scaled) + " lower counts=" + counts_str(lo));
    }
    const double b = band(medians);
    c.pass = b <= 3.0 && tail;
    note(c, "median band=" + g6(b) + " (need <= 3)");
  });
}

Check check_combinatorics(const VerifyOpts&) {
  return timed("A12", criterion_name("A12"), [&](Check& c) {
    bool counts_ok = true;
    std::string cs;
    std::uint64_t df = 1;
    for (int k = 1; k <= 4; ++k) {
      df *= static_cast<std::uint64_t>(2 * k - 1);
      const auto ts = enumerate_topologies(k);
      std::set<std::vector<std::pair<int, int>>> uniq;
      bool valid = true;
      for (const auto& t : ts) {
        valid &= t.valid();
        auto e = t.edges;
        for (auto& [a, b] : e)
          if (a > b) std::swap(a, b);
        std::sort(e.begin(), e.end());
        uniq.insert(e);
      }
      counts_ok &= ts.size() == df && uniq.size() == df && valid;
      cs += (k > 1 ? "," : "") + std::to_string(ts.size());
    }
    std::vector<double> ratios;
    const double cc = conv_bound_c(5);
    for (long n : {100L, 1000L, 10000L})
      ratios.push_back(conv_bound_sum(5, n, conv_bound_min_radius(n, cc), cc) / double(n));
    const double b = band(ratios);
    c.pass = counts_ok && b <= 2.0;
    note(c, "|T(k)| k=1..4: " + cs + " (need 1,3,15,105, all distinct and valid)");
    note(c, "sum/n at n=1e2,1e3,1e4: " + g6(ratios[0]) + "," + g6(ratios[1]) + "," + g6(ratios[2]) + " band=" + g6(b) +
                " (need <= 2)");
  });
}

Check check_capacity(const VerifyOpts& o, std::uint64_t escape_walks, int random_sets) {
  return timed("A13", criterion_name("A13"), [&](Check& c) {
    const int dim = 5;
    const Lattice lat(dim);
    const VertexSet origin{lat.pack(Point(dim))};
    const double quad = 1.0 / green_free(Point(dim));
    const double exact = capacity_exact(dim, origin);
    RngStream rng(sub_seed(o.seed, 13), stream_id(kVCapMc, 0));
    const CapacityResult mc = capacity(dim, origin, CapacityMethod::mc, 20, escape_walks, &rng);
    const double e1 = std::abs(exact - quad) / quad, e2 = std::abs(mc.value - quad) / quad;
    const std::uint64_t seed = sub_seed(o.seed, 14);
    const auto viols = map_replicas(
        static_cast<std::uint64_t>(random_sets),
        [&](std::uint64_t t) -> int {
          RngStream r(seed, stream_id(kVCapSets, t));
          auto draw = [&] {
            VertexSet s;
            const int size = 1 + static_cast<int>(r.uniform_int(6));
            while (static_cast<int>(s.size()) < size) {
              Point p(dim);
              for (int a = 0; a < dim; ++a) p[a] = static_cast<int>(r.uniform_int(5)) - 2;
              s.insert(lat.pack(p));
            }
            return s;
          };
          const VertexSet a = draw(), b = draw();
          VertexSet u = a, i;
          u.insert(b.begin(), b.end());
          for (Key k : a)
            if (b.contains(k)) i.insert(k);
          const double ca = capacity_exact(dim, a), cb = capacity_exact(dim, b), cu = capacity_exact(dim, u);
          const double ci = i.empty() ? 0.0 : capacity_exact(dim, i);
          const double tol = 1e-10;
          int v = 0;
          v += ca > cu + tol;
          v += cb > cu + tol;
          v += cu + ci > ca + cb + tol;
          return v;
        },
        o.exec);
    int bad = 0;
    for (int v : viols) bad += v;
    c.pass = e1 <= 0.02 && e2 <= 0.02 && bad == 0;
    note(c, "Cap({0}) quadrature=" + g6(quad) + " exact=" + g6(exact) + " mc=" + g6(mc.value) + "+-" + g6(mc.stderr_) +
                " rel errors " + g6(e1) + "," + g6(e2) + " (need <= 0.02)");
    note(c, std::to_string(random_sets) + " set pairs, monotonicity/subadditivity violations=" + std::to_string(bad));
  });
}

// ---------------------------------------------------------------------------

std::vector<std::string> criterion_ids() {
  std::vector<std::string> v;
  for (int i = 1; i <= 13; ++i) v.push_back("A" + std::to_string(i));
  return v;
}

std::string criterion_name(const std::string& id) {
  static const std::map<std::string, std::string> names{
      {"A1", "Wilson sampler uniform on wired Q_1 in Z^2"},
      {"A2", "LERW law on Q_2 in Z^2 within TV 0.01"},
      {"A3", "domain Markov property on Q_2 in Z^2"},
      {"A4", "cycle popping independent of order"},
      {"A5", "exit-face ratio lower bound 1/(2d)"},
      {"A6", "two-point slope and box doubling, d=5"},
      {"A7", "LERW length scaling and tails, d=5"},
      {"A8", "shell statistics, d=5"},
      {"A9", "hit-with-short-erasure profile, d=5"},
      {"A10", "intrinsic ball volume, d=5"},
      {"A11", "box volume lower tail, d=5"},
      {"A12", "topology counts and convolution sum"},
      {"A13", "capacity identities"},
      {"Q1", "loop erasure properties"},
      {"Q2", "spanning tree counts"},
      {"Q3", "exact LERW law goodness of fit"},
      {"Q4", "domain Markov property"},
      {"Q5", "cycle popping, reduced"},
      {"Q6", "exit-face ratio battery, reduced"},
  };
  auto it = names.find(id);
  return it == names.end() ? id : it->second;
}

Check run_criterion(const std::string& id, const VerifyOpts& o) {
  if (id == "A1") return check_wilson_uniform(o);
  if (id == "A2") return check_lerw_law(o);
  if (id == "A3") return check_domain_markov(o);
  if (id == "A4") return check_cycle_popping(o);
  if (id == "A5") return check_boundary_harnack(o);
  if (id == "A6") return check_two_point(o);
  if (id == "A7") return check_lerw_length(o);
  if (id == "A8") return check_shell(o);
  if (id == "A9") return check_pair_length(o);
  if (id == "A10") return check_ball(o);
  if (id == "A11") return check_box_volume(o);
  if (id == "A12") return check_combinatorics(o);
  if (id == "A13") return check_capacity(o);
  fail(ErrorKind::invalid_argument, "unknown criterion " + id);
}

std::vector<Check> verify_quick(const VerifyOpts& o) {
  std::vector<Check> out;

  out.push_back(timed("Q1", criterion_name("Q1"), [&](Check& c) {
    int bad = 0;
    const int walks = 2000;
    for (int i = 0; i < walks; ++i) {
      RngStream rng(sub_seed(o.seed, 21), stream_id(kVErasure, static_cast<std::uint64_t>(i)));
      StopRule rule;
      rule.step_cap = 50 + rng.uniform_int(400);
      const int dim = 2 + static_cast<int>(rng.uniform_int(3));
      const Path w = run_walk(Point(dim), rule, rng).path;
      const Path l = o.eraser(w);
      const bool ok = l.is_self_avoiding() && l.is_nearest_neighbour() && !l.v.empty() && l.front() == w.front() &&
                      l.back() == w.back() && o.eraser(l) == l && l.v == naive_erase(w.v);
      bad += ok ? 0 : 1;
    }
    c.pass = bad == 0;
    note(c, std::to_string(walks) + " walks, idempotence/self-avoidance/endpoint/oracle failures=" + std::to_string(bad));
  }));

  out.push_back(timed("Q2", criterion_name("Q2"), [&](Check& c) {
    bool ok = true;
    for (int n = 3; n <= 8; ++n) {
      ok &= count_spanning_trees(cycle_graph(n), CountMethod::exhaustive) == n;
      ok &= count_spanning_trees(cycle_graph(n), CountMethod::determinant) == n;
      BigInt cayley = 1;
      for (int j = 0; j < n - 2; ++j) cayley *= n;
      ok &= count_spanning_trees(complete_graph(n), CountMethod::determinant) == cayley;
      if (n <= 6) ok &= count_spanning_trees(complete_graph(n), CountMethod::exhaustive) == cayley;
    }
    const WiredTiny w = wired_tiny_graph(Domain::box(cube(2, 1)));
    const BigInt ex = count_spanning_trees(w.g, CountMethod::exhaustive);
    const BigInt det = count_spanning_trees(w.g, CountMethod::determinant);
    ok &= ex == det;
    c.pass = ok;
    note(c, "cycles, complete graphs and wired Q_1: exhaustive=" + ex.str() + " determinant=" + det.str());
  }));

  out.push_back(timed("Q3", criterion_name("Q3"), [&](Check& c) {
    const LawStats st = lerw_law_stats(o, 100000);
    c.pass = st.outside == 0 && st.chi.p > 1e-3;
    note(c, "TV=" + g6(st.tv) + ", need pooled chi2 p > 0.001 and no sample outside the support");
    note_law(c, st);
  }));

  out.push_back(timed("Q4", criterion_name("Q4"), [&](Check& c) {
    const Check inner = check_domain_markov(o, 1000000);
    c.pass = inner.pass;
    c.statistic = inner.statistic;
  }));

  out.push_back(timed("Q5", criterion_name("Q5"), [&](Check& c) {
    const Check inner = check_cycle_popping(o, 20, 5);
    c.pass = inner.pass;
    c.statistic = inner.statistic;
  }));

  out.push_back(timed("Q6", criterion_name("Q6"), [&](Check& c) {
    const Check inner = check_boundary_harnack(o, 30);
    c.pass = inner.pass;
    c.statistic = inner.statistic;
  }));
  return out;
}

std::vector<Check> verify_suite(Level level, const VerifyOpts& o) {
  auto out = verify_quick(o);
  if (level == Level::full)
    for (const auto& id : criterion_ids()) out.push_back(run_criterion(id, o));
  return out;
}

std::string format_check(const Check& c) {
  std::ostringstream os;
  os << c.id << ' ' << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  | " << c.statistic << "  ["
     << fmt("%.1f", c.seconds) << " s]";
  return os.str();
}

void write_checks_csv(std::ostream& os, const std::vector<Check>& cs) {
  os << "id,name,pass,statistic,seconds\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  for (const auto& c : cs)
    os << c.id << ',' << quote(c.name) << ',' << (c.pass ? 1 : 0) << ',' << quote(c.statistic) << ','
       << fmt("%.3f", c.seconds) << '\n';
}

}  // namespace usf
