#include "usf/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_erf.h>
#include <gsl/gsl_sf_gamma.h>

namespace usf {

struct LaplacianSolver::Impl {
  bool dense = true;
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::SparseMatrix<double> a;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
};

LaplacianSolver::LaplacianSolver(int dim, const VertexSet& domain, const SolverLimits& lim)
    : dim_(dim), impl_(std::make_unique<Impl>()) {
  if (domain.empty()) fail(ErrorKind::empty_set, "empty set");
  if (domain.size() > lim.exact_cap) {
    std::ostringstream os;
    os << "exact solve on " << domain.size() << " vertices exceeds cap " << lim.exact_cap
       << "; use a Monte Carlo estimator instead";
    fail(ErrorKind::capacity_exceeded, os.str());
  }
  keys_.assign(domain.begin(), domain.end());
  std::sort(keys_.begin(), keys_.end());
  index_.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) index_.emplace(keys_[i], static_cast<int>(i));

  const Lattice lat(dim);
  const double w = 1.0 / lat.num_directions();
  const auto n = static_cast<Eigen::Index>(keys_.size());
  if (keys_.size() < lim.dense_below) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int dir = 0; dir < lat.num_directions(); ++dir) {
        const int j = index(lat.step(keys_[static_cast<std::size_t>(i)], dir));
        if (j >= 0) m(i, j) -= w;
      }
    impl_->llt.compute(m);
    if (impl_->llt.info() != Eigen::Success) fail(ErrorKind::internal, "Cholesky factorisation failed");
    return;
  }
  impl_->dense = false;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(lat.num_directions() + 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 1.0);
    for (int dir = 0; dir < lat.num_directions(); ++dir) {
      const int j = index(lat.step(keys_[static_cast<std::size_t>(i)], dir));
      if (j >= 0) trip.emplace_back(i, j, -w);
    }
  }
  impl_->a.resize(n, n);
  impl_->a.setFromTriplets(trip.begin(), trip.end());
  impl_->cg.setTolerance(lim.tolerance);
  impl_->cg.setMaxIterations(std::max<Eigen::Index>(1000, 20 * n));
  impl_->cg.compute(impl_->a);
  if (impl_->cg.info() != Eigen::Success) fail(ErrorKind::internal, "incomplete Cholesky failed");
}

LaplacianSolver::~LaplacianSolver() = default;
LaplacianSolver::LaplacianSolver(LaplacianSolver&&) noexcept = default;

Eigen::VectorXd LaplacianSolver::solve(const Eigen::VectorXd& rhs) const {
  if (impl_->dense) return impl_->llt.solve(rhs);
  Eigen::VectorXd x = impl_->cg.solve(rhs);
  if (impl_->cg.info() != Eigen::Success) fail(ErrorKind::internal, "conjugate gradient did not converge");
  return x;
}

Eigen::MatrixXd LaplacianSolver::solve_columns(const Eigen::MatrixXd& rhs) const {
  if (impl_->dense) return impl_->llt.solve(rhs);
  Eigen::MatrixXd x(rhs.rows(), rhs.cols());
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) x.col(j) = solve(rhs.col(j));
  return x;
}

Eigen::VectorXd LaplacianSolver::green_column(Key y) const {
  const int j = index(y);
  require(j >= 0, "Green column outside the domain");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  e(j) = 1.0;
  return solve(e);
}

Eigen::VectorXd LaplacianSolver::dirichlet_rhs(const Field& g) const {
  const Lattice lat(dim_);
  const double w = 1.0 / lat.num_directions();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < keys_.size(); ++i)
    for (int dir = 0; dir < lat.num_directions(); ++dir) {
      const Key nb = lat.step(keys_[i], dir);
      if (index_.contains(nb)) continue;
      auto it = g.find(nb);
      if (it == g.end()) fail(ErrorKind::invalid_argument, "boundary values missing at " + lat.unpack(nb).to_string());
      b(static_cast<Eigen::Index>(i)) += w * it->second;
    }
  return b;
}

Field solve_dirichlet(const DirichletProblem& p, const SolverLimits& lim) {
  LaplacianSolver s(p.dim, p.domain, lim);
  const Eigen::VectorXd h = s.solve(s.dirichlet_rhs(p.boundary_values));
  Field out = p.boundary_values;
  for (std::size_t i = 0; i < s.keys().size(); ++i) out[s.keys()[i]] = h(static_cast<Eigen::Index>(i));
  return out;
}

double GreenTable::operator()(Key x, Key y) const {
  auto ix = index.find(x), iy = index.find(y);
  if (ix == index.end() || iy == index.end()) return 0.0;
  return values(ix->second, iy->second);
}

GreenTable green_exact(int dim, const VertexSet& domain, const SolverLimits& lim) {
  if (domain.size() > lim.green_table_cap) fail(ErrorKind::capacity_exceeded, "Green table exceeds cap");
  SolverLimits l = lim;
  l.dense_below = std::max(l.dense_below, domain.size() + 1);
  LaplacianSolver s(dim, domain, l);
  GreenTable t;
  t.dim = dim;
  t.keys = s.keys();
  for (std::size_t i = 0; i < t.keys.size(); ++i) t.index.emplace(t.keys[i], static_cast<int>(i));
  const auto n = static_cast<Eigen::Index>(t.keys.size());
  t.values = s.solve_columns(Eigen::MatrixXd::Identity(n, n));
  return t;
}

// ---------------------------------------------------------------------------
// Free Green function

namespace {

using GreenKey = std::array<int, kMaxDim + 1>;

struct GreenCache {
  std::shared_mutex mu;
  absl::flat_hash_map<GreenKey, std::pair<double, double>> values;
  bool loaded = false;
  std::string file;
};

GreenCache& cache() {
  static GreenCache c;
  return c;
}

constexpr const char* kCacheHeader = "# usf green_free v1: d |x| sorted, value, abs error";

GreenKey canonical(const Point& x) {
  GreenKey k{};
  k[0] = x.dim();
  for (int i = 0; i < x.dim(); ++i) k[static_cast<std::size_t>(i + 1)] = std::abs(x[i]);
  std::sort(k.begin() + 1, k.begin() + 1 + x.dim());
  return k;
}

void load_cache_locked(GreenCache& c) {
  c.loaded = true;
  const char* dir = std::getenv("USF_LAB_CACHE");
  if (!dir || !*dir) return;
  c.file = std::string(dir) + "/green_free_v1.txt";
  std::ifstream in(c.file);
  std::string line;
  if (!std::getline(in, line) || line != kCacheHeader) return;
  while (std::getline(in, line)) {
    std::istringstream is(line);
    GreenKey k{};
    is >> k[0];
    if (k[0] < 3 || k[0] > kMaxDim) continue;
    for (int i = 1; i <= k[0]; ++i) is >> k[static_cast<std::size_t>(i)];
    double v, e;
    if (is >> v >> e) c.values[k] = {v, e};
  }
}

void append_cache_locked(GreenCache& c, const GreenKey& k, double v, double e) {
  if (c.file.empty()) return;
  const bool fresh = !std::ifstream(c.file).good();
  std::ofstream out(c.file, std::ios::app);
  if (!out) return;
  if (fresh) out << kCacheHeader << '\n';
  out << k[0];
  for (int i = 1; i <= k[0]; ++i) out << ' ' << k[static_cast<std::size_t>(i)];
  out << std::setprecision(17) << ' ' << v << ' ' << e << '\n';
}

struct BesselArgs {
  const GreenKey* k;
};

double bessel_product(double s, void* p) {
  const GreenKey& k = *static_cast<BesselArgs*>(p)->k;
  double prod = k[0];
  for (int i = 1; i <= k[0]; ++i) {
    gsl_sf_result r;
    if (gsl_sf_bessel_In_scaled_e(k[static_cast<std::size_t>(i)], s, &r) != GSL_SUCCESS) return 0.0;
    prod *= r.val;
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

std::pair<double, double> green_quadrature(const GreenKey& k) {
  gsl_set_error_handler_off();
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
  BesselArgs args{&k};
  gsl_function f{&bessel_product, &args};
  double val = 0, err = 0;
  // Split at the peak scale |x|^2/d so the adaptive rule sees the bump.
  long r2 = 0;
  for (int i = 1; i <= k[0]; ++i) r2 += static_cast<long>(k[static_cast<std::size_t>(i)]) * k[static_cast<std::size_t>(i)];
  const double split = std::max(1.0, 4.0 * static_cast<double>(r2) / k[0]);
  double v1 = 0, e1 = 0, v2 = 0, e2 = 0;
  gsl_integration_qags(&f, 0.0, split, 0.0, 1e-11, 2000, ws, &v1, &e1);
  gsl_integration_qagiu(&f, split, 0.0, 1e-11, 2000, ws, &v2, &e2);
  gsl_integration_workspace_free(ws);
  val = v1 + v2;
  err = e1 + e2;
  return {val, err};
}

std::pair<double, double> green_entry(const Point& x) {
  if (x.dim() < 3) fail(ErrorKind::invalid_argument, "recurrent lattice");
  GreenCache& c = cache();
  const GreenKey k = canonical(x);
  {
    std::shared_lock lk(c.mu);
    if (c.loaded) {
      auto it = c.values.find(k);
      if (it != c.values.end()) return it->second;
    }
  }
  std::unique_lock lk(c.mu);
  if (!c.loaded) load_cache_locked(c);
  auto it = c.values.find(k);
  if (it != c.values.end()) return it->second;
  const auto ve = green_quadrature(k);
  append_cache_locked(c, k, ve.first, ve.second);
  c.values.emplace(k, ve);
  return ve;
}

}  // namespace

double green_free(const Point& x) { return green_entry(x).first; }
double green_free_error(const Point& x) { return green_entry(x).second; }

double green_free_asymptotic(const Point& x) {
  const int d = x.dim();
  if (d < 3) fail(ErrorKind::invalid_argument, "recurrent lattice");
  const double a = d * std::tgamma(d / 2.0 - 1.0) / (2.0 * std::pow(M_PI, d / 2.0));
  return a * std::pow(norms(x).l2, 2.0 - d);
}

// ---------------------------------------------------------------------------
// Capacity

Measure equilibrium_measure(int dim, const VertexSet& k) {
  if (k.empty()) fail(ErrorKind::empty_set, "empty set");
  if (k.size() > 2000) fail(ErrorKind::capacity_exceeded, "exact capacity limited to 2000 vertices");
  const Lattice lat(dim);
  std::vector<Key> keys(k.begin(), k.end());
  std::sort(keys.begin(), keys.end());
  std::vector<Point> pts;
  pts.reserve(keys.size());
  for (Key key : keys) pts.push_back(lat.unpack(key));
  const auto n = static_cast<Eigen::Index>(keys.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      g(i, j) = g(j, i) = green_free(pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]);
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::ill_conditioned, "ill-conditioned Green matrix");
  const Eigen::VectorXd e = llt.solve(Eigen::VectorXd::Ones(n));
  Measure out;
  out.reserve(keys.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = e(i);
    if (v < -1e-8) fail(ErrorKind::ill_conditioned, "ill-conditioned Green matrix");
    out.emplace_back(keys[static_cast<std::size_t>(i)], std::max(0.0, v));
  }
  return out;
}

double capacity_exact(int dim, const VertexSet& k) {
  double s = 0;
  for (const auto& [key, v] : equilibrium_measure(dim, k)) s += v;
  return s;
}

double hit_probability(const Point& z, const Measure& equilibrium) {
  const Lattice lat(z.dim());
  double s = 0;
  for (const auto& [key, v] : equilibrium) s += green_free(z - lat.unpack(key)) * v;
  return std::min(1.0, s);
}

CapacityResult capacity(int dim, const VertexSet& k, CapacityMethod method, int escape_radius,
                        std::size_t samples_per_vertex, RngStream* rng) {
  CapacityResult r;
  r.method = method;
  if (method == CapacityMethod::exact) {
    r.value = capacity_exact(dim, k);
    return r;
  }
  if (k.empty()) fail(ErrorKind::empty_set, "empty set");
  require(rng != nullptr && samples_per_vertex > 0 && escape_radius > 0, "mc capacity needs rng, samples, radius");
  const Lattice lat(dim);
  std::vector<Key> keys(k.begin(), k.end());
  std::sort(keys.begin(), keys.end());
  Point lo = lat.unpack(keys.front()), hi = lo;
  for (Key key : keys) {
    const Point q = lat.unpack(key);
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], q[i]);
      hi[i] = std::max(hi[i], q[i]);
    }
  }
  Point c(dim);
  for (int i = 0; i < dim; ++i) c[i] = (lo[i] + hi[i]) / 2;
  const auto ndir = static_cast<std::uint32_t>(lat.num_directions());
  double var = 0;
  for (Key u : keys) {
    std::size_t esc = 0;
    for (std::size_t s = 0; s < samples_per_vertex; ++s) {
      Key x = u;
      Point p = lat.unpack(u);
      while (true) {
        const int dir = static_cast<int>(rng->uniform_int(ndir));
        x = lat.step(x, dir);
        Lattice::apply(p, dir);
        if (k.contains(x)) break;
        const int a = Lattice::axis_of(dir);
        if (std::abs(p[a] - c[a]) > escape_radius) {
          ++esc;
          break;
        }
      }
    }
    const double ph = static_cast<double>(esc) / static_cast<double>(samples_per_vertex);
    r.value += ph;
    var += ph * (1 - ph) / static_cast<double>(samples_per_vertex);
  }
  r.stderr_ = std::sqrt(var);
  r.escape_radius = escape_radius;
  r.samples = samples_per_vertex;
  return r;
}

// ---------------------------------------------------------------------------
// Convolution bound

namespace {

struct ConvArgs {
  int d;
  double a0;  // c / n
  long radius;
};

// Sum of exp(-a j^2) over |j| <= radius. For small a the Poisson dual is used;
// it drops the tail beyond radius, which is below 2 exp(-a radius^2) / a and
// negligible for the radii conv_bound_sum accepts.
double theta(double a, long radius) {
  if (a < 0.5) {
    double s = 1.0;
    for (int k = 1;; ++k) {
      const double t = std::exp(-M_PI * M_PI * k * k / a);
      s += 2.0 * t;
      if (t < 1e-19 * s) break;
    }
    return std::sqrt(M_PI / a) * s;
  }
  double s = 1.0;
  for (long j = 1; j <= radius; ++j) {
    const double t = std::exp(-a * static_cast<double>(j) * static_cast<double>(j));
    s += 2.0 * t;
    if (t < 1e-19 * s) break;
  }
  return s;
}

// I_k(b) = ∫_0^∞ s^k exp(-2bs - s^2) ds, b >= 0. Upward recursion from the
// scaled erfc for moderate b, the asymptotic series in 1/b beyond.
double moment_integral(int k, double b) {
  if (b > 6.0) {
    double total = 0;
    for (int j = 0; j < 60; ++j) {
      const double t =
          std::exp(std::lgamma(k + 2.0 * j + 1.0) - std::lgamma(j + 1.0) - (k + 2.0 * j + 1.0) * std::log(2.0 * b));
      total += (j % 2 ? -t : t);
      if (t < 1e-17 * std::abs(total)) break;
    }
    return total;
  }
  double i0 = 0.5 * std::sqrt(M_PI) * std::exp(b * b + gsl_sf_log_erfc(b));
  if (k == 0) return i0;
  double i1 = 0.5 - b * i0;
  for (int j = 2; j <= k; ++j) {
    const double i2 = 0.5 * (j - 1) * i0 - b * i1;
    i0 = i1;
    i1 = i2;
  }
  return i1;
}

// Weight W(u) with (1+r)^{2-d} = ∫ W(u) e^{-u r^2} du.
double weight(double u, int d) {
  return std::pow(2.0, d - 2) / (std::tgamma(d - 2.0) * std::sqrt(M_PI)) * std::pow(u, (d - 4) / 2.0) *
         moment_integral(d - 2, std::sqrt(u));
}

double outer_integrand(double v, void* p) {
  const auto* a = static_cast<ConvArgs*>(p);
  const double u = std::exp(v);
  return u * weight(u, a->d) * std::pow(theta(u + a->a0, a->radius), a->d);
}

}  // namespace

double conv_bound_c(int dim) { return 1.0 / (2.0 * dim); }

long conv_bound_min_radius(long n, double c) {
  return static_cast<long>(std::ceil(8.0 * std::sqrt(static_cast<double>(n) / c)));
}

double conv_bound_sum(int dim, long n, long truncation_radius, double c) {
  require(dim >= 5, "convolution bound needs d >= 5");
  require(n >= 1 && c > 0, "convolution bound needs n >= 1 and c > 0");
  const long need = conv_bound_min_radius(n, c);
  if (truncation_radius < need)
    fail(ErrorKind::invalid_argument, "truncation radius too small; need >= " + std::to_string(need));
  gsl_set_error_handler_off();
  gsl_integration_workspace* outer = gsl_integration_workspace_alloc(4000);
  ConvArgs args{dim, c / static_cast<double>(n), truncation_radius};
  gsl_function f{&outer_integrand, &args};
  double total = 0;
  // Panels of width 4 in log u keep each piece smooth.
  for (int lo = -60; lo < 60; lo += 4) {
    double v = 0, e = 0;
    gsl_integration_qag(&f, lo, lo + 4, 0.0, 1e-11, 4000, GSL_INTEG_GAUSS41, outer, &v, &e);
    total += v;
  }
  gsl_integration_workspace_free(outer);
  return total;
}

double conv_bound_sum_direct(int dim, long n, long truncation_radius, double c) {
  require(dim >= 1 && truncation_radius >= 0, "bad arguments");
  std::vector<long> w(static_cast<std::size_t>(dim), 0);
  double total = 0;
  while (true) {
    double r2 = 0;
    int nonzero = 0;
    for (long x : w) {
      r2 += static_cast<double>(x) * static_cast<double>(x);
      nonzero += x != 0;
    }
    const double r = std::sqrt(r2);
    total += std::ldexp(1.0, nonzero) * std::pow(1.0 + r, 2.0 - dim) * std::exp(-c * r2 / static_cast<double>(n));
    std::size_t i = 0;
    for (; i < w.size(); ++i) {
      if (w[i] < truncation_radius) {
        ++w[i];
        break;
      }
      w[i] = 0;
    }
    if (i == w.size()) break;
  }
  return total;
}

}  // namespace usf
