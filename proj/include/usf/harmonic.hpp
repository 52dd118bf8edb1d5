#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <absl/container/flat_hash_map.h>

#include "usf/lattice.hpp"
#include "usf/path.hpp"
#include "usf/rng.hpp"

namespace usf {

using Field = absl::flat_hash_map<Key, double>;
/// Weights in ascending key order, so sums are reproducible bit for bit.
using Measure = std::vector<std::pair<Key, double>>;

struct SolverLimits {
  std::size_t exact_cap = 50000;  // max unknowns for any exact solve
  std::size_t dense_below = 2000;
  std::size_t green_table_cap = 3000;
  double tolerance = 1e-12;
};

/// Factorised (I - P) on a finite vertex set with zero data outside it.
/// Solve once per right-hand side; the factorisation is reused.
class LaplacianSolver {
 public:
  LaplacianSolver(int dim, const VertexSet& domain, const SolverLimits& lim = {});
  ~LaplacianSolver();
  LaplacianSolver(LaplacianSolver&&) noexcept;

  std::size_t size() const { return keys_.size(); }
  int dim() const { return dim_; }
  const std::vector<Key>& keys() const { return keys_; }
  /// -1 when k is not in the domain.
  int index(Key k) const {
    auto it = index_.find(k);
    return it == index_.end() ? -1 : it->second;
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve_columns(const Eigen::MatrixXd& rhs) const;
  /// Column G_D(., y) of the Green function.
  Eigen::VectorXd green_column(Key y) const;
  /// Right-hand side for Dirichlet data g on the outer boundary.
  Eigen::VectorXd dirichlet_rhs(const Field& g) const;

 private:
  struct Impl;
  int dim_;
  std::vector<Key> keys_;
  absl::flat_hash_map<Key, int> index_;
  std::unique_ptr<Impl> impl_;
};

struct DirichletProblem {
  int dim = 0;
  VertexSet domain;
  Field boundary_values;  // must cover the outer boundary of domain
};

Field solve_dirichlet(const DirichletProblem& p, const SolverLimits& lim = {});

/// Expected visits G_D(x, y), indexed by sorted domain keys.
struct GreenTable {
  int dim = 0;
  std::vector<Key> keys;
  absl::flat_hash_map<Key, int> index;
  Eigen::MatrixXd values;

  double operator()(Key x, Key y) const;
};

GreenTable green_exact(int dim, const VertexSet& domain, const SolverLimits& lim = {});

/// Free Green function G(x, 0) on Z^d, d >= 3, from the one-dimensional
/// Bessel representation d * ∫ prod_i e^{-s} I_{|x_i|}(s) ds.
double green_free(const Point& x);
/// Absolute error estimate of the cached quadrature for x.
double green_free_error(const Point& x);
/// Asymptotic a_d |x|^{2-d}.
double green_free_asymptotic(const Point& x);

enum class CapacityMethod { exact, mc };

struct CapacityResult {
  double value = 0.0;
  CapacityMethod method = CapacityMethod::exact;
  double stderr_ = 0.0;
  int escape_radius = 0;
  std::size_t samples = 0;  // per vertex, mc only
};

/// Equilibrium measure e_K from the free Green matrix; the weights solve
/// sum_u G(x - u) e(u) = 1 on K.
Measure equilibrium_measure(int dim, const VertexSet& k);
double capacity_exact(int dim, const VertexSet& k);
CapacityResult capacity(int dim, const VertexSet& k, CapacityMethod method, int escape_radius = 0,
                        std::size_t samples_per_vertex = 0, RngStream* rng = nullptr);
/// P^z(T_K < ∞) by the last-exit decomposition.
double hit_probability(const Point& z, const Measure& equilibrium);

/// P^0(S(τ) ∈ R_m | τ < T^+_K) with τ the exit time of Q(0, m-1) and R_m the
/// right-hand face {x_1 = m} of Q_m.
double harnack_exit_ratio(int dim, int m, const VertexSet& k, const SolverLimits& lim = {});

/// P^{z0}(T_{Q(x0, m/2)} > τ_D | T_K > τ_D) with z0 = x0 + m e_1.
double avoid_box_ratio(const Box& d, const VertexSet& k, const Point& x0, int m, const SolverLimits& lim = {});

/// P^{x0}(S(τ) ∈ right face of Q(x0, m) | T^+_K > τ_D), τ the exit time of
/// Q(x0, m-1), so the walk lands on that face exactly when it exits there.
double exit_face_ratio(const Box& d, const VertexSet& k, const Point& x0, int m, const SolverLimits& lim = {});

/// Green function of the walk from the endpoint x0 of alpha conditioned on
/// τ_D < T^+_α, evaluated at each target outside alpha.
std::vector<double> gtilde(const Box& d, const Path& alpha, const std::vector<Point>& targets,
                           const SolverLimits& lim = {});

/// h(x) = P^x(τ_D < T_α) on D minus α.
Field escape_avoiding(const Box& d, const VertexSet& alpha, const SolverLimits& lim = {});

/// Lattice sum of (1+|w|)^{2-d} exp(-c|w|^2/n) over Q(0, radius), d >= 5.
double conv_bound_sum(int dim, long n, long truncation_radius, double c);
double conv_bound_c(int dim);  // 1/(2d)
long conv_bound_min_radius(long n, double c);
/// Brute force over the positive orthant with multiplicities; small radii only.
double conv_bound_sum_direct(int dim, long n, long truncation_radius, double c);

}  // namespace usf
