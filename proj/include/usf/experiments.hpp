#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "usf/lattice.hpp"
#include "usf/replicas.hpp"
#include "usf/stats.hpp"

namespace usf {

inline constexpr const char* kCodeVersion = "usf-lab 1.0.0";

struct RunOpts {
  std::uint64_t seed = 1;
  Exec exec = Exec::openmp;
};

// ---------------------------------------------------------------------------
// Output records

struct Row {
  std::vector<std::pair<std::string, std::string>> params;
  std::string quantity;
  Estimate est;
};

struct Record {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<Row> rows;
  nlohmann::json meta = nlohmann::json::object();
};

/// Header: parameter columns of the first row, then the fixed estimate columns.
void write_csv(std::ostream& os, const Record& r);
std::string format_real(double x);

// ---------------------------------------------------------------------------
// Separation of two walks

struct SeparationResult {
  int n = 0;
  Estimate conditional;   // P(Z_n >= n/2 | F_n)
  Estimate acceptance;    // P(F_n)
  std::uint64_t pairs = 0;
};

/// d >= 5, n >= 8. swap_roles exchanges S and S' in the definition of Z_n.
SeparationResult exp_separation(int dim, int n, std::uint64_t samples, const RunOpts& o, bool swap_roles = false);
Record to_record(const SeparationResult& r, int dim, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Length of the loop-erased walk inside Q_N

struct TailPoint {
  double lambda = 0.0;
  Estimate p;
};

struct LerwLengthResult {
  int N = 0;
  std::vector<std::uint64_t> lengths;  // M_N per sample, sample order
  Estimate mean_scaled;                // E M_N / N^2
  Estimate second_scaled;              // E M_N^2 / N^4
  std::vector<TailPoint> lower;        // P(M_N < λ N^2)
  std::vector<TailPoint> upper;        // P(M_N >= λ N^2)
};

LerwLengthResult exp_lerw_length(int dim, int N, const std::vector<double>& lower_grid,
                                 const std::vector<double>& upper_grid, std::uint64_t samples, const RunOpts& o);
Record to_record(const LerwLengthResult& r, int dim, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Two-point connection function

struct TwoPointResult {
  int N = 0;
  std::vector<int> r;
  std::vector<Estimate> p;  // P(r e_1 in U(0))
  bool fitted = false;
  FitResult fit;
};

TwoPointResult exp_two_point(int dim, int N, const std::vector<int>& r_grid, std::uint64_t samples, const RunOpts& o);
Record to_record(const TwoPointResult& r, int dim, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Walk hitting x with a short loop erasure

struct PairLengthResult {
  Point x;
  int escape_radius = 0;
  double escape_bias = 0.0;  // bound on the relative truncation bias
  std::vector<std::int64_t> n;
  std::vector<Estimate> p;   // P(F(0, x, n))
  Estimate plateau;          // P(T_x < escape)
  double green_ratio = 0.0;  // G(x) / G(0)
  double green_ratio_err = 0.0;
  std::int64_t max_length = 0;
};

/// Escape radius is escape_factor * |x|_inf around x.
PairLengthResult exp_path_length_pair(const Point& x, const std::vector<std::int64_t>& n_grid, std::uint64_t samples,
                                      const RunOpts& o, int escape_factor = 16);
Record to_record(const PairLengthResult& r, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Intrinsic balls

struct BallStats {
  int n = 0;
  std::vector<std::uint64_t> volumes;
  Estimate mean_scaled;    // E|B| / n^2
  Estimate second_scaled;  // E|B|^2 / n^4
  double moment_ratio = 0.0;  // E|B|^2 / (2 (E|B|)^2)
  std::vector<TailPoint> upper;  // P(|B| >= λ n^2)
  std::vector<TailPoint> lower;  // P(|B| <= λ n^2)
  std::uint64_t containment_violations = 0;
  double mean_revealed = 0.0;
  double mean_walk_steps = 0.0;
};

struct BallOpts {
  int box_factor = 4;  // D = Q(box_factor * n)
  bool full_starts = false;
};

std::vector<BallStats> exp_ball(int dim, const std::vector<int>& n_grid, const std::vector<double>& upper_grid,
                                const std::vector<double>& lower_grid, std::uint64_t samples, const RunOpts& o,
                                const BallOpts& b = {});
Record to_record(const std::vector<BallStats>& r, int dim, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Box volume of the origin's component

struct BoxVolumeResult {
  int N = 0;
  std::vector<std::uint64_t> volumes;  // |Q_N ∩ U_0|
  double median_scaled = 0.0;          // median / N^4
  double q10_scaled = 0.0, q90_scaled = 0.0;
  Estimate mean_scaled;
  std::vector<TailPoint> lower;        // P(vol <= λ N^4)
};

BoxVolumeResult exp_box_volume(int dim, int N, const std::vector<double>& lambda_grid, std::uint64_t samples,
                               const RunOpts& o, int box_factor = 4);
Record to_record(const BoxVolumeResult& r, int dim, std::uint64_t seed);

/// Volume of the origin's component in Q_N for one Wilson run on Q(box_factor*N),
/// with the serial generic builder.
std::uint64_t box_volume_sample(int dim, int N, int box_factor, std::uint64_t seed, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Shell statistics

struct ShellGeometry {
  int dim = 5;
  int n = 32, m = 4, N = 40;
  bool override_regime = false;

  bool in_regime() const { return 16 <= n && n + m <= N && n < n + m && 8 * m <= n; }
  /// Throws a geometry error when out of regime without override.
  void validate() const;
  int k_shells() const;  // ceil(N / (2m)), the number of shells along one walk
};

struct ShellSample {
  std::uint64_t hits = 0;        // H_A(β)
  double capacity = 0.0;         // Cap(A ∩ β)
  bool center_hit = false;       // x_1 in β
  double x2_hit = 0.0;           // P(S^{x_2} hits A ∩ β | L), exact
  double x2_hit_nested = -1.0;   // nested Monte Carlo estimate, -1 when off
  std::vector<double> shell_hit;    // per shell j of the walk: hit probability from Y_{j,2}
  std::vector<std::uint64_t> shell_size;  // |Q(Y_j, m) ∩ β_j|
};

struct ShellResult {
  ShellGeometry geom;
  std::uint64_t samples = 0;
  Estimate hits_scaled;        // E H / m^2
  Estimate hits_sq_scaled;     // E H^2 / m^4
  double theta = 0.0;          // pilot sup{c : P(H/m^2 >= c) >= c}
  Estimate above_theta;        // P(H >= θ m^2), main run
  double cap_median_scaled = 0.0;  // median Cap(A ∩ β) / m^2
  Estimate cap_zero;           // fraction with A ∩ β empty
  Estimate center_hit_scaled;  // P(x_1 in β) * m^{d-2}
  Estimate center_hit;
  Estimate x2_hit_scaled;      // E P(S^{x_2} hits A ∩ β | L) * m^{d-4}
  double c1 = 0.0, C2 = 0.0;   // pilot constants
  Estimate good_fraction;      // mean fraction of good shells
  Estimate g_event;            // P(at least k/2 good shells)
  double nested_variance_within = 0.0, nested_variance_between = 0.0;
  std::vector<ShellSample> per_sample;
};

struct ShellOpts {
  std::uint64_t pilot = 2000;
  std::uint32_t nested = 0;    // inner walks per sample for the nested estimate
  int nested_escape_factor = 8;
};

ShellResult exp_shell(const ShellGeometry& g, std::uint64_t samples, const RunOpts& o, const ShellOpts& so = {});
Record to_record(const ShellResult& r, std::uint64_t seed);

/// One sample of the shell experiment, for tests and replay.
ShellSample shell_sample(const ShellGeometry& g, std::uint64_t seed, std::uint64_t stream, std::uint32_t nested = 0,
                         int nested_escape_factor = 8);

// ---------------------------------------------------------------------------
// Tree topologies

/// Vertex ids: 0 is the origin, 1 is ∞, 2i is leaf i and 2i+1 is the branch
/// vertex ī, for i = 1..k.
struct TopologyTree {
  int k = 0;
  std::vector<std::pair<int, int>> edges;

  bool valid() const;
  std::string to_string() const;
};

std::vector<TopologyTree> enumerate_topologies(int k);

}  // namespace usf
