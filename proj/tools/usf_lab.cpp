// usf-lab: experiment runner and verification front end.
//
// Exit codes:
//   0  success
//   1  usage error (bad flag, malformed value)
//   2  unknown experiment
//   3  schema violation (parameter not accepted by the experiment, bad value, geometry)
//   4  output not writable
//   5  estimator error
//   6  verification failure (verify, or replay output differs)

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "usf/experiments.hpp"
#include "usf/harmonic.hpp"
#include "usf/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace usf;

namespace {

enum Exit { kOk = 0, kUsage = 1, kUnknown = 2, kSchema = 3, kOutput = 4, kEstimator = 5, kVerify = 6 };

struct Cfg {
  std::string experiment;
  int d = 5;
  std::vector<int> n;
  int N = 0;
  int m = 0;
  int k = 4;
  std::vector<int> r;
  std::vector<int> x;
  std::vector<double> lambda, upper, lower;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  std::uint64_t pilot = 2000;
  int nested = 0;
  int escape_factor = 16;
  int box_factor = 4;
  double c = 0.0;
  bool override_regime = false;
  bool swap_roles = false;
  bool full_starts = false;
  bool allow_large = false;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Cfg, experiment, d, n, N, m, k, r, x, lambda, upper, lower, samples,
                                                seed, pilot, nested, escape_factor, box_factor, c, override_regime,
                                                swap_roles, full_starts, allow_large)

struct Spec {
  std::string summary;
  std::set<std::string> keys;  // accepted parameters besides seed
  std::function<void(Cfg&)> defaults;
};

const std::map<std::string, Spec>& catalog() {
  static const std::map<std::string, Spec> c{
      {"separation",
       {"non-intersection of two walks and endpoint separation",
        {"d", "n", "samples", "swap-roles"},
        [](Cfg& g) {
          if (g.n.empty()) g.n = {16};
          if (!g.samples) g.samples = 10000;
        }}},
      {"lerw-length",
       {"steps of the loop-erased walk before leaving Q_N, with tails",
        {"d", "N", "lower", "upper", "samples"},
        [](Cfg& g) {
          if (!g.N) g.N = 8;
          if (g.lower.empty()) g.lower = {0.05, 0.1, 0.15, 0.2, 0.3, 0.4};
          if (g.upper.empty()) g.upper = {1, 2, 3, 4, 5, 6};
          if (!g.samples) g.samples = 10000;
        }}},
      {"two-point",
       {"P(r e1 in the component of 0) with a power-law fit",
        {"d", "N", "r", "samples"},
        [](Cfg& g) {
          if (!g.N) g.N = 16;
          if (g.r.empty()) g.r = {2, 4, 8};
          if (!g.samples) g.samples = 20000;
        }}},
      {"pair-length",
       {"walk from 0 hits x with loop erasure of at most n steps",
        {"d", "x", "n", "samples", "escape-factor"},
        [](Cfg& g) {
          if (g.x.empty()) g.x = {3};
          if (g.x.size() == 1) {
            const int a = g.x[0];
            g.x.assign(static_cast<std::size_t>(g.d), 0);
            g.x[0] = a;
          }
          if (g.n.empty()) {
            int lo = 0;
            for (int v : g.x) lo = std::max(lo, std::abs(v));
            for (std::int64_t v = std::max(1, lo); v <= (1 << 24); v *= 2) g.n.push_back(static_cast<int>(v));
          }
          if (!g.samples) g.samples = 200000;
        }}},
      {"ball",
       {"volume of the intrinsic ball of radius n",
        {"d", "n", "upper", "lower", "samples", "box-factor", "full-starts", "allow-large"},
        [](Cfg& g) {
          if (g.n.empty()) g.n = {4, 8, 16};
          if (g.upper.empty()) g.upper = {0.5, 1, 1.5, 2, 2.5, 3};
          if (g.lower.empty()) g.lower = {0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
          if (!g.samples) g.samples = 500;
        }}},
      {"box-volume",
       {"|Q_N intersected with the component of 0|, lower tail",
        {"d", "N", "lambda", "samples", "box-factor"},
        [](Cfg& g) {
          if (!g.N) g.N = 6;
          if (g.lambda.empty()) g.lambda = {2, 1, 0.5, 0.25, 0.125, 0.0625};
          if (!g.samples) g.samples = 2000;
        }}},
      {"shell",
       {"hits, capacity and good-shell statistics of the loop-erased walk",
        {"d", "n", "m", "N", "samples", "pilot", "nested", "override-regime"},
        [](Cfg& g) {
          if (g.n.empty()) g.n = {32};
          if (!g.m) g.m = 4;
          if (!g.N) g.N = 40;
          if (!g.samples) g.samples = 10000;
        }}},
      {"topologies",
       {"number of labelled branching trees for k = 1..K",
        {"k"},
        [](Cfg&) {}}},
      {"conv-bound",
       {"lattice sum of (1+|w|)^(2-d) exp(-c|w|^2/n), divided by n",
        {"d", "n", "c"},
        [](Cfg& g) {
          if (g.n.empty()) g.n = {100, 1000, 10000};
          if (g.c == 0.0) g.c = conv_bound_c(g.d);
        }}},
  };
  return c;
}

std::string est(const Estimate& e) {
  return format_real(e.value) + " [" + format_real(e.ci_lo) + ", " + format_real(e.ci_hi) + "]";
}

double memory_estimate_ball(int d, int n, int factor) {
  // Worst case: every vertex of Q_{factor n} revealed, about 64 bytes each in the hash maps.
  return std::pow(2.0 * factor * n + 1, d) * 64.0;
}

// Runs the experiment; returns the record and a one-line summary.
std::pair<Record, std::string> execute(const Cfg& g, const RunOpts& o) {
  const auto& e = g.experiment;
  auto single_n = [&]() {
    require(g.n.size() == 1, "this experiment takes a single --n");
    return g.n[0];
  };
  if (e == "separation") {
    const auto r = exp_separation(g.d, single_n(), g.samples, o, g.swap_roles);
    return {to_record(r, g.d, g.seed),
            "P(Z_n >= n/2 | F_n) = " + est(r.conditional) + ", acceptance " + format_real(r.acceptance.value)};
  }
  if (e == "lerw-length") {
    const auto r = exp_lerw_length(g.d, g.N, g.lower, g.upper, g.samples, o);
    return {to_record(r, g.d, g.seed), "E M_N / N^2 = " + est(r.mean_scaled)};
  }
  if (e == "two-point") {
    const auto r = exp_two_point(g.d, g.N, g.r, g.samples, o);
    std::string s;
    for (std::size_t j = 0; j < r.r.size(); ++j) s += "P(r=" + std::to_string(r.r[j]) + ") = " + est(r.p[j]) + "; ";
    if (r.fitted)
      s += "slope " + format_real(r.fit.slope) + " [" + format_real(r.fit.ci_lo) + ", " + format_real(r.fit.ci_hi) + "]";
    return {to_record(r, g.d, g.seed), s};
  }
  if (e == "pair-length") {
    require(static_cast<int>(g.x.size()) == g.d, "--x needs d coordinates or a single radius");
    Point x(g.d);
    for (int a = 0; a < g.d; ++a) x[a] = g.x[static_cast<std::size_t>(a)];
    std::vector<std::int64_t> grid(g.n.begin(), g.n.end());
    const auto r = exp_path_length_pair(x, grid, g.samples, o, g.escape_factor);
    return {to_record(r, g.seed), "plateau " + est(r.plateau) + " vs G(x)/G(0) = " + format_real(r.green_ratio)};
  }
  if (e == "ball") {
    for (int n : g.n)
      if (n > 16 && !g.allow_large) {
        std::fprintf(stderr, "n=%d needs up to %.3g GB; pass --allow-large to run it\n", n,
                     memory_estimate_ball(g.d, n, g.box_factor) / 1e9);
        fail(ErrorKind::invalid_argument, "ball radius above 16 without --allow-large");
      }
    BallOpts b;
    b.box_factor = g.box_factor;
    b.full_starts = g.full_starts;
    const auto r = exp_ball(g.d, g.n, g.upper, g.lower, g.samples, o, b);
    std::string s;
    for (const auto& x : r) s += "E|B(" + std::to_string(x.n) + ")|/n^2 = " + est(x.mean_scaled) + "; ";
    return {to_record(r, g.d, g.seed), s};
  }
  if (e == "box-volume") {
    const auto r = exp_box_volume(g.d, g.N, g.lambda, g.samples, o, g.box_factor);
    return {to_record(r, g.d, g.seed), "median vol / N^4 = " + format_real(r.median_scaled)};
  }
  if (e == "shell") {
    ShellGeometry sg;
    sg.dim = g.d;
    sg.n = single_n();
    sg.m = g.m;
    sg.N = g.N;
    sg.override_regime = g.override_regime;
    ShellOpts so;
    so.pilot = g.pilot;
    so.nested = static_cast<std::uint32_t>(g.nested);
    const auto r = exp_shell(sg, g.samples, o, so);
    return {to_record(r, g.seed), "E H/m^2 = " + est(r.hits_scaled) + ", P(G) = " + est(r.g_event)};
  }
  if (e == "topologies") {
    Record rec{"topologies", g.seed, {}, {}};
    std::string s;
    for (int k = 1; k <= g.k; ++k) {
      const auto ts = enumerate_topologies(k);
      Estimate x;
      x.value = x.ci_lo = x.ci_hi = static_cast<double>(ts.size());
      rec.rows.push_back({{{"k", std::to_string(k)}}, "count", x});
      s += std::to_string(ts.size()) + (k < g.k ? "," : "");
    }
    return {rec, "|T(k)| = " + s};
  }
  if (e == "conv-bound") {
    Record rec{"conv-bound", g.seed, {}, {}};
    std::string s;
    for (int n : g.n) {
      const long rad = conv_bound_min_radius(n, g.c);
      Estimate x;
      x.value = x.ci_lo = x.ci_hi = conv_bound_sum(g.d, n, rad, g.c) / n;
      rec.rows.push_back({{{"d", std::to_string(g.d)}, {"n", std::to_string(n)}}, "sum_over_n", x});
      rec.meta["truncation_radius"][std::to_string(n)] = rad;
      s += format_real(x.value) + " ";
    }
    rec.meta["c"] = g.c;
    return {rec, "sum/n = " + s};
  }
  fail(ErrorKind::internal, "unhandled experiment " + e);
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::invalid_argument:
    case ErrorKind::geometry:
      return kSchema;
    case ErrorKind::io:
      return kOutput;
    default:
      return kEstimator;
  }
}

fs::path csv_path(const fs::path& out, const Cfg& g) {
  return out / (g.experiment + "-s" + std::to_string(g.seed) + ".csv");
}

bool writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".usf-lab-probe";
  std::ofstream f(probe);
  if (!f) return false;
  f.close();
  fs::remove(probe, ec);
  return true;
}

json config_json(const Cfg& g) {
  const auto& keys = catalog().at(g.experiment).keys;
  json full = g, out = json::object();
  out["experiment"] = g.experiment;
  out["seed"] = g.seed;
  for (const auto& k : keys) {
    std::string field = k;
    for (auto& ch : field)
      if (ch == '-') ch = '_';
    out[field] = full[field];
  }
  return out;
}

int run_config(Cfg g, const fs::path& out, int replicas, bool serial, const fs::path* compare_to = nullptr) {
  if (!catalog().contains(g.experiment)) {
    std::cerr << "unknown experiment '" << g.experiment << "'; see usf-lab list\n";
    return kUnknown;
  }
  catalog().at(g.experiment).defaults(g);
  if (!writable(out)) {
    std::cerr << "output directory " << out << " is not writable\n";
    return kOutput;
  }
  if (replicas > 0) omp_set_num_threads(replicas);
  const RunOpts o{g.seed, serial ? Exec::serial : Exec::openmp};
  const auto t0 = std::chrono::steady_clock::now();
  std::pair<Record, std::string> res;
  try {
    res = execute(g, o);
  } catch (const Error& e) {
    std::cerr << g.experiment << ": " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << g.experiment << ": " << e.what() << '\n';
    return kEstimator;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path csv = csv_path(out, g);
  fs::path sidecar = csv;
  sidecar.replace_extension(".json");
  {
    std::ofstream f(csv);
    if (!f) return kOutput;
    write_csv(f, res.first);
    if (!f) return kOutput;
  }
  json side;
  side["code_version"] = kCodeVersion;
  side["config"] = config_json(g);
  side["replicas"] = replicas > 0 ? replicas : worker_count();
  side["exec"] = serial ? "serial" : "openmp";
  side["csv"] = csv.filename().string();
  side["meta"] = res.first.meta;
  side["wall_time_s"] = wall;
  {
    std::ofstream f(sidecar);
    if (!f) return kOutput;
    f << side.dump(2) << '\n';
  }
  std::cout << g.experiment << " (seed " << g.seed << "): " << res.second << " -> " << csv.string() << '\n';
  if (compare_to) {
    std::ifstream a(*compare_to, std::ios::binary), b(csv, std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    if (!a || sa.str() != sb.str()) {
      std::cout << "replay differs from " << compare_to->string() << '\n';
      return kVerify;
    }
    std::cout << "replay identical to " << compare_to->string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"usf-lab: experiments on uniform spanning forests and loop-erased walks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kCodeVersion);

  // run
  Cfg g;
  std::string out_dir = ".";
  int replicas = 0;
  bool serial = false;
  auto* run = app.add_subcommand("run", "run one experiment and write CSV + JSON sidecar");
  std::string config_path;
  auto* config_opt = run->add_option("--config", config_path, "flat key=value file; flags on the command line win")
                         ->check(CLI::ExistingFile);
  run->add_option("experiment", g.experiment, "experiment name (see list)")->required();
  std::map<std::string, CLI::Option*> opts;
  opts["d"] = run->add_option("--d", g.d, "lattice dimension");
  opts["n"] = run->add_option("--n", g.n, "radius, radius grid or length grid")->delimiter(',');
  opts["N"] = run->add_option("--N", g.N, "outer scale");
  opts["m"] = run->add_option("--m", g.m, "shell scale");
  opts["k"] = run->add_option("--k", g.k, "largest k for topologies");
  opts["r"] = run->add_option("--r", g.r, "distances for two-point")->delimiter(',');
  opts["x"] = run->add_option("--x", g.x, "target point, or a radius along e1")->delimiter(',');
  opts["lambda"] = run->add_option("--lambda", g.lambda, "lambda grid")->delimiter(',');
  opts["upper"] = run->add_option("--upper", g.upper, "upper-tail lambda grid")->delimiter(',');
  opts["lower"] = run->add_option("--lower", g.lower, "lower-tail lambda grid")->delimiter(',');
  opts["samples"] = run->add_option("--samples", g.samples, "outer samples");
  opts["pilot"] = run->add_option("--pilot", g.pilot, "pilot samples for fitted constants");
  opts["nested"] = run->add_option("--nested", g.nested, "inner walks per sample for nested estimates");
  opts["escape-factor"] = run->add_option("--escape-factor", g.escape_factor, "escape radius / |x|_inf");
  opts["box-factor"] = run->add_option("--box-factor", g.box_factor, "domain radius / scale");
  opts["c"] = run->add_option("--c", g.c, "Gaussian constant for conv-bound");
  opts["override-regime"] = run->add_flag("--override-regime", g.override_regime, "allow out-of-regime shells");
  opts["swap-roles"] = run->add_flag("--swap-roles", g.swap_roles, "exchange the two walks");
  opts["full-starts"] = run->add_flag("--full-starts", g.full_starts, "reveal all of Q_n for balls");
  opts["allow-large"] = run->add_flag("--allow-large", g.allow_large, "allow ball radius above 16");
  opts["seed"] = run->add_option("--seed", g.seed, "master seed");
  opts["out"] = run->add_option("--out", out_dir, "output directory");
  opts["replicas"] = run->add_option("--replicas", replicas, "worker threads (default: logical cores)");
  opts["serial"] = run->add_flag("--serial", serial, "serial reference path");
  const std::set<std::string> general{"seed", "out", "replicas", "serial"};

  // verify
  std::string level = "quick", only, csv_out;
  VerifyOpts vo;
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--only", only, "comma-separated ids, e.g. A1,A5,Q3");
  verify->add_option("--seed", vo.seed, "master seed");
  verify->add_option("--csv", csv_out, "write the report table here");
  verify->add_option("--replicas", replicas, "worker threads");

  // list
  auto* list = app.add_subcommand("list", "list experiments and verification items");

  // replay
  std::string sidecar_path;
  bool no_compare = false;
  auto* replay = app.add_subcommand("replay", "rerun an experiment from its JSON sidecar");
  replay->add_option("sidecar", sidecar_path, "sidecar written by run")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", out_dir, "output directory (default: a replay/ folder next to the sidecar)");
  replay->add_flag("--no-compare", no_compare, "skip the byte comparison with the original CSV");
  replay->add_option("--replicas", replicas, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*run && config_opt->count() > 0) {
    // Re-parse with the file's settings added for every option not given on the command line.
    std::ifstream f(config_path);
    std::vector<std::string> extra;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      const auto trim = [](std::string t) {
        const auto a = t.find_first_not_of(" \t\r"), b = t.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        std::cerr << config_path << ":" << lineno << ": expected key=value\n";
        return kSchema;
      }
      const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
      auto it = opts.find(key);
      if (it == opts.end()) {
        std::cerr << config_path << ":" << lineno << ": unknown key '" << key << "'\n";
        return kSchema;
      }
      if (it->second->count() > 0) continue;
      if (it->second->get_expected_min() == 0) {
        if (val == "1" || val == "true") extra.push_back("--" + key);
      } else {
        extra.push_back("--" + key);
        extra.push_back(val);
      }
    }
    std::vector<std::string> args(argv + 1, argv + argc);
    args.insert(args.end(), extra.begin(), extra.end());
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kSchema;
    }
  }

  if (*list) {
    std::cout << "experiments:\n";
    for (const auto& [name, s] : catalog()) {
      std::string keys;
      for (const auto& k : s.keys) keys += " --" + k;
      std::cout << "  " << name << ": " << s.summary << "\n      params:" << keys << '\n';
    }
    std::cout << "verification items:\n";
    for (const std::string id : {"Q1", "Q2", "Q3", "Q4", "Q5", "Q6"}) std::cout << "  " << id << ": " << criterion_name(id) << '\n';
    for (const auto& id : criterion_ids()) std::cout << "  " << id << ": " << criterion_name(id) << '\n';
    const char* cache = std::getenv("USF_LAB_CACHE");
    std::cout << "Green-function cache (USF_LAB_CACHE): " << (cache ? cache : "(unset, in-memory only)") << '\n';
    return kOk;
  }

  if (*run) {
    if (!catalog().contains(g.experiment)) {
      std::cerr << "unknown experiment '" << g.experiment << "'; see usf-lab list\n";
      return kUnknown;
    }
    const auto& keys = catalog().at(g.experiment).keys;
    for (const auto& [k, opt] : opts)
      if (opt->count() > 0 && !keys.contains(k) && !general.contains(k)) {
        std::cerr << g.experiment << " does not take --" << k << '\n';
        return kSchema;
      }
    return run_config(g, out_dir, replicas, serial);
  }

  if (*replay) {
    json side;
    try {
      std::ifstream f(sidecar_path);
      side = json::parse(f);
      g = side.at("config").get<Cfg>();
    } catch (const std::exception& e) {
      std::cerr << "replay: cannot read sidecar: " << e.what() << '\n';
      return kSchema;
    }
    const fs::path base = fs::path(sidecar_path).parent_path();
    const fs::path out = out_dir == "." && replay->get_option("--out")->count() == 0 ? base / "replay" : fs::path(out_dir);
    const fs::path original = base / side.value("csv", std::string());
    const bool ser = side.value("exec", std::string("openmp")) == "serial";
    return run_config(g, out, replicas, ser, no_compare ? nullptr : &original);
  }

  if (*verify) {
    if (replicas > 0) omp_set_num_threads(replicas);
    std::vector<Check> checks;
    if (only.empty()) {
      checks = verify_suite(level == "full" ? Level::full : Level::quick, vo);
      for (const auto& c : checks) std::cout << format_check(c) << '\n';
    } else {
      std::stringstream ss(only);
      std::string id;
      std::vector<std::string> ids;
      while (std::getline(ss, id, ',')) ids.push_back(id);
      std::vector<Check> quick;
      for (const auto& x : ids) {
        if (x.starts_with("Q")) {
          if (quick.empty()) quick = verify_quick(vo);
          bool found = false;
          for (const auto& c : quick)
            if (c.id == x) {
              checks.push_back(c);
              found = true;
            }
          if (!found) {
            std::cerr << "unknown verification item " << x << '\n';
            return kUnknown;
          }
        } else {
          const auto all = criterion_ids();
          if (std::find(all.begin(), all.end(), x) == all.end()) {
            std::cerr << "unknown verification item " << x << '\n';
            return kUnknown;
          }
          checks.push_back(run_criterion(x, vo));
        }
        std::cout << format_check(checks.back()) << '\n';
      }
    }
    if (!csv_out.empty()) {
      std::ofstream f(csv_out);
      if (!f) return kOutput;
      write_checks_csv(f, checks);
    }
    int failed = 0;
    for (const auto& c : checks) failed += c.pass ? 0 : 1;
    std::cout << (failed ? std::to_string(failed) + " item(s) failed" : "all items passed") << '\n';
    return failed ? kVerify : kOk;
  }
  return kUsage;
}
