#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "usf/oracle.hpp"
#include "usf/path.hpp"
#include "usf/replicas.hpp"

namespace usf {

struct Check {
  std::string id;
  std::string name;
  bool pass = false;
  std::string statistic;  // measured values, human readable
  double seconds = 0.0;
};

struct VerifyOpts {
  std::uint64_t seed = 20240611;
  Exec exec = Exec::openmp;
  Eraser eraser = loop_erase;  // swapped out by the mutation harness
};

enum class Level { quick, full };

/// Acceptance criteria at their documented scales, "A1" .. "A13".
std::vector<std::string> criterion_ids();
std::string criterion_name(const std::string& id);
Check run_criterion(const std::string& id, const VerifyOpts& o);

/// Individual criteria with their sample sizes exposed so tests can shrink them.
Check check_wilson_uniform(const VerifyOpts& o, std::uint64_t samples = 100000);
Check check_lerw_law(const VerifyOpts& o, std::uint64_t samples = 100000, double tv_max = 0.01);
Check check_domain_markov(const VerifyOpts& o, std::uint64_t samples = 1000000);
Check check_cycle_popping(const VerifyOpts& o, int systems = 100, int orders = 10);
Check check_boundary_harnack(const VerifyOpts& o, int sets_per_case = 200);
Check check_two_point(const VerifyOpts& o, std::uint64_t samples = 20000);
Check check_lerw_length(const VerifyOpts& o, std::uint64_t samples = 10000);
Check check_shell(const VerifyOpts& o, std::uint64_t samples = 10000, std::uint64_t pilot = 2000);
Check check_pair_length(const VerifyOpts& o, std::uint64_t samples_near = 200000, std::uint64_t samples_far = 400000);
Check check_ball(const VerifyOpts& o, std::uint64_t samples = 2000);
Check check_box_volume(const VerifyOpts& o, std::uint64_t samples = 2000);
Check check_combinatorics(const VerifyOpts& o);
Check check_capacity(const VerifyOpts& o, std::uint64_t escape_walks = 100000, int random_sets = 100);

/// Quick items: erasure properties, tree counts, exact LERW law,
/// domain Markov at reduced size, cycle popping, Harnack battery.
std::vector<Check> verify_quick(const VerifyOpts& o);
/// Quick items, then every acceptance criterion.
std::vector<Check> verify_suite(Level level, const VerifyOpts& o);

/// Expected total variation between an n-sample empirical law and the exact
/// law p when sampling from p itself.
double null_expected_tv(const std::vector<double>& p, std::uint64_t n);

std::string format_check(const Check& c);
void write_checks_csv(std::ostream& os, const std::vector<Check>& cs);

}  // namespace usf
