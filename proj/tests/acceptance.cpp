// Acceptance runner: one line per criterion, nonzero exit if any fails.
//   usf_acceptance            all of A1..A13
//   usf_acceptance A3 A5      selected criteria

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "usf/verify.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> ids(argv + 1, argv + argc);
  if (ids.empty()) ids = usf::criterion_ids();
  usf::VerifyOpts o;
  if (const char* s = std::getenv("USF_SEED")) o.seed = std::strtoull(s, nullptr, 10);
  int failed = 0;
  for (const auto& id : ids) {
    usf::Check c;
    try {
      c = usf::run_criterion(id, o);
    } catch (const std::exception& e) {
      c.id = id;
      c.name = "error";
      c.statistic = e.what();
    }
    std::cout << usf::format_check(c) << std::endl;
    failed += !c.pass;
  }
  return failed ? 1 : 0;
}
