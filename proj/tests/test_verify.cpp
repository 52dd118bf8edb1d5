#include "doctest.h"

#include <algorithm>

#include "usf/verify.hpp"

using namespace usf;

namespace {
// Loop erasure whose index is never cleaned after a loop is cut.
Path stale_erase(const Path& g) {
  absl::flat_hash_map<Key, std::size_t> index;
  std::vector<Key> out;
  for (Key x : g.v) {
    auto it = index.find(x);
    if (it != index.end() && it->second < out.size()) {
      out.resize(it->second + 1);
      continue;
    }
    index[x] = out.size();
    out.push_back(x);
  }
  return Path(g.dim, out);
}

bool failed(const std::vector<Check>& cs, const std::string& id) {
  return std::any_of(cs.begin(), cs.end(), [&](const Check& c) { return c.id == id && !c.pass; });
}
}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("quick suite passes") {
    const auto cs = verify_quick(VerifyOpts{});
    CHECK(cs.size() == 6);
    for (const auto& c : cs) CHECK_MESSAGE(c.pass, format_check(c));
  }

  TEST_CASE("a broken eraser is caught") {
    VerifyOpts o;
    o.eraser = stale_erase;
    const auto cs = verify_quick(o);
    CHECK((failed(cs, "Q1") || failed(cs, "Q3")));
  }

  TEST_CASE("null total variation grows as samples shrink") {
    const std::vector<double> p{0.5, 0.25, 0.25};
    CHECK(null_expected_tv(p, 100) > null_expected_tv(p, 10000));
    CHECK(null_expected_tv(p, 10000) < 0.01);
  }

  TEST_CASE("criterion catalogue") {
    const auto ids = criterion_ids();
    CHECK(ids.size() == 13);
    CHECK(ids.front() == "A1");
    for (const auto& id : ids) CHECK_FALSE(criterion_name(id).empty());
    CHECK_THROWS(run_criterion("A99", VerifyOpts{}));
  }
}
