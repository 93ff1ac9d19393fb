// Runs every acceptance criterion at full scale and prints one line per
// criterion so the log shows exactly which passed.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "psbeatty/acceptance.hpp"

TEST_CASE("acceptance criteria at full scale", "[acceptance]") {
  bool all = true;
  for (const auto& entry : psb::acceptance_criteria()) {
    psb::CriterionResult r = entry.fn(psb::SuiteScale::Full, 0);
    std::printf("[%s] %2d %-24s %8.0f ms  %s\n", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.elapsed_ms, r.details.c_str());
    std::fflush(stdout);
    INFO("criterion " << r.id << " (" << r.name << "): " << r.details);
    CHECK(r.pass);
    CHECK(r.id == entry.id);
    CHECK(r.name == entry.name);
    all = all && r.pass;
  }
  REQUIRE(all);
}
