// End-to-end runs of the psb binary: exit codes, report shapes, config
// expansion, and cross-thread payload identity.
//
// The binary path arrives in PSB_BIN (set by the build); each case shells
// out and inspects stdout plus the exit code.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "json.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const char* bin = std::getenv("PSB_BIN");
  if (!bin) throw std::runtime_error("PSB_BIN not set");
  std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) throw std::runtime_error("popen failed");
  RunResult r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string first_line(const std::string& s) {
  return s.substr(0, s.find('\n'));
}

// timings vary run to run; everything else must be identical
void strip_elapsed(json& j) {
  if (j.is_object()) {
    j.erase("elapsed_ms");
    for (auto& [k, v] : j.items()) strip_elapsed(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_elapsed(v);
  }
}

}  // namespace

TEST_CASE("pinned invocation examples", "[cli]") {
  RunResult r = run(
      "count intersection --alpha sqrt2 --beta rat:0/1 --c 3/2 --x 100 "
      "--format json");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["count"] == 6);
  REQUIRE(j["kind"] == "intersection");
  REQUIRE(j["params"]["alpha"] == "surd:(0+1*sqrt(2))/1");
  REQUIRE(j["schema_version"] == "1");

  REQUIRE(run("verify vaughan --max 1000 --U 5 --V 10").code == 0);
  REQUIRE(run("count ps --c 5 --x 100").code == 2);
}

TEST_CASE("sequence listings", "[cli]") {
  RunResult r = run("seq beatty --terms 10");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["values"] == json::array({1, 2, 4, 5, 7, 8, 9, 11, 12, 14}));
  REQUIRE(j["mode"] == "terms");

  json ps = json::parse(run("seq ps --c 3/2 --terms 5").out);
  REQUIRE(ps["values"] == json::array({1, 2, 5, 8, 11}));

  // members mode: every intersection member is in both listings
  json both =
      json::parse(run("seq intersection --alpha sqrt2 --c 3/2 --max 100").out);
  json bea = json::parse(run("seq beatty --alpha sqrt2 --max 100").out);
  json psm = json::parse(run("seq ps --c 3/2 --max 100").out);
  REQUIRE(both["count"].get<size_t>() > 0);
  for (const auto& v : both["values"]) {
    REQUIRE(std::find(bea["values"].begin(), bea["values"].end(), v) !=
            bea["values"].end());
    REQUIRE(std::find(psm["values"].begin(), psm["values"].end(), v) !=
            psm["values"].end());
  }

  RunResult csv = run("--format csv seq beatty --terms 3");
  REQUIRE(csv.code == 0);
  REQUIRE(csv.out == "n,term\n1,1\n2,2\n3,4\n");

  REQUIRE(run("seq beatty").code == 2);                 // no --terms / --max
  REQUIRE(run("seq beatty --terms 5 --max 9").code == 2);  // both
}

TEST_CASE("csv projections carry fixed headers", "[cli]") {
  struct {
    const char* args;
    const char* header;
  } rows[] = {
      {"--format csv count ps --c 3/2 --x 100",
       "kind,x,count,main_term,ratio,error_budget"},
      {"--format csv verify vaaler --H 10 --grid 1000",
       "check,metric,value,threshold,pass"},
      {"--format csv harmonic vaaler --H 5", "k,re,im,bound"},
      {"--format csv harmonic vinogradov --a 0.3 --delta 0.02 --K 60",
       "k,re,im,bound"},
      {"--format csv vaughan terms --n 97 --U 5 --V 10",
       "n,t1,t2,t3,lambda,residual"},
      {"--format csv vaughan split --N 1000 --k 1 --h 1", "label,re,im,terms"},
      {"--format csv expsum eval --phase linear --theta rat:1/3 --lo 0 --hi 9",
       "re,im,terms"},
      {"--format csv expsum vdc --phase quadratic --theta rat:3/1000 --N 1000",
       "param,measured,bound,ratio"},
      {"--format csv expsum twisted --q 1 --a 0 --k 1 --M 1000",
       "M,abs,exponent,terms"},
      {"--format csv discrepancy exact --theta sqrt2 --M 100",
       "m,deviation,lower,upper"},
      {"--format csv discrepancy profile --theta golden --M 100 --M 1000",
       "m,lower,upper,ref_inv_tau,d_m_tau,d_m_over_log"},
  };
  for (auto& rw : rows) {
    RunResult r = run(rw.args);
    INFO(rw.args);
    REQUIRE(r.code == 0);
    REQUIRE(first_line(r.out) == rw.header);
  }

  RunResult suite = run("--format csv suite --scale ci --criteria 3");
  REQUIRE(suite.code == 0);
  REQUIRE(first_line(suite.out) == "id,name,pass,elapsed_ms");
  REQUIRE(suite.out.find("3,desk-counts,true") != std::string::npos);
}

TEST_CASE("config file expansion", "[cli]") {
  std::string dir = "/tmp/psb_cli_test";
  std::system(("mkdir -p " + dir).c_str());

  {
    std::ofstream f(dir + "/seq.cfg");
    f << "# fixture config\n"
      << "format = csv\n"
      << "terms = 5\n"
      << "alpha = golden\n";
  }
  RunResult via_cfg = run("seq beatty --config " + dir + "/seq.cfg");
  RunResult direct = run("--format csv seq beatty --terms 5 --alpha golden");
  REQUIRE(via_cfg.code == 0);
  REQUIRE(via_cfg.out == direct.out);

  // a key the parser does not know is a usage error
  {
    std::ofstream f(dir + "/bad.cfg");
    f << "bogus = 1\n";
  }
  REQUIRE(run("seq beatty --terms 3 --config " + dir + "/bad.cfg").code == 2);
  REQUIRE(run("seq beatty --terms 3 --config " + dir + "/missing.cfg").code ==
          2);
  {
    std::ofstream f(dir + "/dup.cfg");
    f << "config = " << dir << "/seq.cfg\n";
  }
  REQUIRE(run("seq beatty --config " + dir + "/dup.cfg").code == 2);
}

TEST_CASE("exit code contract", "[cli]") {
  REQUIRE(run("--version").code == 0);
  REQUIRE(first_line(run("--version").out) == "1.0.0");
  REQUIRE(run("--help").code == 0);
  REQUIRE(run("count --help").code == 0);
  REQUIRE(run("").code == 2);             // subcommand required
  REQUIRE(run("frobnicate").code == 2);   // unknown subcommand
  REQUIRE(run("count ps --c 3/2").code == 2);  // missing required --x
  REQUIRE(run("--format xml seq beatty --terms 1").code == 2);
  REQUIRE(run("--threads 1000 seq beatty --terms 1").code == 2);
  REQUIRE(run("seq beatty --terms 2000000").code == 2);  // over term cap
  REQUIRE(run("seq beatty --alpha rat:1/2 --terms 1").code == 2);  // alpha <= 1

  // certified arithmetic that cannot decide a floor exits 3
  REQUIRE(run("seq beatty --alpha 'cf:[1;2,2]' --terms 5").code == 3);
  REQUIRE(run("discrepancy profile --theta "
              "dec:3.141592653589793238462643383279@30 --M 1000")
              .code == 3);
}

TEST_CASE("verify family passes on healthy inputs", "[cli]") {
  const char* ok[] = {
      "verify vaughan --max 500 --U 5 --V 10",
      "verify vaaler --H 50 --grid 2000",
      "verify vinogradov --a 0.3 --delta 0.02 --K 200 --grid 2000",
      "verify bilinear --N 1000 --k 2 --h 1",
      "verify discrepancy --theta sqrt2 --M 512",
  };
  for (const char* args : ok) {
    RunResult r = run(args);
    INFO(args);
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["pass"] == true);
  }
}

TEST_CASE("payloads are identical across thread counts", "[cli]") {
  std::string base =
      "count intersection --alpha sqrt2 --beta rat:3/10 --c 21/20 --x 100000";
  RunResult t1 = run("--threads 1 " + base);
  RunResult t8 = run("--threads 8 " + base);
  REQUIRE(t1.code == 0);
  REQUIRE(t8.code == 0);
  json a = json::parse(t1.out), b = json::parse(t8.out);
  strip_elapsed(a);
  strip_elapsed(b);
  REQUIRE(a == b);

  // PSB_THREADS only changes the default; results stay the same
  const char* bin = std::getenv("PSB_BIN");
  REQUIRE(bin != nullptr);
  std::string cmd = std::string("PSB_THREADS=8 ") + bin + " " + base +
                    " 2>/dev/null > /tmp/psb_cli_test/env8.json";
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::ifstream f("/tmp/psb_cli_test/env8.json");
  json c = json::parse(f);
  strip_elapsed(c);
  REQUIRE(a == c);

  RunResult s1 = run("--threads 1 expsum type2 --N 10000 --m 1 --h 1 --d 12 "
                     "--coeff-k mobius --coeff-l lambda-norm");
  RunResult s8 = run("--threads 8 expsum type2 --N 10000 --m 1 --h 1 --d 12 "
                     "--coeff-k mobius --coeff-l lambda-norm");
  json x = json::parse(s1.out), y = json::parse(s8.out);
  strip_elapsed(x);
  strip_elapsed(y);
  REQUIRE(x == y);
}
