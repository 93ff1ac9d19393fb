#pragma once
// Shipped acceptance battery: twelve end-to-end checks, one callable per
// criterion, shared by the acceptance test binary and the `suite`
// subcommand. Every check returns a pass flag plus a one-line measurement
// summary; nothing here is allowed to consult ambient state.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "counting.hpp"
#include "discrepancy.hpp"
#include "expsums.hpp"
#include "harmonic.hpp"
#include "sequences.hpp"
#include "sieve.hpp"
#include "vaughan.hpp"
#include "version.hpp"

namespace psb {

enum class SuiteScale { Full, Ci };

inline const char* to_string(SuiteScale s) {
  return s == SuiteScale::Full ? "full" : "ci";
}

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double elapsed_ms = 0.0;

  json to_json() const {
    return json{{"id", id},
                {"name", name},
                {"pass", pass},
                {"details", details},
                {"elapsed_ms", elapsed_ms}};
  }
};

namespace detail {

inline std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

/// Fails the criterion when a full-scale run exceeds its stated wall-clock
/// budget; ci runs only report the time.
inline void apply_budget(CriterionResult& r, SuiteScale scale,
                         double budget_ms) {
  if (scale == SuiteScale::Full && r.elapsed_ms > budget_ms) {
    r.pass = false;
    r.details += strf(" [over %.0fs budget]", budget_ms / 1000.0);
  }
}

inline BeattyParams beatty_sqrt2_03() {
  return BeattyParams(RealSpec::parse("sqrt2"),
                      RealSpec::rational(mpq_class(3, 10)));
}

}  // namespace detail

/// 1. Beatty membership lemma vs brute-force image of n -> floor(alpha n +
/// beta) for three parameter pairs.
inline CriterionResult acceptance_beatty_oracle(SuiteScale scale,
                                                int threads = 0) {
  detail::Stopwatch sw;
  const uint64_t M = scale == SuiteScale::Full ? 100000 : 20000;
  const std::array<BeattyParams, 3> cases = {
      BeattyParams(RealSpec::parse("sqrt2"), RealSpec::rational(mpq_class(0))),
      BeattyParams(RealSpec::parse("golden"),
                   RealSpec::rational(mpq_class(1, 2))),
      BeattyParams(RealSpec::quadratic(0, 1, 1, 3),
                   RealSpec::rational(mpq_class(-7, 10)))};

  uint64_t checked = 0;
  bool ok = true;
  std::string bad;
  for (const auto& B : cases) {
    std::vector<uint8_t> image(M + 1, 0);
    for (uint64_t n = 1;; ++n) {
      mpz_class v = beatty_term(B, n);
      if (v > M) break;
      if (v >= 1) image[mpz_get_ui(v.get_mpz_t())] = 1;
    }
    const uint64_t chunk = 4096;
    const uint64_t nblocks = (M + chunk - 1) / chunk;
    uint64_t mism = parallel_blocks<uint64_t>(
        nblocks, uint64_t(0),
        [&](uint64_t blk) {
          uint64_t lo = blk * chunk + 1, hi = std::min(M, blk * chunk + chunk);
          for (uint64_t m = lo; m <= hi; ++m)
            if (beatty_contains(B, m) != image[m]) return m;
          return uint64_t(0);
        },
        [](uint64_t a, uint64_t b) { return a ? a : b; }, threads);
    if (mism) {
      ok = false;
      bad = detail::strf("alpha=%s: mismatch at m=%llu",
                         B.alpha_spec().str().c_str(),
                         (unsigned long long)mism);
      break;
    }
    checked += M;
  }

  CriterionResult r;
  r.id = 1;
  r.name = "beatty-oracle";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details = ok ? detail::strf("3 parameter pairs, m <= %llu, %llu "
                                "memberships agree exactly",
                                (unsigned long long)M,
                                (unsigned long long)checked)
                 : bad;
  detail::apply_budget(r, scale, 10000);
  return r;
}

/// 2. PS indicator vs brute-force term set for three exponents.
inline CriterionResult acceptance_ps_oracle(SuiteScale scale,
                                            int threads = 0) {
  detail::Stopwatch sw;
  const uint64_t M = scale == SuiteScale::Full ? 1000000 : 100000;
  const std::array<PSParams, 3> cases = {PSParams(3, 2), PSParams(21, 20),
                                         PSParams(13, 12)};

  bool ok = true;
  std::string bad;
  for (const auto& P : cases) {
    std::vector<uint8_t> image(M + 1, 0);
    uint64_t n_max = detail::last_ps_index_within(P, M);
    const uint64_t chunk = 8192;
    const uint64_t nblocks = (n_max + chunk - 1) / chunk;
    parallel_blocks<int>(
        nblocks, 0,
        [&](uint64_t blk) {
          uint64_t lo = blk * chunk + 1,
                   hi = std::min(n_max, blk * chunk + chunk);
          for (uint64_t n = lo; n <= hi; ++n) {
            mpz_class v = ps_term(P, n);
            if (v >= 1 && v <= M) image[mpz_get_ui(v.get_mpz_t())] = 1;
          }
          return 0;
        },
        [](int a, int) { return a; }, threads);
    const uint64_t mblocks = (M + chunk - 1) / chunk;
    uint64_t mism = parallel_blocks<uint64_t>(
        mblocks, uint64_t(0),
        [&](uint64_t blk) {
          uint64_t lo = blk * chunk + 1, hi = std::min(M, blk * chunk + chunk);
          for (uint64_t m = lo; m <= hi; ++m)
            if (ps_indicator(P, m) != image[m]) return m;
          return uint64_t(0);
        },
        [](uint64_t a, uint64_t b) { return a ? a : b; }, threads);
    if (mism) {
      ok = false;
      bad = detail::strf("c=%s: mismatch at m=%llu", P.str().c_str(),
                         (unsigned long long)mism);
      break;
    }
  }

  CriterionResult r;
  r.id = 2;
  r.name = "ps-oracle";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details = ok ? detail::strf(
                       "c in {3/2, 21/20, 13/12}, indicator equals term set "
                       "for all m <= %llu",
                       (unsigned long long)M)
                 : bad;
  detail::apply_budget(r, scale, 30000);
  return r;
}

/// 3. Desk-scale fixture counts, frozen from independent enumeration.
inline CriterionResult acceptance_desk_counts(SuiteScale scale,
                                              int threads = 0) {
  detail::Stopwatch sw;
  CountOptions opt;
  opt.threads = threads;
  BeattyParams B(RealSpec::parse("sqrt2"), RealSpec::rational(mpq_class(0)));
  PSParams P(3, 2);

  uint64_t got_ps = count_ps_primes(P, 100, opt).count;
  uint64_t got_b = count_beatty_primes(B, 100, opt).count;
  uint64_t got_i = count_intersection(B, P, 100, opt).count;
  uint64_t got_ap = count_ps_in_ap(P, 4, 1, 100, opt).count;

  bool ok = got_ps == 6 && got_b == 17 && got_i == 6 && got_ap == 3;
  CriterionResult r;
  r.id = 3;
  r.name = "desk-counts";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details = detail::strf(
      "ps=%llu (want 6), beatty=%llu (want 17), intersection=%llu (want 6), "
      "ap=%llu (want 3)",
      (unsigned long long)got_ps, (unsigned long long)got_b,
      (unsigned long long)got_i, (unsigned long long)got_ap);
  detail::apply_budget(r, scale, 10000);
  return r;
}

namespace detail {

/// Shared trend check for criteria 4 and 5: ratio near 1 at the top scale,
/// no worse than at the bottom scale, and count within 5 error budgets
/// everywhere.
inline CriterionResult count_trend(int id, const char* name,
                                   const BeattyParams* B, const PSParams& P,
                                   double ratio_tol, SuiteScale scale,
                                   int threads) {
  Stopwatch sw;
  std::vector<uint64_t> xs = scale == SuiteScale::Full
                                 ? std::vector<uint64_t>{100000, 1000000,
                                                         10000000}
                                 : std::vector<uint64_t>{10000, 100000,
                                                         1000000};
  CountOptions opt;
  opt.threads = threads;
  std::vector<CountReport> reps;
  for (uint64_t x : xs)
    reps.push_back(B ? count_intersection(*B, P, x, opt)
                     : count_ps_primes(P, x, opt));

  double dev_top = std::fabs(reps.back().ratio - 1.0);
  double dev_bot = std::fabs(reps.front().ratio - 1.0);
  double worst_budget = 0.0;
  for (const auto& rep : reps) {
    double excess = std::fabs(static_cast<double>(rep.count) - rep.main_term) /
                    rep.error_budget;
    worst_budget = std::max(worst_budget, excess);
  }
  bool ok = dev_top <= ratio_tol && dev_top <= dev_bot && worst_budget <= 5.0;

  CriterionResult r;
  r.id = id;
  r.name = name;
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details = strf(
      "|ratio(%.0e)-1| = %.4f (tol %.2f); trend %.4f <= %.4f; worst "
      "|count-main|/budget = %.3f (tol 5)",
      static_cast<double>(xs.back()), dev_top, ratio_tol, dev_top, dev_bot,
      worst_budget);
  return r;
}

}  // namespace detail

/// 4. Intersection counting vs its main term for (sqrt2, 0.3, 21/20).
inline CriterionResult acceptance_intersection_trend(SuiteScale scale,
                                                     int threads = 0) {
  BeattyParams B = detail::beatty_sqrt2_03();
  PSParams P(21, 20);
  CriterionResult r = detail::count_trend(4, "intersection-trend", &B, P, 0.2,
                                          scale, threads);
  detail::apply_budget(r, scale, 300000);
  return r;
}

/// 5. Pure PS prime counting vs its main term for c = 21/20.
inline CriterionResult acceptance_ps_trend(SuiteScale scale,
                                           int threads = 0) {
  PSParams P(21, 20);
  CriterionResult r =
      detail::count_trend(5, "ps-trend", nullptr, P, 0.15, scale, threads);
  detail::apply_budget(r, scale, 300000);
  return r;
}

/// 6. Vaughan identity residual over every n in (U, max] for three (U, V)
/// settings; the combination must also match Lambda structurally.
inline CriterionResult acceptance_vaughan_identity(SuiteScale scale,
                                                   int threads = 0) {
  detail::Stopwatch sw;
  const uint64_t n_max = scale == SuiteScale::Full ? 100000 : 20000;
  const std::array<std::pair<double, double>, 3> settings = {
      {{2.0, 2.0}, {5.0, 10.0}, {31.0, 17.0}}};

  struct Acc {
    double worst = 0.0;
    bool exact = true;
    uint64_t bad_n = 0;
  };
  double worst = 0.0;
  bool all_exact = true;
  uint64_t bad_n = 0;
  for (auto [U, V] : settings) {
    uint64_t lo = static_cast<uint64_t>(U);
    const uint64_t chunk = 2048;
    const uint64_t span = n_max - lo;
    const uint64_t nblocks = (span + chunk - 1) / chunk;
    Acc acc = parallel_blocks<Acc>(
        nblocks, Acc{},
        [&](uint64_t blk) {
          Acc a;
          uint64_t b0 = lo + blk * chunk + 1,
                   b1 = std::min(n_max, lo + (blk + 1) * chunk);
          for (uint64_t n = b0; n <= b1; ++n) {
            VaughanTerms t = vaughan_terms(n, U, V);
            double res = std::fabs(t.t1 + t.t2 + t.t3 - t.lambda);
            if (res > a.worst) a.worst = res;
            if (!t.exact_match && a.exact) {
              a.exact = false;
              a.bad_n = n;
            }
          }
          return a;
        },
        [](Acc a, const Acc& b) {
          a.worst = std::max(a.worst, b.worst);
          if (!b.exact && a.exact) {
            a.exact = false;
            a.bad_n = b.bad_n;
          }
          return a;
        },
        threads);
    worst = std::max(worst, acc.worst);
    if (!acc.exact && all_exact) {
      all_exact = false;
      bad_n = acc.bad_n;
    }
  }

  bool ok = worst <= 1e-10 && all_exact;
  CriterionResult r;
  r.id = 6;
  r.name = "vaughan-identity";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details =
      all_exact
          ? detail::strf("worst |T1+T2+T3 - Lambda| = %.3e over n <= %llu, 3 "
                         "(U,V) settings; all structurally exact",
                         worst, (unsigned long long)n_max)
          : detail::strf("structural mismatch at n=%llu",
                         (unsigned long long)bad_n);
  detail::apply_budget(r, scale, 60000);
  return r;
}

/// 7. Vaaler majorant inequality on half-step grids; sup-norm error must
/// shrink as H grows.
inline CriterionResult acceptance_vaaler_majorant(SuiteScale scale,
                                                  int threads = 0) {
  detail::Stopwatch sw;
  const uint64_t grid = scale == SuiteScale::Full ? 10000 : 2000;
  std::vector<long> Hs = scale == SuiteScale::Full
                             ? std::vector<long>{10, 100, 1000}
                             : std::vector<long>{10, 100};
  bool ok = true;
  double worst_violation = -1.0;
  std::vector<double> sups;
  for (long H : Hs) {
    MajorantCheck mc = majorant_check(vaaler_approx(H), grid, threads);
    worst_violation = std::max(worst_violation, mc.max_violation);
    sups.push_back(mc.sup_error);
    if (mc.max_violation > 1e-12) ok = false;
  }
  for (size_t i = 1; i < sups.size(); ++i)
    if (!(sups[i] < sups[i - 1])) ok = false;

  CriterionResult r;
  r.id = 7;
  r.name = "vaaler-majorant";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  std::string sup_txt;
  for (double s : sups) sup_txt += detail::strf(" %.5f", s);
  r.details = detail::strf(
      "max violation %.3e (tol 1e-12); sup errors%s decreasing",
      worst_violation, sup_txt.c_str());
  detail::apply_budget(r, scale, 10000);
  return r;
}

/// 8. Vinogradov indicator: exact g(0), certified coefficient bound, and
/// lemma properties (ii)/(iii) within the truncation budget 8/(pi^2 K Delta).
inline CriterionResult acceptance_vinogradov(SuiteScale scale,
                                             int /*threads*/ = 0) {
  detail::Stopwatch sw;
  struct Inst {
    double a, delta;
    long K;
  };
  const std::array<Inst, 4> instances = {{{1.0 / std::sqrt(2.0), 0.05, 100},
                                          {0.3, 0.02, 200},
                                          {0.5, 0.1, 16},
                                          {0.123, 1.0 / 64.0, 256}}};
  const uint64_t grid = scale == SuiteScale::Full ? 10000 : 2000;

  bool ok = true;
  std::string fail;
  double worst2 = 0.0, worst3 = 0.0;
  for (const auto& inst : instances) {
    TrigPolynomial T = vinogradov_indicator(inst.a, inst.delta, inst.K);
    if (T.g[0].real() != inst.a || T.g[0].imag() != 0.0) {
      ok = false;
      fail = detail::strf("g(0) != a for a=%.6f", inst.a);
      break;
    }
    for (long k = 1; k <= inst.K; ++k) {
      double cap = std::min(1.0 / (kPi * k),
                            4.0 / (kPi * kPi * k * double(k) * inst.delta));
      if (std::abs(T.g[static_cast<size_t>(k)]) > cap * (1.0 + 1e-12)) {
        ok = false;
        fail = detail::strf("coefficient bound broken at k=%ld (a=%.4f)", k,
                            inst.a);
        break;
      }
    }
    if (!ok) break;
    double tail = vinogradov_tail(inst.delta, inst.K);
    for (uint64_t j = 0; j < grid; ++j) {
      double t = (static_cast<double>(j) + 0.5) / static_cast<double>(grid);
      double v = trig_eval(T, t);
      double e2 = std::max(-v, v - 1.0);  // distance outside [0, 1]
      worst2 = std::max(worst2, e2);
      if (e2 > tail) {
        ok = false;
        fail = detail::strf("(ii) broken at t=%.6f: %.4e > %.4e", t, e2, tail);
        break;
      }
      double x = -1.0;  // exact indicator where t is collar-free
      if (t >= inst.delta + 1e-9 && t <= inst.a - inst.delta - 1e-9)
        x = 1.0;
      else if (t >= inst.a + inst.delta + 1e-9 && t <= 1.0 - inst.delta - 1e-9)
        x = 0.0;
      if (x >= 0.0) {
        double e3 = std::fabs(v - x);
        worst3 = std::max(worst3, e3);
        if (e3 > tail) {
          ok = false;
          fail = detail::strf("(iii) broken at t=%.6f: %.4e > %.4e", t, e3,
                              tail);
          break;
        }
      }
    }
    if (!ok) break;
  }

  CriterionResult r;
  r.id = 8;
  r.name = "vinogradov-indicator";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details = ok ? detail::strf(
                       "4 instances: g(0) exact, coefficient bound certified, "
                       "(ii) worst %.3e and (iii) worst %.3e within budget",
                       worst2, worst3)
                 : fail;
  detail::apply_budget(r, scale, 10000);
  return r;
}

/// 9. Exact discrepancy sits inside the [D*, 2 D*] bracket on small point
/// sets, and the golden-ratio bound stays under 3 log M / M.
inline CriterionResult acceptance_discrepancy(SuiteScale scale,
                                              int /*threads*/ = 0) {
  detail::Stopwatch sw;
  const std::array<RealSpec, 3> thetas = {RealSpec::parse("sqrt2"),
                                          RealSpec::parse("golden"),
                                          RealSpec::quadratic(0, 1, 1, 3)};
  const std::array<mpq_class, 2> mus = {mpq_class(0), mpq_class(1, 5)};
  std::vector<uint64_t> Ms = scale == SuiteScale::Full
                                 ? std::vector<uint64_t>{64, 512, 4096}
                                 : std::vector<uint64_t>{64, 512};

  bool ok = true;
  std::string fail;
  uint64_t sets = 0;
  for (const auto& th : thetas) {
    for (const auto& mu : mus) {
      std::vector<double> pts =
          weyl_points(th, RealSpec::rational(mu), Ms.back());
      for (uint64_t M : Ms) {
        std::vector<double> prefix(pts.begin(), pts.begin() + M);
        DiscrepancyResult ex = discrepancy_exact(prefix);
        RatInterval b = discrepancy_bounds(prefix);
        ++sets;
        if (ex.deviation < b.lo || ex.deviation > b.hi) {
          ok = false;
          fail = detail::strf("containment broken (theta=%s, M=%llu)",
                              th.str().c_str(), (unsigned long long)M);
        }
      }
      if (!ok) break;
    }
    if (!ok) break;
  }

  double worst_ratio = 0.0;
  if (ok) {
    std::vector<uint64_t> profile_ms =
        scale == SuiteScale::Full
            ? std::vector<uint64_t>{1000, 10000, 100000, 1000000}
            : std::vector<uint64_t>{1000, 10000, 100000};
    DiscrepancyProfile prof = discrepancy_profile(
        RealSpec::parse("golden"), RealSpec::rational(mpq_class(0)),
        profile_ms);
    for (const auto& row : prof.rows)
      worst_ratio = std::max(worst_ratio, row.d_times_m_over_log);
    if (worst_ratio > 3.0) {
      ok = false;
      fail = detail::strf("golden D-bound * M / log M = %.3f > 3",
                          worst_ratio);
    }
  }

  CriterionResult r;
  r.id = 9;
  r.name = "discrepancy";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details = ok ? detail::strf("%llu point sets contained in [D*, 2D*]; "
                                "golden upper*M/logM max %.3f <= 3",
                                (unsigned long long)sets, worst_ratio)
                 : fail;
  detail::apply_budget(r, scale, 60000);
  return r;
}

/// 10. Bound-ratio dashboards: every checker stays under the calibration
/// ceiling across the standard sweep; the twisted exponent decays.
inline CriterionResult acceptance_dashboards(SuiteScale scale,
                                             int threads = 0) {
  detail::Stopwatch sw;
  std::vector<uint64_t> Ns = scale == SuiteScale::Full
                                 ? std::vector<uint64_t>{1000, 10000, 100000,
                                                         1000000}
                                 : std::vector<uint64_t>{1000, 10000, 100000};
  const RealSpec sqrt2 = RealSpec::parse("sqrt2");
  const RealSpec th_quad = RealSpec::quadratic(0, 1, 1000, 2);

  double worst = 0.0;
  std::string worst_tag = "none";
  auto track = [&](const BoundRatio& br, const char* tag, uint64_t N) {
    if (br.ratio > worst) {
      worst = br.ratio;
      worst_tag = detail::strf("%s@N=%llu", tag, (unsigned long long)N);
    }
  };

  for (uint64_t N : Ns) {
    track(vdc_ratio(ExpSumSpec::quadratic(th_quad, 0, 1), N, threads),
          "vdc-quad", N);
    track(vdc_ratio(ExpSumSpec::power(1, 2, 3, 0, 1), N, threads),
          "vdc-power", N);
  }
  for (uint64_t N : Ns) {
    if (N < 10000) continue;  // bilinear rectangles need room
    uint64_t K1 = static_cast<uint64_t>(
        std::pow(static_cast<double>(N), 3.0 / 7.0));
    uint64_t K2 = static_cast<uint64_t>(
        std::pow(static_cast<double>(N), 0.45));
    track(type1_ratio(K1, N, 2 * N, 1, 12, 13, 1, 1, CoeffKind::Unit,
                      threads),
          "type1-unit", N);
    track(type1_ratio(K1, N, 2 * N, 1, 12, 13, 1, 1, CoeffKind::Mobius,
                      threads),
          "type1-mobius", N);
    track(type2_ratio(K2, N, 2 * N, 1, 12, 13, 1, 1, CoeffKind::Unit,
                      CoeffKind::Unit, threads),
          "type2-unit", N);
    track(type2_ratio(K2, N, 2 * N, 1, 12, 13, 1, 1, CoeffKind::Mobius,
                      CoeffKind::LambdaNorm, threads),
          "type2-mu-lambda", N);
    track(prime_reduction_check(sqrt2, N, 2 * N, threads), "prime-reduce", N);
  }
  bool ok = worst <= 10.0;

  std::vector<uint64_t> lambda_ms =
      scale == SuiteScale::Full
          ? std::vector<uint64_t>{10000, 100000, 1000000}
          : std::vector<uint64_t>{10000, 100000};
  std::vector<double> exps;
  for (uint64_t M : lambda_ms)
    exps.push_back(lambda_twisted(1, 0, sqrt2, 1, M, threads).exponent);
  if (exps.front() >= 1.0) ok = false;
  for (size_t i = 1; i < exps.size(); ++i)
    if (exps[i] > exps[i - 1] + 0.05) ok = false;

  std::string exp_txt;
  for (double e : exps) exp_txt += detail::strf(" %.3f", e);

  CriterionResult r;
  r.id = 10;
  r.name = "bound-dashboards";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details = detail::strf(
      "worst ratio %.4f (%s, ceiling 10); twisted exponents%s "
      "(start < 1, non-increasing +0.05)",
      worst, worst_tag.c_str(), exp_txt.c_str());
  detail::apply_budget(r, scale, 600000);
  return r;
}

/// 11. Bilinear decomposition reassembles the direct Lambda sum for random
/// desk-scale parameter triples, and the S1 = S4 + S5 slicing is exact.
inline CriterionResult acceptance_bilinear(SuiteScale scale,
                                           int threads = 0) {
  detail::Stopwatch sw;
  const int trials = scale == SuiteScale::Full ? 20 : 10;
  const uint64_t n_cap = scale == SuiteScale::Full ? 10000 : 2000;
  BeattyParams B = detail::beatty_sqrt2_03();
  PSParams P(21, 20);

  std::mt19937_64 rng(20260815);
  std::uniform_int_distribution<uint64_t> pick_n(64, n_cap);
  std::uniform_int_distribution<long long> pick_k(-5, 5);
  std::uniform_int_distribution<long> pick_h(1, 6);

  bool ok = true;
  double worst_rel = 0.0;
  std::string fail;
  for (int t = 0; t < trials; ++t) {
    uint64_t N = pick_n(rng);
    long long k = 0;
    while (k == 0) k = pick_k(rng);
    long h = pick_h(rng);
    BilinearSplit bs = bilinear_split(N, 2 * N, VaughanParams::from_range(N),
                                      k, h, B, P, threads);
    worst_rel = std::max(worst_rel, bs.residual / static_cast<double>(N));
    if (!bs.ok) {
      ok = false;
      fail = detail::strf("residual %.3e > 1e-6*N at N=%llu k=%lld h=%ld",
                          bs.residual, (unsigned long long)N, k, h);
      break;
    }
    const SumEvaluation &s1 = bs.find("S1"), &s4 = bs.find("S4"),
                        &s5 = bs.find("S5");
    std::complex<double> lhs = s4.value + s5.value;
    if (lhs.real() != s1.value.real() || lhs.imag() != s1.value.imag()) {
      ok = false;
      fail = detail::strf("S4+S5 != S1 bitwise at N=%llu k=%lld h=%ld",
                          (unsigned long long)N, k, h);
      break;
    }
  }

  CriterionResult r;
  r.id = 11;
  r.name = "bilinear-reconstruction";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details = ok ? detail::strf("%d random triples: worst residual/N = %.3e "
                                "(tol 1e-6); S4+S5 = S1 exactly",
                                trials, worst_rel)
                 : fail;
  detail::apply_budget(r, scale, 60000);
  return r;
}

namespace detail {

/// Fixed representative battery whose serialized payloads must not depend
/// on the thread count. Timings are excluded field-by-field.
inline std::string determinism_payload(int threads) {
  json out = json::array();
  BeattyParams B = beatty_sqrt2_03();
  PSParams P21(21, 20), P32(3, 2);
  CountOptions opt;
  opt.threads = threads;

  json c1 = count_intersection(B, P21, 10000, opt).to_json();
  c1.erase("elapsed_ms");
  out.push_back(c1);
  json c2 = count_ps_in_ap(P32, 5, 2, 10000, opt).to_json();
  c2.erase("elapsed_ms");
  out.push_back(c2);

  const RealSpec sqrt2 = RealSpec::parse("sqrt2");
  out.push_back(vdc_ratio(ExpSumSpec::quadratic(
                              RealSpec::quadratic(0, 1, 1000, 2), 0, 1),
                          10000, threads)
                    .to_json());
  out.push_back(type1_ratio(51, 10000, 20000, 1, 12, 13, 1, 1,
                            CoeffKind::Unit, threads)
                    .to_json());
  out.push_back(type2_ratio(63, 10000, 20000, 1, 12, 13, 1, 1,
                            CoeffKind::Mobius, CoeffKind::LambdaNorm, threads)
                    .to_json());
  out.push_back(lambda_twisted(1, 0, sqrt2, 1, 10000, threads).to_json());
  out.push_back(prime_reduction_check(sqrt2, 10000, 20000, threads).to_json());
  out.push_back(majorant_check(vaaler_approx(100), 10000, threads).to_json());
  out.push_back(
      bilinear_split(1000, 2000, VaughanParams(5, 10), 2, 1, B, P21, threads)
          .to_json());

  ExpSumResult es = exp_sum(
      ExpSumSpec::mixed(3, B, 2, 20, 21, 100, 5000, WeightKind::Lambda),
      threads);
  out.push_back(json{{"exp_sum_re", strf("%.17e", es.value.real())},
                     {"exp_sum_im", strf("%.17e", es.value.imag())}});
  return out.dump();
}

}  // namespace detail

/// 12. The representative battery serializes byte-identically at thread
/// counts 1 and 8.
inline CriterionResult acceptance_determinism(SuiteScale scale,
                                              int /*threads*/ = 0) {
  detail::Stopwatch sw;
  std::string p1 = detail::determinism_payload(1);
  std::string p8 = detail::determinism_payload(8);
  bool ok = p1 == p8;

  CriterionResult r;
  r.id = 12;
  r.name = "determinism";
  r.pass = ok;
  r.elapsed_ms = sw.ms();
  r.details = ok ? detail::strf(
                       "payloads identical at threads 1 and 8 (%zu bytes)",
                       p1.size())
                 : "payloads differ between threads 1 and 8";
  detail::apply_budget(r, scale, 120000);
  return r;
}

using CriterionFn = CriterionResult (*)(SuiteScale, int);

struct CriterionEntry {
  int id;
  const char* name;
  CriterionFn fn;
};

inline const std::array<CriterionEntry, 12>& acceptance_criteria() {
  static const std::array<CriterionEntry, 12> table = {{
      {1, "beatty-oracle", &acceptance_beatty_oracle},
      {2, "ps-oracle", &acceptance_ps_oracle},
      {3, "desk-counts", &acceptance_desk_counts},
      {4, "intersection-trend", &acceptance_intersection_trend},
      {5, "ps-trend", &acceptance_ps_trend},
      {6, "vaughan-identity", &acceptance_vaughan_identity},
      {7, "vaaler-majorant", &acceptance_vaaler_majorant},
      {8, "vinogradov-indicator", &acceptance_vinogradov},
      {9, "discrepancy", &acceptance_discrepancy},
      {10, "bound-dashboards", &acceptance_dashboards},
      {11, "bilinear-reconstruction", &acceptance_bilinear},
      {12, "determinism", &acceptance_determinism},
  }};
  return table;
}

struct SuiteReport {
  SuiteScale scale = SuiteScale::Full;
  int threads = 0;
  std::vector<CriterionResult> results;
  bool all_pass = true;

  json to_json() const {
    json rows = json::array();
    for (const auto& r : results) rows.push_back(r.to_json());
    return json{{"schema_version", kSchemaVersion},
                {"scale", to_string(scale)},
                {"threads", threads},
                {"criteria", rows},
                {"all_pass", all_pass}};
  }
};

/// Runs the requested criteria (all twelve by default) in id order.
inline SuiteReport run_suite(SuiteScale scale, int threads = 0,
                             const std::vector<int>& ids = {}) {
  SuiteReport rep;
  rep.scale = scale;
  rep.threads = threads;
  for (const auto& entry : acceptance_criteria()) {
    if (!ids.empty() &&
        std::find(ids.begin(), ids.end(), entry.id) == ids.end())
      continue;
    CriterionResult r = entry.fn(scale, threads);
    rep.all_pass = rep.all_pass && r.pass;
    rep.results.push_back(std::move(r));
  }
  return rep;
}

}  // namespace psb
