#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"

#include "psbeatty/errors.hpp"
#include "psbeatty/parallel.hpp"
#include "psbeatty/sequences.hpp"
#include "psbeatty/sieve.hpp"
#include "psbeatty/version.hpp"

namespace psb {

using nlohmann::json;

inline constexpr uint64_t kDefaultCountCap = 10000000000ULL;  // 10^10
inline constexpr uint64_t kCountWindowSpan = uint64_t(1) << 22;

struct CountOptions {
  int threads = 0;                    // 0: resolve via env/hardware
  uint64_t x_cap = kDefaultCountCap;  // raiseable up to the sieve bound
};

/// Exact count next to its asymptotic main term.
struct CountReport {
  std::string kind;  // "ps" | "beatty" | "intersection" | "ps_in_ap"
  json params;       // echoed inputs
  uint64_t x = 0;
  uint64_t count = 0;
  double main_term = 0.0;
  std::string main_term_hp = "0";  // 30 significant digits
  double ratio = 0.0;
  double error_budget = 0.0;
  double elapsed_ms = 0.0;
  std::vector<std::string> warnings;

  json to_json() const {
    return json{{"schema_version", kSchemaVersion},
                {"kind", kind},
                {"params", params},
                {"x", x},
                {"count", count},
                {"main_term", main_term},
                {"main_term_hp", main_term_hp},
                {"ratio", ratio},
                {"error_budget", error_budget},
                {"elapsed_ms", elapsed_ms},
                {"warnings", warnings}};
  }

  static CountReport from_json(const json& j) {
    CountReport r;
    r.kind = j.at("kind").get<std::string>();
    r.params = j.at("params");
    r.x = j.at("x").get<uint64_t>();
    r.count = j.at("count").get<uint64_t>();
    r.main_term = j.at("main_term").get<double>();
    r.main_term_hp = j.at("main_term_hp").get<std::string>();
    r.ratio = j.at("ratio").get<double>();
    r.error_budget = j.at("error_budget").get<double>();
    r.elapsed_ms = j.at("elapsed_ms").get<double>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  }

  bool same_payload(const CountReport& o) const {
    return kind == o.kind && params == o.params && x == o.x &&
           count == o.count && main_term == o.main_term &&
           main_term_hp == o.main_term_hp && ratio == o.ratio &&
           error_budget == o.error_budget && warnings == o.warnings;
  }
};

namespace detail {

inline void check_count_range(uint64_t x, const CountOptions& opt) {
  if (opt.x_cap > kMaxSieveValue)
    throw InvalidInput("count cap exceeds sieve bound 10^12");
  if (x > opt.x_cap) throw InvalidInput("count threshold x exceeds cap");
}

/// Smallest n with floor(n^c) >= v, i.e. n^num >= v^den.
inline uint64_t first_ps_index_reaching(const PSParams& P, uint64_t v) {
  mpz_class t, r, rem;
  mpz_ui_pow_ui(t.get_mpz_t(), v, static_cast<unsigned long>(P.den()));
  mpz_rootrem(r.get_mpz_t(), rem.get_mpz_t(), t.get_mpz_t(),
              static_cast<unsigned long>(P.num()));
  uint64_t n = mpz_get_ui(r.get_mpz_t());
  return rem == 0 ? n : n + 1;
}

/// Largest n with floor(n^c) <= v, i.e. n^num <= (v+1)^den - 1.
inline uint64_t last_ps_index_within(const PSParams& P, uint64_t v) {
  mpz_class t, r;
  mpz_ui_pow_ui(t.get_mpz_t(), v + 1, static_cast<unsigned long>(P.den()));
  t -= 1;
  mpz_root(r.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(P.num()));
  return mpz_get_ui(r.get_mpz_t());
}

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline std::string mpfr_sig30(mpfr_srcptr v) {
  char buf[64];
  mpfr_snprintf(buf, sizeof buf, "%.29Re", v);
  return std::string(buf);
}

struct MainTerm {
  double value = 0.0;
  std::string hp = "0";
};

/// x^{gnum/gden} / (scale * phi * log x) at 256-bit working precision.
/// gnum/gden = 1 for plain Beatty counts; scale carries alpha and/or c.
inline MainTerm eval_main_term(uint64_t x, long gnum, long gden,
                               const ExactReal* alpha, const mpq_class* c_q,
                               uint64_t phi) {
  if (x < 2) return {};
  const mpfr_prec_t prec = 256;
  BigFloat xv(prec), lg(prec), pw(prec), ex(prec), den(prec), res(prec);
  mpfr_set_ui(xv.raw(), static_cast<unsigned long>(x), MPFR_RNDN);
  mpfr_log(lg.raw(), xv.raw(), MPFR_RNDN);
  mpq_class g(gnum, gden);
  g.canonicalize();
  mpfr_set_q(ex.raw(), g.get_mpq_t(), MPFR_RNDN);
  mpfr_pow(pw.raw(), xv.raw(), ex.raw(), MPFR_RNDN);
  mpfr_set(den.raw(), lg.raw(), MPFR_RNDN);
  mpfr_mul_ui(den.raw(), den.raw(), static_cast<unsigned long>(phi), MPFR_RNDN);
  if (alpha) {
    BigFloat av = alpha->eval(320).lo;  // enclosure width ~2^-318: exact here
    mpfr_mul(den.raw(), den.raw(), av.raw(), MPFR_RNDN);
  }
  if (c_q) {
    BigFloat cv(prec);
    mpfr_set_q(cv.raw(), c_q->get_mpq_t(), MPFR_RNDN);
    mpfr_mul(den.raw(), den.raw(), cv.raw(), MPFR_RNDN);
  }
  mpfr_div(res.raw(), pw.raw(), den.raw(), MPFR_RNDN);
  MainTerm mt;
  mt.value = mpfr_get_d(res.raw(), MPFR_RNDN);
  mt.hp = mpfr_sig30(res.raw());
  return mt;
}

inline double error_budget_ps(uint64_t x, const PSParams& P) {
  if (x < 2) return 0.0;
  double lx = std::log(static_cast<double>(x));
  return std::pow(static_cast<double>(x), P.gamma()) / (lx * lx);
}

inline double error_budget_linear(uint64_t x) {
  if (x < 2) return 0.0;
  double lx = std::log(static_cast<double>(x));
  return static_cast<double>(x) / (lx * lx);
}

inline void finish_ratio(CountReport& r) {
  r.ratio = (r.main_term > 0.0) ? static_cast<double>(r.count) / r.main_term
                                : 0.0;
}

/// Value windows (b*W, min((b+1)W, x)] covering (0, x].
inline uint64_t count_window_blocks(uint64_t x) {
  return (x + kCountWindowSpan - 1) / kCountWindowSpan;
}

/// Counts over PS candidates n with floor(n^c) in (vlo, vhi], testing
/// primality in a sieve window and an optional extra predicate on the value.
template <class Pred>
uint64_t ps_window_count(const PSParams& P, uint64_t vlo, uint64_t vhi,
                         Pred&& keep) {
  uint64_t n_lo = first_ps_index_reaching(P, vlo + 1);
  uint64_t n_hi = last_ps_index_within(P, vhi);
  if (n_lo > n_hi) return 0;
  SieveWindow sw(vlo, vhi);
  uint64_t cnt = 0;
  for (uint64_t n = n_lo; n <= n_hi; ++n) {
    uint64_t m = mpz_get_ui(ps_term(P, n).get_mpz_t());
    if (sw.is_prime(m) && keep(m)) ++cnt;
  }
  return cnt;
}

inline std::vector<std::string> intersection_warnings(const BeattyParams& B,
                                                      const PSParams& P) {
  std::vector<std::string> w;
  if (!P.proven_range())
    w.push_back(
        "c >= 14/13: asymptotic main term is heuristic in this range; the "
        "count itself is exact");
  const RealSpec& a = B.alpha_spec();
  if (a.value_is_rational())
    w.push_back(
        "alpha is rational: Beatty sequence is a union of arithmetic "
        "progressions; the main term assumes irrational alpha of finite type");
  else if (a.kind() == RealSpec::Kind::Decimal ||
           a.kind() == RealSpec::Kind::CfPrefix)
    w.push_back(
        "alpha given to finite precision: diophantine type unknown, main "
        "term is heuristic");
  return w;
}

}  // namespace detail

inline CountReport count_ps_primes(const PSParams& P, uint64_t x,
                                   const CountOptions& opt = {}) {
  detail::check_count_range(x, opt);
  detail::Stopwatch timer;
  CountReport r;
  r.kind = "ps";
  r.params = json{{"c", P.str()}};
  r.x = x;
  if (x >= 2) {
    uint64_t nb = detail::count_window_blocks(x);
    r.count = parallel_blocks<uint64_t>(
        nb, 0,
        [&](uint64_t b) {
          uint64_t vlo = b * kCountWindowSpan;
          uint64_t vhi = std::min(x, vlo + kCountWindowSpan);
          return detail::ps_window_count(P, vlo, vhi,
                                         [](uint64_t) { return true; });
        },
        [](uint64_t a, uint64_t b2) { return a + b2; }, opt.threads);
    mpq_class c(P.num(), P.den());
    auto mt = detail::eval_main_term(x, P.den(), P.num(), nullptr, &c, 1);
    r.main_term = mt.value;
    r.main_term_hp = mt.hp;
    r.error_budget = detail::error_budget_ps(x, P);
  }
  detail::finish_ratio(r);
  r.elapsed_ms = timer.ms();
  return r;
}

inline CountReport count_beatty_primes(const BeattyParams& B, uint64_t x,
                                       const CountOptions& opt = {}) {
  detail::check_count_range(x, opt);
  detail::Stopwatch timer;
  CountReport r;
  r.kind = "beatty";
  r.params = json{{"alpha", B.alpha_spec().str()}, {"beta", B.beta_spec().str()}};
  r.x = x;
  if (x >= 2) {
    uint64_t nb = detail::count_window_blocks(x);
    r.count = parallel_blocks<uint64_t>(
        nb, 0,
        [&](uint64_t b) {
          uint64_t vlo = b * kCountWindowSpan;
          uint64_t vhi = std::min(x, vlo + kCountWindowSpan);
          SieveWindow sw(vlo, vhi);
          uint64_t cnt = 0;
          sw.for_each_prime([&](uint64_t p) {
            if (beatty_contains(B, p)) ++cnt;
          });
          return cnt;
        },
        [](uint64_t a, uint64_t b2) { return a + b2; }, opt.threads);
    auto mt = detail::eval_main_term(x, 1, 1, &B.alpha(), nullptr, 1);
    r.main_term = mt.value;
    r.main_term_hp = mt.hp;
    r.error_budget = detail::error_budget_linear(x);
  }
  detail::finish_ratio(r);
  r.elapsed_ms = timer.ms();
  return r;
}

inline CountReport count_intersection(const BeattyParams& B, const PSParams& P,
                                      uint64_t x, const CountOptions& opt = {}) {
  detail::check_count_range(x, opt);
  detail::Stopwatch timer;
  CountReport r;
  r.kind = "intersection";
  r.params = json{{"alpha", B.alpha_spec().str()},
                  {"beta", B.beta_spec().str()},
                  {"c", P.str()}};
  r.x = x;
  r.warnings = detail::intersection_warnings(B, P);
  if (x >= 2) {
    uint64_t nb = detail::count_window_blocks(x);
    r.count = parallel_blocks<uint64_t>(
        nb, 0,
        [&](uint64_t b) {
          uint64_t vlo = b * kCountWindowSpan;
          uint64_t vhi = std::min(x, vlo + kCountWindowSpan);
          return detail::ps_window_count(
              P, vlo, vhi, [&](uint64_t m) { return beatty_contains(B, m); });
        },
        [](uint64_t a, uint64_t b2) { return a + b2; }, opt.threads);
    mpq_class c(P.num(), P.den());
    auto mt = detail::eval_main_term(x, P.den(), P.num(), &B.alpha(), &c, 1);
    r.main_term = mt.value;
    r.main_term_hp = mt.hp;
    r.error_budget = detail::error_budget_ps(x, P);
  }
  detail::finish_ratio(r);
  r.elapsed_ms = timer.ms();
  return r;
}

inline CountReport count_ps_in_ap(const PSParams& P, uint64_t d, uint64_t a,
                                  uint64_t x, const CountOptions& opt = {}) {
  if (d < 1 || a < 1 || a > d) throw InvalidInput("require 1 <= a <= d");
  if (std::gcd(a, d) != 1) throw InvalidInput("require gcd(a, d) = 1");
  detail::check_count_range(x, opt);
  detail::Stopwatch timer;
  CountReport r;
  r.kind = "ps_in_ap";
  r.params = json{{"c", P.str()}, {"d", d}, {"a", a}};
  r.x = x;
  if (x >= 2) {
    uint64_t nb = detail::count_window_blocks(x);
    const uint64_t res = a % d;
    r.count = parallel_blocks<uint64_t>(
        nb, 0,
        [&](uint64_t b) {
          uint64_t vlo = b * kCountWindowSpan;
          uint64_t vhi = std::min(x, vlo + kCountWindowSpan);
          return detail::ps_window_count(
              P, vlo, vhi, [&](uint64_t m) { return m % d == res; });
        },
        [](uint64_t ac, uint64_t b2) { return ac + b2; }, opt.threads);
    auto mt =
        detail::eval_main_term(x, P.den(), P.num(), nullptr, nullptr,
                               euler_phi(d));
    r.main_term = mt.value;
    r.main_term_hp = mt.hp;
    r.error_budget = detail::error_budget_ps(x, P);
  }
  detail::finish_ratio(r);
  r.elapsed_ms = timer.ms();
  return r;
}

}  // namespace psb
