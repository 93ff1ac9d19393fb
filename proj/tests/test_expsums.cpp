// Direct exponential sums and the empirical bound checkers.
//
// Oracles: closed-form sums (roots of unity, quadratic Gauss sums, Mertens
// and Chebyshev masses), MPFR phase evaluation at 320 bits, and naive
// rectangle summation for the bilinear checkers.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <mpfr.h>

#include "psbeatty/errors.hpp"
#include "psbeatty/expsums.hpp"

using namespace psb;

namespace {

// frac(mult * t^(gnum/gden)) at 320 bits
double mpfr_pow_frac(uint64_t t, double mult, unsigned gnum, unsigned gden) {
  mpfr_t x, g;
  mpfr_init2(x, 320);
  mpfr_init2(g, 320);
  mpfr_set_ui(x, t, MPFR_RNDN);
  mpfr_set_ui(g, gnum, MPFR_RNDN);
  mpfr_div_ui(g, g, gden, MPFR_RNDN);
  mpfr_pow(x, x, g, MPFR_RNDN);
  mpfr_mul_d(x, x, mult, MPFR_RNDN);
  mpfr_frac(x, x, MPFR_RNDN);
  double f = mpfr_get_d(x, MPFR_RNDN);
  mpfr_clear(x);
  mpfr_clear(g);
  return f;
}

// sum_{lo < n <= hi} e(sqrt2 * n^2) at 320 bits
std::complex<double> mpfr_quad_sqrt2(uint64_t lo, uint64_t hi) {
  mpfr_t s2, x;
  mpfr_init2(s2, 320);
  mpfr_init2(x, 320);
  mpfr_sqrt_ui(s2, 2, MPFR_RNDN);
  std::complex<double> s{0.0, 0.0};
  for (uint64_t n = lo + 1; n <= hi; ++n) {
    mpfr_mul_ui(x, s2, n, MPFR_RNDN);
    mpfr_mul_ui(x, x, n, MPFR_RNDN);
    mpfr_frac(x, x, MPFR_RNDN);
    s += detail::e2pi(mpfr_get_d(x, MPFR_RNDN));
  }
  mpfr_clear(s2);
  mpfr_clear(x);
  return s;
}

double psi_mass(uint64_t M, uint64_t q = 1, uint64_t a = 0) {
  double s = 0.0;
  for (uint64_t m = 1; m <= M; ++m)
    if (auto pp = von_mangoldt(q * m + a)) s += pp->log_p();
  return s;
}

}  // namespace

TEST_CASE("exp_sum closed-form fixtures", "[expsum]") {
  // constant phase: every term is 1
  ExpSumResult ones =
      exp_sum(ExpSumSpec::linear(RealSpec::parse("rat:0/1"), 0, 100), 1);
  REQUIRE(ones.value.real() == 100.0);
  REQUIRE(ones.value.imag() == 0.0);
  REQUIRE(ones.terms == 100);

  // full periods of cube roots of unity cancel
  ExpSumResult cube =
      exp_sum(ExpSumSpec::linear(RealSpec::parse("rat:1/3"), 0, 999), 1);
  REQUIRE(std::abs(cube.value) < 1e-9);

  // quadratic Gauss sum mod 13: value sqrt(13), 13 = 1 mod 4
  ExpSumResult gauss =
      exp_sum(ExpSumSpec::quadratic(RealSpec::parse("rat:1/13"), 0, 13), 1);
  REQUIRE(gauss.value.real() == Catch::Approx(std::sqrt(13.0)).margin(1e-9));
  REQUIRE(gauss.value.imag() == Catch::Approx(0.0).margin(1e-9));

  // log weight at zero phase: log(N!)
  ExpSumResult lg = exp_sum(
      ExpSumSpec::linear(RealSpec::parse("rat:0/1"), 0, 50, WeightKind::Log),
      1);
  REQUIRE(lg.value.real() == Catch::Approx(std::lgamma(51.0)).margin(1e-9));

  // Mobius weight at zero phase: Mertens M(100) = 1
  ExpSumResult mert = exp_sum(
      ExpSumSpec::linear(RealSpec::parse("rat:0/1"), 0, 100, WeightKind::Mobius),
      1);
  REQUIRE(mert.value.real() == Catch::Approx(1.0).margin(1e-12));

  // Lambda weight at zero phase: Chebyshev psi(200)
  ExpSumResult cheb = exp_sum(
      ExpSumSpec::linear(RealSpec::parse("rat:0/1"), 0, 200, WeightKind::Lambda),
      1);
  REQUIRE(cheb.value.real() == Catch::Approx(psi_mass(200)).margin(1e-9));
}

TEST_CASE("exp_sum phases agree with MPFR", "[expsum]") {
  ExpSumResult quad =
      exp_sum(ExpSumSpec::quadratic(RealSpec::parse("sqrt2"), 0, 500), 1);
  std::complex<double> want = mpfr_quad_sqrt2(0, 500);
  REQUIRE(std::abs(quad.value - want) < 1e-10);

  // power phase: sum e(3 n^{1/2})
  ExpSumResult pw = exp_sum(ExpSumSpec::power(3, 1, 2, 0, 400), 1);
  std::complex<double> pwant{0.0, 0.0};
  for (uint64_t n = 1; n <= 400; ++n)
    pwant += detail::e2pi(mpfr_pow_frac(n, 3.0, 1, 2));
  REQUIRE(std::abs(pw.value - pwant) < 1e-10);

  // rational scale rides along: e((1/2) * 5 * n^{2/3})
  ExpSumResult sc =
      exp_sum(ExpSumSpec::power(5, 2, 3, 0, 300, WeightKind::Unit,
                                mpq_class(1, 2)),
              1);
  std::complex<double> swant{0.0, 0.0};
  for (uint64_t n = 1; n <= 300; ++n)
    swant += detail::e2pi(mpfr_pow_frac(n, 2.5, 2, 3));
  REQUIRE(std::abs(sc.value - swant) < 1e-10);

  // mixed phase: k(t + 1 - beta)/alpha + h t^gamma with alpha = sqrt2
  BeattyParams B(RealSpec::parse("sqrt2"), RealSpec::parse("rat:3/10"));
  ExpSumResult mx = exp_sum(ExpSumSpec::mixed(3, B, 2, 20, 21, 100, 600), 1);
  mpfr_t al, lin;
  mpfr_init2(al, 320);
  mpfr_init2(lin, 320);
  mpfr_sqrt_ui(al, 2, MPFR_RNDN);
  std::complex<double> mwant{0.0, 0.0};
  for (uint64_t t = 101; t <= 600; ++t) {
    mpfr_set_ui(lin, t, MPFR_RNDN);
    mpfr_add_d(lin, lin, 0.7, MPFR_RNDN);
    mpfr_div(lin, lin, al, MPFR_RNDN);
    mpfr_mul_ui(lin, lin, 3, MPFR_RNDN);
    mpfr_frac(lin, lin, MPFR_RNDN);
    double fl = mpfr_get_d(lin, MPFR_RNDN);
    mwant += detail::e2pi(fl + mpfr_pow_frac(t, 2.0, 20, 21));
  }
  mpfr_clear(al);
  mpfr_clear(lin);
  REQUIRE(std::abs(mx.value - mwant) < 1e-9);
}

TEST_CASE("exp_sum validation and term budget", "[expsum]") {
  REQUIRE_THROWS_AS(
      exp_sum(ExpSumSpec::linear(RealSpec::parse("rat:1/2"), 10, 10)),
      InvalidInput);
  REQUIRE_THROWS_AS(
      exp_sum(ExpSumSpec::linear(RealSpec::parse("rat:1/2"), 0,
                                 kTermBudget + 1)),
      TermBudgetExceeded);
  REQUIRE_THROWS_AS(exp_sum(ExpSumSpec::power(1, 2, 2, 0, 10)), InvalidInput);
  REQUIRE_THROWS_AS(exp_sum(ExpSumSpec::power(1, 1, 65, 0, 10)), InvalidInput);
  REQUIRE_THROWS_AS(exp_sum(ExpSumSpec::power(0, 1, 2, 0, 10)), InvalidInput);
  REQUIRE_THROWS_AS(
      exp_sum(ExpSumSpec::power(1, 1, 2, 0, 10, WeightKind::Unit, mpq_class(0))),
      InvalidInput);

  ExpSumSpec bad;
  bad.phase = PhaseKind::Mixed;
  bad.lo = 0;
  bad.hi = 10;
  REQUIRE_THROWS_AS(exp_sum(bad), InvalidInput);

  ExpSumSpec heavy = ExpSumSpec::linear(RealSpec::parse("rat:1/2"),
                                        2000000000000ULL, 2000000000010ULL,
                                        WeightKind::Lambda);
  REQUIRE_THROWS_AS(exp_sum(heavy), InvalidInput);

  json p = ExpSumSpec::mixed(3, BeattyParams(RealSpec::parse("sqrt2"),
                                             RealSpec::parse("rat:3/10")),
                             2, 20, 21, 0, 10)
               .params_json();
  REQUIRE(p["phase"] == "mixed");
  REQUIRE(p["k"] == 3);
  REQUIRE(p["alpha"] == "surd:(0+1*sqrt(2))/1");
  REQUIRE(p["gamma"] == "20/21");
}

TEST_CASE("van der Corput checker internals", "[expsum]") {
  // quadratic case: lambda = 2|theta| exactly
  ExpSumSpec q = ExpSumSpec::quadratic(RealSpec::parse("rat:3/1000"), 0, 1);
  BoundRatio r = vdc_ratio(q, 1000, 1);
  REQUIRE(r.check == "vdc");
  REQUIRE(r.params["lambda"].get<double>() == Catch::Approx(0.006));
  double lam = r.params["lambda"].get<double>();
  REQUIRE(r.bound ==
          Catch::Approx(1000.0 * std::sqrt(lam) + 1.0 / std::sqrt(lam)));
  ExpSumSpec eval = q;
  eval.lo = 1000;
  eval.hi = 2000;
  REQUIRE(r.measured == Catch::Approx(std::abs(exp_sum(eval, 1).value)));
  REQUIRE(r.ratio == Catch::Approx(r.measured / r.bound));
  REQUIRE(r.ratio < 1.0);

  // power case bound is anchored between the endpoint curvatures
  ExpSumSpec pw = ExpSumSpec::power(1, 1, 2, 0, 1);
  BoundRatio rp = vdc_ratio(pw, 4096, 1);
  double g = 0.5, coef = 0.25;
  double lo = coef * std::pow(8192.0, g - 2.0);
  double hi = coef * std::pow(4097.0, g - 2.0);
  REQUIRE(rp.params["lambda"].get<double>() ==
          Catch::Approx(std::sqrt(lo * hi)));
  REQUIRE(rp.ratio > 0.0);
  REQUIRE(rp.ratio < 1.0);

  REQUIRE_THROWS_AS(vdc_ratio(q, 1), InvalidInput);
  REQUIRE_THROWS_AS(
      vdc_ratio(ExpSumSpec::linear(RealSpec::parse("rat:1/7"), 0, 1), 100),
      InvalidInput);
  REQUIRE_THROWS_AS(
      vdc_ratio(ExpSumSpec::quadratic(RealSpec::parse("rat:1/7"), 0, 1,
                                      WeightKind::Log),
                100),
      InvalidInput);
  REQUIRE_THROWS_AS(
      vdc_ratio(ExpSumSpec::quadratic(RealSpec::parse("rat:0/1"), 0, 1), 100),
      InvalidInput);
}

TEST_CASE("type I matches a naive rectangle sum", "[expsum]") {
  const uint64_t K = 30, N = 5000, N1 = 9000, m = 1, h = 1, d = 12;
  const unsigned gnum = 12, gden = 13;
  BoundRatio r = type1_ratio(K, N, N1, m, gnum, gden, h, d, CoeffKind::Mobius, 1);
  REQUIRE(r.check == "type1");
  REQUIRE(r.params["pairs"].get<uint64_t>() > 0);

  // naive: k in (K, 2K], l in (l_lo, l_hi], N < kl <= N1
  double L = static_cast<double>(N) / (2.0 * K);
  uint64_t l_lo = static_cast<uint64_t>(std::floor(L));
  uint64_t l_hi = static_cast<uint64_t>(std::floor(2.0 * L));
  std::complex<double> naive{0.0, 0.0};
  for (uint64_t k = K + 1; k <= 2 * K; ++k) {
    int a = mobius(k);
    if (a == 0) continue;
    std::complex<double> inner{0.0, 0.0};
    uint64_t lo = std::max(l_lo, N / k), hi = std::min(l_hi, N1 / k);
    for (uint64_t l = lo + 1; l <= hi; ++l) {
      uint64_t t = k * l;
      double fr = static_cast<double>((t % d) * (h % d) % d) / d;
      inner += detail::e2pi(mpfr_pow_frac(t, double(m), gnum, gden) + fr);
    }
    naive += static_cast<double>(a) * inner;
  }
  REQUIRE(r.measured == Catch::Approx(std::abs(naive)).margin(1e-8));

  REQUIRE_THROWS_AS(
      type1_ratio(52, 10000, 15000, 1, 12, 13, 1, 12, CoeffKind::Unit),
      HypothesisViolated);  // 10000^{3/7} = 51.79
  REQUIRE_NOTHROW(
      type1_ratio(51, 10000, 15000, 1, 12, 13, 1, 12, CoeffKind::Unit, 1));
  REQUIRE_THROWS_AS(
      type1_ratio(10, 10000, 15000, 1, 12, 13, 1, 12, CoeffKind::LambdaNorm),
      InvalidInput);
  REQUIRE_THROWS_AS(type1_ratio(10, 2, 3, 1, 12, 13, 1, 12, CoeffKind::Unit),
                    InvalidInput);
  REQUIRE_THROWS_AS(
      type1_ratio(10, 10000, 25000, 1, 12, 13, 1, 12, CoeffKind::Unit),
      InvalidInput);  // N1 > 2N
  REQUIRE_THROWS_AS(
      type1_ratio(10, 10000, 15000, 0, 12, 13, 1, 12, CoeffKind::Unit),
      InvalidInput);
}

TEST_CASE("type II hypothesis window and determinism", "[expsum]") {
  const uint64_t N = 10000;
  // window is [N^{3/7}, N^{1/2}] = [51.79, 100]
  REQUIRE_THROWS_AS(type2_ratio(40, N, 15000, 1, 12, 13, 1, 12,
                                CoeffKind::Mobius, CoeffKind::LambdaNorm),
                    HypothesisViolated);
  REQUIRE_THROWS_AS(type2_ratio(101, N, 15000, 1, 12, 13, 1, 12,
                                CoeffKind::Mobius, CoeffKind::LambdaNorm),
                    HypothesisViolated);

  BoundRatio one = type2_ratio(63, N, 15000, 1, 12, 13, 1, 12,
                               CoeffKind::Mobius, CoeffKind::LambdaNorm, 1);
  BoundRatio eight = type2_ratio(63, N, 15000, 1, 12, 13, 1, 12,
                                 CoeffKind::Mobius, CoeffKind::LambdaNorm, 8);
  REQUIRE(one.measured == eight.measured);  // bitwise thread invariance
  REQUIRE(one.check == "type2");
  REQUIRE(one.params["a_k"] == "mobius");
  REQUIRE(one.params["b_l"] == "lambda-norm");
  REQUIRE(one.bound > 0.0);
  REQUIRE(one.ratio == Catch::Approx(one.measured / one.bound));

  // LambdaNorm coefficients stay within [-1, 1] by construction
  auto w = detail::coeff_values(100, 200, CoeffKind::LambdaNorm,
                                std::log(200.0));
  for (double v : w) {
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("Lambda-twisted progression sums", "[expsum]") {
  REQUIRE_THROWS_AS(
      lambda_twisted(4, 2, RealSpec::parse("sqrt2"), 1, 100), InvalidInput);
  REQUIRE_THROWS_AS(
      lambda_twisted(4, 5, RealSpec::parse("sqrt2"), 1, 100), InvalidInput);
  REQUIRE_THROWS_AS(lambda_twisted(1, 0, RealSpec::parse("sqrt2"), 1, 1),
                    InvalidInput);
  REQUIRE_THROWS_AS(
      lambda_twisted(1, 0, RealSpec::parse("rat:1/2"), 1, 100), InvalidInput);
  REQUIRE_NOTHROW(lambda_twisted(1, 0, RealSpec::parse("rat:1/2"), 0, 100));

  // k = 0: untwisted Chebyshev mass over the progression
  TwistedSum base = lambda_twisted(1, 0, RealSpec::parse("sqrt2"), 0, 1000, 1);
  REQUIRE(base.value.real() == Catch::Approx(psi_mass(1000)).margin(1e-9));
  REQUIRE(base.value.imag() == 0.0);
  TwistedSum ap = lambda_twisted(4, 1, RealSpec::parse("sqrt2"), 0, 1000, 1);
  REQUIRE(ap.value.real() == Catch::Approx(psi_mass(1000, 4, 1)).margin(1e-9));

  // twisted: cancellation makes |S| sublinear in M; exponent is the report
  TwistedSum tw = lambda_twisted(1, 0, RealSpec::parse("sqrt2"), 1, 10000, 1);
  REQUIRE(std::abs(tw.value) < psi_mass(10000));
  REQUIRE(tw.exponent ==
          Catch::Approx(std::log(std::abs(tw.value)) / std::log(10000.0)));
  REQUIRE(tw.exponent < 1.0);
  TwistedSum tw8 = lambda_twisted(1, 0, RealSpec::parse("sqrt2"), 1, 10000, 8);
  REQUIRE(tw.value == tw8.value);

  auto j = tw.to_json();
  REQUIRE(j["abs"].get<double>() == std::abs(tw.value));
  REQUIRE(j["theta"] == "surd:(0+1*sqrt(2))/1");
}

TEST_CASE("prime reduction checker", "[expsum]") {
  // constant phase: the prime sum is exactly pi(2N) - pi(N)
  BoundRatio flat =
      prime_reduction_check(RealSpec::parse("rat:0/1"), 10000, 20000, 1);
  REQUIRE(flat.measured == Catch::Approx(1033.0).margin(1e-9));
  REQUIRE(flat.note == "grid max");

  BoundRatio r = prime_reduction_check(RealSpec::parse("sqrt2"), 10000, 20000, 1);
  // oracle: direct prime sum with MPFR linear phase
  mpfr_t s2, x;
  mpfr_init2(s2, 320);
  mpfr_init2(x, 320);
  mpfr_sqrt_ui(s2, 2, MPFR_RNDN);
  std::complex<double> want{0.0, 0.0};
  sieve_window(10000, 20000).for_each_prime([&](uint64_t p) {
    mpfr_mul_ui(x, s2, p, MPFR_RNDN);
    mpfr_frac(x, x, MPFR_RNDN);
    want += detail::e2pi(mpfr_get_d(x, MPFR_RNDN));
  });
  mpfr_clear(s2);
  mpfr_clear(x);
  REQUIRE(r.measured == Catch::Approx(std::abs(want)).margin(1e-8));
  REQUIRE(r.bound > 0.0);

  REQUIRE_THROWS_AS(prime_reduction_check(RealSpec::parse("sqrt2"), 8, 16),
                    InvalidInput);
  REQUIRE_THROWS_AS(prime_reduction_check(RealSpec::parse("sqrt2"), 100, 100),
                    InvalidInput);
  REQUIRE_THROWS_AS(prime_reduction_check(RealSpec::parse("sqrt2"), 100, 250),
                    InvalidInput);
}

TEST_CASE("exp_sum is bitwise thread invariant", "[expsum]") {
  BeattyParams B(RealSpec::parse("sqrt2"), RealSpec::parse("rat:3/10"));
  ExpSumSpec spec =
      ExpSumSpec::mixed(3, B, 2, 20, 21, 0, 20000, WeightKind::Lambda);
  ExpSumResult a = exp_sum(spec, 1);
  ExpSumResult b = exp_sum(spec, 8);
  REQUIRE(a.value.real() == b.value.real());
  REQUIRE(a.value.imag() == b.value.imag());

  ExpSumSpec qs = ExpSumSpec::quadratic(RealSpec::parse("golden"), 0, 50000);
  REQUIRE(exp_sum(qs, 1).value == exp_sum(qs, 8).value);
}
