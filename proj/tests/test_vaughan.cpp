// Identity decomposition coefficients and the bilinear desk evaluator.
//
// Oracles: naive divisor-sum definitions of the coefficients, von Mangoldt
// reconstruction, and MPFR phase evaluation at 320 bits.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <mpfr.h>

#include "psbeatty/errors.hpp"
#include "psbeatty/vaughan.hpp"

using namespace psb;

namespace {

// a(k) = sum_{cd = k, c <= U, d <= V} Lambda(c) mu(d), straight from the
// definition in doubles
double naive_coeff_a(uint64_t k, double U, double V) {
  double s = 0.0;
  for (uint64_t c = 1; c <= k; ++c) {
    if (k % c || c > static_cast<uint64_t>(U)) continue;
    auto pp = von_mangoldt(c);
    if (!pp) continue;
    uint64_t d = k / c;
    if (d > static_cast<uint64_t>(V)) continue;
    s += pp->log_p() * mobius(d);
  }
  return s;
}

long long naive_coeff_b(uint64_t k, double V) {
  long long s = 0;
  for (uint64_t d = 1; d <= k; ++d)
    if (k % d == 0 && d <= static_cast<uint64_t>(V)) s += mobius(d);
  return s;
}

// e(k (t + 1 - beta)/alpha + h t^gamma) for alpha = sqrt2, beta = 3/10
std::complex<double> mpfr_phase(uint64_t t, long long k, long h,
                                const PSParams& P) {
  mpfr_t al, lin, pw, g, one;
  mpfr_init2(al, 320);
  mpfr_init2(lin, 320);
  mpfr_init2(pw, 320);
  mpfr_init2(g, 320);
  mpfr_init2(one, 320);
  mpfr_sqrt_ui(al, 2, MPFR_RNDN);
  mpfr_set_ui(lin, t, MPFR_RNDN);
  mpfr_set_d(one, 0.7, MPFR_RNDN);
  mpfr_set_str(one, "0.7", 10, MPFR_RNDN);
  mpfr_add(lin, lin, one, MPFR_RNDN);
  mpfr_div(lin, lin, al, MPFR_RNDN);
  mpfr_mul_si(lin, lin, k, MPFR_RNDN);
  mpfr_set_ui(pw, t, MPFR_RNDN);
  mpfr_set_si(g, P.den(), MPFR_RNDN);
  mpfr_div_si(g, g, P.num(), MPFR_RNDN);
  mpfr_pow(pw, pw, g, MPFR_RNDN);
  mpfr_mul_si(pw, pw, h, MPFR_RNDN);
  mpfr_add(lin, lin, pw, MPFR_RNDN);
  mpfr_frac(lin, lin, MPFR_RNDN);
  double f = mpfr_get_d(lin, MPFR_RNDN);
  mpfr_clear(al);
  mpfr_clear(lin);
  mpfr_clear(pw);
  mpfr_clear(g);
  mpfr_clear(one);
  return detail::e2pi(f);
}

}  // namespace

TEST_CASE("VaughanParams validation and canonical split", "[vaughan]") {
  REQUIRE_THROWS_AS(VaughanParams(0.5, 2.0), InvalidInput);
  REQUIRE_THROWS_AS(VaughanParams(2.0, 0.0), InvalidInput);
  REQUIRE_THROWS_AS(VaughanParams(2e6, 1e6), InvalidInput);  // U*V > 1e12
  REQUIRE_NOTHROW(VaughanParams(1.0, 1.0));

  VaughanParams p = VaughanParams::from_range(10000000);  // 10^7
  REQUIRE(p.U == std::pow(1e7, 1.0 / 7.0));
  REQUIRE(p.V == std::pow(1e7, 3.0 / 7.0));
  REQUIRE(p.u_floor() == static_cast<uint64_t>(p.U));
  REQUIRE(VaughanParams(5.9, 10.2).u_floor() == 5);
  REQUIRE(VaughanParams(5.9, 10.2).v_floor() == 10);
}

TEST_CASE("coeff_a matches the defining double sum", "[vaughan]") {
  for (auto [U, V] : std::vector<std::pair<double, double>>{{10, 30}, {5, 10}}) {
    for (uint64_t k = 1; k <= 2000; ++k) {
      double want = naive_coeff_a(k, U, V);
      if (coeff_a(k, U, V) != Catch::Approx(want).margin(1e-9)) {
        INFO("k=" << k << " U=" << U << " V=" << V);
        REQUIRE(coeff_a(k, U, V) == Catch::Approx(want).margin(1e-9));
      }
    }
  }
  REQUIRE(coeff_a(1, 10, 10) == 0.0);  // Lambda(1) = 0
  REQUIRE_THROWS_AS(coeff_a(0, 10, 10), InvalidInput);
  REQUIRE_THROWS_AS(coeff_a(kMaxVaughanN + 1, 10, 10), InvalidInput);
}

TEST_CASE("coeff_b matches the divisor sum and vanishes in (1, V]", "[vaughan]") {
  for (double V : {10.0, 50.0}) {
    for (uint64_t k = 1; k <= 2000; ++k) {
      if (coeff_b(k, V) != naive_coeff_b(k, V)) {
        INFO("k=" << k << " V=" << V);
        REQUIRE(coeff_b(k, V) == naive_coeff_b(k, V));
      }
    }
  }
  REQUIRE(coeff_b(1, 50) == 1);
  for (uint64_t k = 2; k <= 50; ++k) REQUIRE(coeff_b(k, 50.0) == 0);
  REQUIRE_THROWS_AS(coeff_b(0, 10), InvalidInput);
}

TEST_CASE("three-term decomposition reconstructs von Mangoldt", "[vaughan]") {
  for (auto [U, V] :
       std::vector<std::pair<double, double>>{{2, 2}, {5, 10}, {31, 17}}) {
    for (uint64_t n = static_cast<uint64_t>(U) + 1; n <= 3000; ++n) {
      VaughanTerms t = vaughan_terms(n, U, V);
      auto pp = von_mangoldt(n);
      double lam = pp ? pp->log_p() : 0.0;
      REQUIRE(t.exact_match);
      REQUIRE(t.t1 + t.t2 + t.t3 == Catch::Approx(lam).margin(1e-10));
      REQUIRE(t.lambda == Catch::Approx(lam).margin(1e-12));
    }
  }
  REQUIRE_THROWS_AS(vaughan_terms(5, 10.0, 10.0), InvalidInput);  // n <= U
  REQUIRE_THROWS_AS(vaughan_terms(kMaxVaughanN + 1, 2.0, 2.0), InvalidInput);
}

TEST_CASE("certified power phase agrees with MPFR", "[bilinear]") {
  // perfect powers collapse to an exact zero fraction
  REQUIRE(detail::power_phase_frac(PSParams(21, 20), uint64_t(1) << 21, 1) ==
          0.0);
  REQUIRE(detail::power_phase_frac(PSParams(3, 2), 8, 1) == 0.0);  // 8^{2/3}=4

  std::mt19937_64 rng(431);
  for (PSParams P : {PSParams(21, 20), PSParams(3, 2)}) {
    for (int i = 0; i < 300; ++i) {
      uint64_t t = rng() % 1000000 + 1;
      long h = static_cast<long>(rng() % 6) + 1;
      mpfr_t x, g;
      mpfr_init2(x, 320);
      mpfr_init2(g, 320);
      mpfr_set_ui(x, t, MPFR_RNDN);
      mpfr_set_si(g, P.den(), MPFR_RNDN);
      mpfr_div_si(g, g, P.num(), MPFR_RNDN);
      mpfr_pow(x, x, g, MPFR_RNDN);
      mpfr_mul_si(x, x, h, MPFR_RNDN);
      mpfr_frac(x, x, MPFR_RNDN);
      double want = mpfr_get_d(x, MPFR_RNDN);
      mpfr_clear(x);
      mpfr_clear(g);
      REQUIRE(detail::power_phase_frac(P, t, h) ==
              Catch::Approx(want).margin(1e-12));
    }
  }
}

TEST_CASE("phase table matches MPFR evaluation", "[bilinear]") {
  BeattyParams B(RealSpec::parse("sqrt2"), RealSpec::parse("rat:3/10"));
  PSParams P(21, 20);
  const uint64_t N = 100, N2 = 200;
  const long long k = 2;
  const long h = 3;
  auto tab = detail::bilinear_phase_table(N, N2, k, h, B, P, 1);
  REQUIRE(tab.size() == N2 - N);
  for (uint64_t t = N + 1; t <= N2; ++t) {
    std::complex<double> want = mpfr_phase(t, k, h, P);
    REQUIRE(std::abs(tab[t - N - 1] - want) < 1e-9);
  }
}

TEST_CASE("bilinear split reconstructs the twisted sum", "[bilinear]") {
  BeattyParams B(RealSpec::parse("sqrt2"), RealSpec::parse("rat:3/10"));
  PSParams P(21, 20);
  VaughanParams par(5.0, 10.0);

  for (long long k : {1LL, -2LL}) {
    for (long h : {1L, 2L}) {
      BilinearSplit bs = bilinear_split(1000, 2000, par, k, h, B, P, 1);
      REQUIRE(bs.ok);
      REQUIRE(bs.residual <= bs.tolerance);
      REQUIRE(bs.sums.size() == 6);

      const auto& s1 = bs.find("S1");
      const auto& s4 = bs.find("S4");
      const auto& s5 = bs.find("S5");
      REQUIRE(s4.value + s5.value == s1.value);  // exact partition
      REQUIRE(s4.term_count + s5.term_count == s1.term_count);

      const auto& direct = bs.find("direct");
      std::complex<double> lhs =
          -s1.value + bs.find("S2").value - bs.find("S3").value;
      REQUIRE(std::abs(lhs - direct.value) == Catch::Approx(bs.residual));
      // twisted Lambda sum is bounded by psi(N2) - psi(N) ~ N
      REQUIRE(std::abs(direct.value) < 1200.0);
      REQUIRE(direct.term_count > 0);
    }
  }

  BilinearSplit one = bilinear_split(1000, 2000, par, 3, 2, B, P, 1);
  BilinearSplit eight = bilinear_split(1000, 2000, par, 3, 2, B, P, 8);
  for (const char* lbl : {"S1", "S2", "S3", "S4", "S5", "direct"})
    REQUIRE(one.find(lbl).value == eight.find(lbl).value);
  REQUIRE_THROWS_AS(one.find("S9"), IndexOutOfRange);
  REQUIRE(one.to_json()["sums"].size() == 6);

  REQUIRE_THROWS_AS(bilinear_split(0, 10, par, 1, 1, B, P), InvalidInput);
  REQUIRE_THROWS_AS(bilinear_split(100, 100, par, 1, 1, B, P), InvalidInput);
  REQUIRE_THROWS_AS(bilinear_split(100, 250, par, 1, 1, B, P), InvalidInput);
  REQUIRE_THROWS_AS(bilinear_split(6000000, 7000000, par, 1, 1, B, P),
                    InvalidInput);
  REQUIRE_THROWS_AS(bilinear_split(100, 200, par, 0, 1, B, P), InvalidInput);
  REQUIRE_THROWS_AS(bilinear_split(100, 200, par, 1, 0, B, P), InvalidInput);
}
