// Beatty and Piatetski-Shapiro sequence arithmetic.
//
// Oracles: brute-force images built term by term, hand-computed floor
// fixtures, integer root certificates, and MPFR evaluation at 320 bits.

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <mpfr.h>

#include "psbeatty/errors.hpp"
#include "psbeatty/sequences.hpp"

using namespace psb;

namespace {

BeattyParams make_beatty(const char* alpha, const char* beta) {
  return BeattyParams(RealSpec::parse(alpha), RealSpec::parse(beta));
}

// Image of n -> floor(alpha*n + beta) over n >= 0, truncated at M.
std::set<mpz_class> beatty_image(const BeattyParams& B, uint64_t M) {
  std::set<mpz_class> img;
  img.insert(B.beta().floor());
  for (uint64_t n = 1;; ++n) {
    mpz_class t = beatty_term(B, n);
    if (t > static_cast<long>(M)) break;
    img.insert(t);
  }
  return img;
}

std::set<mpz_class> ps_image(const PSParams& P, uint64_t M) {
  std::set<mpz_class> img;
  for (uint64_t n = 1;; ++n) {
    mpz_class t = ps_term(P, n);
    if (t > static_cast<long>(M)) break;
    img.insert(t);
  }
  return img;
}

// floor(-v^gamma) at 320 bits; exact for the sample sizes used here.
mpz_class mpfr_neg_pow_floor(const PSParams& P, uint64_t v) {
  mpfr_t x, g;
  mpfr_init2(x, 320);
  mpfr_init2(g, 320);
  mpfr_set_ui(x, v, MPFR_RNDN);
  mpfr_set_si(g, P.den(), MPFR_RNDN);
  mpfr_div_si(g, g, P.num(), MPFR_RNDN);
  mpfr_pow(x, x, g, MPFR_RNDN);
  mpfr_neg(x, x, MPFR_RNDN);
  mpfr_floor(x, x);
  mpz_class out;
  mpfr_get_z(out.get_mpz_t(), x, MPFR_RNDN);
  mpfr_clear(x);
  mpfr_clear(g);
  return out;
}

}  // namespace

TEST_CASE("Beatty parameters certify alpha > 1 and derive a, b", "[beatty]") {
  REQUIRE_THROWS_AS(make_beatty("rat:1/1", "rat:0/1"), InvalidInput);
  REQUIRE_THROWS_AS(make_beatty("rat:1/2", "rat:0/1"), InvalidInput);
  REQUIRE_THROWS_AS(make_beatty("surd:(-1+1*sqrt(5))/2", "rat:0/1"),
                    InvalidInput);  // golden - 1 < 1

  BeattyParams B = make_beatty("sqrt2", "rat:3/10");
  REQUIRE((B.a() * B.alpha() - ExactReal(1)).is_zero_exact());
  REQUIRE((B.b() * B.alpha() - (ExactReal(1) - B.beta())).is_zero_exact());
  REQUIRE(B.a().to_double() == Catch::Approx(0.7071067811865475).epsilon(1e-15));
  REQUIRE(B.b().to_double() == Catch::Approx(0.4949747468305833).epsilon(1e-15));
}

TEST_CASE("PS parameters reduce and reject out-of-range exponents", "[ps]") {
  PSParams p(42, 40);
  REQUIRE(p.num() == 21);
  REQUIRE(p.den() == 20);
  REQUIRE(p.str() == "21/20");
  REQUIRE(p.c() == Catch::Approx(1.05));
  REQUIRE(p.gamma() == Catch::Approx(20.0 / 21.0));

  REQUIRE_THROWS_AS(PSParams(1, 1), InvalidInput);   // c = 1
  REQUIRE_THROWS_AS(PSParams(2, 1), InvalidInput);   // c = 2
  REQUIRE_THROWS_AS(PSParams(5, 2), InvalidInput);   // c > 2
  REQUIRE_THROWS_AS(PSParams(2, 3), InvalidInput);   // c < 1
  REQUIRE_THROWS_AS(PSParams(0, 1), InvalidInput);
  REQUIRE_THROWS_AS(PSParams(3, -2), InvalidInput);

  REQUIRE(PSParams(21, 20).proven_range());
  REQUIRE(PSParams(15, 14).proven_range());
  REQUIRE_FALSE(PSParams(14, 13).proven_range());  // boundary excluded
  REQUIRE_FALSE(PSParams(13, 12).proven_range());
  REQUIRE_FALSE(PSParams(3, 2).proven_range());

  PSParams q = PSParams::from_rational(mpq_class(21, 20));
  REQUIRE(q.num() == 21);
  REQUIRE(q.den() == 20);
}

TEST_CASE("Beatty terms match hand floors", "[beatty]") {
  BeattyParams sqrt2 = make_beatty("sqrt2", "rat:0/1");
  std::vector<long> want{1, 2, 4, 5, 7, 8, 9, 11, 12, 14};
  for (size_t i = 0; i < want.size(); ++i)
    REQUIRE(beatty_term(sqrt2, i + 1) == want[i]);

  BeattyParams golden = make_beatty("golden", "rat:1/2");
  std::vector<long> want2{2, 3, 5, 6, 8, 10, 11, 13};
  for (size_t i = 0; i < want2.size(); ++i)
    REQUIRE(beatty_term(golden, i + 1) == want2[i]);

  // rational alpha: floor(5n/3 + 1/3) computed by hand
  BeattyParams rat = make_beatty("rat:5/3", "rat:1/3");
  std::vector<long> want3{2, 3, 5, 7, 8, 10};
  for (size_t i = 0; i < want3.size(); ++i)
    REQUIRE(beatty_term(rat, i + 1) == want3[i]);

  REQUIRE_THROWS_AS(beatty_term(sqrt2, 0), InvalidInput);
  REQUIRE_THROWS_AS(beatty_term(sqrt2, kMaxIndex + 1), InvalidInput);
}

TEST_CASE("PS terms satisfy the root certificate", "[ps]") {
  PSParams c32(3, 2);
  std::vector<long> want{1, 2, 5, 8, 11, 14};
  for (size_t i = 0; i < want.size(); ++i)
    REQUIRE(ps_term(c32, i + 1) == want[i]);
  REQUIRE(ps_term(PSParams(21, 20), 100) == 125);  // 10^2.1 = 125.89...
  REQUIRE(ps_term(c32, uint64_t(1) << 20) == (mpz_class(1) << 30));
  REQUIRE(ps_term(c32, 49) == 343);  // perfect square -> exact cube

  // r = floor(n^{num/den}) iff r^den <= n^num < (r+1)^den
  std::mt19937_64 rng(411);
  for (PSParams P : {PSParams(3, 2), PSParams(21, 20), PSParams(13, 12)}) {
    for (int i = 0; i < 200; ++i) {
      uint64_t n = rng() % 1000000000 + 1;
      mpz_class r = ps_term(P, n);
      mpz_class npow, rlo, rhi;
      mpz_class base(static_cast<unsigned long>(n));
      mpz_pow_ui(npow.get_mpz_t(), base.get_mpz_t(),
                 static_cast<unsigned long>(P.num()));
      mpz_pow_ui(rlo.get_mpz_t(), r.get_mpz_t(),
                 static_cast<unsigned long>(P.den()));
      mpz_class r1 = r + 1;
      mpz_pow_ui(rhi.get_mpz_t(), r1.get_mpz_t(),
                 static_cast<unsigned long>(P.den()));
      REQUIRE(rlo <= npow);
      REQUIRE(npow < rhi);
    }
  }

  REQUIRE_THROWS_AS(ps_term(c32, 0), InvalidInput);
  REQUIRE_THROWS_AS(ps_term(c32, kMaxIndex + 1), InvalidInput);
}

TEST_CASE("Membership lemma agrees with the brute image", "[beatty]") {
  const uint64_t M = 500;
  for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{
           {"sqrt2", "rat:0/1"},
           {"golden", "rat:1/2"},
           {"surd:(0+1*sqrt(3))/1", "rat:-7/10"},
           {"surd:(1+1*sqrt(5))/1", "rat:2/1"},
           {"rat:5/3", "rat:0/1"},
           {"rat:5/3", "rat:1/3"},
           {"rat:7/2", "rat:-1/2"},
           {"rat:3/2", "rat:1/1"}}) {
    BeattyParams B = make_beatty(a, b);
    std::set<mpz_class> img = beatty_image(B, M);
    for (uint64_t m = 1; m <= M; ++m) {
      int want = img.count(mpz_class(static_cast<long>(m))) ? 1 : 0;
      if (beatty_contains(B, m) != want) {
        INFO("alpha=" << a << " beta=" << b << " m=" << m);
        REQUIRE(beatty_contains(B, m) == want);
      }
    }
  }
}

TEST_CASE("chi_a boundary cases", "[beatty]") {
  BeattyParams B = make_beatty("rat:3/2", "rat:0/1");  // a = 2/3
  REQUIRE(chi_a(B, ExactReal(5)) == 0);                // integral t
  REQUIRE(chi_a(B, ExactReal(mpq_class(2, 3))) == 1);  // {t} = a exactly
  REQUIRE(chi_a(B, ExactReal(mpq_class(5, 3))) == 1);
  REQUIRE(chi_a(B, ExactReal(mpq_class(3, 4))) == 0);  // {t} just above a
  REQUIRE(chi_a(B, ExactReal(mpq_class(-1, 3))) == 1);  // {-1/3} = 2/3
}

TEST_CASE("PS indicator telescopes to the counting function", "[ps]") {
  const uint64_t M = 3000;
  for (PSParams P : {PSParams(3, 2), PSParams(21, 20), PSParams(13, 12)}) {
    long direct = 0;
    for (uint64_t n = 1;; ++n) {
      if (ps_term(P, n) > static_cast<long>(M)) break;
      if (ps_term(P, n) >= 1) ++direct;
    }
    mpz_class tele = 0;
    for (uint64_t m = 1; m <= M; ++m) tele += ps_indicator(P, m);
    REQUIRE(tele == direct);
    // partial sums collapse to the endpoint floors
    REQUIRE(tele ==
            detail::neg_pow_floor(P, 1) - detail::neg_pow_floor(P, M + 1));
  }
}

TEST_CASE("PS indicator agrees with the brute image", "[ps]") {
  const uint64_t M = 2000;
  for (PSParams P : {PSParams(3, 2), PSParams(21, 20), PSParams(13, 12)}) {
    std::set<mpz_class> img = ps_image(P, M);
    for (uint64_t m = 1; m <= M; ++m) {
      int want = img.count(mpz_class(static_cast<long>(m))) ? 1 : 0;
      if (ps_indicator(P, m) != want) {
        INFO("c=" << P.str() << " m=" << m);
        REQUIRE(ps_indicator(P, m) == want);
      }
    }
  }
  REQUIRE_THROWS_AS(ps_indicator(PSParams(3, 2), 0), InvalidInput);
}

TEST_CASE("neg_pow_floor matches high-precision evaluation", "[ps]") {
  // exact at perfect powers: (2^21)^{20/21} = 2^20, (3^3)^{2/3} = 9
  REQUIRE(detail::neg_pow_floor(PSParams(21, 20), uint64_t(1) << 21) ==
          -(mpz_class(1) << 20));
  REQUIRE(detail::neg_pow_floor(PSParams(3, 2), 27) == -9);
  REQUIRE(detail::neg_pow_floor(PSParams(3, 2), 28) == -10);  // ceil rounds

  std::mt19937_64 rng(412);
  for (PSParams P : {PSParams(3, 2), PSParams(21, 20), PSParams(13, 12)}) {
    for (int i = 0; i < 200; ++i) {
      uint64_t v = rng() % 1000000000 + 1;
      REQUIRE(detail::neg_pow_floor(P, v) == mpfr_neg_pow_floor(P, v));
    }
  }
}
