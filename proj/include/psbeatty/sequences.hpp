#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <string>

#include "psbeatty/errors.hpp"
#include "psbeatty/exact_real.hpp"
#include "psbeatty/realspec.hpp"

namespace psb {

inline constexpr uint64_t kMaxIndex = 1000000000000ULL;  // 10^12

/// Beatty sequence parameters (alpha, beta) with the derived quantities
/// a = 1/alpha and b = (1-beta)/alpha of the membership lemma. alpha > 1 is
/// certified at construction.
class BeattyParams {
 public:
  BeattyParams(RealSpec alpha, RealSpec beta)
      : alpha_spec_(std::move(alpha)), beta_spec_(std::move(beta)) {
    alpha_ = ExactReal::from_spec(alpha_spec_);
    beta_ = ExactReal::from_spec(beta_spec_);
    if (alpha_.cmp(ExactReal(1)) <= 0)
      throw InvalidInput("Beatty alpha must exceed 1");
    a_ = alpha_.recip();
    b_ = (ExactReal(1) - beta_) * a_;
  }

  const RealSpec& alpha_spec() const { return alpha_spec_; }
  const RealSpec& beta_spec() const { return beta_spec_; }
  const ExactReal& alpha() const { return alpha_; }
  const ExactReal& beta() const { return beta_; }
  const ExactReal& a() const { return a_; }
  const ExactReal& b() const { return b_; }

 private:
  RealSpec alpha_spec_, beta_spec_;
  ExactReal alpha_, beta_, a_, b_;
};

/// Piatetski-Shapiro exponent c = num/den in lowest terms, 1 < c < 2, with
/// gamma = 1/c = den/num.
class PSParams {
 public:
  PSParams(long num, long den) : num_(num), den_(den) {
    if (den_ <= 0 || num_ <= 0) throw InvalidInput("c must be positive");
    long g = std::gcd(num_, den_);
    num_ /= g;
    den_ /= g;
    if (!(num_ > den_ && num_ < 2 * den_))
      throw InvalidInput("c must lie strictly between 1 and 2");
  }

  static PSParams from_rational(const mpq_class& c) {
    if (!c.get_num().fits_slong_p() || !c.get_den().fits_slong_p())
      throw InvalidInput("c numerator/denominator too large");
    return PSParams(c.get_num().get_si(), c.get_den().get_si());
  }

  long num() const { return num_; }  // numerator of c
  long den() const { return den_; }  // denominator of c = numerator of gamma
  double c() const { return static_cast<double>(num_) / den_; }
  double gamma() const { return static_cast<double>(den_) / num_; }
  bool proven_range() const { return 13 * num_ < 14 * den_; }  // c < 14/13
  std::string str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  long num_, den_;
};

namespace detail {

inline void check_index(uint64_t n, const char* who) {
  if (n < 1 || n > kMaxIndex)
    throw InvalidInput(std::string(who) + ": index out of [1, 10^12]");
}

}  // namespace detail

/// Exact floor(alpha*n + beta).
inline mpz_class beatty_term(const BeattyParams& B, uint64_t n) {
  detail::check_index(n, "beatty_term");
  ExactReal t = B.alpha() * ExactReal(static_cast<long>(n)) + B.beta();
  return t.floor();
}

/// The periodic indicator X_a: 1 iff 0 < {t} <= a. {t} = 0 returns 0.
inline int chi_a(const BeattyParams& B, const ExactReal& t) {
  ExactReal f = t.frac();
  if (f.is_zero_exact()) return 0;
  return f.cmp(B.a()) <= 0 ? 1 : 0;
}

/// Membership lemma: m in B_{alpha,beta} iff X_a(a*m + b) = 1.
inline int beatty_contains(const BeattyParams& B, uint64_t m) {
  detail::check_index(m, "beatty_contains");
  ExactReal t = B.a() * ExactReal(static_cast<long>(m)) + B.b();
  return chi_a(B, t);
}

/// Exact floor(n^c) via the integer den-th root of n^num.
inline mpz_class ps_term(const PSParams& P, uint64_t n) {
  detail::check_index(n, "ps_term");
  mpz_class t;
  mpz_class base(static_cast<unsigned long>(n));
  mpz_pow_ui(t.get_mpz_t(), base.get_mpz_t(),
             static_cast<unsigned long>(P.num()));
  mpz_class root;
  mpz_root(root.get_mpz_t(), t.get_mpz_t(),
           static_cast<unsigned long>(P.den()));
  return root;
}

namespace detail {

/// floor(-v^gamma) with gamma = den/num: exact via integer root of v^den,
/// with exact detection of v^gamma integral (v a perfect num-th power).
inline mpz_class neg_pow_floor(const PSParams& P, uint64_t v) {
  mpz_class t;
  mpz_class base(static_cast<unsigned long>(v));
  mpz_pow_ui(t.get_mpz_t(), base.get_mpz_t(),
             static_cast<unsigned long>(P.den()));
  mpz_class root, rem;
  mpz_rootrem(root.get_mpz_t(), rem.get_mpz_t(), t.get_mpz_t(),
              static_cast<unsigned long>(P.num()));
  if (rem != 0) root += 1;  // ceil(v^gamma); floor(-x) = -ceil(x)
  return -root;
}

}  // namespace detail

/// PS characterization lemma: X^{(c)}(m) = floor(-m^gamma) - floor(-(m+1)^gamma),
/// which is 1 exactly when m has the form floor(n^c) (c in (1,2)).
inline int ps_indicator(const PSParams& P, uint64_t m) {
  detail::check_index(m, "ps_indicator");
  mpz_class x = detail::neg_pow_floor(P, m) - detail::neg_pow_floor(P, m + 1);
  return static_cast<int>(x.get_si());
}

}  // namespace psb
