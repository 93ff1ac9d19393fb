#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>

#include "psbeatty/errors.hpp"
#include "psbeatty/mp.hpp"

namespace psb {

inline mpz_class isqrt_z(const mpz_class& z) {
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), z.get_mpz_t());
  return r;
}

/// floor(q * sqrt(d)) for d >= 0, d not a perfect square unless q == 0.
inline mpz_class floor_q_sqrt(const mpz_class& q, const mpz_class& d) {
  if (q == 0 || d == 0) return 0;
  mpz_class t = q * q * d;
  mpz_class s = isqrt_z(t);
  if (q > 0) return s;
  return -s - 1;  // t is not a perfect square, so ceil(sqrt(t)) = s + 1
}

/// Writes d = s^2 * rest with rest square-free. Trial division up to 10^5
/// plus perfect-square detection of the cofactor: canonical for d <= ~10^10,
/// best effort beyond (any surviving square factor needs a prime > 10^5).
inline std::pair<mpz_class, mpz_class> extract_square_part(mpz_class d) {
  mpz_class s = 1;
  if (d <= 1) return {s, d};
  mpz_class f2;
  for (unsigned long f = 2; f <= 100000UL; ++f) {
    f2 = f;
    f2 *= f;
    if (f2 > d) break;
    while (mpz_divisible_p(d.get_mpz_t(), f2.get_mpz_t())) {
      d /= f2;
      s *= f;
    }
  }
  if (mpz_perfect_square_p(d.get_mpz_t())) {
    s *= isqrt_z(d);
    d = 1;
  }
  return {s, d};
}

/// Exact element (p + q*sqrt(d)) / r of a real quadratic field (or of Q when
/// q == 0, in which case d is stored as 0). Invariants after construction:
/// r > 0, gcd(p, q, r) = 1, d square-free and >= 2 when q != 0.
class Surd {
 public:
  Surd() : p_(0), q_(0), r_(1), d_(0) {}

  Surd(mpz_class p, mpz_class q, mpz_class r, mpz_class d)
      : p_(std::move(p)), q_(std::move(q)), r_(std::move(r)), d_(std::move(d)) {
    if (r_ == 0) throw InvalidInput("surd denominator must be nonzero");
    if (d_ < 0) throw InvalidInput("surd radicand must be nonnegative");
    if (q_ != 0 && d_ > 1) {
      auto [s, rest] = extract_square_part(d_);
      q_ *= s;
      d_ = rest;
    }
    if (d_ <= 1) {  // sqrt(1) = 1, sqrt(0) = 0: value is rational
      if (d_ == 1) p_ += q_;
      q_ = 0;
      d_ = 0;
    }
    reduce();
  }

  static Surd from_rational(const mpq_class& v) {
    return make_reduced(v.get_num(), 0, v.get_den(), 0);
  }
  static Surd from_int(const mpz_class& v) { return make_reduced(v, 0, 1, 0); }

  /// Trusted constructor for arithmetic results: d already square-free or 0.
  static Surd make_reduced(mpz_class p, mpz_class q, mpz_class r, mpz_class d) {
    Surd s(Raw{});
    s.p_ = std::move(p);
    s.q_ = std::move(q);
    s.r_ = std::move(r);
    s.d_ = std::move(d);
    if (s.q_ == 0) s.d_ = 0;
    s.reduce();
    return s;
  }

  const mpz_class& p() const { return p_; }
  const mpz_class& q() const { return q_; }
  const mpz_class& r() const { return r_; }
  const mpz_class& d() const { return d_; }

  bool is_rational() const { return q_ == 0; }
  bool is_zero() const { return q_ == 0 && p_ == 0; }
  mpq_class to_rational() const {
    if (!is_rational()) throw InvalidInput("surd is irrational");
    return mpq_class(p_) / mpq_class(r_);
  }

  bool same_field(const Surd& o) const {
    return is_rational() || o.is_rational() || d_ == o.d_;
  }

  friend Surd operator+(const Surd& a, const Surd& b) {
    a.require_compatible(b);
    return make_reduced(a.p_ * b.r_ + b.p_ * a.r_, a.q_ * b.r_ + b.q_ * a.r_,
                        a.r_ * b.r_, a.q_ != 0 ? a.d_ : b.d_);
  }
  friend Surd operator-(const Surd& a, const Surd& b) { return a + (-b); }
  friend Surd operator-(const Surd& a) {
    return make_reduced(-a.p_, -a.q_, a.r_, a.d_);
  }
  friend Surd operator*(const Surd& a, const Surd& b) {
    a.require_compatible(b);
    mpz_class d = a.q_ != 0 ? a.d_ : b.d_;
    return make_reduced(a.p_ * b.p_ + a.q_ * b.q_ * d,
                        a.p_ * b.q_ + a.q_ * b.p_, a.r_ * b.r_, d);
  }
  friend Surd operator*(const Surd& a, const mpz_class& n) {
    return make_reduced(a.p_ * n, a.q_ * n, a.r_, a.d_);
  }

  Surd recip() const {
    if (is_zero()) throw InvalidInput("reciprocal of zero");
    mpz_class den = p_ * p_ - q_ * q_ * d_;
    return make_reduced(r_ * p_, -r_ * q_, den, d_);
  }

  int sign() const {
    if (q_ == 0) return sgn(p_);
    if (p_ == 0) return sgn(q_);
    int sp = sgn(p_), sq = sgn(q_);
    if (sp == sq) return sp;
    // Opposite signs: compare p^2 against q^2 d (never equal, d square-free).
    mpz_class lhs = p_ * p_, rhs = q_ * q_ * d_;
    if (sp > 0) return lhs > rhs ? 1 : -1;
    return rhs > lhs ? 1 : -1;
  }

  mpz_class floor() const {
    mpz_class num = p_ + floor_q_sqrt(q_, d_);
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), num.get_mpz_t(), r_.get_mpz_t());
    return f;
  }

  /// this - floor(this), exact; lies in [0, 1).
  Surd fractional() const {
    mpz_class f = floor();
    return make_reduced(p_ - f * r_, q_, r_, d_);
  }

  int cmp(const Surd& o) const { return (*this - o).sign(); }

  BigInterval eval(mpfr_prec_t prec) const {
    BigInterval num(prec);
    if (q_ == 0) {
      num = BigInterval::from_z(p_, prec);
    } else {
      BigInterval s = isqrt(BigInterval::from_z(d_, prec), prec);
      num = iadd(BigInterval::from_z(p_, prec),
                 imul(BigInterval::from_z(q_, prec), s, prec), prec);
    }
    BigInterval r(prec);
    mpfr_div_z(r.lo.raw(), num.lo.raw(), r_.get_mpz_t(), MPFR_RNDD);
    mpfr_div_z(r.hi.raw(), num.hi.raw(), r_.get_mpz_t(), MPFR_RNDU);
    return r;
  }

  double to_double() const { return eval(128).mid(); }

  std::string str() const {
    if (is_rational()) return p_.get_str() + "/" + r_.get_str();
    return "(" + p_.get_str() + "+" + q_.get_str() + "*sqrt(" + d_.get_str() +
           "))/" + r_.get_str();
  }

 private:
  struct Raw {};
  explicit Surd(Raw) {}

  void reduce() {
    if (r_ < 0) {
      p_ = -p_;
      q_ = -q_;
      r_ = -r_;
    }
    mpz_class g = gcd(gcd(p_, q_), r_);
    if (g > 1) {
      p_ /= g;
      q_ /= g;
      r_ /= g;
    }
  }

  void require_compatible(const Surd& o) const {
    if (!same_field(o))
      throw InvalidInput("arithmetic across distinct quadratic fields");
  }

  mpz_class p_, q_, r_, d_;
};

}  // namespace psb
