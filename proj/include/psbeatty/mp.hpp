#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>

#include "psbeatty/errors.hpp"

namespace psb {

/// RAII wrapper around mpfr_t. Copyable, movable; a moved-from object stays
/// valid (zero at minimal precision).
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 64) {
    mpfr_init2(x_, prec);
    mpfr_set_zero(x_, 1);
  }
  BigFloat(const BigFloat& o) {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_set(x_, o.x_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(x_, MPFR_PREC_MIN);
    mpfr_set_zero(x_, 1);
    mpfr_swap(x_, o.x_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(x_, mpfr_get_prec(o.x_));
      mpfr_set(x_, o.x_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    if (this != &o) mpfr_swap(x_, o.x_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(x_); }

  mpfr_ptr raw() { return x_; }
  mpfr_srcptr raw() const { return x_; }
  double d() const { return mpfr_get_d(x_, MPFR_RNDN); }

 private:
  mpfr_t x_;
};

/// Closed interval [lo, hi] with directed-rounding endpoints. All mutating
/// operations round lo down and hi up, so the true value of the represented
/// expression is always contained.
struct BigInterval {
  BigFloat lo, hi;

  explicit BigInterval(mpfr_prec_t prec = 128) : lo(prec), hi(prec) {}

  static BigInterval from_q(const mpq_class& q, mpfr_prec_t prec) {
    BigInterval r(prec);
    mpfr_set_q(r.lo.raw(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi.raw(), q.get_mpq_t(), MPFR_RNDU);
    return r;
  }
  static BigInterval from_z(const mpz_class& z, mpfr_prec_t prec) {
    BigInterval r(prec);
    mpfr_set_z(r.lo.raw(), z.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi.raw(), z.get_mpz_t(), MPFR_RNDU);
    return r;
  }
  static BigInterval from_q_pair(const mpq_class& a, const mpq_class& b,
                                 mpfr_prec_t prec) {
    BigInterval r(prec);
    mpfr_set_q(r.lo.raw(), a.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi.raw(), b.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  /// Exact rational endpoints (mpfr values are dyadic).
  mpq_class lo_q() const {
    mpf_class f(0, mpfr_get_prec(lo.raw()) + 8);
    mpfr_get_f(f.get_mpf_t(), lo.raw(), MPFR_RNDD);
    return mpq_class(f);
  }
  mpq_class hi_q() const {
    mpf_class f(0, mpfr_get_prec(hi.raw()) + 8);
    mpfr_get_f(f.get_mpf_t(), hi.raw(), MPFR_RNDU);
    return mpq_class(f);
  }

  double width() const {
    BigFloat w(64);
    mpfr_sub(w.raw(), hi.raw(), lo.raw(), MPFR_RNDU);
    return w.d();
  }
  double mid() const {
    BigFloat m(mpfr_get_prec(lo.raw()));
    mpfr_add(m.raw(), lo.raw(), hi.raw(), MPFR_RNDN);
    mpfr_div_2ui(m.raw(), m.raw(), 1, MPFR_RNDN);
    return m.d();
  }

  bool finite() const {
    return mpfr_number_p(lo.raw()) && mpfr_number_p(hi.raw());
  }

  /// True and sets `out` if both endpoints share the same floor.
  bool certified_floor(mpz_class& out) const {
    if (!finite()) return false;
    mpz_class fl, fh;
    mpfr_get_z(fl.get_mpz_t(), lo.raw(), MPFR_RNDD);
    mpfr_get_z(fh.get_mpz_t(), hi.raw(), MPFR_RNDD);
    if (fl != fh) return false;
    out = fl;
    return true;
  }

  /// +1 / -1 when separated from zero; 0 when undecided.
  int certified_sign() const {
    if (mpfr_sgn(lo.raw()) > 0) return 1;
    if (mpfr_sgn(hi.raw()) < 0) return -1;
    return 0;
  }

  bool contains_zero() const {
    return mpfr_sgn(lo.raw()) <= 0 && mpfr_sgn(hi.raw()) >= 0;
  }
};

inline BigInterval iadd(const BigInterval& a, const BigInterval& b,
                        mpfr_prec_t prec) {
  BigInterval r(prec);
  mpfr_add(r.lo.raw(), a.lo.raw(), b.lo.raw(), MPFR_RNDD);
  mpfr_add(r.hi.raw(), a.hi.raw(), b.hi.raw(), MPFR_RNDU);
  return r;
}

inline BigInterval isub(const BigInterval& a, const BigInterval& b,
                        mpfr_prec_t prec) {
  BigInterval r(prec);
  mpfr_sub(r.lo.raw(), a.lo.raw(), b.hi.raw(), MPFR_RNDD);
  mpfr_sub(r.hi.raw(), a.hi.raw(), b.lo.raw(), MPFR_RNDU);
  return r;
}

inline BigInterval ineg(const BigInterval& a, mpfr_prec_t prec) {
  BigInterval r(prec);
  mpfr_neg(r.lo.raw(), a.hi.raw(), MPFR_RNDD);
  mpfr_neg(r.hi.raw(), a.lo.raw(), MPFR_RNDU);
  return r;
}

inline BigInterval imul(const BigInterval& a, const BigInterval& b,
                        mpfr_prec_t prec) {
  BigInterval r(prec);
  BigFloat t(prec);
  mpfr_srcptr as[2] = {a.lo.raw(), a.hi.raw()};
  mpfr_srcptr bs[2] = {b.lo.raw(), b.hi.raw()};
  bool first = true;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      mpfr_mul(t.raw(), as[i], bs[j], MPFR_RNDD);
      if (first || mpfr_cmp(t.raw(), r.lo.raw()) < 0)
        mpfr_set(r.lo.raw(), t.raw(), MPFR_RNDD);
      mpfr_mul(t.raw(), as[i], bs[j], MPFR_RNDU);
      if (first || mpfr_cmp(t.raw(), r.hi.raw()) > 0)
        mpfr_set(r.hi.raw(), t.raw(), MPFR_RNDU);
      first = false;
    }
  }
  return r;
}

/// Reciprocal; requires the interval to be separated from zero.
inline BigInterval irecip(const BigInterval& a, mpfr_prec_t prec) {
  if (a.contains_zero())
    throw PrecisionExhausted("reciprocal of interval containing zero");
  BigInterval r(prec);
  mpfr_ui_div(r.lo.raw(), 1, a.hi.raw(), MPFR_RNDD);
  mpfr_ui_div(r.hi.raw(), 1, a.lo.raw(), MPFR_RNDU);
  return r;
}

/// Square root; requires lo >= 0.
inline BigInterval isqrt(const BigInterval& a, mpfr_prec_t prec) {
  BigInterval r(prec);
  mpfr_sqrt(r.lo.raw(), a.lo.raw(), MPFR_RNDD);
  mpfr_sqrt(r.hi.raw(), a.hi.raw(), MPFR_RNDU);
  return r;
}

/// Enclosure of t^(1/n) for an exact non-negative integer t.
inline BigInterval irootn_z(const mpz_class& t, unsigned long n,
                            mpfr_prec_t prec) {
  BigFloat x(static_cast<mpfr_prec_t>(mpz_sizeinbase(t.get_mpz_t(), 2)) + 8);
  mpfr_set_z(x.raw(), t.get_mpz_t(), MPFR_RNDN);  // exact at this precision
  BigInterval r(prec);
#if MPFR_VERSION_MAJOR >= 4
  mpfr_rootn_ui(r.lo.raw(), x.raw(), n, MPFR_RNDD);
  mpfr_rootn_ui(r.hi.raw(), x.raw(), n, MPFR_RNDU);
#else
  mpfr_root(r.lo.raw(), x.raw(), n, MPFR_RNDD);
  mpfr_root(r.hi.raw(), x.raw(), n, MPFR_RNDU);
#endif
  return r;
}

inline BigInterval ipow_ui(const BigInterval& a, unsigned long e,
                           mpfr_prec_t prec) {
  BigInterval r = BigInterval::from_z(1, prec);
  BigInterval base = a;
  while (e > 0) {
    if (e & 1) r = imul(r, base, prec);
    base = imul(base, base, prec);
    e >>= 1;
  }
  return r;
}

}  // namespace psb
