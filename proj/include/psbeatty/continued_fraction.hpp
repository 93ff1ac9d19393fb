#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "psbeatty/errors.hpp"
#include "psbeatty/exact_real.hpp"
#include "psbeatty/realspec.hpp"

namespace psb {

struct ContinuedFraction {
  mpz_class a0;
  std::vector<mpz_class> quotients;  // a1, a2, ... (each >= 1)
  // (p_k, q_k) for k = 0 .. quotients.size(), via the standard recurrence.
  std::vector<std::pair<mpz_class, mpz_class>> convergents;
  bool terminated = false;  // expansion ended exactly (rational value)

  size_t depth() const { return quotients.size(); }
};

namespace detail {

inline double log_z(const mpz_class& z) {
  signed long exp2;
  double m = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log(m) + static_cast<double>(exp2) * std::log(2.0);
}

class ConvergentBuilder {
 public:
  void push(const mpz_class& a, ContinuedFraction& cf) {
    mpz_class pn = a * pk_ + pk1_, qn = a * qk_ + qk1_;
    pk1_ = pk_;
    qk1_ = qk_;
    pk_ = pn;
    qk_ = qn;
    cf.convergents.emplace_back(pk_, qk_);
  }

 private:
  mpz_class pk1_ = 0, qk1_ = 1;  // (p_{-2}, q_{-2}) seeds via first push
  mpz_class pk_ = 1, qk_ = 0;    // (p_{-1}, q_{-1})
};

}  // namespace detail

/// First `depth` partial quotients (after a0) of x, each certified correct.
/// Rational values terminate early; decimal specs certify quotients by mpq
/// interval refinement and throw PrecisionExhausted when the stated digits
/// no longer pin the next quotient; cf-prefix specs return stored data.
inline ContinuedFraction cf_expand(const RealSpec& x, size_t depth) {
  if (depth < 1 || depth > 10000)
    throw InvalidInput("cf_expand depth must be in [1, 10^4]");
  if (x.value_is_integer())
    throw InvalidInput("integer values have no continued fraction expansion");

  ContinuedFraction cf;
  detail::ConvergentBuilder conv;

  switch (x.kind()) {
    case RealSpec::Kind::Rational: {
      mpz_class num = x.rat().get_num(), den = x.rat().get_den();
      mpz_class a, rem;
      mpz_fdiv_qr(a.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(),
                  den.get_mpz_t());
      cf.a0 = a;
      conv.push(a, cf);
      while (rem != 0 && cf.quotients.size() < depth) {
        num = den;
        den = rem;
        mpz_fdiv_qr(a.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(),
                    den.get_mpz_t());
        cf.quotients.push_back(a);
        conv.push(a, cf);
      }
      cf.terminated = rem == 0;
      return cf;
    }

    case RealSpec::Kind::Quadratic: {
      Surd cur = x.surd();
      cf.a0 = cur.floor();
      conv.push(cf.a0, cf);
      Surd frac = cur.fractional();
      while (cf.quotients.size() < depth) {
        cur = frac.recip();
        mpz_class a = cur.floor();
        cf.quotients.push_back(a);
        conv.push(a, cf);
        frac = cur.fractional();
      }
      return cf;
    }

    case RealSpec::Kind::CfPrefix: {
      if (x.cf_rest().size() < depth)
        throw PrecisionExhausted(
            "cf prefix holds fewer quotients than requested depth");
      cf.a0 = x.cf_a0();
      conv.push(cf.a0, cf);
      for (size_t i = 0; i < depth; ++i) {
        cf.quotients.push_back(x.cf_rest()[i]);
        conv.push(x.cf_rest()[i], cf);
      }
      return cf;
    }

    case RealSpec::Kind::Decimal: {
      mpq_class u = x.dec_uncertainty();
      mpq_class lo = x.dec_value() - u, hi = x.dec_value() + u;
      auto floor_q = [](const mpq_class& v) {
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), v.get_num().get_mpz_t(),
                   v.get_den().get_mpz_t());
        return f;
      };
      for (size_t i = 0; i <= depth; ++i) {
        mpz_class flo = floor_q(lo), fhi = floor_q(hi);
        if (flo != fhi)
          throw PrecisionExhausted(
              "decimal digits cannot certify partial quotient");
        if (i == 0)
          cf.a0 = flo;
        else
          cf.quotients.push_back(flo);
        conv.push(flo, cf);
        if (i == depth) break;
        mpq_class rlo = lo - mpq_class(flo), rhi = hi - mpq_class(flo);
        if (rlo == 0)
          throw PrecisionExhausted(
              "decimal digits cannot separate value from a rational");
        lo = 1 / rhi;
        hi = 1 / rlo;
      }
      return cf;
    }
  }
  throw InvalidInput("unreachable RealSpec kind");
}

/// k-th convergent p_k/q_k (k = 0 is a0 itself).
inline std::pair<mpz_class, mpz_class> convergent(const ContinuedFraction& cf,
                                                  size_t k) {
  if (k >= cf.convergents.size())
    throw IndexOutOfRange("convergent index " + std::to_string(k) +
                          " out of range (have " +
                          std::to_string(cf.convergents.size()) + ")");
  return cf.convergents[k];
}

struct TypeEstimateRow {
  size_t k;
  double log_qk;
  double log_qk1;
  double ratio;  // log q_{k+1} / log q_k
};

struct TypeEstimate {
  double tau_hat;
  std::vector<TypeEstimateRow> rows;  // all k in [2, depth-1]
  size_t depth;
};

/// Finite-truncation estimate of the irrationality type: tau_hat is the max
/// of log q_{k+1} / log q_k over the tail half of the expanded range (small k
/// carry only rounding noise: q_2, q_3 already give log 3/log 2 for the
/// golden ratio, whose true type is 1). A lower-bound witness, never a
/// certificate; the full per-k table is reported alongside.
inline TypeEstimate estimate_type(const RealSpec& x, size_t depth) {
  if (depth < 5) throw InvalidInput("estimate_type requires depth >= 5");
  if (x.value_is_rational())
    throw InvalidInput("rational numbers have no irrationality type");
  ContinuedFraction cf = cf_expand(x, depth);
  if (cf.terminated)
    throw InvalidInput("value is rational (expansion terminated)");

  TypeEstimate est;
  est.depth = depth;
  size_t last = cf.convergents.size() - 1;  // == depth
  size_t tail_start = std::max<size_t>(2, (last + 1) / 2);
  est.tau_hat = 0.0;
  for (size_t k = 2; k + 1 <= last; ++k) {
    double lq = detail::log_z(cf.convergents[k].second);
    double lq1 = detail::log_z(cf.convergents[k + 1].second);
    double ratio = lq1 / lq;
    est.rows.push_back({k, lq, lq1, ratio});
    if (k >= tail_start && ratio > est.tau_hat) est.tau_hat = ratio;
  }
  return est;
}

/// Exact rational interval.
struct RatInterval {
  mpq_class lo, hi;
};

namespace detail {

inline mpq_class dist_to_nearest_q(const mpq_class& v) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), v.get_num().get_mpz_t(),
             v.get_den().get_mpz_t());
  mpq_class frac = v - mpq_class(f);
  mpq_class other = 1 - frac;
  return frac <= other ? frac : other;
}

}  // namespace detail

/// Certified enclosure of the distance from x*n to the nearest integer.
/// Exact point for rational x; width <= 10^-30 for quadratic x; width
/// <= 10^-20 otherwise or PrecisionExhausted.
inline RatInterval dist_nearest_int(const RealSpec& x, const mpz_class& n) {
  if (n < 1) throw InvalidInput("dist_nearest_int requires n >= 1");
  mpz_class cap("1000000000000");
  if (n > cap) throw InvalidInput("dist_nearest_int requires n <= 10^12");

  ExactReal t = ExactReal::from_spec(x) * ExactReal(n);

  if (t.is_rational()) {
    mpq_class d = detail::dist_to_nearest_q(t.rational());
    return {d, d};
  }

  // Enclose t tightly, then push the enclosure through the piecewise-linear
  // distance function exactly in rational arithmetic. The result interval is
  // never wider than the input interval.
  mpq_class target(mpz_class(1), mpz_class("1000000000000000000000"));  // 1e-21
  if (t.is_surd()) target = mpq_class(1, 1) >> 110;                     // ~1e-33
  for (mpfr_prec_t p = 256; p <= 4096; p *= 2) {
    BigInterval I = t.eval(p);
    if (!I.finite()) continue;
    mpq_class lo = I.lo_q(), hi = I.hi_q();
    if (hi - lo > target) {
      if (t.is_surd()) continue;  // exact value: width shrinks with precision
      if (p >= 1024) break;       // inexact atoms: width has stagnated
      continue;
    }
    mpq_class dlo_l = detail::dist_to_nearest_q(lo);
    mpq_class dlo_h = detail::dist_to_nearest_q(hi);
    mpz_class fl, fh;
    mpz_fdiv_q(fl.get_mpz_t(), lo.get_num().get_mpz_t(),
               lo.get_den().get_mpz_t());
    mpz_fdiv_q(fh.get_mpz_t(), hi.get_num().get_mpz_t(),
               hi.get_den().get_mpz_t());
    bool contains_int = fl != fh || lo.get_den() == 1;
    mpq_class half(1, 2);
    bool contains_half =
        mpq_class(lo - mpq_class(fl)) <= half && mpq_class(hi - mpq_class(fl)) >= half;
    RatInterval out;
    out.lo = contains_int ? mpq_class(0) : std::min(dlo_l, dlo_h);
    out.hi = contains_half ? half : std::max(dlo_l, dlo_h);
    return out;
  }
  throw PrecisionExhausted(
      "cannot enclose distance to nearest integer within 10^-20");
}

}  // namespace psb
