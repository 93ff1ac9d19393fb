#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "psbeatty/continued_fraction.hpp"
#include "psbeatty/errors.hpp"
#include "psbeatty/exact_real.hpp"
#include "psbeatty/realspec.hpp"

namespace psb {

struct DiscrepancyResult {
  size_t m_count = 0;
  mpq_class deviation;  // exact value for the rounded input points
  double witness_lo = 0, witness_hi = 0;
  bool lo_open = false, hi_open = false;
};

namespace detail {

struct SortedPoints {
  std::vector<double> sorted;          // ascending
  std::vector<mpq_class> sorted_q;     // exact images of the doubles
  size_t m() const { return sorted.size(); }

  // #points < v and #points <= v for candidate v (by index into candidates).
  size_t count_lt(double v) const {
    return std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
  }
  size_t count_le(double v) const {
    return std::upper_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
  }
};

inline SortedPoints prepare_points(const std::vector<double>& pts,
                                   size_t max_m, const char* who) {
  if (pts.empty() || pts.size() > max_m)
    throw InvalidInput(std::string(who) + ": point count out of range");
  for (double p : pts)
    if (!(p >= 0.0 && p < 1.0))
      throw InvalidInput(std::string(who) + ": point outside [0, 1)");
  SortedPoints sp;
  sp.sorted = pts;
  std::sort(sp.sorted.begin(), sp.sorted.end());
  sp.sorted_q.reserve(sp.sorted.size());
  for (double p : sp.sorted) sp.sorted_q.emplace_back(p);
  return sp;
}

}  // namespace detail

/// Exact discrepancy sup_I |V(I,M)/M - |I|| over all non-degenerate
/// subintervals of [0,1), open/closed endpoints included (open intervals
/// minimize V for the length-excess side, closed intervals maximize V for the
/// count-excess side; mixed variants never beat those two). Candidate
/// endpoints are the points themselves plus 0 and 1. Double arithmetic
/// locates the maximum; exact rational arithmetic decides among near-ties.
inline DiscrepancyResult discrepancy_exact(const std::vector<double>& pts) {
  detail::SortedPoints sp = detail::prepare_points(pts, 4096, "discrepancy_exact");
  const size_t M = sp.m();
  const double dM = static_cast<double>(M);

  std::vector<double> cand = sp.sorted;
  cand.push_back(0.0);
  cand.push_back(1.0);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  const size_t C = cand.size();

  std::vector<size_t> lt(C), le(C);
  for (size_t i = 0; i < C; ++i) {
    lt[i] = sp.count_lt(cand[i]);
    le[i] = sp.count_le(cand[i]);
  }

  // Pass 1: approximate maximum.
  double best = -1.0;
  for (size_t i = 0; i < C; ++i) {
    for (size_t j = i + 1; j < C; ++j) {
      double len = cand[j] - cand[i];
      double open_dev = len - static_cast<double>(lt[j] - le[i]) / dM;
      double closed_dev = static_cast<double>(le[j] - lt[i]) / dM - len;
      best = std::max({best, open_dev, closed_dev});
    }
  }

  // Pass 2: exact evaluation of near-ties.
  const double tol = 1e-12;
  DiscrepancyResult out;
  out.m_count = M;
  out.deviation = -1;
  auto consider = [&](size_t i, size_t j, bool open, const mpq_class& dev) {
    if (dev > out.deviation) {
      out.deviation = dev;
      out.witness_lo = cand[i];
      out.witness_hi = cand[j];
      out.lo_open = out.hi_open = open;
    }
  };
  for (size_t i = 0; i < C; ++i) {
    for (size_t j = i + 1; j < C; ++j) {
      double len = cand[j] - cand[i];
      double open_dev = len - static_cast<double>(lt[j] - le[i]) / dM;
      double closed_dev = static_cast<double>(le[j] - lt[i]) / dM - len;
      if (open_dev >= best - tol) {
        mpq_class exact = mpq_class(cand[j]) - mpq_class(cand[i]) -
                          mpq_class(static_cast<unsigned long>(lt[j] - le[i]),
                                    static_cast<unsigned long>(M));
        consider(i, j, true, exact);
      }
      if (closed_dev >= best - tol) {
        mpq_class exact = mpq_class(static_cast<unsigned long>(le[j] - lt[i]),
                                    static_cast<unsigned long>(M)) -
                          (mpq_class(cand[j]) - mpq_class(cand[i]));
        consider(i, j, false, exact);
      }
    }
  }
  out.deviation.canonicalize();
  return out;
}

/// Exact star discrepancy D* = sup_t |#{x_i < t}/M - t| from the sorted-point
/// formula max_i max(i/M - x_(i), x_(i) - (i-1)/M).
inline mpq_class star_discrepancy(const std::vector<double>& pts) {
  detail::SortedPoints sp = detail::prepare_points(pts, 10000000, "star_discrepancy");
  const size_t M = sp.m();
  const double dM = static_cast<double>(M);

  double best = -1.0;
  for (size_t i = 0; i < M; ++i) {
    double hi_side = static_cast<double>(i + 1) / dM - sp.sorted[i];
    double lo_side = sp.sorted[i] - static_cast<double>(i) / dM;
    best = std::max({best, hi_side, lo_side});
  }

  const double tol = 1e-9;
  mpq_class exact_best = 0;
  for (size_t i = 0; i < M; ++i) {
    double hi_side = static_cast<double>(i + 1) / dM - sp.sorted[i];
    double lo_side = sp.sorted[i] - static_cast<double>(i) / dM;
    if (hi_side >= best - tol) {
      mpq_class v = mpq_class(static_cast<unsigned long>(i + 1),
                              static_cast<unsigned long>(M)) -
                    sp.sorted_q[i];
      if (v > exact_best) exact_best = v;
    }
    if (lo_side >= best - tol) {
      mpq_class v = sp.sorted_q[i] - mpq_class(static_cast<unsigned long>(i),
                                               static_cast<unsigned long>(M));
      if (v > exact_best) exact_best = v;
    }
  }
  exact_best.canonicalize();
  return exact_best;
}

/// (D*, min(2 D*, 1)): exact rational bracket with D* <= D <= 2 D*.
inline RatInterval discrepancy_bounds(const std::vector<double>& pts) {
  mpq_class dstar = star_discrepancy(pts);
  mpq_class upper = 2 * dstar;
  if (upper > 1) upper = 1;
  return {dstar, upper};
}

/// Fractional parts {theta*m + mu} for m = 1..M as certified doubles.
/// Quadratic/rational parameters in one field go through an exact
/// fixed-point path (sqrt(d) scaled by 2^192); anything else is enclosed by
/// interval arithmetic at escalating precision and must certify each floor.
inline std::vector<double> weyl_points(const RealSpec& theta,
                                       const RealSpec& mu, uint64_t M) {
  if (M < 1 || M > 10000000)
    throw InvalidInput("weyl_points requires 1 <= M <= 10^7");
  std::vector<double> out;
  out.reserve(M);

  const bool t_exact = theta.kind() == RealSpec::Kind::Rational ||
                       theta.kind() == RealSpec::Kind::Quadratic;
  const bool m_exact = mu.kind() == RealSpec::Kind::Rational ||
                       mu.kind() == RealSpec::Kind::Quadratic;
  bool same_field = t_exact && m_exact;
  if (same_field && theta.kind() == RealSpec::Kind::Quadratic &&
      mu.kind() == RealSpec::Kind::Quadratic)
    same_field = theta.surd().d() == mu.surd().d();

  if (same_field) {
    Surd st = theta.kind() == RealSpec::Kind::Quadratic
                  ? theta.surd()
                  : Surd::from_rational(theta.rat());
    Surd sm = mu.kind() == RealSpec::Kind::Quadratic
                  ? mu.surd()
                  : Surd::from_rational(mu.rat());
    mpz_class d = st.is_rational() ? sm.d() : st.d();
    // value(m) = (A m + B + (QA m + QB) sqrt(d)) / R
    mpz_class R = st.r() * sm.r();
    mpz_class A = st.p() * sm.r(), QA = st.q() * sm.r();
    mpz_class B = sm.p() * st.r(), QB = sm.q() * st.r();
    const unsigned kShift = 192;
    mpz_class s;  // floor(sqrt(d) * 2^kShift)
    {
      mpz_class t = d << (2 * kShift);
      mpz_sqrt(s.get_mpz_t(), t.get_mpz_t());
    }
    mpz_class R2 = R << kShift;
    const double r2d = R2.get_d();
    mpz_class num, qtot, rem;
    for (uint64_t m = 1; m <= M; ++m) {
      qtot = QA * static_cast<unsigned long>(m) + QB;
      num = (A * static_cast<unsigned long>(m) + B) << kShift;
      num += qtot * s;
      // Enclosure: true numerator in [num, num + qtot] (or reversed if
      // qtot < 0); width |qtot| * 2^-kShift / R ~ 1e-45 at the largest m.
      mpz_fdiv_r(rem.get_mpz_t(), num.get_mpz_t(), R2.get_mpz_t());
      double frac = rem.get_d() / r2d;
      if (frac >= 1.0) frac = std::nextafter(1.0, 0.0);
      out.push_back(frac);
    }
    return out;
  }

  // Interval path: enclose theta and mu once at high precision, then per-m
  // products; each floor must certify or the whole request fails.
  ExactReal tx = ExactReal::from_spec(theta), mx = ExactReal::from_spec(mu);
  const mpfr_prec_t prec = 320;
  BigInterval ti = tx.eval(prec), mi = mx.eval(prec);
  for (uint64_t m = 1; m <= M; ++m) {
    BigInterval v = iadd(
        imul(ti, BigInterval::from_z(static_cast<unsigned long>(m), prec),
             prec),
        mi, prec);
    mpz_class f;
    if (!v.certified_floor(f)) {
      // One retry at quadruple precision before giving up.
      BigInterval v2 = iadd(
          imul(tx.eval(4 * prec),
               BigInterval::from_z(static_cast<unsigned long>(m), 4 * prec),
               4 * prec),
          mx.eval(4 * prec), 4 * prec);
      if (!v2.certified_floor(f))
        throw PrecisionExhausted("weyl_points: fractional part at m=" +
                                 std::to_string(m) + " not certifiable");
      v = std::move(v2);
    }
    BigInterval fr = isub(v, BigInterval::from_z(f, prec), prec);
    double x = fr.mid();
    if (x < 0.0) x = 0.0;
    if (x >= 1.0) x = std::nextafter(1.0, 0.0);
    out.push_back(x);
  }
  return out;
}

struct ProfileRow {
  uint64_t m_count;
  mpq_class lower, upper;   // D* and min(2 D*, 1)
  double ref_inv_tau;       // M^{-1/tau_hat}
  double d_times_m_tau;     // upper * M^{1/tau_hat}
  double d_times_m_over_log;  // upper * M / log M
};

struct DiscrepancyProfile {
  double tau_hat = 0;
  std::vector<ProfileRow> rows;
};

/// Bounds for the discrepancy of {theta*m + mu} at each requested M, with
/// M^{-1/tau_hat} reference values for trend inspection.
inline DiscrepancyProfile discrepancy_profile(const RealSpec& theta,
                                              const RealSpec& mu,
                                              const std::vector<uint64_t>& Ms) {
  if (theta.value_is_rational())
    throw InvalidInput("discrepancy_profile requires irrational theta");
  if (Ms.empty()) throw InvalidInput("discrepancy_profile: no M values");
  uint64_t max_m = *std::max_element(Ms.begin(), Ms.end());

  DiscrepancyProfile prof;
  prof.tau_hat = estimate_type(theta, 30).tau_hat;

  std::vector<double> all = weyl_points(theta, mu, max_m);
  for (uint64_t M : Ms) {
    std::vector<double> prefix(all.begin(), all.begin() + M);
    RatInterval b = discrepancy_bounds(prefix);
    ProfileRow row;
    row.m_count = M;
    row.lower = b.lo;
    row.upper = b.hi;
    double dm = static_cast<double>(M);
    row.ref_inv_tau = std::pow(dm, -1.0 / prof.tau_hat);
    row.d_times_m_tau = b.hi.get_d() * std::pow(dm, 1.0 / prof.tau_hat);
    row.d_times_m_over_log = b.hi.get_d() * dm / std::log(dm);
    prof.rows.push_back(std::move(row));
  }
  return prof;
}

}  // namespace psb
