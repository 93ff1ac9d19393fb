#pragma once
// Direct evaluation of exponential sums e(f(n)) with arithmetic weights,
// plus empirical ratio checkers for the five sum bounds used downstream
// (van der Corput, type I, type II, Lambda-twisted, prime reduction).
//
// Numerical-integrity rule for the whole module: every phase is reduced
// modulo 1 in exact arithmetic (rational, quadratic-field, or certified
// interval) before any floating transcendental call.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"

#include "errors.hpp"
#include "exact_real.hpp"
#include "harmonic.hpp"
#include "mp.hpp"
#include "parallel.hpp"
#include "sequences.hpp"
#include "sieve.hpp"
#include "version.hpp"

namespace psb {

using nlohmann::json;

/// Hard ceiling on direct summation work.
inline constexpr uint64_t kTermBudget = 1000000000ULL;

enum class PhaseKind { Linear, Quadratic, Power, Mixed };
enum class WeightKind { Unit, Lambda, Mobius, Log };

inline const char* to_string(PhaseKind p) {
  switch (p) {
    case PhaseKind::Linear: return "linear";
    case PhaseKind::Quadratic: return "quadratic";
    case PhaseKind::Power: return "power";
    default: return "mixed";
  }
}

inline const char* to_string(WeightKind w) {
  switch (w) {
    case WeightKind::Unit: return "unit";
    case WeightKind::Lambda: return "lambda";
    case WeightKind::Mobius: return "mobius";
    default: return "log";
  }
}

/// One directly evaluable sum: Sum_{lo < n <= hi} weight(n) e(phase(n)).
///
/// Phases:
///   linear     theta * n
///   quadratic  theta * n^2
///   power      scale * h * n^gamma,  gamma = gamma_num/gamma_den in (0,1)
///   mixed      k*a*n + k*b + h*n^gamma   (a, b from a Beatty parameter pair)
struct ExpSumSpec {
  PhaseKind phase = PhaseKind::Linear;
  WeightKind weight = WeightKind::Unit;
  uint64_t lo = 0;
  uint64_t hi = 0;
  RealSpec theta;                     // linear / quadratic coefficient
  long long h = 1;                    // power / mixed integer multiplier
  mpq_class scale{1};                 // power: extra rational factor
  unsigned gamma_num = 1;             // gamma = gamma_num / gamma_den
  unsigned gamma_den = 2;
  long long k = 1;                    // mixed: multiplier on the linear pair
  std::optional<BeattyParams> beatty; // mixed: supplies (a, b)

  static ExpSumSpec linear(RealSpec theta, uint64_t lo, uint64_t hi,
                           WeightKind w = WeightKind::Unit) {
    ExpSumSpec s;
    s.phase = PhaseKind::Linear;
    s.theta = std::move(theta);
    s.lo = lo;
    s.hi = hi;
    s.weight = w;
    return s;
  }

  static ExpSumSpec quadratic(RealSpec theta, uint64_t lo, uint64_t hi,
                              WeightKind w = WeightKind::Unit) {
    ExpSumSpec s = linear(std::move(theta), lo, hi, w);
    s.phase = PhaseKind::Quadratic;
    return s;
  }

  static ExpSumSpec power(long long h, unsigned gamma_num, unsigned gamma_den,
                          uint64_t lo, uint64_t hi,
                          WeightKind w = WeightKind::Unit,
                          mpq_class scale = mpq_class(1)) {
    ExpSumSpec s;
    s.phase = PhaseKind::Power;
    s.h = h;
    s.gamma_num = gamma_num;
    s.gamma_den = gamma_den;
    s.lo = lo;
    s.hi = hi;
    s.weight = w;
    s.scale = std::move(scale);
    return s;
  }

  static ExpSumSpec mixed(long long k, BeattyParams B, long long h,
                          unsigned gamma_num, unsigned gamma_den, uint64_t lo,
                          uint64_t hi, WeightKind w = WeightKind::Unit) {
    ExpSumSpec s;
    s.phase = PhaseKind::Mixed;
    s.k = k;
    s.beatty = std::move(B);
    s.h = h;
    s.gamma_num = gamma_num;
    s.gamma_den = gamma_den;
    s.lo = lo;
    s.hi = hi;
    s.weight = w;
    return s;
  }

  uint64_t term_count() const { return hi - lo; }

  void validate() const {
    if (hi <= lo) throw InvalidInput("exp_sum range (lo, hi] is empty");
    if (hi - lo > kTermBudget)
      throw TermBudgetExceeded("exp_sum term count exceeds 10^9");
    if (phase == PhaseKind::Power || phase == PhaseKind::Mixed) {
      if (gamma_num == 0 || gamma_num >= gamma_den)
        throw InvalidInput("gamma must lie in (0,1)");
      if (gamma_den > 64) throw InvalidInput("gamma denominator too large");
      if (h == 0) throw InvalidInput("power multiplier h must be nonzero");
    }
    if (phase == PhaseKind::Power && scale == 0)
      throw InvalidInput("power scale must be nonzero");
    if (phase == PhaseKind::Mixed && !beatty)
      throw InvalidInput("mixed phase needs Beatty parameters");
    if ((weight == WeightKind::Lambda || weight == WeightKind::Mobius) &&
        hi > kMaxSieveValue)
      throw InvalidInput("arithmetic weights need hi <= 10^12");
  }

  json params_json() const {
    json p{{"phase", to_string(phase)},
           {"weight", to_string(weight)},
           {"lo", lo},
           {"hi", hi}};
    if (phase == PhaseKind::Linear || phase == PhaseKind::Quadratic)
      p["theta"] = theta.str();
    if (phase == PhaseKind::Power || phase == PhaseKind::Mixed) {
      p["h"] = h;
      p["gamma"] =
          std::to_string(gamma_num) + "/" + std::to_string(gamma_den);
    }
    if (phase == PhaseKind::Power && scale != 1)
      p["scale"] = scale.get_str();
    if (phase == PhaseKind::Mixed && beatty) {
      p["k"] = k;
      p["alpha"] = beatty->alpha_spec().str();
      p["beta"] = beatty->beta_spec().str();
    }
    return p;
  }
};

struct ExpSumResult {
  std::complex<double> value{0.0, 0.0};
  uint64_t terms = 0;
};

namespace detail {

/// Compensated complex accumulator; doubles as the ordered merge carrier so
/// parallel reductions are bit-identical to serial ones.
struct CxSum {
  void add(std::complex<double> x) {
    double yr = x.real() - cr_;
    double tr = sr_ + yr;
    cr_ = (tr - sr_) - yr;
    sr_ = tr;
    double yi = x.imag() - ci_;
    double ti = si_ + yi;
    ci_ = (ti - si_) - yi;
    si_ = ti;
  }

  void combine(const CxSum& o) { add(o.value()); }

  std::complex<double> value() const { return {sr_, si_}; }

 private:
  double sr_ = 0.0, cr_ = 0.0, si_ = 0.0, ci_ = 0.0;
};

/// frac(mult * t^(gnum/gden)) from a directed enclosure, widened until the
/// floor is certified; exact rational fast path when t^gnum is a perfect
/// gden-th power.
inline double pow_mult_frac(uint64_t t, const mpq_class& mult, unsigned gnum,
                            unsigned gden) {
  mpz_class tp;
  mpz_ui_pow_ui(tp.get_mpz_t(), t, gnum);
  mpz_class r, rem;
  mpz_rootrem(r.get_mpz_t(), rem.get_mpz_t(), tp.get_mpz_t(), gden);
  if (rem == 0) {
    mpq_class v = mult * r;
    v.canonicalize();
    mpz_class num = v.get_num(), den = v.get_den(), q, m;
    mpz_fdiv_qr(q.get_mpz_t(), m.get_mpz_t(), num.get_mpz_t(),
                den.get_mpz_t());
    return mpq_class(m, den).get_d();
  }
  for (mpfr_prec_t prec = 128; prec <= 1024; prec *= 2) {
    BigInterval root = irootn_z(tp, gden, prec);
    BigInterval scaled = imul(root, BigInterval::from_q(mult, prec), prec);
    mpz_class fl;
    if (scaled.certified_floor(fl)) {
      BigInterval fr = isub(scaled, BigInterval::from_z(fl, prec), prec);
      return fr.mid();
    }
  }
  throw PrecisionExhausted("power phase needs more than 1024 bits");
}

/// frac(th * n) for an exact linear coefficient.
inline double linear_frac(const ExactReal& th, uint64_t n) {
  ExactReal v = th * ExactReal(mpz_class(n));
  return v.frac().to_double();
}

inline double quadratic_frac(const ExactReal& th, uint64_t n) {
  mpz_class n2 = mpz_class(n) * n;
  ExactReal v = th * ExactReal(n2);
  return v.frac().to_double();
}

}  // namespace detail

/// Direct evaluation. Deterministic for every thread count: fixed chunking,
/// per-chunk compensated sums, ordered compensated fold.
inline ExpSumResult exp_sum(const ExpSumSpec& spec, int threads = 0) {
  spec.validate();
  const uint64_t n0 = spec.lo, n1 = spec.hi;
  const uint64_t chunk = 4096;
  const uint64_t nblocks = (n1 - n0 + chunk - 1) / chunk;

  const ExactReal th = (spec.phase == PhaseKind::Linear ||
                        spec.phase == PhaseKind::Quadratic)
                           ? ExactReal::from_spec(spec.theta)
                           : ExactReal();
  ExactReal lin_a, lin_b;
  if (spec.phase == PhaseKind::Mixed) {
    ExactReal kk(static_cast<long>(spec.k));
    lin_a = kk * spec.beatty->a();
    lin_b = kk * spec.beatty->b();
  }
  mpq_class power_mult = spec.scale * static_cast<long>(spec.h);

  auto phase_frac = [&](uint64_t n) -> double {
    switch (spec.phase) {
      case PhaseKind::Linear:
        return detail::linear_frac(th, n);
      case PhaseKind::Quadratic:
        return detail::quadratic_frac(th, n);
      case PhaseKind::Power:
        return detail::pow_mult_frac(n, power_mult, spec.gamma_num,
                                     spec.gamma_den);
      default: {
        ExactReal lin = lin_a * ExactReal(mpz_class(n)) + lin_b;
        return lin.frac().to_double() +
               detail::pow_mult_frac(n, mpq_class(static_cast<long>(spec.h)), spec.gamma_num,
                                     spec.gamma_den);
      }
    }
  };

  detail::CxSum total = parallel_blocks<detail::CxSum>(
      nblocks, detail::CxSum{},
      [&](uint64_t blk) {
        uint64_t lo = n0 + blk * chunk;
        uint64_t hi = std::min(n1, lo + chunk);
        detail::CxSum acc;
        std::vector<double> lam;
        std::vector<int8_t> mob;
        if (spec.weight == WeightKind::Lambda) lam = mangoldt_range(lo, hi);
        if (spec.weight == WeightKind::Mobius) mob = mobius_range(lo, hi);
        for (uint64_t n = lo + 1; n <= hi; ++n) {
          double w = 1.0;
          switch (spec.weight) {
            case WeightKind::Lambda:
              w = lam[n - lo - 1];
              break;
            case WeightKind::Mobius:
              w = static_cast<double>(mob[n - lo - 1]);
              break;
            case WeightKind::Log:
              w = std::log(static_cast<double>(n));
              break;
            default:
              break;
          }
          if (w == 0.0) continue;
          acc.add(w * detail::e2pi(phase_frac(n)));
        }
        return acc;
      },
      [](detail::CxSum a, const detail::CxSum& b) {
        a.combine(b);
        return a;
      },
      threads);

  return ExpSumResult{total.value(), n1 - n0};
}

/// Measured-vs-bound record for one checker invocation.
struct BoundRatio {
  std::string check;
  json params;
  double measured = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  std::string note;

  json to_json() const {
    json j{{"schema_version", kSchemaVersion}, {"check", check},
           {"params", params},               {"measured", measured},
           {"bound", bound},                 {"ratio", ratio}};
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

/// van der Corput: |Sum_{N<n<=2N} e(f(n))| against N lambda^(1/2) +
/// lambda^(-1/2), lambda taken from the |f''| range on (N, 2N] (geometric
/// mean of the endpoint values; exact for the constant quadratic case).
inline BoundRatio vdc_ratio(const ExpSumSpec& f, uint64_t N, int threads = 0) {
  if (N < 2) throw InvalidInput("vdc_ratio needs N >= 2");
  if (f.phase != PhaseKind::Quadratic && f.phase != PhaseKind::Power)
    throw InvalidInput("vdc_ratio needs a quadratic or power phase");
  if (f.weight != WeightKind::Unit)
    throw InvalidInput("vdc_ratio is an unweighted estimate");

  double lambda = 0.0;
  if (f.phase == PhaseKind::Quadratic) {
    double td = ExactReal::from_spec(f.theta).to_double();
    if (td == 0.0) throw InvalidInput("f'' vanishes: zero quadratic phase");
    lambda = 2.0 * std::fabs(td);
  } else {
    mpq_class mult = f.scale * static_cast<long>(f.h);
    double s = std::fabs(mult.get_d());
    if (s == 0.0) throw InvalidInput("f'' vanishes: zero power multiplier");
    double g = static_cast<double>(f.gamma_num) / f.gamma_den;
    double coef = s * g * (1.0 - g);
    double lo = coef * std::pow(static_cast<double>(2 * N), g - 2.0);
    double hi = coef * std::pow(static_cast<double>(N + 1), g - 2.0);
    lambda = std::sqrt(lo * hi);
  }

  ExpSumSpec g = f;
  g.lo = N;
  g.hi = 2 * N;
  g.weight = WeightKind::Unit;
  ExpSumResult r = exp_sum(g, threads);

  BoundRatio out;
  out.check = "vdc";
  out.params = g.params_json();
  out.params["N"] = N;
  out.params["lambda"] = lambda;
  out.measured = std::abs(r.value);
  out.bound = static_cast<double>(N) * std::sqrt(lambda) +
              1.0 / std::sqrt(lambda);
  out.ratio = out.measured / out.bound;
  return out;
}

/// Coefficient classes for the bilinear checkers.
enum class CoeffKind { Unit, Mobius, LambdaNorm };

inline const char* to_string(CoeffKind c) {
  switch (c) {
    case CoeffKind::Unit: return "unit";
    case CoeffKind::Mobius: return "mobius";
    default: return "lambda-norm";
  }
}

namespace detail {

/// e(m t^gamma + t h / d) for every total t in (N, N1]; the bilinear phase
/// depends only on the product, so one table serves the whole rectangle.
inline std::vector<std::complex<double>> bilinear_total_table(
    uint64_t N, uint64_t N1, uint64_t m, unsigned gnum, unsigned gden,
    uint64_t h, uint64_t d, int threads) {
  std::vector<std::complex<double>> tab(N1 - N);
  const mpq_class mult(m);
  const uint64_t chunk = 2048;
  const uint64_t nblocks = (N1 - N + chunk - 1) / chunk;
  parallel_blocks<int>(
      nblocks, 0,
      [&](uint64_t blk) {
        uint64_t lo = N + 1 + blk * chunk;
        uint64_t hi = std::min(N1, lo + chunk - 1);
        for (uint64_t t = lo; t <= hi; ++t) {
          double fp = pow_mult_frac(t, mult, gnum, gden);
          unsigned __int128 num =
              static_cast<unsigned __int128>(t % d) * (h % d);
          double fr = static_cast<double>(static_cast<uint64_t>(num % d)) /
                      static_cast<double>(d);
          tab[t - N - 1] = e2pi(fp + fr);
        }
        return 0;
      },
      [](int a, int) { return a; }, threads);
  return tab;
}

/// Weight vector for one dyadic block (B, 2B] under a coefficient class;
/// LambdaNorm divides by log(2B) so every entry stays in [-1, 1].
inline std::vector<double> coeff_values(uint64_t lo, uint64_t hi,
                                        CoeffKind kind, double norm) {
  std::vector<double> w(hi - lo, 1.0);
  if (kind == CoeffKind::Mobius) {
    std::vector<int8_t> mob = mobius_range(lo, hi);
    for (uint64_t i = 0; i < w.size(); ++i)
      w[i] = static_cast<double>(mob[i]);
  } else if (kind == CoeffKind::LambdaNorm) {
    std::vector<double> lam = mangoldt_range(lo, hi);
    for (uint64_t i = 0; i < w.size(); ++i) w[i] = lam[i] / norm;
  }
  return w;
}

struct BilinearGrid {
  uint64_t k_lo, k_hi;   // k in (k_lo, k_hi]
  uint64_t l_lo, l_hi;   // l in (l_lo, l_hi]
  double L;              // real dyadic anchor for l
};

inline BilinearGrid bilinear_grid(uint64_t K, uint64_t N) {
  double L = static_cast<double>(N) / (2.0 * K);
  if (L < 1.0) throw InvalidInput("dyadic partner range is empty: K too large");
  BilinearGrid g;
  g.k_lo = K;
  g.k_hi = 2 * K;
  g.l_lo = static_cast<uint64_t>(std::floor(L));
  g.l_hi = static_cast<uint64_t>(std::floor(2.0 * L));
  g.L = L;
  return g;
}

/// Shared core of the type I / type II checkers: Sum_k a_k Sum_l b_l
/// e(m (kl)^gamma + kl h / d) over k ~ K, l ~ L, N < kl <= N1.
inline std::complex<double> bilinear_rect_sum(const BilinearGrid& g,
                                              uint64_t N, uint64_t N1,
                                              uint64_t m, unsigned gnum,
                                              unsigned gden, uint64_t h,
                                              uint64_t d, CoeffKind a_kind,
                                              CoeffKind b_kind, int threads,
                                              uint64_t* pairs) {
  auto tab = bilinear_total_table(N, N1, m, gnum, gden, h, d, threads);
  std::vector<double> ak = coeff_values(
      g.k_lo, g.k_hi, a_kind, std::log(static_cast<double>(g.k_hi)));
  std::vector<double> bl =
      coeff_values(g.l_lo, g.l_hi, b_kind, std::log(2.0 * g.L));

  const uint64_t kspan = g.k_hi - g.k_lo;
  const uint64_t chunk = 64;
  const uint64_t nblocks = (kspan + chunk - 1) / chunk;
  struct Acc {
    CxSum sum;
    uint64_t pairs = 0;
  };
  Acc total = parallel_blocks<Acc>(
      nblocks, Acc{},
      [&](uint64_t blk) {
        Acc acc;
        uint64_t klo = g.k_lo + 1 + blk * chunk;
        uint64_t khi = std::min(g.k_hi, klo + chunk - 1);
        for (uint64_t k = klo; k <= khi; ++k) {
          double a = ak[k - g.k_lo - 1];
          if (a == 0.0) continue;
          uint64_t lo = std::max(g.l_lo, N / k);        // l > max(l_lo, N/k)
          uint64_t hi = std::min(g.l_hi, N1 / k);       // l <= min(l_hi, N1/k)
          if (lo >= hi) continue;
          CxSum inner;
          for (uint64_t l = lo + 1; l <= hi; ++l) {
            double b = bl[l - g.l_lo - 1];
            if (b == 0.0) continue;
            inner.add(b * tab[k * l - N - 1]);
          }
          acc.pairs += hi - lo;
          acc.sum.add(a * inner.value());
        }
        return acc;
      },
      [](Acc a, const Acc& b) {
        a.sum.combine(b.sum);
        a.pairs += b.pairs;
        return a;
      },
      threads);
  if (pairs) *pairs = total.pairs;
  return total.sum.value();
}

inline void check_bilinear_inputs(uint64_t N, uint64_t N1, uint64_t m,
                                  unsigned gnum, unsigned gden, uint64_t h,
                                  uint64_t d) {
  if (N < 4 || N1 <= N || N1 > 2 * N)
    throw InvalidInput("require 4 <= N < N1 <= 2N");
  if (N > 20000000ULL) throw InvalidInput("bilinear checkers cap N at 2*10^7");
  if (m == 0 || h == 0 || d == 0) throw InvalidInput("m, h, d must be >= 1");
  if (gnum == 0 || gnum >= gden || gden > 64)
    throw InvalidInput("gamma must lie in (0,1) with denominator <= 64");
}

inline json bilinear_params(uint64_t K, uint64_t N, uint64_t N1, uint64_t m,
                            unsigned gnum, unsigned gden, uint64_t h,
                            uint64_t d) {
  return json{{"K", K},
              {"N", N},
              {"N1", N1},
              {"m", m},
              {"gamma", std::to_string(gnum) + "/" + std::to_string(gden)},
              {"h", h},
              {"d", d}};
}

}  // namespace detail

/// Type I: coefficients on one variable only. Hypothesis K <= N^{3/7} is a
/// hard error so sweeps cannot wander outside the lemma's range.
inline BoundRatio type1_ratio(uint64_t K, uint64_t N, uint64_t N1, uint64_t m,
                              unsigned gamma_num, unsigned gamma_den,
                              uint64_t h, uint64_t d, CoeffKind a_k,
                              int threads = 0) {
  detail::check_bilinear_inputs(N, N1, m, gamma_num, gamma_den, h, d);
  if (K < 1) throw InvalidInput("K must be >= 1");
  double kcap = std::pow(static_cast<double>(N), 3.0 / 7.0);
  if (static_cast<double>(K) > kcap * (1.0 + 1e-12))
    throw HypothesisViolated("type I needs K <= N^(3/7)");
  if (a_k == CoeffKind::LambdaNorm)
    throw InvalidInput("type I coefficients are unit or Mobius");

  detail::BilinearGrid g = detail::bilinear_grid(K, N);
  uint64_t pairs = 0;
  std::complex<double> s = detail::bilinear_rect_sum(
      g, N, N1, m, gamma_num, gamma_den, h, d, a_k, CoeffKind::Unit, threads,
      &pairs);

  double gd = static_cast<double>(gamma_num) / gamma_den;
  double Nd = static_cast<double>(N);
  BoundRatio out;
  out.check = "type1";
  out.params = detail::bilinear_params(K, N, N1, m, gamma_num, gamma_den, h, d);
  out.params["a_k"] = to_string(a_k);
  out.params["pairs"] = pairs;
  out.measured = std::abs(s);
  out.bound = std::sqrt(static_cast<double>(m)) * std::pow(Nd, 3.0 / 7.0 + gd / 2.0) +
              std::pow(Nd, 1.0 - gd / 2.0) / std::sqrt(static_cast<double>(m));
  out.ratio = out.measured / out.bound;
  return out;
}

/// Type II: coefficients on both variables, K in the middle dyadic range.
inline BoundRatio type2_ratio(uint64_t K, uint64_t N, uint64_t N1, uint64_t m,
                              unsigned gamma_num, unsigned gamma_den,
                              uint64_t h, uint64_t d, CoeffKind a_k,
                              CoeffKind b_l, int threads = 0) {
  detail::check_bilinear_inputs(N, N1, m, gamma_num, gamma_den, h, d);
  double klo = std::pow(static_cast<double>(N), 3.0 / 7.0);
  double khi = std::sqrt(static_cast<double>(N));
  if (static_cast<double>(K) < klo * (1.0 - 1e-12) ||
      static_cast<double>(K) > khi * (1.0 + 1e-12))
    throw HypothesisViolated("type II needs N^(3/7) <= K <= N^(1/2)");

  detail::BilinearGrid g = detail::bilinear_grid(K, N);
  uint64_t pairs = 0;
  std::complex<double> s = detail::bilinear_rect_sum(
      g, N, N1, m, gamma_num, gamma_den, h, d, a_k, b_l, threads, &pairs);

  double gd = static_cast<double>(gamma_num) / gamma_den;
  double Nd = static_cast<double>(N);
  double md = static_cast<double>(m);
  BoundRatio out;
  out.check = "type2";
  out.params = detail::bilinear_params(K, N, N1, m, gamma_num, gamma_den, h, d);
  out.params["a_k"] = to_string(a_k);
  out.params["b_l"] = to_string(b_l);
  out.params["pairs"] = pairs;
  out.measured = std::abs(s);
  out.bound = std::pow(md, -0.25) * std::pow(Nd, 1.0 - gd / 4.0) +
              std::pow(md, 1.0 / 6.0) * std::pow(Nd, 16.0 / 21.0 + gd / 6.0) +
              std::pow(Nd, 11.0 / 14.0);
  out.ratio = out.measured / out.bound;
  return out;
}

/// Twisted von Mangoldt sum over one progression: value plus the growth
/// exponent log|value|/log M. The decay rate eta is existential, so the
/// exponent is reported as a trend datum, never judged here.
struct TwistedSum {
  uint64_t q = 1;
  uint64_t a = 0;
  long long k = 0;
  uint64_t M = 0;
  std::string theta;
  std::complex<double> value{0.0, 0.0};
  double exponent = 0.0;
  uint64_t terms = 0;

  json to_json() const {
    return json{{"schema_version", kSchemaVersion},
                {"q", q},
                {"a", a},
                {"k", k},
                {"M", M},
                {"theta", theta},
                {"value_re", value.real()},
                {"value_im", value.imag()},
                {"abs", std::abs(value)},
                {"exponent", exponent},
                {"terms", terms}};
  }
};

/// Sum_{m<=M} Lambda(q m + a) e(theta k m). k = 0 degenerates to the
/// untwisted Chebyshev-type mass over the progression.
inline TwistedSum lambda_twisted(uint64_t q, uint64_t a, const RealSpec& theta,
                                 long long k, uint64_t M, int threads = 0) {
  if (q < 1 || a >= q) throw InvalidInput("require 0 <= a < q");
  if (std::gcd(a, q) != 1) throw InvalidInput("require gcd(a, q) = 1");
  if (M < 2 || M > 100000000ULL) throw InvalidInput("require 2 <= M <= 10^8");
  if (q > kMaxSieveValue / M) throw InvalidInput("q*M exceeds 10^12");
  if (k != 0 && theta.kind() == RealSpec::Kind::Rational)
    throw InvalidInput("twisted case needs irrational theta");

  const ExactReal tk =
      k == 0 ? ExactReal()
             : ExactReal::from_spec(theta) * ExactReal(static_cast<long>(k));
  const uint64_t chunk = 4096;
  const uint64_t nblocks = (M + chunk - 1) / chunk;
  detail::CxSum total = parallel_blocks<detail::CxSum>(
      nblocks, detail::CxSum{},
      [&](uint64_t blk) {
        detail::CxSum acc;
        uint64_t lo = blk * chunk + 1;
        uint64_t hi = std::min(M, blk * chunk + chunk);
        for (uint64_t mm = lo; mm <= hi; ++mm) {
          auto pp = von_mangoldt(q * mm + a);
          if (!pp) continue;
          double w = pp->log_p();
          if (k == 0)
            acc.add({w, 0.0});
          else
            acc.add(w * detail::e2pi(detail::linear_frac(tk, mm)));
        }
        return acc;
      },
      [](detail::CxSum x, const detail::CxSum& y) {
        x.combine(y);
        return x;
      },
      threads);

  TwistedSum out;
  out.q = q;
  out.a = a;
  out.k = k;
  out.M = M;
  out.theta = theta.str();
  out.value = total.value();
  out.terms = M;
  double av = std::abs(out.value);
  out.exponent = av > 0.0 ? std::log(av) / std::log(static_cast<double>(M))
                          : -std::numeric_limits<double>::infinity();
  return out;
}

/// Prime sum of g(n) = e(theta n) against the Lambda-weighted reduction
/// bound. The max over N1 <= 2N is sampled on a 64-point geometric grid, so
/// the reported bound is a grid max, a lower bound on the true maximum.
inline BoundRatio prime_reduction_check(const RealSpec& theta, uint64_t N,
                                        uint64_t Np, int threads = 0) {
  if (N < 16 || Np <= N || Np > 2 * N)
    throw InvalidInput("require 16 <= N < N' <= 2N");
  if (N > 10000000ULL) throw InvalidInput("prime_reduction_check caps N at 10^7");

  const ExactReal th = ExactReal::from_spec(theta);

  // 64 geometric grid points in (N, 2N], last pinned to 2N exactly.
  std::vector<uint64_t> grid;
  for (int j = 1; j <= 64; ++j) {
    double v = static_cast<double>(N) * std::pow(2.0, j / 64.0);
    uint64_t g = std::max<uint64_t>(N + 1, static_cast<uint64_t>(std::llround(v)));
    g = std::min<uint64_t>(g, 2 * N);
    if (grid.empty() || g > grid.back()) grid.push_back(g);
  }
  grid.back() = 2 * N;

  // Per grid segment, one deterministic chunked pass of Lambda(n) e(theta n).
  auto segment_sum = [&](uint64_t lo, uint64_t hi) {
    const uint64_t chunk = 8192;
    const uint64_t nblocks = (hi - lo + chunk - 1) / chunk;
    return parallel_blocks<detail::CxSum>(
        nblocks, detail::CxSum{},
        [&](uint64_t blk) {
          detail::CxSum acc;
          uint64_t clo = lo + blk * chunk;
          uint64_t chi = std::min(hi, clo + chunk);
          std::vector<double> lam = mangoldt_range(clo, chi);
          for (uint64_t n = clo + 1; n <= chi; ++n) {
            double w = lam[n - clo - 1];
            if (w == 0.0) continue;
            acc.add(w * detail::e2pi(detail::linear_frac(th, n)));
          }
          return acc;
        },
        [](detail::CxSum x, const detail::CxSum& y) {
          x.combine(y);
          return x;
        },
        threads);
  };

  double grid_max = 0.0;
  detail::CxSum prefix;
  uint64_t seg_lo = N;
  for (uint64_t g : grid) {
    prefix.combine(segment_sum(seg_lo, g));
    grid_max = std::max(grid_max, std::abs(prefix.value()));
    seg_lo = g;
  }

  // Prime-only sum over (N, N'].
  const uint64_t chunk = 1 << 18;
  const uint64_t nblocks = (Np - N + chunk - 1) / chunk;
  detail::CxSum psum = parallel_blocks<detail::CxSum>(
      nblocks, detail::CxSum{},
      [&](uint64_t blk) {
        detail::CxSum acc;
        uint64_t clo = N + blk * chunk;
        uint64_t chi = std::min(Np, clo + chunk);
        SieveWindow sw(clo, chi);
        sw.for_each_prime([&](uint64_t p) {
          acc.add(detail::e2pi(detail::linear_frac(th, p)));
        });
        return acc;
      },
      [](detail::CxSum x, const detail::CxSum& y) {
        x.combine(y);
        return x;
      },
      threads);

  BoundRatio out;
  out.check = "prime-reduce";
  out.params = json{{"theta", theta.str()}, {"N", N}, {"N1", Np}};
  out.measured = std::abs(psum.value());
  out.bound = grid_max / std::log(static_cast<double>(N)) +
              std::sqrt(static_cast<double>(N));
  out.ratio = out.measured / out.bound;
  out.note = "grid max";
  return out;
}

}  // namespace psb
