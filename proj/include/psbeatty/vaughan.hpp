#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "psbeatty/counting.hpp"
#include "psbeatty/harmonic.hpp"
#include "psbeatty/sieve.hpp"

namespace psb {

inline constexpr uint64_t kMaxVaughanN = 1000000000ULL;  // 10^9

struct VaughanParams {
  double U = 1.0;
  double V = 1.0;

  VaughanParams() = default;
  VaughanParams(double u, double v) : U(u), V(v) {
    if (!(U >= 1.0 && V >= 1.0)) throw InvalidInput("require U, V >= 1");
    if (U * V > 1e12) throw InvalidInput("U*V out of supported range");
  }

  static VaughanParams from_range(uint64_t N) {
    double nd = static_cast<double>(N);
    return VaughanParams(std::pow(nd, 1.0 / 7.0), std::pow(nd, 3.0 / 7.0));
  }

  uint64_t u_floor() const { return static_cast<uint64_t>(U); }
  uint64_t v_floor() const { return static_cast<uint64_t>(V); }
};

namespace detail {

/// Integer combination of prime logarithms: the exact carrier for Vaughan
/// terms. Conversion to double happens only at the boundary.
struct LogCombination {
  std::map<uint64_t, long long> mult;  // prime -> integer multiplicity

  void add(uint64_t p, long long m) {
    if (m == 0) return;
    auto it = mult.find(p);
    if (it == mult.end()) {
      mult.emplace(p, m);
    } else {
      it->second += m;
      if (it->second == 0) mult.erase(it);
    }
  }

  void add(const LogCombination& o, long long scale = 1) {
    for (const auto& [p, m] : o.mult) add(p, m * scale);
  }

  double value() const {
    KahanSum s;
    for (const auto& [p, m] : mult)
      s.add(static_cast<double>(m) * std::log(static_cast<double>(p)));
    return s.value();
  }

  bool operator==(const LogCombination& o) const { return mult == o.mult; }
};

/// mu of the cofactor k / p^j read off k's factorization.
inline int mobius_of_cofactor(const std::vector<Factor>& fs, size_t skip,
                              unsigned j) {
  int sign = 1;
  for (size_t i = 0; i < fs.size(); ++i) {
    unsigned e = fs[i].e - (i == skip ? j : 0);
    if (e >= 2) return 0;
    if (e == 1) sign = -sign;
  }
  return sign;
}

inline LogCombination coeff_a_comb(uint64_t k, uint64_t Ui, uint64_t Vi) {
  LogCombination out;
  auto fs = factorize(k);
  for (size_t i = 0; i < fs.size(); ++i) {
    uint64_t c = 1;
    for (unsigned j = 1; j <= fs[i].e; ++j) {
      c *= fs[i].p;
      if (c > Ui) break;
      uint64_t d = k / c;
      if (d > Vi) continue;
      out.add(fs[i].p, mobius_of_cofactor(fs, i, j));  // mu(d) * log p
    }
  }
  return out;
}

inline void divisors_rec(const std::vector<Factor>& fs, size_t i, uint64_t acc,
                         std::vector<uint64_t>& out) {
  if (i == fs.size()) {
    out.push_back(acc);
    return;
  }
  uint64_t v = acc;
  for (unsigned j = 0; j <= fs[i].e; ++j) {
    divisors_rec(fs, i + 1, v, out);
    if (j < fs[i].e) v *= fs[i].p;
  }
}

inline std::vector<uint64_t> divisors(uint64_t n) {
  auto fs = factorize(n);
  std::vector<uint64_t> out;
  divisors_rec(fs, 0, 1, out);
  return out;
}

}  // namespace detail

/// a(k) = sum over k = c d, c <= U, d <= V of Lambda(c) mu(d).
inline double coeff_a(uint64_t k, double U, double V) {
  if (k < 1 || k > kMaxVaughanN) throw InvalidInput("coeff_a: k out of range");
  return detail::coeff_a_comb(k, static_cast<uint64_t>(U),
                              static_cast<uint64_t>(V))
      .value();
}

/// b(k) = sum over d | k, d <= V of mu(d). Vanishes for 1 < k <= V.
inline long long coeff_b(uint64_t k, double V) {
  if (k < 1 || k > kMaxVaughanN) throw InvalidInput("coeff_b: k out of range");
  uint64_t Vi = static_cast<uint64_t>(V);
  long long s = 0;
  for (uint64_t d : detail::divisors(k))
    if (d <= Vi) s += mobius(d);
  return s;
}

struct VaughanTerms {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double lambda = 0.0;       // reconstructed: value of the combined structure
  bool exact_match = false;  // combined structure equals Lambda(n) exactly
};

/// Three-term decomposition with T1 + T2 + T3 = Lambda(n) for n > U.
inline VaughanTerms vaughan_terms(uint64_t n, double U, double V) {
  if (n > kMaxVaughanN) throw InvalidInput("vaughan_terms: n out of range");
  if (!(static_cast<double>(n) > U))
    throw InvalidInput("vaughan_terms requires n > U");
  const uint64_t Ui = static_cast<uint64_t>(U);
  const uint64_t Vi = static_cast<uint64_t>(V);
  auto fs = factorize(n);

  detail::LogCombination c1, c2, c3;
  // T1 = -sum_{k|n} a(k)
  for (uint64_t k : detail::divisors(n))
    c1.add(detail::coeff_a_comb(k, Ui, Vi), -1);
  // T2 = sum_{cd=n, d<=V} mu(d) log c, with log c expanded over primes
  for (uint64_t d : detail::divisors(n)) {
    if (d > Vi) continue;
    int mu = mobius(d);
    if (mu == 0) continue;
    uint64_t c = n / d;
    for (const auto& f : factorize(c))
      c2.add(f.p, static_cast<long long>(mu) * f.e);
  }
  // T3 = -sum_{kc=n, k>1, c>U} Lambda(c) b(k): c runs over prime powers
  for (size_t i = 0; i < fs.size(); ++i) {
    uint64_t c = 1;
    for (unsigned j = 1; j <= fs[i].e; ++j) {
      c *= fs[i].p;
      if (c <= Ui || c == n) continue;  // need c > U and k = n/c > 1
      c3.add(fs[i].p, -coeff_b(n / c, static_cast<double>(Vi)));
    }
  }

  VaughanTerms out;
  out.t1 = c1.value();
  out.t2 = c2.value();
  out.t3 = c3.value();
  detail::LogCombination total = c1;
  total.add(c2);
  total.add(c3);
  detail::LogCombination lam;
  if (fs.size() == 1) lam.add(fs[0].p, 1);  // Lambda(p^e) = log p
  out.exact_match = (total == lam);
  out.lambda = total.value();
  return out;
}

struct SumEvaluation {
  std::string label;  // S1..S5 or direct
  long long k = 0;
  long h = 0;
  uint64_t N = 0, N2 = 0;
  std::complex<double> value{0.0, 0.0};
  uint64_t term_count = 0;

  json to_json() const {
    return json{{"label", label},
                {"k", k},
                {"h", h},
                {"N", N},
                {"N2", N2},
                {"re", value.real()},
                {"im", value.imag()},
                {"term_count", term_count}};
  }
};

struct BilinearSplit {
  std::vector<SumEvaluation> sums;
  double residual = 0.0;   // |(-S1 + S2 - S3) - direct|
  double tolerance = 0.0;  // 1e-6 * N
  bool ok = false;

  const SumEvaluation& find(const std::string& label) const {
    for (const auto& s : sums)
      if (s.label == label) return s;
    throw IndexOutOfRange("no sum labeled " + label);
  }

  json to_json() const {
    json rows = json::array();
    for (const auto& s : sums) rows.push_back(s.to_json());
    return json{{"schema_version", kSchemaVersion},
                {"sums", rows},
                {"residual", residual},
                {"tolerance", tolerance},
                {"ok", ok}};
  }
};

namespace detail {

/// frac(h * t^gamma) with gamma = den/num, certified from a directed
/// enclosure; exact zero for perfect powers.
inline double power_phase_frac(const PSParams& P, uint64_t t, long h) {
  mpz_class tp;
  mpz_ui_pow_ui(tp.get_mpz_t(), t, static_cast<unsigned long>(P.den()));
  mpz_class r, rem;
  mpz_rootrem(r.get_mpz_t(), rem.get_mpz_t(), tp.get_mpz_t(),
              static_cast<unsigned long>(P.num()));
  if (rem == 0) return 0.0;
  for (mpfr_prec_t prec = 128; prec <= 1024; prec *= 2) {
    BigInterval root = irootn_z(tp, static_cast<unsigned long>(P.num()), prec);
    BigInterval scaled =
        imul(root, BigInterval::from_z(mpz_class(h), prec), prec);
    mpz_class fl;
    if (scaled.certified_floor(fl)) {
      BigInterval fr = isub(scaled, BigInterval::from_z(fl, prec), prec);
      return fr.mid();
    }
  }
  throw PrecisionExhausted("power phase needs more than 1024 bits");
}

/// Phase table e(k a t + k b + h t^gamma) for every total t in (N, N2].
inline std::vector<std::complex<double>> bilinear_phase_table(
    uint64_t N, uint64_t N2, long long k, long h, const BeattyParams& B,
    const PSParams& P, int threads) {
  std::vector<std::complex<double>> tab(N2 - N);
  const ExactReal theta = ExactReal(static_cast<long>(k)) * B.a();
  const ExactReal mu = ExactReal(static_cast<long>(k)) * B.b();
  const uint64_t chunk = 2048;
  const uint64_t nblocks = (N2 - N + chunk - 1) / chunk;
  parallel_blocks<int>(
      nblocks, 0,
      [&](uint64_t blk) {
        uint64_t lo = N + 1 + blk * chunk;
        uint64_t hi = std::min(N2, lo + chunk - 1);
        for (uint64_t t = lo; t <= hi; ++t) {
          ExactReal lin = theta * ExactReal(static_cast<long>(t)) + mu;
          double fl = lin.frac().to_double();
          double fp = power_phase_frac(P, t, h);
          tab[t - N - 1] = e2pi(fl + fp);
        }
        return 0;
      },
      [](int a, int) { return a; }, threads);
  return tab;
}

}  // namespace detail

/// Direct desk-scale evaluation of the five decomposition sums and the
/// Lambda-twisted target they reassemble into.
inline BilinearSplit bilinear_split(uint64_t N, uint64_t N2,
                                    const VaughanParams& params, long long k,
                                    long h, const BeattyParams& B,
                                    const PSParams& P, int threads = 0) {
  if (N < 1 || N2 <= N) throw InvalidInput("require 1 <= N < N2");
  if (N2 > 2 * N || 2 * N > 10000000ULL)
    throw InvalidInput("require N2 <= 2N <= 10^7");
  if (k == 0) throw InvalidInput("k = 0 is handled by the main-term path");
  if (h < 1) throw InvalidInput("require h >= 1");

  const uint64_t Ui = params.u_floor();
  const uint64_t Vi = params.v_floor();
  auto tab = detail::bilinear_phase_table(N, N2, k, h, B, P, threads);
  auto phase = [&](uint64_t total) { return tab[total - N - 1]; };

  auto make = [&](const std::string& label) {
    SumEvaluation s;
    s.label = label;
    s.k = k;
    s.h = h;
    s.N = N;
    s.N2 = N2;
    return s;
  };

  // S4 (m <= V) and S5 (V < m <= UV) partition S1 = sum_m a(m) sum_r e(...).
  SumEvaluation s4 = make("S4"), s5 = make("S5");
  {
    uint64_t m_hi = std::min(Ui * Vi, N2);
    for (uint64_t m = 1; m <= m_hi; ++m) {
      double am = detail::coeff_a_comb(m, Ui, Vi).value();
      if (am == 0.0) continue;
      uint64_t r_lo = N / m + 1, r_hi = N2 / m;
      if (r_lo > r_hi) continue;
      std::complex<double> inner{0.0, 0.0};
      for (uint64_t r2 = r_lo; r2 <= r_hi; ++r2) inner += phase(m * r2);
      SumEvaluation& dst = (m <= Vi) ? s4 : s5;
      dst.value += am * inner;
      dst.term_count += r_hi - r_lo + 1;
    }
  }
  SumEvaluation s1 = make("S1");
  s1.value = s4.value + s5.value;  // exact partition by construction
  s1.term_count = s4.term_count + s5.term_count;

  SumEvaluation s2 = make("S2");
  for (uint64_t m = 1; m <= Vi; ++m) {
    int mu = mobius(m);
    if (mu == 0) continue;
    uint64_t r_lo = N / m + 1, r_hi = N2 / m;
    if (r_lo > r_hi) continue;
    std::complex<double> inner{0.0, 0.0};
    for (uint64_t r2 = r_lo; r2 <= r_hi; ++r2)
      inner += std::log(static_cast<double>(r2)) * phase(m * r2);
    s2.value += static_cast<double>(mu) * inner;
    s2.term_count += r_hi - r_lo + 1;
  }

  SumEvaluation s3 = make("S3");
  {
    uint64_t kk_hi = N2 / (Ui + 1);
    uint64_t c_max = (Vi + 1 <= N2) ? N2 / (Vi + 1) : 0;
    std::vector<double> lam =
        c_max >= 1 ? mangoldt_range(0, c_max) : std::vector<double>{};
    for (uint64_t kk = Vi + 1; kk <= kk_hi; ++kk) {
      long long bk = coeff_b(kk, static_cast<double>(Vi));
      if (bk == 0) continue;
      std::complex<double> inner{0.0, 0.0};
      uint64_t c_lo = std::max(Ui, N / kk) + 1, c_hi = N2 / kk;
      uint64_t cnt = 0;
      for (uint64_t c = c_lo; c <= c_hi; ++c) {
        double L = lam[c - 1];
        if (L == 0.0) continue;
        inner += L * phase(kk * c);
        ++cnt;
      }
      s3.value += static_cast<double>(bk) * inner;
      s3.term_count += cnt;
    }
  }

  SumEvaluation direct = make("direct");
  {
    std::vector<double> lam = mangoldt_range(N, N2);
    for (uint64_t t = N + 1; t <= N2; ++t) {
      double L = lam[t - N - 1];
      if (L == 0.0) continue;
      direct.value += L * phase(t);
      ++direct.term_count;
    }
  }

  BilinearSplit out;
  out.residual = std::abs(-s1.value + s2.value - s3.value - direct.value);
  out.tolerance = 1e-6 * static_cast<double>(N);
  out.ok = out.residual <= out.tolerance;
  out.sums = {s1, s2, s3, s4, s5, direct};
  return out;
}

}  // namespace psb
