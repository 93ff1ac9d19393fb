#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "json.hpp"

#include "psbeatty/errors.hpp"
#include "psbeatty/exact_real.hpp"
#include "psbeatty/parallel.hpp"
#include "psbeatty/version.hpp"

namespace psb {

inline constexpr double kPi = 3.14159265358979323846;

namespace detail {

/// e(t) = exp(2*pi*i*t) with the argument reduced mod 1 before scaling,
/// so large t keeps full angular accuracy.
inline std::complex<double> e2pi(double t) {
  double u = t - std::floor(t);
  double ang = 2.0 * kPi * u;
  return {std::cos(ang), std::sin(ang)};
}

class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

}  // namespace detail

/// psi(t) = {t} - 1/2.
inline double sawtooth(double t) { return t - std::floor(t) - 0.5; }

inline ExactReal sawtooth(const ExactReal& t) {
  return t.frac() - ExactReal(mpq_class(1, 2));
}

/// Truncated Fourier polynomial with real values: g(-k) = conj(g(k)).
struct TrigPolynomial {
  long K = 0;
  std::vector<std::complex<double>> g;  // index k = 0..K
  bool has_meta = false;                // set when built as an indicator
  double a = 0.0;
  double delta = 0.0;
};

/// Psi_K(t) = sum_{|k|<=K} g(k) e(kt), conjugate pairs combined and
/// compensated.
inline double trig_eval(const TrigPolynomial& T, double t) {
  detail::KahanSum s;
  s.add(T.g[0].real());
  for (long k = 1; k <= T.K; ++k) {
    double u = static_cast<double>(k) * t;
    u -= std::floor(u);
    double ang = 2.0 * kPi * u;
    const std::complex<double>& gk = T.g[static_cast<size_t>(k)];
    s.add(2.0 * (gk.real() * std::cos(ang) - gk.imag() * std::sin(ang)));
  }
  return s.value();
}

/// Smoothed interval indicator: X_{(0,a]} convolved twice with the box of
/// width delta/2, truncated at |k| <= K. g(0) = a lands exactly.
inline TrigPolynomial vinogradov_indicator(double a, double delta, long K) {
  if (!(a > 0.0 && a < 1.0)) throw InvalidInput("indicator requires 0 < a < 1");
  if (!(delta > 0.0 && delta < 0.125))
    throw InvalidInput("indicator requires 0 < delta < 1/8");
  if (!(4.0 * delta <= std::min(a, 1.0 - a)))
    throw InvalidInput("indicator requires 4*delta <= min(a, 1-a)");
  if (static_cast<double>(K) < 1.0 / delta)
    throw InvalidInput("indicator requires K >= 1/delta");
  if (K > 10000000L) throw InvalidInput("indicator degree K exceeds 10^7");
  TrigPolynomial T;
  T.K = K;
  T.has_meta = true;
  T.a = a;
  T.delta = delta;
  T.g.resize(static_cast<size_t>(K) + 1);
  T.g[0] = {a, 0.0};
  for (long k = 1; k <= K; ++k) {
    double kd = static_cast<double>(k);
    double sa = std::sin(kPi * std::fmod(kd * a, 2.0));
    double xs = kPi * kd * delta / 2.0;
    double sinc = std::sin(xs) / xs;
    double mag = sa / (kPi * kd) * sinc * sinc;
    T.g[static_cast<size_t>(k)] = detail::e2pi(-kd * a / 2.0) * mag;
  }
  return T;
}

/// Reference value of the untruncated smoothed indicator: the ramp is the
/// CDF of the triangle kernel on [-delta/2, delta/2].
inline double vinogradov_smoothed(double a, double delta, double t) {
  auto ramp = [delta](double s) {
    if (s <= -delta / 2.0) return 0.0;
    if (s >= delta / 2.0) return 1.0;
    double q = 2.0 / (delta * delta);
    if (s <= 0.0) {
      double u = s + delta / 2.0;
      return q * u * u;
    }
    double u = delta / 2.0 - s;
    return 1.0 - q * u * u;
  };
  double s = t - std::floor(t);
  return ramp(s) + ramp(s - 1.0) - ramp(s - a);
}

/// Tail budget for the truncation |Psi - Psi_K| (coefficient tail sum).
inline double vinogradov_tail(double delta, long K) {
  return (8.0 / (kPi * kPi)) / (static_cast<double>(K) * delta);
}

/// Sawtooth approximation with a nonnegative trigonometric majorant:
/// |psi(t) - sum a_h e(th)| <= sum b_h e(th) pointwise.
struct VaalerApprox {
  long H = 0;
  std::vector<std::complex<double>> a;  // index h, valid 1..H; a[0] = 0
  std::vector<double> b;                // index h = 0..H; b_{-h} = b_h

  double eval_approx(double t) const {
    detail::KahanSum s;
    for (long h = 1; h <= H; ++h) {
      double u = static_cast<double>(h) * t;
      u -= std::floor(u);
      // a_h = i |a_h|: pair sum collapses to -2|a_h| sin(2 pi h t)
      s.add(-2.0 * a[static_cast<size_t>(h)].imag() * std::sin(2.0 * kPi * u));
    }
    return s.value();
  }

  double eval_majorant(double t) const {
    detail::KahanSum s;
    s.add(b[0]);
    for (long h = 1; h <= H; ++h) {
      double u = static_cast<double>(h) * t;
      u -= std::floor(u);
      s.add(2.0 * b[static_cast<size_t>(h)] * std::cos(2.0 * kPi * u));
    }
    return s.value();
  }
};

namespace detail {

/// Damping applied to the sawtooth Fourier coefficients; decreases from 1
/// at 0+ to 0 at 1-.
inline double vaaler_damping(double t) {
  return kPi * t * (1.0 - t) * (std::cos(kPi * t) / std::sin(kPi * t)) + t;
}

}  // namespace detail

inline VaalerApprox vaaler_approx(long H) {
  if (H < 1 || H > 1000000L) throw InvalidInput("vaaler degree H out of [1, 10^6]");
  VaalerApprox V;
  V.H = H;
  V.a.assign(static_cast<size_t>(H) + 1, {0.0, 0.0});
  V.b.assign(static_cast<size_t>(H) + 1, 0.0);
  const double n = static_cast<double>(H) + 1.0;
  V.b[0] = 1.0 / (2.0 * n);
  for (long h = 1; h <= H; ++h) {
    double hd = static_cast<double>(h);
    double w = detail::vaaler_damping(hd / n);
    V.a[static_cast<size_t>(h)] = {0.0, w / (2.0 * kPi * hd)};
    V.b[static_cast<size_t>(h)] = (1.0 - hd / n) / (2.0 * n);
  }
  return V;
}

struct MajorantCheck {
  long H = 0;
  uint64_t grid = 0;
  double max_violation = 0.0;  // max over grid of |psi - A| - B
  double sup_error = 0.0;      // max over grid of |psi - A|

  nlohmann::json to_json() const {
    return nlohmann::json{{"schema_version", kSchemaVersion},
                          {"H", H},
                          {"grid", grid},
                          {"max_violation", max_violation},
                          {"sup_error", sup_error}};
  }
};

/// Evaluates the majorant inequality on a half-step grid (integers, where
/// psi jumps, are never hit).
inline MajorantCheck majorant_check(const VaalerApprox& V, uint64_t grid_size,
                                    int threads = 0) {
  if (grid_size < 1 || grid_size > 1000000ULL)
    throw InvalidInput("majorant grid size out of [1, 10^6]");
  MajorantCheck out;
  out.H = V.H;
  out.grid = grid_size;
  const uint64_t chunk = 4096;
  const uint64_t nblocks = (grid_size + chunk - 1) / chunk;
  struct Acc {
    double viol = -1e300;
    double sup = 0.0;
  };
  Acc acc = parallel_blocks<Acc>(
      nblocks, Acc{},
      [&](uint64_t blk) {
        Acc a;
        uint64_t jlo = blk * chunk;
        uint64_t jhi = std::min(grid_size, jlo + chunk);
        for (uint64_t j = jlo; j < jhi; ++j) {
          double t = (static_cast<double>(j) + 0.5) /
                     static_cast<double>(grid_size);
          double err = std::fabs(sawtooth(t) - V.eval_approx(t));
          double maj = V.eval_majorant(t);
          a.viol = std::max(a.viol, err - maj);
          a.sup = std::max(a.sup, err);
        }
        return a;
      },
      [](Acc x, Acc y) {
        return Acc{std::max(x.viol, y.viol), std::max(x.sup, y.sup)};
      },
      threads);
  out.max_violation = acc.viol;
  out.sup_error = acc.sup;
  return out;
}

}  // namespace psb
