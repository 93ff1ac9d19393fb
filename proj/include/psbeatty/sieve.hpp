#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psbeatty/errors.hpp"

namespace psb {

inline constexpr uint64_t kMaxWindowSpan = uint64_t(1) << 26;
inline constexpr uint64_t kMaxSieveValue = 1000000000000ULL;  // 10^12

/// Primes up to 10^6 (enough to seed any window below 10^12), built once.
inline const std::vector<uint32_t>& base_primes() {
  static const std::vector<uint32_t> primes = [] {
    const uint32_t limit = 1000000;
    std::vector<bool> comp(limit + 1, false);
    std::vector<uint32_t> ps;
    ps.reserve(80000);
    for (uint32_t i = 2; i <= limit; ++i) {
      if (comp[i]) continue;
      ps.push_back(i);
      for (uint64_t j = uint64_t(i) * i; j <= limit; j += i) comp[j] = true;
    }
    return ps;
  }();
  return primes;
}

inline uint64_t isqrt_u64(uint64_t n) {
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// Exact primality for the half-open window (lo, hi], bit per integer.
class SieveWindow {
 public:
  SieveWindow(uint64_t lo, uint64_t hi) : lo_(lo), hi_(hi) {
    if (lo >= hi) throw InvalidInput("sieve_window requires lo < hi");
    if (hi > kMaxSieveValue)
      throw InvalidInput("sieve_window requires hi <= 10^12");
    if (hi - lo > kMaxWindowSpan)
      throw WindowTooLarge("sieve window wider than 2^26");
    const uint64_t span = hi - lo;
    bits_.assign((span + 63) / 64, ~uint64_t(0));
    if (lo == 0) clear(1);  // value 1
    const uint64_t root = isqrt_u64(hi);
    for (uint32_t p : base_primes()) {
      if (uint64_t(p) > root) break;
      uint64_t start = std::max<uint64_t>(uint64_t(p) * p, (lo / p + 1) * p);
      for (uint64_t v = start; v <= hi; v += p) clear(v);
    }
    // Mask tail bits past the window so popcount is exact.
    uint64_t last = span % 64;
    if (last) bits_.back() &= (~uint64_t(0)) >> (64 - last);
  }

  uint64_t lo() const { return lo_; }
  uint64_t hi() const { return hi_; }

  bool is_prime(uint64_t v) const {
    if (v <= lo_ || v > hi_)
      throw InvalidInput("is_prime: value outside window");
    if (v < 2) return false;
    uint64_t idx = v - lo_ - 1;
    return (bits_[idx >> 6] >> (idx & 63)) & 1;
  }

  uint64_t count() const {
    uint64_t c = 0;
    for (uint64_t w : bits_) c += static_cast<uint64_t>(__builtin_popcountll(w));
    return c;
  }

  template <class Fn>
  void for_each_prime(Fn&& fn) const {
    for (size_t w = 0; w < bits_.size(); ++w) {
      uint64_t word = bits_[w];
      while (word) {
        unsigned b = static_cast<unsigned>(__builtin_ctzll(word));
        word &= word - 1;
        fn(lo_ + 1 + (uint64_t(w) << 6) + b);
      }
    }
  }

  std::vector<uint64_t> primes() const {
    std::vector<uint64_t> out;
    for_each_prime([&](uint64_t p) { out.push_back(p); });
    return out;
  }

 private:
  void clear(uint64_t v) {
    if (v <= lo_ || v > hi_) return;
    uint64_t idx = v - lo_ - 1;
    bits_[idx >> 6] &= ~(uint64_t(1) << (idx & 63));
  }

  uint64_t lo_, hi_;
  std::vector<uint64_t> bits_;
};

inline SieveWindow sieve_window(uint64_t lo, uint64_t hi) {
  return SieveWindow(lo, hi);
}

struct PrimePower {
  uint64_t p = 0;
  unsigned k = 0;
  double log_p() const { return std::log(static_cast<double>(p)); }
  uint64_t value() const {
    uint64_t v = 1;
    for (unsigned i = 0; i < k; ++i) v *= p;
    return v;
  }
};

/// (p, k) when n = p^k, nothing otherwise (Lambda(n) = 0); n = 1 -> nothing.
inline std::optional<PrimePower> von_mangoldt(uint64_t n) {
  if (n < 1 || n > kMaxSieveValue)
    throw InvalidInput("von_mangoldt: n out of [1, 10^12]");
  if (n == 1) return std::nullopt;
  for (uint32_t p : base_primes()) {
    if (uint64_t(p) * p > n) break;
    if (n % p == 0) {
      unsigned k = 0;
      while (n % p == 0) {
        n /= p;
        ++k;
      }
      if (n != 1) return std::nullopt;
      return PrimePower{p, k};
    }
  }
  return PrimePower{n, 1};  // no factor <= sqrt(n): prime
}

struct Factor {
  uint64_t p;
  unsigned e;
};

inline std::vector<Factor> factorize(uint64_t n) {
  if (n < 1 || n > kMaxSieveValue)
    throw InvalidInput("factorize: n out of [1, 10^12]");
  std::vector<Factor> fs;
  for (uint32_t p : base_primes()) {
    if (uint64_t(p) * p > n) break;
    if (n % p == 0) {
      unsigned e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      fs.push_back({p, e});
    }
  }
  if (n > 1) fs.push_back({n, 1});
  return fs;
}

inline int mobius(uint64_t n) {
  auto fs = factorize(n);
  int sign = 1;
  for (const auto& f : fs) {
    if (f.e >= 2) return 0;
    sign = -sign;
  }
  return sign;
}

inline uint64_t euler_phi(uint64_t n) {
  uint64_t phi = n;
  for (const auto& f : factorize(n)) phi -= phi / f.p;
  return phi;
}

/// Lambda(v) for v in (lo, hi] as doubles (log p at prime powers, 0 else).
inline std::vector<double> mangoldt_range(uint64_t lo, uint64_t hi) {
  SieveWindow sw(lo, hi);
  std::vector<double> out(hi - lo, 0.0);
  sw.for_each_prime([&](uint64_t p) {
    out[p - lo - 1] = std::log(static_cast<double>(p));
  });
  for (uint32_t p : base_primes()) {
    uint64_t pk = uint64_t(p) * p;
    if (pk > hi) break;
    for (; pk <= hi; pk *= p) {
      if (pk > lo) out[pk - lo - 1] = std::log(static_cast<double>(p));
      if (pk > hi / p) break;  // overflow guard
    }
  }
  return out;
}

/// mu(v) for v in (lo, hi]; span capped at 2^24 (holds a cofactor per slot).
inline std::vector<int8_t> mobius_range(uint64_t lo, uint64_t hi) {
  if (lo >= hi) throw InvalidInput("mobius_range requires lo < hi");
  if (hi - lo > (uint64_t(1) << 24))
    throw WindowTooLarge("mobius_range span exceeds 2^24");
  if (hi > kMaxSieveValue)
    throw InvalidInput("mobius_range requires hi <= 10^12");
  const size_t span = hi - lo;
  std::vector<int8_t> mu(span, 1);
  std::vector<uint64_t> rem(span);
  for (size_t i = 0; i < span; ++i) rem[i] = lo + 1 + i;
  if (lo == 0) mu[0] = 1;  // mu(1) = 1
  const uint64_t root = isqrt_u64(hi);
  for (uint32_t p : base_primes()) {
    if (uint64_t(p) > root) break;
    for (uint64_t v = (lo / p + 1) * p; v <= hi; v += p) {
      size_t idx = v - lo - 1;
      unsigned e = 0;
      while (rem[idx] % p == 0) {
        rem[idx] /= p;
        ++e;
      }
      if (e >= 2)
        mu[idx] = 0;
      else if (mu[idx] != 0)
        mu[idx] = -mu[idx];
    }
  }
  for (size_t i = 0; i < span; ++i)
    if (rem[i] > 1 && mu[i] != 0) mu[i] = -mu[i];
  return mu;
}

}  // namespace psb
