#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <utility>
#include <variant>

#include "psbeatty/errors.hpp"
#include "psbeatty/mp.hpp"
#include "psbeatty/realspec.hpp"
#include "psbeatty/surd.hpp"

namespace psb {

namespace detail {
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
}  // namespace detail

/// Certified real arithmetic. Values are held exactly as rationals or
/// quadratic surds whenever the operations stay inside one field; anything
/// else (decimal atoms, cf prefixes, mixed fields, irrational roots) becomes
/// an expression tree evaluated by directed-rounding interval arithmetic with
/// precision escalation (128 -> 2048 bits, four doublings) before giving up
/// with PrecisionExhausted. Floor, sign, and comparisons never guess.
class ExactReal {
 public:
  ExactReal() : v_(mpq_class(0)) {}
  ExactReal(long n) : v_(mpq_class(n)) {}
  ExactReal(const mpz_class& n) : v_(mpq_class(n)) {}
  ExactReal(mpq_class q) : v_(std::move(q)) {
    std::get<mpq_class>(v_).canonicalize();
  }
  ExactReal(Surd s) {
    if (s.is_rational())
      v_ = s.to_rational();
    else
      v_ = std::move(s);
  }

  static ExactReal from_spec(const RealSpec& spec);

  /// base^(num/den) for base >= 0; exact integer when base^num is a perfect
  /// den-th power, certified interval otherwise.
  static ExactReal integer_root(const mpz_class& base, unsigned long num,
                                unsigned long den);

  bool is_rational() const { return std::holds_alternative<mpq_class>(v_); }
  bool is_surd() const { return std::holds_alternative<Surd>(v_); }
  bool is_exact() const { return !std::holds_alternative<detail::ExprPtr>(v_); }

  const mpq_class& rational() const { return std::get<mpq_class>(v_); }
  const Surd& surd() const { return std::get<Surd>(v_); }

  bool is_zero_exact() const {
    if (is_rational()) return rational() == 0;
    if (is_surd()) return surd().is_zero();
    return false;
  }

  friend ExactReal operator+(const ExactReal& a, const ExactReal& b);
  friend ExactReal operator-(const ExactReal& a, const ExactReal& b);
  friend ExactReal operator*(const ExactReal& a, const ExactReal& b);
  friend ExactReal operator-(const ExactReal& a);
  ExactReal recip() const;
  ExactReal pow_int(unsigned long e) const {
    ExactReal r(1), base(*this);
    while (e > 0) {
      if (e & 1) r = r * base;
      if (e >>= 1) base = base * base;
    }
    return r;
  }

  BigInterval eval(mpfr_prec_t prec) const;

  /// The unique integer f with f <= x < f+1; exact for rational/surd values,
  /// interval-certified otherwise. Throws PrecisionExhausted when the value
  /// cannot be separated from an integer within the precision budget.
  mpz_class floor() const;

  /// x - floor(x), in [0, 1); exactness class preserved.
  ExactReal frac() const { return *this - ExactReal(floor()); }

  /// Certified sign: -1, 0 (exact zero only), +1.
  int sign() const;

  int cmp(const ExactReal& o) const;
  bool operator<(const ExactReal& o) const { return cmp(o) < 0; }
  bool operator<=(const ExactReal& o) const { return cmp(o) <= 0; }
  bool operator>(const ExactReal& o) const { return cmp(o) > 0; }
  bool operator>=(const ExactReal& o) const { return cmp(o) >= 0; }

  double to_double() const;

  static constexpr mpfr_prec_t kBasePrec = 128;
  static constexpr mpfr_prec_t kMaxPrec = 2048;  // four doublings

 private:
  explicit ExactReal(detail::ExprPtr e) : v_(std::move(e)) {}
  static ExactReal make_node(detail::Expr e);
  const detail::ExprPtr& node() const { return std::get<detail::ExprPtr>(v_); }

  std::variant<mpq_class, Surd, detail::ExprPtr> v_;
};

namespace detail {

struct Expr {
  enum class Op { Atom, Add, Sub, Mul, Neg, Recip, Root };
  Op op = Op::Atom;
  RealSpec atom;  // Decimal or CfPrefix only
  ExactReal a, b;
  mpz_class root_arg;  // Root: enclose root_arg^(1/root_den), root_arg >= 0
  unsigned long root_den = 1;

  BigInterval eval(mpfr_prec_t prec) const {
    switch (op) {
      case Op::Atom:
        return eval_atom(prec);
      case Op::Add:
        return iadd(a.eval(prec), b.eval(prec), prec);
      case Op::Sub:
        return isub(a.eval(prec), b.eval(prec), prec);
      case Op::Mul:
        return imul(a.eval(prec), b.eval(prec), prec);
      case Op::Neg:
        return ineg(a.eval(prec), prec);
      case Op::Recip: {
        BigInterval inner = a.eval(prec);
        if (inner.contains_zero()) {
          // Sound but useless enclosure; lets the caller escalate precision.
          BigInterval whole(prec);
          mpfr_set_inf(whole.lo.raw(), -1);
          mpfr_set_inf(whole.hi.raw(), 1);
          return whole;
        }
        return irecip(inner, prec);
      }
      case Op::Root:
        return irootn_z(root_arg, root_den, prec);
    }
    return BigInterval(prec);
  }

 private:
  BigInterval eval_atom(mpfr_prec_t prec) const {
    if (atom.kind() == RealSpec::Kind::Decimal) {
      mpq_class u = atom.dec_uncertainty();
      return BigInterval::from_q_pair(atom.dec_value() - u,
                                      atom.dec_value() + u, prec);
    }
    // cf prefix: the reals with this expansion prefix lie strictly between
    // the last convergent p_k/q_k and the extension (p_k+p_{k-1})/(q_k+q_{k-1}).
    mpz_class pk1 = 1, qk1 = 0;  // p_{-1}, q_{-1}
    mpz_class pk = atom.cf_a0(), qk = 1;
    for (const auto& ai : atom.cf_rest()) {
      mpz_class pn = ai * pk + pk1, qn = ai * qk + qk1;
      pk1 = pk;
      qk1 = qk;
      pk = pn;
      qk = qn;
    }
    mpq_class end1(pk, qk), end2(pk + pk1, qk + qk1);
    end1.canonicalize();
    end2.canonicalize();
    if (end1 > end2) std::swap(end1, end2);
    return BigInterval::from_q_pair(end1, end2, prec);
  }
};

}  // namespace detail

inline ExactReal ExactReal::make_node(detail::Expr e) {
  return ExactReal(std::make_shared<const detail::Expr>(std::move(e)));
}

inline ExactReal ExactReal::from_spec(const RealSpec& spec) {
  switch (spec.kind()) {
    case RealSpec::Kind::Rational:
      return ExactReal(spec.rat());
    case RealSpec::Kind::Quadratic:
      return ExactReal(spec.surd());
    default: {
      detail::Expr e;
      e.op = detail::Expr::Op::Atom;
      e.atom = spec;
      return make_node(std::move(e));
    }
  }
}

inline ExactReal ExactReal::integer_root(const mpz_class& base,
                                         unsigned long num,
                                         unsigned long den) {
  if (base < 0) throw InvalidInput("integer_root requires base >= 0");
  if (den == 0) throw InvalidInput("integer_root requires den >= 1");
  mpz_class t;
  mpz_pow_ui(t.get_mpz_t(), base.get_mpz_t(), num);
  if (den == 1) return ExactReal(t);
  mpz_class root;
  if (mpz_root(root.get_mpz_t(), t.get_mpz_t(), den) != 0)
    return ExactReal(root);
  if (den == 2) return ExactReal(Surd(0, 1, 1, t));
  detail::Expr e;
  e.op = detail::Expr::Op::Root;
  e.root_arg = t;
  e.root_den = den;
  return make_node(std::move(e));
}

inline ExactReal operator+(const ExactReal& a, const ExactReal& b) {
  if (a.is_rational() && b.is_rational())
    return ExactReal(mpq_class(a.rational() + b.rational()));
  if (a.is_exact() && b.is_exact()) {
    Surd sa = a.is_surd() ? a.surd() : Surd::from_rational(a.rational());
    Surd sb = b.is_surd() ? b.surd() : Surd::from_rational(b.rational());
    if (sa.same_field(sb)) return ExactReal(sa + sb);
  }
  detail::Expr e;
  e.op = detail::Expr::Op::Add;
  e.a = a;
  e.b = b;
  return ExactReal::make_node(std::move(e));
}

inline ExactReal operator-(const ExactReal& a, const ExactReal& b) {
  if (a.is_rational() && b.is_rational())
    return ExactReal(mpq_class(a.rational() - b.rational()));
  if (a.is_exact() && b.is_exact()) {
    Surd sa = a.is_surd() ? a.surd() : Surd::from_rational(a.rational());
    Surd sb = b.is_surd() ? b.surd() : Surd::from_rational(b.rational());
    if (sa.same_field(sb)) return ExactReal(sa - sb);
  }
  detail::Expr e;
  e.op = detail::Expr::Op::Sub;
  e.a = a;
  e.b = b;
  return ExactReal::make_node(std::move(e));
}

inline ExactReal operator*(const ExactReal& a, const ExactReal& b) {
  if (a.is_rational() && b.is_rational())
    return ExactReal(mpq_class(a.rational() * b.rational()));
  if (a.is_exact() && b.is_exact()) {
    Surd sa = a.is_surd() ? a.surd() : Surd::from_rational(a.rational());
    Surd sb = b.is_surd() ? b.surd() : Surd::from_rational(b.rational());
    if (sa.same_field(sb)) return ExactReal(sa * sb);
  }
  detail::Expr e;
  e.op = detail::Expr::Op::Mul;
  e.a = a;
  e.b = b;
  return ExactReal::make_node(std::move(e));
}

inline ExactReal operator-(const ExactReal& a) {
  if (a.is_rational()) return ExactReal(mpq_class(-a.rational()));
  if (a.is_surd()) return ExactReal(-a.surd());
  detail::Expr e;
  e.op = detail::Expr::Op::Neg;
  e.a = a;
  return ExactReal::make_node(std::move(e));
}

inline ExactReal ExactReal::recip() const {
  if (is_rational()) {
    if (rational() == 0) throw InvalidInput("reciprocal of zero");
    return ExactReal(mpq_class(1 / rational()));
  }
  if (is_surd()) return ExactReal(surd().recip());
  detail::Expr e;
  e.op = detail::Expr::Op::Recip;
  e.a = *this;
  return make_node(std::move(e));
}

inline BigInterval ExactReal::eval(mpfr_prec_t prec) const {
  if (is_rational()) return BigInterval::from_q(rational(), prec);
  if (is_surd()) return surd().eval(prec);
  return node()->eval(prec);
}

inline mpz_class ExactReal::floor() const {
  if (is_rational()) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), rational().get_num().get_mpz_t(),
               rational().get_den().get_mpz_t());
    return f;
  }
  if (is_surd()) return surd().floor();
  for (mpfr_prec_t p = kBasePrec; p <= kMaxPrec; p *= 2) {
    mpz_class f;
    if (eval(p).certified_floor(f)) return f;
  }
  throw PrecisionExhausted("floor not certifiable within precision budget");
}

inline int ExactReal::sign() const {
  if (is_rational()) return sgn(rational());
  if (is_surd()) return surd().sign();
  for (mpfr_prec_t p = kBasePrec; p <= kMaxPrec; p *= 2) {
    int s = eval(p).certified_sign();
    if (s != 0) return s;
  }
  throw PrecisionExhausted("sign not certifiable within precision budget");
}

inline int ExactReal::cmp(const ExactReal& o) const {
  if (is_rational() && o.is_rational()) return ::cmp(rational(), o.rational());
  ExactReal d = *this - o;
  if (d.is_zero_exact()) return 0;
  return d.sign();
}

inline double ExactReal::to_double() const {
  if (is_rational()) return rational().get_d();
  return eval(kBasePrec).mid();
}

/// Spec-facing name for ExactReal::floor on arbitrary expressions.
inline mpz_class certified_floor(const ExactReal& x) { return x.floor(); }

}  // namespace psb
