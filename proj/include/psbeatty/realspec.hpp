#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "psbeatty/errors.hpp"
#include "psbeatty/surd.hpp"

namespace psb {

/// Exactly-analyzable real number description. Four variants:
///   rational   "rat:p/q"
///   quadratic  "surd:(p+q*sqrt(d))/r"        (d positive non-square)
///   cf prefix  "cf:[a0;a1,a2,...]"           (prefix of an irrational's CF)
///   decimal    "dec:<digits>@<precision>"    (value known to within
///                                             10^-precision; precision >= 30)
/// Aliases: "sqrt2", "golden".
///
/// A cf prefix denotes the interval of reals whose expansion starts with the
/// given quotients; a decimal denotes digits +- one unit in the stated place.
/// Both are inherently inexact and flow through interval arithmetic.
class RealSpec {
 public:
  enum class Kind { Rational, Quadratic, CfPrefix, Decimal };

  RealSpec() : kind_(Kind::Rational), rat_(0) {}

  static RealSpec rational(mpq_class v) {
    RealSpec s;
    s.kind_ = Kind::Rational;
    v.canonicalize();
    s.rat_ = std::move(v);
    return s;
  }

  static RealSpec quadratic(const mpz_class& p, const mpz_class& q,
                            const mpz_class& r, const mpz_class& d) {
    Surd v(p, q, r, d);
    if (v.is_rational()) return rational(v.to_rational());
    RealSpec s;
    s.kind_ = Kind::Quadratic;
    s.surd_ = v;
    return s;
  }

  static RealSpec cf_prefix(mpz_class a0, std::vector<mpz_class> rest) {
    for (const auto& a : rest)
      if (a < 1) throw InvalidInput("cf partial quotients must be >= 1");
    RealSpec s;
    s.kind_ = Kind::CfPrefix;
    s.cf_a0_ = std::move(a0);
    s.cf_rest_ = std::move(rest);
    return s;
  }

  static RealSpec decimal(const std::string& digits, unsigned prec) {
    if (prec < 30)
      throw InvalidInput("decimal spec requires stated precision >= 30");
    RealSpec s;
    s.kind_ = Kind::Decimal;
    s.dec_digits_ = digits;
    s.dec_prec_ = prec;
    s.dec_value_ = parse_decimal_digits(digits);
    return s;
  }

  static RealSpec parse(const std::string& text);

  Kind kind() const { return kind_; }
  const mpq_class& rat() const { return rat_; }
  const Surd& surd() const { return surd_; }
  const mpz_class& cf_a0() const { return cf_a0_; }
  const std::vector<mpz_class>& cf_rest() const { return cf_rest_; }
  const mpq_class& dec_value() const { return dec_value_; }
  unsigned dec_prec() const { return dec_prec_; }

  /// Provably rational value. (Decimals and cf prefixes are indeterminate and
  /// report false; callers needing irrationality must handle those via
  /// interval arithmetic.)
  bool value_is_rational() const { return kind_ == Kind::Rational; }

  /// Provably an integer.
  bool value_is_integer() const {
    return kind_ == Kind::Rational && rat_.get_den() == 1;
  }

  mpq_class dec_uncertainty() const {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, dec_prec_);
    return mpq_class(1) / mpq_class(den);
  }

  std::string str() const {
    switch (kind_) {
      case Kind::Rational:
        return "rat:" + rat_.get_num().get_str() + "/" +
               rat_.get_den().get_str();
      case Kind::Quadratic: {
        const mpz_class& q = surd_.q();
        std::string sign = q < 0 ? "-" : "+";
        mpz_class aq = abs(q);
        return "surd:(" + surd_.p().get_str() + sign + aq.get_str() +
               "*sqrt(" + surd_.d().get_str() + "))/" + surd_.r().get_str();
      }
      case Kind::CfPrefix: {
        std::string out = "cf:[" + cf_a0_.get_str() + ";";
        for (size_t i = 0; i < cf_rest_.size(); ++i) {
          if (i) out += ",";
          out += cf_rest_[i].get_str();
        }
        return out + "]";
      }
      case Kind::Decimal:
        return "dec:" + dec_digits_ + "@" + std::to_string(dec_prec_);
    }
    return {};
  }

  bool operator==(const RealSpec& o) const { return str() == o.str(); }

 private:
  static mpq_class parse_decimal_digits(const std::string& digits) {
    if (digits.empty()) throw InvalidInput("empty decimal digits");
    size_t i = 0;
    bool neg = false;
    if (digits[i] == '+' || digits[i] == '-') neg = digits[i++] == '-';
    std::string intpart, fracpart;
    while (i < digits.size() && std::isdigit((unsigned char)digits[i]))
      intpart += digits[i++];
    if (i < digits.size() && digits[i] == '.') {
      ++i;
      while (i < digits.size() && std::isdigit((unsigned char)digits[i]))
        fracpart += digits[i++];
    }
    if (i != digits.size() || (intpart.empty() && fracpart.empty()))
      throw InvalidInput("malformed decimal digits: " + digits);
    mpz_class num(intpart.empty() ? "0" : intpart);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fracpart.size());
    num *= scale;
    if (!fracpart.empty()) num += mpz_class(fracpart);
    mpq_class v(num, scale);
    v.canonicalize();
    return neg ? mpq_class(-v) : v;
  }

  Kind kind_;
  mpq_class rat_;
  Surd surd_;
  mpz_class cf_a0_;
  std::vector<mpz_class> cf_rest_;
  mpq_class dec_value_;
  std::string dec_digits_;
  unsigned dec_prec_ = 0;
};

namespace detail {

class SpecLexer {
 public:
  explicit SpecLexer(const std::string& s) : s_(s) {}
  bool eat(const std::string& lit) {
    if (s_.compare(pos_, lit.size(), lit) != 0) return false;
    pos_ += lit.size();
    return true;
  }
  void expect(const std::string& lit) {
    if (!eat(lit))
      throw InvalidInput("expected '" + lit + "' at position " +
                         std::to_string(pos_) + " in spec string");
  }
  mpz_class integer() {
    size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
    while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
    if (pos_ == start || (pos_ - start == 1 && !std::isdigit((unsigned char)s_[start])))
      throw InvalidInput("expected integer at position " +
                         std::to_string(start) + " in spec string");
    return mpz_class(s_.substr(start, pos_ - start));
  }
  std::string until(char stop) {
    size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != stop) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  bool done() const { return pos_ == s_.size(); }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

 private:
  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace detail

inline RealSpec RealSpec::parse(const std::string& text) {
  if (text == "sqrt2") return quadratic(0, 1, 1, 2);
  if (text == "golden") return quadratic(1, 1, 2, 5);

  detail::SpecLexer lx(text);
  if (lx.eat("rat:")) {
    mpz_class p = lx.integer();
    lx.expect("/");
    mpz_class q = lx.integer();
    if (!lx.done()) throw InvalidInput("trailing characters in: " + text);
    if (q == 0) throw InvalidInput("rational with zero denominator");
    mpq_class v(p, q);
    v.canonicalize();
    return rational(v);
  }
  if (lx.eat("surd:")) {
    lx.expect("(");
    mpz_class p = lx.integer();
    char sep = lx.peek();
    if (sep != '+' && sep != '-')
      throw InvalidInput("expected sign before surd part in: " + text);
    bool neg = lx.eat("-");
    if (!neg) lx.expect("+");
    mpz_class q = lx.integer();
    if (neg) q = -q;
    lx.expect("*sqrt(");
    mpz_class d = lx.integer();
    lx.expect("))/");
    mpz_class r = lx.integer();
    if (!lx.done()) throw InvalidInput("trailing characters in: " + text);
    return quadratic(p, q, r, d);
  }
  if (lx.eat("cf:[")) {
    mpz_class a0 = lx.integer();
    std::vector<mpz_class> rest;
    if (lx.eat(";") && lx.peek() != ']') {
      rest.push_back(lx.integer());
      while (lx.eat(",")) rest.push_back(lx.integer());
    }
    lx.expect("]");
    if (!lx.done()) throw InvalidInput("trailing characters in: " + text);
    return cf_prefix(std::move(a0), std::move(rest));
  }
  if (lx.eat("dec:")) {
    std::string digits = lx.until('@');
    lx.expect("@");
    mpz_class prec = lx.integer();
    if (!lx.done()) throw InvalidInput("trailing characters in: " + text);
    if (prec < 1 || prec > 1000000)
      throw InvalidInput("decimal precision out of range");
    return decimal(digits, prec.get_ui());
  }
  throw InvalidInput("unrecognized real spec: " + text);
}

}  // namespace psb
