#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "solspec/error.hpp"

namespace solspec {

/// Exact rational over int64 with overflow detection.  Used by the exact
/// arithmetic mode for measure identities; not meant for eigensolves.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (den_ == 0) throw Error("rational with zero denominator");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  Rational operator+(const Rational& o) const {
    // n1/d1 + n2/d2 over lcm to keep intermediates small.
    std::int64_t g = std::gcd(den_, o.den_);
    std::int64_t d1 = den_ / g;
    std::int64_t l = checked_mul(d1, o.den_);
    std::int64_t a = checked_mul(num_, o.den_ / g);
    std::int64_t b = checked_mul(o.num_, d1);
    return Rational(checked_add(a, b), l);
  }
  Rational operator-() const { return Rational(checked_neg(num_), den_); }
  Rational operator-(const Rational& o) const { return *this + (-o); }
  Rational operator*(const Rational& o) const {
    // Cross-reduce before multiplying.
    std::int64_t g1 = std::gcd(abs64(num_), abs64(o.den_));
    std::int64_t g2 = std::gcd(abs64(o.num_), abs64(den_));
    std::int64_t n = checked_mul(num_ / g1, o.num_ / g2);
    std::int64_t d = checked_mul(den_ / g2, o.den_ / g1);
    return Rational(n, d);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw Error("rational division by zero");
    return *this * Rational(o.den_, o.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    // Compare via subtraction sign; overflow-checked.
    return (*this - o).num_ < 0;
  }

  bool is_zero() const { return num_ == 0; }
  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "7", "-3/4" or "0.125" exactly.  Decimal strings keep the exact
  /// power-of-ten denominator, so "0.1" becomes 1/10, not a binary double.
  static Rational parse(const std::string& s) {
    if (s.empty()) throw ConfigError("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      return Rational(parse_int(s.substr(0, slash)),
                      parse_int(s.substr(slash + 1)));
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(parse_int(s));
    std::string head = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (frac.empty()) return Rational(parse_int(head));
    bool neg = !head.empty() && head[0] == '-';
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den = checked_mul(den, 10);
    std::int64_t ip = head.empty() || head == "-" || head == "+"
                          ? 0
                          : parse_int(head);
    std::int64_t fp = parse_int(frac);
    if (fp < 0) throw ConfigError("malformed rational literal: " + s);
    std::int64_t n = checked_add(checked_mul(abs64(ip), den), fp);
    return Rational(neg ? checked_neg(n) : n, den);
  }

 private:
  static std::int64_t abs64(std::int64_t v) {
    if (v == INT64_MIN) throw Error("rational overflow");
    return v < 0 ? -v : v;
  }
  static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Error("rational overflow");
    return r;
  }
  static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error("rational overflow");
    return r;
  }
  static std::int64_t checked_neg(std::int64_t a) {
    if (a == INT64_MIN) throw Error("rational overflow");
    return -a;
  }
  static std::int64_t parse_int(const std::string& s) {
    if (s.empty()) throw ConfigError("empty integer literal");
    std::size_t pos = 0;
    std::int64_t v;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      throw ConfigError("malformed integer literal: " + s);
    }
    if (pos != s.size()) throw ConfigError("malformed integer literal: " + s);
    return v;
  }

  void normalize() {
    if (den_ < 0) {
      num_ = checked_neg(num_);
      den_ = checked_neg(den_);
    }
    std::int64_t g = std::gcd(abs64(num_), den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace solspec
