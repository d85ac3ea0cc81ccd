#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace qcomb {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);
  double value() const { return double(num) / double(den); }
  bool is_zero() const { return num == 0; }
  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a) { return {-a.num, a.den}; }
  friend Rational operator-(Rational a, Rational b) { return a + (-b); }
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  bool operator==(const Rational&) const = default;
};

// a + b r2 + c r3 + d r6 with rational coefficients: closed under + and *.
struct Surd {
  std::array<Rational, 4> c{};

  static Surd rational(Rational q) {
    Surd s;
    s.c[0] = q;
    return s;
  }
  static Surd root(int n);  // n in {1, 2, 3, 6}
  double value() const;
  bool is_zero() const;
  friend Surd operator+(const Surd& a, const Surd& b);
  friend Surd operator-(const Surd& a);
  friend Surd operator-(const Surd& a, const Surd& b) { return a + (-b); }
  friend Surd operator*(const Surd& a, const Surd& b);
  // Division by a rational or a single root only (all the tables need).
  friend Surd operator/(const Surd& a, const Surd& b);
  bool operator==(const Surd&) const = default;
  std::string str() const;
};

// Grammar: sum of signed terms, each "x" or "x/y"; x is a '*'-product of
// factors, every factor an integer or r2, r3, r6. Examples: "1/r3",
// "-r6/4", "1/6-r2/3", "2*r3/5", "0". str() output parses back.
Surd parse_surd(std::string_view text);

}  // namespace qcomb
