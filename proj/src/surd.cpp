#include "qcomb/surd.hpp"

#include <cctype>
#include <cmath>
#include <numeric>

#include "qcomb/types.hpp"

namespace qcomb {

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw DomainError("rational with zero denominator");
  if (d < 0) n = -n, d = -d;
  const auto g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
Rational operator/(Rational a, Rational b) {
  if (b.num == 0) throw DomainError("rational division by zero");
  return {a.num * b.den, a.den * b.num};
}

namespace {
constexpr int kRoot[4] = {1, 2, 3, 6};
}

Surd Surd::root(int n) {
  Surd s;
  for (int k = 0; k < 4; ++k)
    if (kRoot[k] == n) {
      s.c[k] = 1;
      return s;
    }
  throw DomainError("surd: unsupported root " + std::to_string(n));
}

double Surd::value() const {
  double v = 0.0;
  for (int k = 0; k < 4; ++k) v += c[k].value() * std::sqrt(double(kRoot[k]));
  return v;
}

bool Surd::is_zero() const {
  for (const auto& q : c)
    if (!q.is_zero()) return false;
  return true;
}

Surd operator+(const Surd& a, const Surd& b) {
  Surd s;
  for (int k = 0; k < 4; ++k) s.c[k] = a.c[k] + b.c[k];
  return s;
}

Surd operator-(const Surd& a) {
  Surd s;
  for (int k = 0; k < 4; ++k) s.c[k] = -a.c[k];
  return s;
}

Surd operator*(const Surd& a, const Surd& b) {
  // sqrt(p) sqrt(q) = m sqrt(r)
  static const int prod_root[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int prod_coef[4][4] = {{1, 1, 1, 1}, {1, 2, 1, 2}, {1, 1, 3, 3}, {1, 2, 3, 6}};
  Surd s;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (a.c[i].is_zero() || b.c[j].is_zero()) continue;
      s.c[prod_root[i][j]] = s.c[prod_root[i][j]] + a.c[i] * b.c[j] * Rational(prod_coef[i][j]);
    }
  return s;
}

Surd operator/(const Surd& a, const Surd& b) {
  int nz = -1;
  for (int k = 0; k < 4; ++k)
    if (!b.c[k].is_zero()) {
      if (nz >= 0) throw DomainError("surd: division by a sum of roots");
      nz = k;
    }
  if (nz < 0) throw DomainError("surd: division by zero");
  // 1/(q sqrt(r)) = sqrt(r) / (q r)
  Surd inv;
  inv.c[nz] = Rational(1) / (b.c[nz] * Rational(kRoot[nz]));
  return a * inv;
}

std::string Surd::str() const {
  static const char* names[4] = {"", "r2", "r3", "r6"};
  std::string out;
  for (int k = 0; k < 4; ++k) {
    if (c[k].is_zero()) continue;
    std::int64_t n = c[k].num;
    if (n < 0) out += "-", n = -n;
    else if (!out.empty()) out += "+";
    if (k == 0) out += std::to_string(n);
    else out += (n == 1 ? std::string() : std::to_string(n) + "*") + names[k];
    if (c[k].den != 1) out += "/" + std::to_string(c[k].den);
  }
  return out.empty() ? "0" : out;
}

namespace {

Surd atom(std::string_view t, std::string_view whole) {
  if (t.empty()) throw DomainError("surd: empty factor in '" + std::string(whole) + "'");
  if (t[0] == 'r') {
    int n = 0;
    for (char ch : t.substr(1)) {
      if (!std::isdigit(static_cast<unsigned char>(ch)))
        throw DomainError("surd: bad root in '" + std::string(whole) + "'");
      n = n * 10 + (ch - '0');
    }
    return Surd::root(n);
  }
  std::int64_t v = 0;
  for (char ch : t) {
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw DomainError("surd: bad number in '" + std::string(whole) + "'");
    v = v * 10 + (ch - '0');
  }
  return Surd::rational(Rational(v));
}

Surd product(std::string_view t, std::string_view whole) {
  Surd out = Surd::rational(Rational(1));
  for (;;) {
    const auto star = t.find('*');
    out = out * atom(t.substr(0, star), whole);
    if (star == std::string_view::npos) return out;
    t = t.substr(star + 1);
  }
}

}  // namespace

Surd parse_surd(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw DomainError("surd: empty token");
  Surd total;
  std::size_t i = 0;
  while (i < s.size()) {
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
      neg = s[i] == '-';
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
    std::string_view term(s.data() + i, j - i);
    const auto slash = term.find('/');
    Surd t = slash == std::string_view::npos
                 ? product(term, s)
                 : product(term.substr(0, slash), s) / atom(term.substr(slash + 1), s);
    total = total + (neg ? -t : t);
    i = j;
  }
  return total;
}

}  // namespace qcomb
