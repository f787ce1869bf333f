#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "ergodic/error.hpp"

namespace ergodic {

using Integer = mpz_class;
using Rational = mpq_class;  // gmpxx keeps results canonical

inline Rational rat(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational rat(const Integer& num, const Integer& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_canonical(const Rational& q) {
  if (sgn(q.get_den()) <= 0) return false;
  Integer g;
  mpz_gcd(g.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return g == 1;
}

inline Integer pow2z(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

// 2^e for any signed e
inline Rational pow2(long e) {
  if (e >= 0) return Rational(pow2z(static_cast<unsigned long>(e)));
  return Rational(Integer(1), pow2z(static_cast<unsigned long>(-e)));
}

inline Integer floor_q(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Integer ceil_q(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

// representative in [0,1)
inline Rational frac(const Rational& q) { return q - Rational(floor_q(q)); }

inline Rational qabs(const Rational& q) { return sgn(q) < 0 ? Rational(-q) : q; }
inline Rational qmin(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational qmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

inline std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

inline Integer parse_integer(std::string_view s, std::string_view field = "value") {
  std::string t(s);
  bool ok = !t.empty();
  for (std::size_t i = 0; ok && i < t.size(); ++i) {
    char c = t[i];
    ok = (c >= '0' && c <= '9') || (i == 0 && (c == '-' || c == '+') && t.size() > 1);
  }
  if (!ok) fail(ErrorCode::invalid_input, std::string(field) + ": not an integer: '" + t + "'");
  if (t[0] == '+') t.erase(0, 1);
  return Integer(t, 10);
}

// "num/den" or plain "num"
inline Rational parse_rational(std::string_view s, std::string_view field = "value") {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(s, field));
  Integer n = parse_integer(s.substr(0, slash), field);
  Integer d = parse_integer(s.substr(slash + 1), field);
  if (d == 0) fail(ErrorCode::invalid_input, std::string(field) + ": zero denominator");
  return rat(n, d);
}

// smallest e with 2^e >= q (q > 0)
inline long ceil_log2(const Rational& q) {
  long e = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2)) - 1;
  while (pow2(e) < q) ++e;
  while (pow2(e - 1) >= q) --e;
  return e;
}

inline std::uint64_t to_u64(const Integer& z, std::string_view what = "count") {
  if (sgn(z) < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 62)
    fail(ErrorCode::budget_exceeded, std::string(what) + " does not fit a machine word");
  return static_cast<std::uint64_t>(mpz_get_ui(z.get_mpz_t()));
}

// smallest n >= 0 with n^2 >= z
inline Integer isqrt_ceil(const Integer& z) {
  if (sgn(z) <= 0) return 0;
  Integer s;
  mpz_sqrt(s.get_mpz_t(), z.get_mpz_t());
  if (s * s < z) ++s;
  return s;
}

// rational bounds on sqrt(q), q >= 0, tight to 2^-bits
inline Rational sqrt_lower(const Rational& q, unsigned bits = 64) {
  Integer t = floor_q(q * Rational(pow2z(2 * bits))), s;
  mpz_sqrt(s.get_mpz_t(), t.get_mpz_t());
  return rat(s, pow2z(bits));
}

inline Rational sqrt_upper(const Rational& q, unsigned bits = 64) {
  return rat(isqrt_ceil(ceil_q(q * Rational(pow2z(2 * bits)))), pow2z(bits));
}

// decimal rendering truncated toward -inf to d digits, e.g. "0.4142"
inline std::string to_decimal(const Rational& q, unsigned d) {
  Integer ten_d;
  mpz_ui_pow_ui(ten_d.get_mpz_t(), 10, d);
  Integer scaled = floor_q(q * Rational(ten_d));
  bool neg = sgn(scaled) < 0;
  if (neg) scaled = -scaled;
  std::string digits = scaled.get_str();
  if (digits.size() <= d) digits.insert(0, d + 1 - digits.size(), '0');
  std::string out = digits.substr(0, digits.size() - d);
  if (d > 0) out += "." + digits.substr(digits.size() - d);
  return (neg ? "-" : "") + out;
}

inline Rational parse_decimal(std::string_view s, std::string_view field = "value") {
  std::string t(s);
  bool neg = !t.empty() && t[0] == '-';
  if (neg) t.erase(0, 1);
  std::size_t dot = t.find('.');
  std::string ip = t.substr(0, dot), fp = dot == std::string::npos ? "" : t.substr(dot + 1);
  auto digits = [](const std::string& x) { return x.find_first_not_of("0123456789") == std::string::npos; };
  if (ip.empty() || !digits(ip) || !digits(fp)) fail(ErrorCode::invalid_input, std::string(field) + ": not a decimal");
  Integer ten;
  mpz_ui_pow_ui(ten.get_mpz_t(), 10, fp.size());
  Rational q = Rational(Integer(ip + fp, 10)) / Rational(ten);
  return neg ? Rational(-q) : q;
}

}  // namespace ergodic
