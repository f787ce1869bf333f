#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergodic/creal.hpp"

namespace ergodic {

enum class SpaceKind { circle, cantor };

inline const char* space_name(SpaceKind s) { return s == SpaceKind::circle ? "circle" : "cantor"; }

inline SpaceKind parse_space(const std::string& s) {
  if (s == "circle") return SpaceKind::circle;
  if (s == "cantor") return SpaceKind::cantor;
  fail(ErrorCode::invalid_input, "space: expected circle or cantor, got '" + s + "'");
}

// Cantor words are strings over {'0','1'}; trailing zeros are insignificant.
using Word = std::string;

inline Word canonical_word(Word w) {
  while (!w.empty() && w.back() == '0') w.pop_back();
  return w;
}

inline char word_bit(const Word& w, std::size_t i) { return i < w.size() ? w[i] : '0'; }

inline Word parse_word(const std::string& s, std::string_view field = "word") {
  for (char c : s)
    if (c != '0' && c != '1') fail(ErrorCode::invalid_input, std::string(field) + ": not a binary word");
  return s;
}

struct IdealPoint {
  SpaceKind space = SpaceKind::circle;
  Rational x;  // circle: in [0,1)
  Word w;      // cantor: canonical

  static IdealPoint circle(const Rational& q) { return {SpaceKind::circle, frac(q), {}}; }
  static IdealPoint cantor(const Word& w) { return {SpaceKind::cantor, {}, canonical_word(w)}; }
  bool operator==(const IdealPoint& o) const {
    return space == o.space && (space == SpaceKind::circle ? x == o.x : w == o.w);
  }
  std::string str() const { return space == SpaceKind::circle ? to_string(x) : (w.empty() ? "0" : w); }
};

inline IdealPoint parse_point(SpaceKind s, const std::string& str, std::string_view field = "center") {
  if (s == SpaceKind::circle) {
    Rational q = parse_rational(str, field);
    require(sgn(q) >= 0 && q < 1, std::string(field) + ": circle point must lie in [0,1)");
    return IdealPoint::circle(q);
  }
  return IdealPoint::cantor(parse_word(str, field));
}

// distance on the circle between arbitrary real representatives
inline Rational circle_distance(const Rational& a, const Rational& b) {
  Rational t = frac(a - b);
  return qmin(t, Rational(1 - t));
}

// first index where the words differ, or nullopt if equal as infinite sequences
inline std::optional<std::size_t> first_difference(const Word& a, const Word& b) {
  std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (word_bit(a, i) != word_bit(b, i)) return i;
  return std::nullopt;
}

inline Rational distance(const IdealPoint& a, const IdealPoint& b) {
  if (a.space == SpaceKind::circle) return circle_distance(a.x, b.x);
  auto i = first_difference(a.w, b.w);
  return i ? pow2(-static_cast<long>(*i)) : Rational(0);
}

struct IdealBall {
  IdealPoint center;
  Rational radius;
  bool operator==(const IdealBall&) const = default;
};

// depth k of the cylinder a Cantor ball denotes: least k with 2^-k < r
inline std::size_t cylinder_depth(const Rational& r) {
  require(sgn(r) > 0, "radius must be positive");
  std::size_t k = 0;
  while (pow2(-static_cast<long>(k)) >= r) ++k;
  return k;
}

inline Rational canonical_cantor_radius(std::size_t k) { return Rational(3) * pow2(-static_cast<long>(k) - 1); }

inline Word cylinder_word(const IdealBall& b) {
  std::size_t k = cylinder_depth(b.radius);
  Word w(k, '0');
  for (std::size_t i = 0; i < k; ++i) w[i] = word_bit(b.center.w, i);
  return w;
}

// ---- numberings ----------------------------------------------------------

inline Integer cantor_pair(const Integer& a, const Integer& b) {
  Integer s = a + b;
  return s * (s + 1) / 2 + b;
}

inline std::pair<Integer, Integer> cantor_unpair(const Integer& z) {
  Integer t = 8 * z + 1, r;
  mpz_sqrt(r.get_mpz_t(), t.get_mpz_t());
  Integer w = (r - 1) / 2;
  Integer b = z - w * (w + 1) / 2;
  return {w - b, b};
}

inline bool coprime(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g == 1;
}

// circle: a/b in lowest terms with 0 <= a < b has number pair(a, b-1);
// cantor: the word with bit i = bit i of the number. Not every number is a
// valid circle point; decoders return nullopt for those.
inline Integer point_index(const IdealPoint& p) {
  if (p.space == SpaceKind::circle) return cantor_pair(p.x.get_num(), p.x.get_den() - 1);
  Integer z = 0;
  for (std::size_t i = p.w.size(); i-- > 0;) z = 2 * z + (p.w[i] == '1' ? 1 : 0);
  return z;
}

inline std::optional<IdealPoint> point_from_index(SpaceKind s, const Integer& z) {
  require(sgn(z) >= 0, "negative index");
  if (s == SpaceKind::circle) {
    auto [a, b1] = cantor_unpair(z);
    Integer b = b1 + 1;
    if (a >= b || !coprime(a, b)) return std::nullopt;
    return IdealPoint::circle(rat(a, b));
  }
  Word w;
  std::size_t n = mpz_sizeinbase(z.get_mpz_t(), 2);
  for (std::size_t i = 0; i < n && sgn(z) > 0; ++i) w.push_back(mpz_tstbit(z.get_mpz_t(), i) ? '1' : '0');
  return IdealPoint::cantor(w);
}

inline Integer radius_index(SpaceKind s, const Rational& r) {
  require(sgn(r) > 0, "radius must be positive");
  if (s == SpaceKind::circle) return cantor_pair(r.get_num() - 1, r.get_den() - 1);
  return Integer(static_cast<unsigned long>(cylinder_depth(r)));
}

inline std::optional<Rational> radius_from_index(SpaceKind s, const Integer& z) {
  if (s == SpaceKind::circle) {
    auto [a1, b1] = cantor_unpair(z);
    if (!coprime(a1 + 1, b1 + 1)) return std::nullopt;
    return rat(a1 + 1, b1 + 1);
  }
  return canonical_cantor_radius(to_u64(z, "radius index"));
}

// Cantor balls are numbered by their cylinder, so the radius comes back canonical.
inline Integer ball_index(const IdealBall& b) {
  return cantor_pair(point_index(b.center), radius_index(b.center.space, b.radius));
}

inline std::optional<IdealBall> ball_from_index(SpaceKind s, const Integer& z) {
  auto [pi, ri] = cantor_unpair(z);
  auto p = point_from_index(s, pi);
  auto r = radius_from_index(s, ri);
  if (!p || !r) return std::nullopt;
  return IdealBall{*p, *r};
}

inline Rational ideal_distance(SpaceKind s, const Integer& i, const Integer& j, unsigned /*m*/) {
  auto a = point_from_index(s, i), b = point_from_index(s, j);
  require(a && b, "not an ideal point index");
  return distance(*a, *b);
}

// first n valid indices, in increasing order
inline std::vector<IdealPoint> first_points(SpaceKind s, std::size_t n) {
  std::vector<IdealPoint> out;
  for (Integer z = 0; out.size() < n; ++z)
    if (auto p = point_from_index(s, z)) out.push_back(*p);
  return out;
}

inline std::vector<IdealBall> first_balls(SpaceKind s, std::size_t n) {
  std::vector<IdealBall> out;
  for (Integer z = 0; out.size() < n; ++z)
    if (auto b = ball_from_index(s, z)) out.push_back(*b);
  return out;
}

inline IdealBall whole_space_ball(SpaceKind s) {
  return s == SpaceKind::circle ? IdealBall{IdealPoint::circle(0), Rational(1)}
                                : IdealBall{IdealPoint::cantor(""), canonical_cantor_radius(0)};
}

}  // namespace ergodic
