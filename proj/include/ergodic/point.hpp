#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>

#include "ergodic/sets.hpp"

namespace ergodic {

// Deterministic bit source for Cantor points; prefixes are memoized.
class BitSource {
 public:
  using Fill = std::function<Word(std::size_t)>;  // returns at least n bits

  explicit BitSource(Fill f) : fill_(std::move(f)) {}

  Word prefix(std::size_t n) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (cache_.size() < n) {
      Word w = fill_(n);
      if (w.size() < n) fail(ErrorCode::invalid_input, "bit source returned a short prefix");
      cache_ = std::move(w);
    }
    return cache_.substr(0, n);
  }

 private:
  Fill fill_;
  mutable std::mutex mu_;
  mutable Word cache_;
};

class SpacePoint {
 public:
  static SpacePoint circle(CReal x) {
    SpacePoint p;
    p.space_ = SpaceKind::circle;
    p.x_ = std::move(x);
    return p;
  }
  static SpacePoint circle(const Rational& q) { return circle(CReal::from_rational(frac(q))); }

  static SpacePoint cantor(std::shared_ptr<const BitSource> bits) {
    SpacePoint p;
    p.space_ = SpaceKind::cantor;
    p.bits_ = std::move(bits);
    return p;
  }
  static SpacePoint cantor_fill(BitSource::Fill f) { return cantor(std::make_shared<BitSource>(std::move(f))); }

  // finite word padded with zeros
  static SpacePoint cantor_word(const Word& w) {
    return cantor_fill([w](std::size_t n) {
      Word out = w;
      if (out.size() < n) out.resize(n, '0');
      return out;
    });
  }

  // u followed by v repeated forever (v nonempty)
  static SpacePoint cantor_periodic(const Word& u, const Word& v) {
    require(!v.empty(), "empty period");
    return cantor_fill([u, v](std::size_t n) {
      Word out = u;
      while (out.size() < n) out += v;
      return out;
    });
  }

  SpaceKind space() const { return space_; }
  const CReal& real() const { return x_; }
  Word prefix(std::size_t n) const { return bits_->prefix(n); }
  const std::shared_ptr<const BitSource>& bits() const { return bits_; }

  // circle: closed arc [lo, hi] containing the point, lo in [0,1), hi - lo <= 2^-(m-1)
  Interval arc(unsigned m) const {
    Interval e = x_.enclosure(m);
    Rational shift = Rational(floor_q(e.lo));
    return {e.lo - shift, e.hi - shift};
  }

 private:
  SpaceKind space_ = SpaceKind::circle;
  CReal x_;
  std::shared_ptr<const BitSource> bits_;
};

enum class Membership { in, out, boundary };

inline Membership ball_member(const IdealBall& b, const SpacePoint& x, unsigned m) {
  if (b.center.space == SpaceKind::cantor) {
    Word k = cylinder_word(b);
    Word px = x.prefix(k.size());
    if (px == k) return Membership::in;
    auto i = first_difference(px, b.center.w);
    Rational d = pow2(-static_cast<long>(*i));
    if (d > b.radius) return Membership::out;
    return Membership::boundary;  // d == radius, only for non-canonical radii
  }
  if (auto q = x.real().exact()) {
    Rational d = circle_distance(*q, b.center.x);
    if (d < b.radius) return Membership::in;
    if (d > b.radius) return Membership::out;
    return Membership::boundary;
  }
  Rational a = x.real().approx(m);
  Rational d = circle_distance(a, b.center.x), eps = pow2(-static_cast<long>(m));
  if (d + eps < b.radius) return Membership::in;
  if (d - eps > b.radius) return Membership::out;
  return Membership::boundary;
}

// Lazily enumerated union of ideal balls. An enumerator returning nullopt
// contributes nothing at that index (so the empty set diverges harmlessly).
class EffectiveOpen {
 public:
  using Enumerator = std::function<std::optional<IdealBall>(std::uint64_t)>;

  EffectiveOpen(SpaceKind s, Enumerator e, std::optional<std::vector<IdealBall>> exact = std::nullopt)
      : space_(s), enum_(std::move(e)), exact_(std::move(exact)) {}

  static EffectiveOpen from_balls(SpaceKind s, std::vector<IdealBall> balls) {
    auto shared = std::make_shared<const std::vector<IdealBall>>(balls);
    return EffectiveOpen(
        s,
        [shared](std::uint64_t k) -> std::optional<IdealBall> {
          if (shared->empty()) return std::nullopt;
          return (*shared)[std::min<std::uint64_t>(k, shared->size() - 1)];
        },
        std::move(balls));
  }
  static EffectiveOpen from_set(SpaceKind s, const ExactSet& set) { return from_balls(s, balls_of(set)); }
  static EffectiveOpen whole(SpaceKind s) { return from_balls(s, {whole_space_ball(s)}); }
  static EffectiveOpen never(SpaceKind s) {
    return EffectiveOpen(s, [](std::uint64_t) -> std::optional<IdealBall> { return std::nullopt; });
  }

  SpaceKind space() const { return space_; }
  std::optional<IdealBall> ball(std::uint64_t k) const { return enum_(k); }
  const std::optional<std::vector<IdealBall>>& exact_prefix() const { return exact_; }

  std::vector<IdealBall> prefix(std::uint64_t k) const {
    std::vector<IdealBall> out;
    for (std::uint64_t i = 0; i < k; ++i)
      if (auto b = enum_(i)) out.push_back(*b);
    return out;
  }

  // the union of the first k balls as a normal-form set (inner approximation)
  ExactSet prefix_set(std::uint64_t k) const {
    if (exact_) return exact_set_of(space_, *exact_);
    return exact_set_of(space_, prefix(k));
  }

 private:
  SpaceKind space_;
  Enumerator enum_;
  std::optional<std::vector<IdealBall>> exact_;
};

struct OpenMembership {
  bool in = false;
  std::uint64_t witness = 0;  // position in the enumeration
};

inline OpenMembership open_contains(const EffectiveOpen& U, const SpacePoint& x, std::uint64_t k, unsigned m) {
  for (std::uint64_t i = 0; i < k; ++i) {
    auto b = U.ball(i);
    if (b && ball_member(*b, x, m) == Membership::in) return {true, i};
  }
  return {};
}

// closure of ball b inside ball a
inline bool nested(const IdealBall& outer, const IdealBall& inner) {
  if (outer.center.space == SpaceKind::circle) {
    if (outer.radius > Rational(1, 2)) return true;
    return distance(outer.center, inner.center) + inner.radius <= outer.radius;
  }
  Word a = cylinder_word(outer), b = cylinder_word(inner);
  return b.size() >= a.size() && b.compare(0, a.size(), a) == 0;
}

// Limit of a nested ball stream; ball m must have radius <= 2^-m.
inline SpacePoint refine_to_point(SpaceKind s, std::function<IdealBall(unsigned)> stream) {
  struct State {
    std::function<IdealBall(unsigned)> stream;
    std::mutex mu;
    std::vector<IdealBall> balls;
    std::vector<Rational> lifted;  // circle centers unwrapped to a continuous path
    void extend(unsigned m) {
      while (balls.size() <= m) {
        unsigned i = static_cast<unsigned>(balls.size());
        IdealBall b = stream(i);
        if (b.center.space != balls_space()) fail(ErrorCode::invalid_input, "ball from a different space");
        if (b.radius > pow2(-static_cast<long>(i)))
          fail(ErrorCode::invalid_nesting, "ball " + std::to_string(i) + " radius above 2^-m");
        if (i > 0 && !nested(balls.back(), b))
          fail(ErrorCode::invalid_nesting, "ball " + std::to_string(i) + " not inside its predecessor");
        if (b.center.space == SpaceKind::circle) {
          Rational c = b.center.x;
          if (i > 0) {
            Rational prev = lifted.back();
            c += Rational(floor_q(prev - c + Rational(1, 2)));
          }
          lifted.push_back(c);
        }
        balls.push_back(std::move(b));
      }
    }
    SpaceKind space;
    SpaceKind balls_space() const { return space; }
  };
  auto st = std::make_shared<State>();
  st->stream = std::move(stream);
  st->space = s;
  if (s == SpaceKind::circle) {
    return SpacePoint::circle(CReal::from_oracle([st](unsigned m) {
      std::lock_guard<std::mutex> lock(st->mu);
      st->extend(m);
      return st->lifted[m];
    }));
  }
  return SpacePoint::cantor_fill([st](std::size_t n) {
    std::lock_guard<std::mutex> lock(st->mu);
    // ball m fixes a cylinder of depth >= m + 1
    st->extend(static_cast<unsigned>(n));
    Word w = cylinder_word(st->balls[n]);
    return w.substr(0, std::max(n, w.size()));
  });
}

}  // namespace ergodic
