#pragma once

#include <map>

#include "ergodic/norms.hpp"

namespace ergodic {

namespace detail {

// S_n = h + S_{n-1} o T for n = 1..N; visit(n, S_n) returns false to stop.
template <class Visit>
void doubling_sums(const Pl& h, std::uint64_t N, Visit&& visit) {
  // h o T^(N-1) alone has pieces(h) 2^(N-1) pieces
  if (N > 40 || h.pieces() * (std::uint64_t(1) << (N - 1)) > limits().pieces)
    fail(ErrorCode::budget_exceeded, "piecewise-linear Birkhoff sum up to n=" + std::to_string(N) + " exceeds the piece cap");
  Pl s = h;
  for (std::uint64_t n = 1; n <= N; ++n) {
    if (n > 1) {
      if (2 * s.pieces() + h.pieces() > limits().pieces)
        fail(ErrorCode::budget_exceeded, "piecewise-linear Birkhoff sum at n=" + std::to_string(n) + " exceeds the piece cap");
      s = h + s.compose_doubling();
    }
    if (!visit(n, s)) return;
  }
}

template <class Visit>
void shift_sums(const CylFn& h, std::uint64_t N, Visit&& visit) {
  CylFn s = h;
  for (std::uint64_t n = 1; n <= N; ++n) {
    if (n > 1) s = h + s.compose_shift();
    if (!visit(n, s)) return;
  }
}

// sum_{k<n} h(x + k a) for n = 1..N with a rational angle
template <class Visit>
void rotation_sums(const Pl& h, const Rational& a, std::uint64_t N, Visit&& visit) {
  Pl s = h;
  for (std::uint64_t n = 1; n <= N; ++n) {
    if (n > 1) {
      if (s.pieces() + h.pieces() > limits().pieces)
        fail(ErrorCode::budget_exceeded, "rotation Birkhoff sum exceeds the piece cap");
      s = s + h.compose_rotation(Rational(Rational(static_cast<unsigned long>(n - 1)) * a));
    }
    if (!visit(n, s)) return;
  }
}

inline Rational as_rational(std::uint64_t n) { return Rational(Integer(static_cast<unsigned long>(n))); }

}  // namespace detail

// Exact {x : |A_n h(x)| < delta for all n in [lo, hi]} for centered h on the
// doubling map or the shift.
inline ExactSet window_set(const System& sys, const Concrete& h, std::uint64_t lo, std::uint64_t hi, const Rational& delta) {
  require(lo >= 1 && lo <= hi, "window must satisfy 1 <= lo <= hi");
  require(sgn(delta) > 0, "delta must be positive");
  if (sys.kind() == SystemKind::doubling) {
    ArcSet out = ArcSet::whole();
    detail::doubling_sums(std::get<Pl>(h), hi, [&](std::uint64_t n, const Pl& s) {
      if (n < lo) return true;
      Rational b = detail::as_rational(n) * delta;
      out = out & s.band(-b, b, true);
      return !out.is_empty();
    });
    return out;
  }
  if (sys.kind() == SystemKind::shift) {
    CylinderSet out = CylinderSet::whole();
    detail::shift_sums(std::get<CylFn>(h), hi, [&](std::uint64_t n, const CylFn& s) {
      if (n < lo) return true;
      Rational b = detail::as_rational(n) * delta;
      out = out & s.band(-b, b, true);
      return !out.is_empty();
    });
    return out;
  }
  fail(ErrorCode::unsupported_pair, "exact deviation sets need a rational map");
}

// Does the uniform rotation bound TV(h) blocks(n) / n settle |A_n h| < delta
// on [lo, hi]? The greedy digit at level j is below q_{j+1}/q_j + 1, which
// bounds blocks(n) uniformly first; the exact per-n check follows if needed.
inline bool rotation_window_uniform(const System& sys, const Pl& h, std::uint64_t lo, std::uint64_t hi,
                                    const Rational& delta) {
  Rational tv = h.total_variation();
  if (sgn(tv) == 0) return true;
  const auto& q = sys.denominators();
  std::uint64_t bmax = 0;
  for (std::size_t j = 0; j < q.size() && q[j] <= hi; ++j) {
    std::uint64_t next = j + 1 < q.size() ? q[j + 1] : hi;
    bmax += next / q[j] + 1;
  }
  if (tv * detail::as_rational(bmax) < delta * detail::as_rational(lo)) return true;
  if (hi - lo > limits().steps) fail(ErrorCode::budget_exceeded, "window length");
  Rational r = delta / tv;
  Integer num = r.get_num(), den = r.get_den();
  for (std::uint64_t n = lo; n <= hi; ++n) {
    Integer lhs = den * Integer(static_cast<unsigned long>(sys.blocks(n)));
    Integer rhs = num * Integer(static_cast<unsigned long>(n));
    if (!(lhs < rhs)) return false;
  }
  return true;
}

// {x : |A_n(f - int f)(x)| < delta for all n in [lo, hi]} as an effective open.
// Rational maps give the exact finite union. The rotation gives the whole
// space when the uniform bound settles it, and otherwise (continuous f) the
// union over t of inner approximations built from angles within 2^-(24+8t).
inline EffectiveOpen window_open(const System& sys, const Observable& f, std::uint64_t lo, std::uint64_t hi,
                                 const Rational& delta) {
  Concrete h = centered(sys, f);
  SpaceKind s = sys.space();
  if (sgn(sup_norm(h)) == 0 && sgn(delta) > 0) return EffectiveOpen::whole(s);
  if (sys.kind() != SystemKind::rotation) return EffectiveOpen::from_set(s, window_set(sys, h, lo, hi, delta));
  const Pl& g = std::get<Pl>(h);
  if (rotation_window_uniform(sys, g, lo, hi, delta)) return EffectiveOpen::whole(s);
  if (!g.continuous())
    fail(ErrorCode::unsupported_pair, "rotation deviation sets need a continuous observable or a settled uniform bound");
  struct Levels {
    System sys = System::doubling();
    Pl h{Rational(0)};
    std::uint64_t lo, hi;
    Rational delta;
    std::mutex mu;
    std::map<std::uint64_t, std::vector<IdealBall>> cache;
    const std::vector<IdealBall>& level(std::uint64_t t) {
      auto it = cache.find(t);
      if (it != cache.end()) return it->second;
      unsigned q = static_cast<unsigned>(24 + 8 * std::min<std::uint64_t>(t, 100000));
      Rational a = frac(sys.alpha().approx(q)), step = pow2(-static_cast<long>(q));
      Rational eta = h.lipschitz() * detail::as_rational(hi - 1) * step / 2;
      std::vector<IdealBall> balls;
      if (eta < delta) {
        ArcSet out = ArcSet::whole();
        detail::rotation_sums(h, a, hi, [&](std::uint64_t n, const Pl& s) {
          if (n < lo) return true;
          Rational b = detail::as_rational(n) * (delta - eta);
          out = out & s.band(-b, b, true);
          return !out.is_empty();
        });
        balls = out.to_balls();
      }
      return cache.emplace(t, std::move(balls)).first->second;
    }
  };
  auto st = std::make_shared<Levels>();
  st->sys = sys;
  st->h = g;
  st->lo = lo;
  st->hi = hi;
  st->delta = delta;
  return EffectiveOpen(s, [st](std::uint64_t k) -> std::optional<IdealBall> {
    auto [t, i] = cantor_unpair(Integer(static_cast<unsigned long>(k)));
    std::lock_guard<std::mutex> lock(st->mu);
    const auto& balls = st->level(mpz_get_ui(t.get_mpz_t()));
    std::uint64_t idx = mpz_get_ui(i.get_mpz_t());
    if (idx < balls.size()) return balls[idx];
    return std::nullopt;
  });
}

inline EffectiveOpen deviation_open(const System& sys, const Observable& f, std::uint64_t n, const Rational& delta) {
  require(n >= 1, "n must be at least 1");
  require(sgn(delta) > 0, "delta must be positive");
  return window_open(sys, f, n, n, delta);
}

// ---- exact deviation masses -------------------------------------------------

// mu{x : max_{lo <= n <= hi} |A_n h(x)| > delta} on the shift. Cylinders are
// aggregated by (last depth-1 bits, S_n) since the future only sees those;
// a cylinder leaves the state space at its first violation.
inline Rational shift_deviation_mass(const System& sys, const CylFn& h, std::uint64_t lo, std::uint64_t hi,
                                     const Rational& delta) {
  require(lo >= 1 && lo <= hi, "window must satisfy 1 <= lo <= hi");
  std::size_t d = std::max<std::size_t>(h.depth(), 1);
  CylFn g = h.extended(d);
  Rational q1 = sys.p(), q0 = 1 - sys.p();
  std::size_t keep = (std::size_t(1) << (d - 1)) - 1;
  StepBudget budget;
  std::map<std::pair<std::size_t, Rational>, Rational> states;
  for (std::size_t z = 0; z <= keep; ++z) {
    Rational w = 1;
    for (std::size_t i = 0; i + 1 < d; ++i) w *= ((z >> i) & 1) ? q1 : q0;
    states[{z, Rational(0)}] += w;
  }
  Rational mass = 0;
  for (std::uint64_t n = 1; n <= hi && !states.empty(); ++n) {
    Rational b = detail::as_rational(n) * delta;
    std::map<std::pair<std::size_t, Rational>, Rational> next;
    for (const auto& [key, w] : states) {
      for (std::size_t bit = 0; bit < 2; ++bit) {
        budget.charge(1, "cylinder aggregation");
        std::size_t z = (key.first << 1) | bit;
        Rational S = key.second + g.value(z);
        Rational wb = w * (bit ? q1 : q0);
        if (n >= lo && qabs(S) > b) mass += wb;
        else if (n < hi) next[{z & keep, S}] += wb;
      }
    }
    if (next.size() > limits().cylinders) fail(ErrorCode::budget_exceeded, "cylinder aggregation states");
    states = std::move(next);
  }
  return mass;
}

// same on the doubling map, from the exact piecewise-linear sums
inline Rational doubling_deviation_mass(const Pl& h, std::uint64_t lo, std::uint64_t hi, const Rational& delta) {
  ArcSet good = ArcSet::whole();
  detail::doubling_sums(h, hi, [&](std::uint64_t n, const Pl& s) {
    if (n < lo) return true;
    Rational b = detail::as_rational(n) * delta;
    good = good & s.band(-b, b, false);
    return true;
  });
  return 1 - good.measure();
}

// upper bound for the rotation: rational angle a' within 2^-q moves each A_n
// by at most L (n-1) 2^-q / 2 away from jumps; orbits passing a jump point are
// charged in full
inline Rational rotation_deviation_upper(const System& sys, const Pl& h, std::uint64_t lo, std::uint64_t hi,
                                         const Rational& delta) {
  unsigned q = 64 + 2 * bits_of(hi + 1);
  Rational a = frac(sys.alpha().approx(q)), step = pow2(-static_cast<long>(q));
  Rational H = detail::as_rational(hi);
  Rational eta = h.lipschitz() * (H - 1) * step / 2;
  Rational jumps = detail::as_rational(h.jump_points().size()) * H * H * step / 2;
  if (eta >= delta) return Rational(1);
  ArcSet good = ArcSet::whole();
  detail::rotation_sums(h, a, hi, [&](std::uint64_t n, const Pl& s) {
    if (n < lo) return true;
    Rational b = detail::as_rational(n) * (delta - eta);
    good = good & s.band(-b, b, false);
    return true;
  });
  return qmin(Rational(1), Rational(1 - good.measure() + jumps));
}

}  // namespace ergodic
