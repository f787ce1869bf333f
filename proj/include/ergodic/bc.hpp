#pragma once

#include <map>

#include "ergodic/rates.hpp"

namespace ergodic {

// eps_j and delta_j for j = 0, 1, ...; tail(J) >= sum_{j >= J} eps_j.
class SummableSchedule {
 public:
  // eps_j = eps0 2^-j, delta_j = delta0 2^-j
  static SummableSchedule dyadic(const Rational& eps0, const Rational& delta0) {
    require(sgn(eps0) > 0 && sgn(delta0) > 0, "schedule scales must be positive");
    SummableSchedule s;
    s.name_ = "dyadic:eps=" + to_string(eps0) + ",delta=" + to_string(delta0);
    s.eps_ = [eps0](std::uint64_t j) { return Rational(eps0 * pow2(-static_cast<long>(j))); };
    s.delta_ = [delta0](std::uint64_t j) { return Rational(delta0 * pow2(-static_cast<long>(j))); };
    s.tail_ = [eps0](std::uint64_t J) { return Rational(eps0 * pow2(1 - static_cast<long>(J))); };
    return s;
  }

  // member i of an intersected family: eps_j = 2^-(i+j+2), delta_j = 1/(j+2)
  static SummableSchedule member(std::uint64_t i) {
    SummableSchedule s;
    s.name_ = "member:i=" + std::to_string(i);
    long base = static_cast<long>(i) + 2;
    s.eps_ = [base](std::uint64_t j) { return pow2(-base - static_cast<long>(j)); };
    s.delta_ = [](std::uint64_t j) { return rat(1, static_cast<long>(j) + 2); };
    s.tail_ = [base](std::uint64_t J) { return pow2(1 - base - static_cast<long>(J)); };
    return s;
  }

  static SummableSchedule parse(const std::string& spec) {
    if (spec.rfind("member:i=", 0) == 0) return member(to_u64(parse_integer(spec.substr(9), "schedule member")));
    if (spec.rfind("dyadic:", 0) == 0) {
      auto comma = spec.find(",delta=");
      if (spec.rfind("dyadic:eps=", 0) == 0 && comma != std::string::npos)
        return dyadic(parse_rational(spec.substr(11, comma - 11), "schedule eps"),
                      parse_rational(spec.substr(comma + 7), "schedule delta"));
    }
    fail(ErrorCode::invalid_input, "schedule: unknown form '" + spec + "'");
  }

  const std::string& name() const { return name_; }
  Rational eps(std::uint64_t j) const { return eps_(j); }
  Rational delta(std::uint64_t j) const { return delta_(j); }
  Rational tail(std::uint64_t J) const { return tail_(J); }

  // least J with tail(J) < e
  std::uint64_t modulus(const Rational& e) const {
    require(sgn(e) > 0, "modulus needs a positive argument");
    for (std::uint64_t J = 0; J < 4096; ++J)
      if (tail(J) < e) return J;
    fail(ErrorCode::budget_exceeded, "schedule modulus");
  }

 private:
  std::string name_;
  std::function<Rational(std::uint64_t)> eps_, delta_, tail_;
};

// Provenance of one BC open: the window [lo, hi] of a member observable.
struct Window {
  std::uint64_t member = 0, j = 0, lo = 1, hi = 1;
  Rational delta;
};

class BCSequence {
 public:
  using OpenFn = std::function<EffectiveOpen(std::uint64_t)>;
  using RatFn = std::function<Rational(std::uint64_t)>;
  using WindowFn = std::function<std::optional<Window>(std::uint64_t)>;

  BCSequence(SpaceKind s, OpenFn open, RatFn err, RatFn tail, WindowFn window = nullptr)
      : space_(s), open_(std::move(open)), err_(std::move(err)), tail_(std::move(tail)), window_(std::move(window)) {}

  // every U_j the whole space, err_j from the schedule
  static BCSequence whole(SpaceKind s, const SummableSchedule& sched) {
    return BCSequence(
        s, [s](std::uint64_t) { return EffectiveOpen::whole(s); }, [sched](std::uint64_t j) { return sched.eps(j); },
        [sched](std::uint64_t J) { return sched.tail(J); });
  }

  SpaceKind space() const { return space_; }
  EffectiveOpen open(std::uint64_t j) const { return open_(j); }
  Rational err(std::uint64_t j) const { return err_(j); }
  // upper bound on sum_{n >= J} err(n)
  Rational tail(std::uint64_t J) const { return tail_(J); }
  std::optional<Window> window(std::uint64_t j) const { return window_ ? window_(j) : std::nullopt; }

  std::uint64_t modulus(const Rational& e) const {
    require(sgn(e) > 0, "modulus needs a positive argument");
    for (std::uint64_t J = 0; J < (std::uint64_t(1) << 20); ++J)
      if (tail(J) < e) return J;
    fail(ErrorCode::budget_exceeded, "sequence modulus");
  }

 private:
  SpaceKind space_;
  OpenFn open_;
  RatFn err_, tail_;
  WindowFn window_;
};

// U_j = {x : |A_n(f - int f)(x)| < delta_j for n in [N_j, N_{j+1}]} with N_j the
// nondecreasing hull of the almost-sure n0 at (eps_j, delta_j); err_j = eps_j.
// The certificates are computed lazily in index order and cached.
class RateBC {
 public:
  RateBC(System sys, Observable f, SummableSchedule sched, std::uint64_t member = 0)
      : st_(std::make_shared<State>(std::move(sys), std::move(f), std::move(sched), member)) {}

  const RateCertificate& certificate(std::uint64_t j) const {
    std::lock_guard<std::mutex> lock(st_->mu);
    st_->fill(j);
    return st_->certs[j];
  }
  std::uint64_t N(std::uint64_t j) const {
    std::lock_guard<std::mutex> lock(st_->mu);
    st_->fill(j);
    return st_->N[j];
  }
  Window window(std::uint64_t j) const {
    return Window{st_->member, j, N(j), N(j + 1), st_->sched.delta(j)};
  }

  BCSequence sequence() const {
    auto st = st_;
    RateBC self = *this;
    return BCSequence(
        st->ctx.system().space(),
        [self](std::uint64_t j) { return self.open(j); }, [st](std::uint64_t j) { return st->sched.eps(j); },
        [st](std::uint64_t J) { return st->sched.tail(J); },
        [self](std::uint64_t j) -> std::optional<Window> { return self.window(j); });
  }

  EffectiveOpen open(std::uint64_t j) const {
    Window w = window(j);
    std::lock_guard<std::mutex> lock(st_->mu);
    auto it = st_->opens.find(j);
    if (it != st_->opens.end()) return it->second;
    EffectiveOpen U = window_open(st_->ctx.system(), st_->f, w.lo, w.hi, w.delta);
    st_->opens.emplace(j, U);
    return U;
  }

 private:
  struct State {
    State(System sys, Observable g, SummableSchedule s, std::uint64_t m)
        : ctx(sys, g), f(std::move(g)), sched(std::move(s)), member(m) {}
    RateContext ctx;
    Observable f;
    SummableSchedule sched;
    std::uint64_t member;
    std::mutex mu;
    std::vector<RateCertificate> certs;
    std::vector<std::uint64_t> N;
    std::map<std::uint64_t, EffectiveOpen> opens;
    void fill(std::uint64_t j) {
      while (certs.size() <= j) {
        std::uint64_t i = certs.size();
        certs.push_back(ctx.as_l1(sched.eps(i), sched.delta(i)));
        std::uint64_t n0 = certs.back().n0_or_m;
        N.push_back(N.empty() ? n0 : std::max(N.back(), n0));
      }
    }
  };
  std::shared_ptr<State> st_;
};

inline BCSequence bc_from_rate(const System& sys, const Observable& f, const SummableSchedule& sched) {
  return RateBC(sys, f, sched).sequence();
}

// Member i enters at indices cantor_pair(i, j). Members must satisfy
// err_i(j) <= 2^-(i+j+2), so the whole family has total error at most 1 and
// every index on diagonal s = i + j carries at most 2^-(s+2). Indices of
// members at or beyond the family size are the whole space with err 0.
inline BCSequence bc_intersect(std::vector<BCSequence> family) {
  require(!family.empty(), "empty family");
  SpaceKind s = family[0].space();
  for (auto& b : family) require(b.space() == s, "family members from different spaces");
  auto fam = std::make_shared<const std::vector<BCSequence>>(std::move(family));
  auto split = [](std::uint64_t t) {
    auto [a, b] = cantor_unpair(Integer(static_cast<unsigned long>(t)));
    // cantor_pair(i, j) = s(s+1)/2 + j with s = i + j
    return std::pair<std::uint64_t, std::uint64_t>{mpz_get_ui(a.get_mpz_t()), mpz_get_ui(b.get_mpz_t())};
  };
  std::uint64_t G = fam->size();
  auto tail = [G, split](std::uint64_t T) {
    auto [i, j] = split(T);
    std::uint64_t S = i + j;
    // sum over diagonals s >= S of min(G, s + 1) 2^-(s+2)
    Rational t = 0;
    std::uint64_t s = S;
    for (; s + 1 < G; ++s) t += Rational(Integer(static_cast<unsigned long>(s + 1))) * pow2(-static_cast<long>(s) - 2);
    t += Rational(Integer(static_cast<unsigned long>(G))) * pow2(-static_cast<long>(s) - 1);
    return t;
  };
  return BCSequence(
      s,
      [fam, split, s](std::uint64_t t) {
        auto [i, j] = split(t);
        if (i >= fam->size()) return EffectiveOpen::whole(s);
        return (*fam)[i].open(j);
      },
      [fam, split](std::uint64_t t) {
        auto [i, j] = split(t);
        if (i >= fam->size()) return Rational(0);
        Rational e = (*fam)[i].err(j);
        if (e > pow2(-static_cast<long>(i + j) - 2))
          fail(ErrorCode::invalid_input, "member " + std::to_string(i) + " err(" + std::to_string(j) + ") above 2^-(i+j+2)");
        return e;
      },
      tail,
      [fam, split](std::uint64_t t) -> std::optional<Window> {
        auto [i, j] = split(t);
        if (i >= fam->size()) return std::nullopt;
        auto w = (*fam)[i].window(j);
        if (w) w->member = i;
        return w;
      });
}

// ---- point synthesis --------------------------------------------------------

struct MembershipCert {
  std::uint64_t index = 0;     // BC index n, certified x in U_n
  std::uint64_t step = 0;      // refinement stage m (n = k + m)
  std::uint64_t prefix = 0;    // enumeration prefix length L (finite opens are used whole)
  std::uint64_t position = 0;  // position of the witness in that prefix
  IdealBall witness;           // ball of U_n containing the closure of `ball`
  IdealBall ball;              // C_{m+1}
  std::uint64_t J = 0;         // opens up to J entered the residual
  Rational lambda;             // residual mass after the step
  bool operator==(const MembershipCert&) const = default;
};

namespace detail {

// candidate balls of level l inside C_m, radius <= 2^-(m+1), canonical order
inline std::vector<IdealBall> synth_candidates(const IdealBall& C, std::uint64_t m, unsigned level) {
  std::vector<IdealBall> out;
  if (C.center.space == SpaceKind::circle) {
    Rational cap = pow2(-static_cast<long>(m) - 1);
    Rational rho = qmin(C.radius, cap) * pow2(-static_cast<long>(level));
    if (C.radius > Rational(1, 2)) {
      Integer count = ceil_q(1 / rho);
      for (Integer i = 0; i < count; ++i) out.push_back({IdealPoint::circle(Rational(i) * rho), rho});
      return out;
    }
    // closure strictly inside: |i| rho + rho < r
    Integer lim = ceil_q(C.radius / rho) - 2;
    for (Integer i = -lim; i <= lim; ++i) {
      if (qabs(Rational(i) * rho) + rho < C.radius)
        out.push_back({IdealPoint::circle(C.center.x + Rational(i) * rho), rho});
    }
    return out;
  }
  Word w = cylinder_word(C);
  std::size_t len = std::max<std::size_t>(w.size(), static_cast<std::size_t>(m) + 2) + level - 1;
  std::size_t extra = len - w.size();
  if (extra > 20) fail(ErrorCode::budget_exceeded, "candidate cylinders");
  for (std::size_t z = 0; z < (std::size_t(1) << extra); ++z) {
    Word v = w + CylFn::word_of(z, extra);
    out.push_back({IdealPoint::cantor(v), canonical_cantor_radius(len)});
  }
  return out;
}

// closure of inner inside the open ball outer
inline bool strictly_inside(const IdealBall& outer, const IdealBall& inner) {
  if (outer.center.space == SpaceKind::circle) {
    if (outer.radius > Rational(1, 2)) return true;
    return distance(outer.center, inner.center) + inner.radius < outer.radius;
  }
  return nested(outer, inner);
}

inline ExactSet ball_set(const IdealBall& b) {
  if (b.center.space == SpaceKind::circle) {
    if (b.radius > Rational(1, 2)) return ArcSet::whole();
    return ArcSet::ball(b);
  }
  return CylinderSet::ball(b);
}

class Synth {
 public:
  static constexpr unsigned kMaxStage = 24;

  Synth(ComputableMeasure mu, BCSequence bc, IdealBall target) : mu_(std::move(mu)), bc_(std::move(bc)) {
    require(target.center.space == mu_.space(), "target ball from a different space");
    require(bc_.space() == mu_.space(), "sequence from a different space");
    Rational mass = mu_.measure(ball_set(target));
    if (sgn(mass) == 0) fail(ErrorCode::no_mass, "target ball has measure 0");
    lambda0_ = mass / 2;
    k_ = bc_.modulus(lambda0_ / 2);
    chain_.push_back(target);
    lambda_.push_back(lambda0_);
  }

  std::uint64_t k() const { return k_; }
  const Rational& lambda0() const { return lambda0_; }

  // C_{m}; runs the construction as far as needed
  IdealBall ball(std::uint64_t m) {
    std::lock_guard<std::mutex> lock(mu_lock_);
    while (chain_.size() <= m) step();
    return chain_[m];
  }

  std::vector<MembershipCert> certs(std::uint64_t D) {
    ball(D);
    std::lock_guard<std::mutex> lock(mu_lock_);
    return std::vector<MembershipCert>(certs_.begin(), certs_.begin() + static_cast<std::ptrdiff_t>(D));
  }

  const BCSequence& sequence() const { return bc_; }
  const ComputableMeasure& measure() const { return mu_; }

 private:
  const std::vector<IdealBall>& witnesses(std::uint64_t n, const EffectiveOpen& U, std::uint64_t L) {
    auto key = std::make_pair(n, U.exact_prefix() ? std::uint64_t(0) : L);
    auto it = wit_.find(key);
    if (it != wit_.end()) return it->second;
    std::vector<IdealBall> balls = U.exact_prefix() ? *U.exact_prefix() : U.prefix(L);
    return wit_.emplace(key, std::move(balls)).first->second;
  }

  const ExactSet& prefix_set(std::uint64_t n, std::uint64_t L) {
    EffectiveOpen U = open(n);
    auto key = std::make_pair(n, U.exact_prefix() ? std::uint64_t(0) : L);
    auto it = sets_.find(key);
    if (it != sets_.end()) return it->second;
    return sets_.emplace(key, U.prefix_set(L)).first->second;
  }

  EffectiveOpen open(std::uint64_t n) {
    auto it = opens_.find(n);
    if (it != opens_.end()) return it->second;
    return opens_.emplace(n, bc_.open(n)).first->second;
  }

  void step() {
    std::uint64_t m = chain_.size() - 1, nu = k_ + m;
    const IdealBall C = chain_.back();
    EffectiveOpen U = open(nu);
    StepBudget budget;
    for (unsigned s = 1; s <= kMaxStage; ++s) {
      std::uint64_t L = std::uint64_t(1) << std::min(s, 20u);
      const auto& W = witnesses(nu, U, L);
      for (unsigned level = 1; level <= s; ++level) {
        for (const IdealBall& B : synth_candidates(C, m, level)) {
          budget.charge(1, "point synthesis");
          std::size_t pos = 0;
          while (pos < W.size() && !strictly_inside(W[pos], B)) ++pos;
          if (pos == W.size()) continue;
          ExactSet S = ball_set(B);
          Rational mass = mu_.measure(S);
          if (sgn(mass) == 0) continue;
          std::uint64_t J = std::max(nu, bc_.modulus(mass / 2)) + (s - 1);
          for (std::uint64_t n = nu + 1; n <= J && mu_.measure(S) > bc_.tail(J + 1); ++n) {
            budget.charge(1, "point synthesis");
            S = intersect(S, prefix_set(n, L));
          }
          Rational residual = mu_.measure(S) - bc_.tail(J + 1);
          if (sgn(residual) <= 0) continue;
          certs_.push_back(MembershipCert{nu, m, L, pos, W[pos], B, J,
                                          residual});
          chain_.push_back(B);
          lambda_.push_back(residual);
          return;
        }
      }
    }
    fail(ErrorCode::budget_exceeded, "no admissible ball at step " + std::to_string(m));
  }

  ComputableMeasure mu_;
  BCSequence bc_;
  Rational lambda0_;
  std::uint64_t k_ = 0;
  std::mutex mu_lock_;
  std::vector<IdealBall> chain_;
  std::vector<Rational> lambda_;
  std::vector<MembershipCert> certs_;
  std::map<std::uint64_t, EffectiveOpen> opens_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<IdealBall>> wit_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, ExactSet> sets_;
};

}  // namespace detail

struct SynthPoint {
  SpacePoint point;
  std::uint64_t k = 0;
  IdealBall target;
  Rational lambda0;
  std::vector<MembershipCert> certs;
  std::shared_ptr<detail::Synth> engine;
};

// A point in the target ball lying in U_n for every n >= k. The certificates
// cover n in [k, k + D); later balls are produced on demand by the same
// construction when the point is refined further.
inline SynthPoint synthesize_point(const ComputableMeasure& mu, const BCSequence& bc, const IdealBall& target,
                                   std::uint64_t D) {
  auto eng = std::make_shared<detail::Synth>(mu, bc, target);
  SynthPoint sp{SpacePoint::circle(Rational(0)), eng->k(), target, eng->lambda0(), eng->certs(D), eng};
  // stream ball m is C_{m+1}, radius <= 2^-(m+1)
  sp.point = refine_to_point(mu.space(), [eng](unsigned m) { return eng->ball(m + 1); });
  return sp;
}

// Re-checks a certificate chain against the sequence alone: each witness is
// the recorded entry of U_n's enumeration, the closure of the chosen ball lies
// inside it, the balls nest and shrink, and each residual mass is positive and
// equals the recomputed one.
inline ReplayResult replay_synthesis(const ComputableMeasure& mu, const BCSequence& bc, const IdealBall& target,
                                     std::uint64_t k, const Rational& lambda0, const std::vector<MembershipCert>& certs) {
  ReplayResult r;
  r.check(target.center.space == mu.space() && bc.space() == mu.space(), "spaces differ");
  if (!r.ok) return r;
  r.check(lambda0 == mu.measure(detail::ball_set(target)) / 2, "lambda0 differs from half the target mass");
  r.check(sgn(lambda0) > 0, "target has no mass");
  if (!r.ok) return r;
  r.check(k == bc.modulus(lambda0 / 2), "start index differs from the tail modulus");
  IdealBall prev = target;
  for (std::size_t m = 0; m < certs.size() && r.ok; ++m) {
    const MembershipCert& c = certs[m];
    std::string at = "step " + std::to_string(m) + ": ";
    r.check(c.step == m && c.index == k + m, at + "index out of sequence");
    r.check(c.prefix >= 1 && c.prefix <= (std::uint64_t(1) << 20), at + "prefix length out of range");
    if (!r.ok) break;
    EffectiveOpen U = bc.open(c.index);
    std::vector<IdealBall> W = U.exact_prefix() ? *U.exact_prefix() : U.prefix(c.prefix);
    r.check(c.position < W.size() && W[c.position] == c.witness, at + "witness is not in the enumeration");
    r.check(detail::strictly_inside(c.witness, c.ball), at + "ball closure not inside the witness");
    if (c.ball.center.space == SpaceKind::circle) {
      r.check(c.ball.radius <= pow2(-static_cast<long>(m) - 1), at + "radius too large");
      r.check(detail::strictly_inside(prev, c.ball), at + "ball closure not inside the previous ball");
    } else {
      r.check(cylinder_word(c.ball).size() >= m + 2, at + "cylinder too short");
      r.check(nested(prev, c.ball), at + "cylinder not inside the previous one");
    }
    r.check(c.J >= c.index, at + "residual horizon below the index");
    if (!r.ok) break;
    ExactSet S = detail::ball_set(c.ball);
    for (std::uint64_t n = c.index + 1; n <= c.J; ++n) S = intersect(S, bc.open(n).prefix_set(c.prefix));
    Rational residual = mu.measure(S) - bc.tail(c.J + 1);
    r.check(sgn(residual) > 0, at + "residual mass not positive");
    r.check(residual == c.lambda, at + "recorded residual differs from the recomputed one");
    prev = c.ball;
  }
  return r;
}

// the first Q ideal balls of positive measure serve as targets
inline std::vector<SynthPoint> dense_sequence(const ComputableMeasure& mu, const BCSequence& bc, std::size_t Q,
                                              std::uint64_t D) {
  std::vector<SynthPoint> out;
  for (Integer z = 0; out.size() < Q; ++z) {
    if (z > 100000) fail(ErrorCode::budget_exceeded, "target enumeration");
    auto b = ball_from_index(mu.space(), z);
    if (!b || sgn(mu.measure(detail::ball_set(*b))) == 0) continue;
    out.push_back(synthesize_point(mu, bc, *b, D));
  }
  return out;
}

struct TypicalPoint {
  SynthPoint synth;
  System system;
  std::vector<Observable> observables;
  std::vector<RateBC> members;
};

// Intersects the rate sequences of the first G terms of F (member i on the
// schedule eps_j = 2^-(i+j+2), delta_j = 1/(j+2)) and synthesizes a point.
inline TypicalPoint typical_point(const System& sys, std::size_t G, std::uint64_t D,
                                  std::optional<IdealBall> target = std::nullopt) {
  require(G >= 1, "count must be at least 1");
  auto F = enumerate_F(sys.space(), G);
  std::vector<Observable> obs(F.begin(), F.end());
  std::vector<RateBC> members;
  std::vector<BCSequence> family;
  for (std::size_t i = 0; i < G; ++i) {
    members.emplace_back(sys, obs[i], SummableSchedule::member(i), i);
    family.push_back(members.back().sequence());
  }
  BCSequence bc = bc_intersect(std::move(family));
  IdealBall t = target ? *target : whole_space_ball(sys.space());
  return TypicalPoint{synthesize_point(sys.measure(), bc, t, D), sys, std::move(obs), std::move(members)};
}

}  // namespace ergodic
