#pragma once

#include <memory>

#include "ergodic/deviation.hpp"

namespace ergodic {

enum class RateKind { norm_l1, norm_l2, as_bounded, as_l1 };

inline const char* rate_kind_name(RateKind k) {
  switch (k) {
    case RateKind::norm_l1: return "NORM_L1";
    case RateKind::norm_l2: return "NORM_L2";
    case RateKind::as_bounded: return "AS_BOUNDED";
    case RateKind::as_l1: return "AS_L1";
  }
  return "";
}

inline RateKind parse_rate_kind(const std::string& s) {
  if (s == "NORM_L1" || s == "norm-l1" || s == "l1") return RateKind::norm_l1;
  if (s == "NORM_L2" || s == "norm-l2" || s == "l2") return RateKind::norm_l2;
  if (s == "AS_BOUNDED" || s == "as-bounded") return RateKind::as_bounded;
  if (s == "AS_L1" || s == "as-l1") return RateKind::as_l1;
  fail(ErrorCode::invalid_input, "kind: unknown rate kind '" + s + "'");
}

// Witnesses for one certified rate. For NORM_L2 the norms are squared
// (norm_p encloses ||A_p h||_2^2 and f_norm is ||h||_2^2) so that every
// recorded value stays rational.
struct RateCertificate {
  RateKind kind = RateKind::norm_l1;
  std::string system;
  Observable observable = Observable(FTerm::one());
  Rational eps, delta;
  Rational integral;           // of the observable
  std::uint64_t p = 1;
  Interval norm_p;             // ||A_p h||, h the centered observable
  Rational f_norm;             // NORM kinds: ||h||
  std::uint64_t n = 1;         // NORM kinds: n(eps)
  Rational sup;                // AS_BOUNDED: sup |h|
  std::uint64_t n0_or_m = 1;
  // AS_L1
  Rational M, tail, shift, delta2, maximal;
  std::shared_ptr<const RateCertificate> sub;

  bool is_as() const { return kind == RateKind::as_bounded || kind == RateKind::as_l1; }

  std::string guarantee() const {
    std::string m = std::to_string(n0_or_m);
    switch (kind) {
      case RateKind::norm_l1: return "||A_k(f - int f)||_1 <= " + to_string(eps) + " for all k >= " + m;
      case RateKind::norm_l2: return "||A_k(f - int f)||_2 <= " + to_string(eps) + " for all k >= " + m;
      default:
        return "mu{x : sup_{n >= " + m + "} |A_n(f - int f)(x)| > " + to_string(delta) + "} <= " + to_string(eps);
    }
  }
};

namespace detail {

// p = 1, 2, 4, ... until pred holds, then the first hit in the winning octave
template <class Pred>
std::uint64_t search_p(Pred&& pred, const char* what) {
  std::uint64_t p = 1;
  while (!pred(p)) {
    if (p >= limits().max_p)
      fail(ErrorCode::budget_exceeded, std::string(what) + ": no p up to " + std::to_string(limits().max_p));
    p *= 2;
  }
  if (p <= 2) return p;
  StepBudget budget;
  for (std::uint64_t k = p / 2 + 1; k < p; ++k) {
    budget.charge(1, what);
    if (pred(k)) return k;
  }
  return p;
}

inline Integer ceil_z(const Rational& q) { return ceil_q(q); }

inline std::uint64_t at_least_one(const Integer& z, const char* what) {
  return sgn(z) <= 0 ? 1 : to_u64(z, what);
}

}  // namespace detail

inline RateCertificate l_rate(const System& sys, const Observable& f, const Rational& eps, Norm norm) {
  require(sgn(eps) > 0, "eps must be positive");
  NormOracle o = NormOracle::of(sys, f);
  RateCertificate c;
  c.kind = norm == Norm::l1 ? RateKind::norm_l1 : RateKind::norm_l2;
  c.system = sys.id();
  c.observable = f;
  c.eps = eps;
  c.delta = eps;
  c.integral = integral(sys, f);
  // L2 compares squares: ||A_p|| < eps/2 iff ||A_p||^2 < eps^2/4
  Rational target = norm == Norm::l1 ? Rational(eps / 2) : Rational(eps * eps / 4);
  c.p = detail::search_p([&](std::uint64_t p) { return o.value(p, norm).hi < target; }, "norm rate");
  c.norm_p = o.value(c.p, norm);
  if (norm == Norm::l1) {
    c.f_norm = o.l1_of_h();
    c.n = detail::at_least_one(detail::ceil_z(2 * c.f_norm / eps), "n(eps)");
  } else {
    c.f_norm = o.l2sq_of_h();
    c.n = detail::at_least_one(isqrt_ceil(detail::ceil_z(4 * c.f_norm / (eps * eps))), "n(eps)");
  }
  Integer m = Integer(static_cast<unsigned long>(c.n)) * Integer(static_cast<unsigned long>(c.p));
  c.n0_or_m = to_u64(m, "m(eps)");
  return c;
}

namespace detail {

inline RateCertificate bounded_from(const System& sys, const Observable& f, NormOracle& o, const Rational& eps,
                                    const Rational& delta) {
  RateCertificate c;
  c.kind = RateKind::as_bounded;
  c.system = sys.id();
  c.observable = f;
  c.eps = eps;
  c.delta = delta;
  c.integral = integral(sys, f);
  Rational target = delta * eps / 2;
  c.p = search_p([&](std::uint64_t p) { return o.l1(p).hi <= target; }, "almost-sure rate");
  c.norm_p = o.l1(c.p);
  c.sup = o.sup_of_h();
  Rational pm1(Integer(static_cast<unsigned long>(c.p - 1)));
  c.n0_or_m = at_least_one(ceil_q(4 * pm1 * c.sup / delta), "n0");
  return c;
}

}  // namespace detail

inline RateCertificate as_rate_bounded(const System& sys, const Observable& f, const Rational& eps,
                                       const Rational& delta) {
  require(sgn(eps) > 0 && sgn(delta) > 0, "eps and delta must be positive");
  NormOracle o = NormOracle::of(sys, f);
  return detail::bounded_from(sys, f, o, eps, delta);
}

// Split h = f - int f as (h'_M - c) + (h - h'_M + c) with c = int h'_M. The
// bounded part takes (eps/2, delta/2); the remainder r has ||r||_1 <= 2 tail
// and |A_n r| > delta2 := delta/2 - |c| forces sup_n A_n|h - h'_M| > delta2,
// whose mass the maximal inequality bounds by tail/delta2 <= eps/2.
// A context keeps the truncations and their norm oracles, so repeated calls
// on one observable (a schedule of parameters) share the work.
class RateContext {
 public:
  RateContext(System sys, Observable f) : sys_(std::move(sys)), f_(std::move(f)), h_(centered(sys_, f_)) {
    integral_ = integral(sys_, f_);
  }

  const System& system() const { return sys_; }

  RateCertificate as_l1(const Rational& eps, const Rational& delta) {
    require(sgn(eps) > 0 && sgn(delta) > 0, "eps and delta must be positive");
    Rational target = delta * qmin(eps, Rational(1)) / 8;
    Rational M = 1;
    Trunc* t = nullptr;
    for (;;) {
      t = &trunc(M);
      if (t->tail <= target) break;
      if (M > pow2(62)) fail(ErrorCode::budget_exceeded, "truncation level");
      M *= 2;
    }
    RateCertificate c;
    c.kind = RateKind::as_l1;
    c.system = sys_.id();
    c.observable = f_;
    c.eps = eps;
    c.delta = delta;
    c.integral = integral_;
    c.M = M;
    c.tail = t->tail;
    c.shift = t->shift;
    c.delta2 = delta / 2 - qabs(c.shift);
    if (sgn(c.delta2) <= 0) fail(ErrorCode::budget_exceeded, "centering correction exhausts delta");
    c.maximal = c.tail / c.delta2;
    auto sub = detail::bounded_from(sys_, t->bounded, t->oracle, eps / 2, delta / 2);
    c.p = sub.p;
    c.norm_p = sub.norm_p;
    c.sup = sub.sup;
    c.n0_or_m = sub.n0_or_m;
    c.sub = std::make_shared<const RateCertificate>(std::move(sub));
    return c;
  }

 private:
  struct Trunc {
    Observable bounded;
    Rational tail, shift;
    NormOracle oracle;
  };

  Trunc& trunc(const Rational& M) {
    auto it = truncs_.find(M);
    if (it != truncs_.end()) return it->second;
    Concrete hm = std::visit([&](auto& g) -> Concrete { return g.truncated(M); }, h_);
    Rational tail = std::holds_alternative<Pl>(h_) ? (std::get<Pl>(h_) - std::get<Pl>(hm)).integral_abs()
                                                   : (std::get<CylFn>(h_) - std::get<CylFn>(hm)).integral_abs(sys_.p());
    Observable bounded = std::visit([](auto& g) -> Observable { return g; }, hm);
    Rational shift = integral(sys_, bounded);
    return truncs_.emplace(M, Trunc{bounded, tail, shift, NormOracle::of(sys_, bounded)}).first->second;
  }

  System sys_;
  Observable f_;
  Concrete h_;
  Rational integral_;
  std::map<Rational, Trunc> truncs_;
};

inline RateCertificate as_rate_l1(const System& sys, const Observable& f, const Rational& eps, const Rational& delta) {
  RateContext ctx(sys, f);
  return ctx.as_l1(eps, delta);
}

inline RateCertificate certify(const System& sys, const Observable& f, RateKind kind, const Rational& eps,
                               const Rational& delta) {
  switch (kind) {
    case RateKind::norm_l1: return l_rate(sys, f, eps, Norm::l1);
    case RateKind::norm_l2: return l_rate(sys, f, eps, Norm::l2);
    case RateKind::as_bounded: return as_rate_bounded(sys, f, eps, delta);
    case RateKind::as_l1: return as_rate_l1(sys, f, eps, delta);
  }
  fail(ErrorCode::invalid_input, "rate kind");
}

// ---- replay -----------------------------------------------------------------

struct ReplayResult {
  bool ok = true;
  std::string reason;
  void check(bool cond, const std::string& what) {
    if (ok && !cond) {
      ok = false;
      reason = what;
    }
  }
};

// Pure arithmetic over the recorded witnesses. With deep set, the witnesses
// themselves are recomputed at the recorded p and M and compared.
inline ReplayResult replay_certificate(const RateCertificate& c, bool deep = false) {
  ReplayResult r;
  r.check(sgn(c.eps) > 0 && sgn(c.delta) > 0, "eps and delta must be positive");
  r.check(c.p >= 1 && c.n0_or_m >= 1, "counts must be positive");
  r.check(c.norm_p.lo <= c.norm_p.hi && sgn(c.norm_p.lo) >= 0, "norm witness is not a valid enclosure");
  Rational P(Integer(static_cast<unsigned long>(c.p)));
  switch (c.kind) {
    case RateKind::norm_l1:
    case RateKind::norm_l2: {
      bool l1 = c.kind == RateKind::norm_l1;
      Rational target = l1 ? Rational(c.eps / 2) : Rational(c.eps * c.eps / 4);
      r.check(c.norm_p.hi < target, "||A_p|| not below eps/2");
      Rational N(Integer(static_cast<unsigned long>(c.n)));
      // ||A_{np+k}|| <= ||A_p|| + ||h||/n and ||h||/n <= eps/2
      if (l1) r.check(c.f_norm <= N * c.eps / 2, "n(eps) below 2||h||/eps");
      else r.check(4 * c.f_norm <= N * N * c.eps * c.eps, "n(eps) below 2||h||/eps");
      r.check(Integer(static_cast<unsigned long>(c.n0_or_m)) ==
                  Integer(static_cast<unsigned long>(c.n)) * Integer(static_cast<unsigned long>(c.p)),
              "m differs from n p");
      break;
    }
    case RateKind::as_bounded: {
      r.check(c.norm_p.hi <= c.delta * c.eps / 2, "||A_p||_1 above delta eps / 2");
      Rational N0(Integer(static_cast<unsigned long>(c.n0_or_m)));
      r.check(N0 * c.delta >= 4 * (P - 1) * c.sup, "n0 below 4(p-1)||h||_inf/delta");
      break;
    }
    case RateKind::as_l1: {
      r.check(c.sub != nullptr, "missing bounded sub-certificate");
      if (!r.ok) break;
      const RateCertificate& s = *c.sub;
      r.check(s.kind == RateKind::as_bounded, "sub-certificate kind");
      r.check(s.eps == c.eps / 2 && s.delta == c.delta / 2, "sub-certificate parameters");
      r.check(s.integral == c.shift, "sub-certificate integral differs from the centering shift");
      auto sr = replay_certificate(s, false);
      r.check(sr.ok, "sub-certificate: " + sr.reason);
      r.check(qabs(c.shift) <= c.tail, "centering shift exceeds the truncation tail");
      r.check(c.delta2 == c.delta / 2 - qabs(c.shift) && sgn(c.delta2) > 0, "delta2 arithmetic");
      r.check(c.maximal == c.tail / c.delta2, "maximal bound arithmetic");
      r.check(c.maximal <= c.eps / 2, "maximal bound above eps/2");
      r.check(c.n0_or_m == s.n0_or_m && c.p == s.p, "n0 differs from the sub-certificate");
      r.check(c.norm_p == s.norm_p && c.sup == s.sup, "witnesses differ from the sub-certificate");
      break;
    }
  }
  if (!deep || !r.ok) return r;
  System sys = System::parse(c.system);
  r.check(integral(sys, c.observable) == c.integral, "recorded integral differs");
  switch (c.kind) {
    case RateKind::norm_l1:
    case RateKind::norm_l2: {
      bool l1 = c.kind == RateKind::norm_l1;
      NormOracle o = NormOracle::of(sys, c.observable);
      r.check(o.value(c.p, l1 ? Norm::l1 : Norm::l2) == c.norm_p, "recomputed ||A_p|| differs");
      r.check((l1 ? o.l1_of_h() : o.l2sq_of_h()) == c.f_norm, "recomputed ||h|| differs");
      break;
    }
    case RateKind::as_bounded: {
      NormOracle o = NormOracle::of(sys, c.observable);
      r.check(o.l1(c.p) == c.norm_p, "recomputed ||A_p||_1 differs");
      r.check(o.sup_of_h() == c.sup, "recomputed sup differs");
      break;
    }
    case RateKind::as_l1: {
      Concrete h = centered(sys, c.observable);
      Concrete hm = std::visit([&](auto& g) -> Concrete { return g.truncated(c.M); }, h);
      Rational tail = std::holds_alternative<Pl>(h)
                          ? (std::get<Pl>(h) - std::get<Pl>(hm)).integral_abs()
                          : (std::get<CylFn>(h) - std::get<CylFn>(hm)).integral_abs(sys.p());
      r.check(tail == c.tail, "recomputed truncation tail differs");
      Observable bounded = std::visit([](auto& g) -> Observable { return g; }, hm);
      r.check(integral(sys, bounded) == c.shift, "recomputed shift differs");
      NormOracle o = NormOracle::of(sys, bounded);
      r.check(o.l1(c.sub->p) == c.sub->norm_p && o.sup_of_h() == c.sub->sup, "recomputed sub-certificate differs");
      break;
    }
  }
  return r;
}

// ---- validation -------------------------------------------------------------

enum class ValidationMode { exact_cylinder, exact_arc, sampled };

inline const char* validation_mode_name(ValidationMode m) {
  switch (m) {
    case ValidationMode::exact_cylinder: return "EXACT_CYLINDER";
    case ValidationMode::exact_arc: return "EXACT_ARC";
    case ValidationMode::sampled: return "SAMPLED";
  }
  return "";
}

inline ValidationMode parse_validation_mode(const std::string& s) {
  if (s == "EXACT_CYLINDER" || s == "exact-cylinder") return ValidationMode::exact_cylinder;
  if (s == "EXACT_ARC" || s == "exact-arc") return ValidationMode::exact_arc;
  if (s == "SAMPLED" || s == "sampled") return ValidationMode::sampled;
  fail(ErrorCode::invalid_input, "mode: unknown validation mode '" + s + "'");
}

struct ValidationReport {
  ValidationMode mode = ValidationMode::exact_cylinder;
  std::uint64_t n0 = 1, horizon = 1;
  Rational delta, eps;
  Rational mass;          // exact modes: the deviation mass or an upper bound on it
  bool upper_bound = false;
  std::uint64_t samples = 0, hits = 0;  // sampled mode
  bool asserted = false, ok = true;
};

inline constexpr std::uint64_t kSamplePrime = 4099;
inline constexpr std::uint64_t kSampleStep = 1597;

// deviation mass of the centered observable over [lo, hi]
inline ValidationReport deviation_report(const System& sys, const Observable& f, std::uint64_t lo, std::uint64_t hi,
                                         const Rational& delta, ValidationMode mode) {
  require(lo >= 1 && lo <= hi, "horizon must be at least n0");
  ValidationReport rep;
  rep.mode = mode;
  rep.n0 = lo;
  rep.horizon = hi;
  rep.delta = delta;
  Concrete h = centered(sys, f);
  if (mode == ValidationMode::exact_cylinder) {
    if (sys.kind() != SystemKind::shift) fail(ErrorCode::unsupported_pair, "cylinder enumeration needs the shift");
    rep.mass = shift_deviation_mass(sys, std::get<CylFn>(h), lo, hi, delta);
    return rep;
  }
  if (mode == ValidationMode::exact_arc) {
    if (sys.kind() == SystemKind::doubling) rep.mass = doubling_deviation_mass(std::get<Pl>(h), lo, hi, delta);
    else if (sys.kind() == SystemKind::rotation) {
      rep.mass = rotation_deviation_upper(sys, std::get<Pl>(h), lo, hi, delta);
      rep.upper_bound = true;
    } else fail(ErrorCode::unsupported_pair, "arc subdivision needs a circle system");
    return rep;
  }
  // rational samples (k a mod Q)/Q; on the shift their binary expansions
  Observable g = std::visit([](auto& v) -> Observable { return v; }, h);
  rep.samples = kSamplePrime;
  for (std::uint64_t k = 0; k < kSamplePrime; ++k) {
    Rational x = rat(static_cast<long>((k * kSampleStep) % kSamplePrime), static_cast<long>(kSamplePrime));
    SpacePoint pt = sys.space() == SpaceKind::circle ? SpacePoint::circle(x) : SpacePoint::cantor_fill([x](std::size_t n) {
      Word w;
      Rational y = x;
      for (std::size_t i = 0; i < n; ++i) {
        y *= 2;
        if (y >= 1) {
          w.push_back('1');
          y -= 1;
        } else w.push_back('0');
      }
      return w;
    });
    bool hit = false;
    birkhoff_scan(sys, g, pt, hi, 24, [&](std::uint64_t n, const Interval& a) {
      if (n >= lo && (a.lo > delta || a.hi < -delta)) hit = true;
      return !hit;
    });
    if (hit) ++rep.hits;
  }
  rep.mass = rat(static_cast<long>(rep.hits), static_cast<long>(rep.samples));
  return rep;
}

// Checks an almost-sure certificate on [n0, N]: exact modes assert the
// measured mass is at most eps; the sampled mode only reports an estimate.
inline ValidationReport validate_as(const System& sys, const RateCertificate& c, std::uint64_t N, ValidationMode mode) {
  require(c.is_as(), "validation needs an almost-sure certificate");
  require(N >= c.n0_or_m, "horizon below n0");
  ValidationReport rep = deviation_report(sys, c.observable, c.n0_or_m, N, c.delta, mode);
  rep.eps = c.eps;
  rep.asserted = mode != ValidationMode::sampled;
  rep.ok = !rep.asserted || rep.mass <= c.eps;
  return rep;
}

}  // namespace ergodic
