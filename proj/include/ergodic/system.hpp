#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ergodic/fterm.hpp"
#include "ergodic/measure.hpp"

namespace ergodic {

enum class SystemKind { doubling, shift, rotation };

// Convergent denominators q of alpha with |alpha - p/q| < 1/q^2, certified
// from one enclosure of alpha.
inline std::vector<std::uint64_t> certified_denominators(const CReal& alpha, unsigned bits = 256) {
  Interval e = alpha.enclosure(bits);
  Rational shift = Rational(floor_q(e.lo));
  Rational x = e.lo - shift, y = e.hi - shift;
  std::vector<Integer> quotients;
  for (int guard = 0; guard < 400; ++guard) {
    Integer fx = floor_q(x), fy = floor_q(y);
    if (fx != fy) break;
    quotients.push_back(fx);
    Rational rx = x - Rational(fx), ry = y - Rational(fy);
    if (sgn(rx) == 0 || sgn(ry) == 0) break;
    x = 1 / rx;
    y = 1 / ry;
    if (y < x) std::swap(x, y);
  }
  // q_j is certified once a_{j+1} is known
  std::vector<std::uint64_t> out;
  Integer q_prev = 0, q = 1;
  for (std::size_t j = 0; j + 1 < quotients.size(); ++j) {
    if (j > 0) {
      Integer next = quotients[j] * q + q_prev;
      q_prev = q;
      q = next;
    }
    if (mpz_sizeinbase(q.get_mpz_t(), 2) > 62) break;
    std::uint64_t v = mpz_get_ui(q.get_mpz_t());
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

class System {
 public:
  static System doubling() { return System(SystemKind::doubling, Rational(0), CReal()); }

  static System shift(const Rational& p) {
    require(sgn(p) > 0 && p < 1, "shift parameter must lie in (0,1)");
    return System(SystemKind::shift, p, CReal());
  }

  static System rotation(CReal alpha = sqrt2_minus_1(), std::string alpha_label = "") {
    if (alpha.exact()) fail(ErrorCode::invalid_input, "rotation angle must be irrational");
    System s(SystemKind::rotation, Rational(0), std::move(alpha));
    s.label_ = std::move(alpha_label);
    return s;
  }

  static System parse(const std::string& id) {
    if (id == "doubling") return doubling();
    if (id == "rotation") return rotation();
    if (id.rfind("shift:p=", 0) == 0) return shift(parse_rational(id.substr(8), "system shift parameter"));
    fail(ErrorCode::invalid_input, "system: unknown selector '" + id + "'");
  }

  SystemKind kind() const { return kind_; }
  SpaceKind space() const { return kind_ == SystemKind::shift ? SpaceKind::cantor : SpaceKind::circle; }
  const Rational& p() const { return p_; }
  const CReal& alpha() const { return alpha_; }

  ComputableMeasure measure() const {
    return kind_ == SystemKind::shift ? ComputableMeasure::bernoulli(p_) : ComputableMeasure::lebesgue();
  }

  std::string id() const {
    switch (kind_) {
      case SystemKind::doubling: return "doubling";
      case SystemKind::shift: return "shift:p=" + to_string(p_);
      case SystemKind::rotation: return label_.empty() ? "rotation" : "rotation:" + label_;
    }
    return "";
  }

  const std::vector<std::uint64_t>& denominators() const {
    std::call_once(cf_->once, [&] { cf_->q = certified_denominators(alpha_); });
    return cf_->q;
  }

  // greedy count of convergent blocks covering n steps; each block contributes
  // at most the total variation to |S_n h| for centered h
  std::uint64_t blocks(std::uint64_t n) const {
    const auto& q = denominators();
    std::uint64_t c = 0;
    for (std::size_t j = q.size(); j-- > 0 && n > 0;) {
      c += n / q[j];
      n %= q[j];
    }
    return c;
  }

 private:
  struct Cf {
    std::once_flag once;
    std::vector<std::uint64_t> q;
  };
  System(SystemKind k, Rational p, CReal a)
      : kind_(k), p_(std::move(p)), alpha_(std::move(a)), cf_(std::make_shared<Cf>()) {}
  SystemKind kind_;
  Rational p_;
  CReal alpha_;
  std::string label_;
  std::shared_ptr<Cf> cf_;
};

inline Concrete concretize(const Observable& f, const System& s) { return concretize(f, s.space()); }

// Forward image: an arc of width <= 2^-m holding T(x), or the first m symbols
// of T(x). Arcs are kept lifted (lo in [0,1), hi may pass 1), so wraparound
// never forces a split.
struct MapImage {
  Interval arc;
  Word prefix;
};

inline MapImage apply_map(const System& sys, const SpacePoint& x, unsigned m) {
  require(x.space() == sys.space(), "point from a different space");
  switch (sys.kind()) {
    case SystemKind::doubling: {
      Interval a = x.arc(m + 2);  // width <= 2^-(m+1)
      Rational s = Rational(floor_q(2 * a.lo));
      return {{2 * a.lo - s, 2 * a.hi - s}, {}};
    }
    case SystemKind::rotation: {
      Interval a = x.arc(m + 2), b = sys.alpha().enclosure(m + 2);
      Interval c = a + b;
      Rational s = Rational(floor_q(c.lo));
      return {{c.lo - s, c.hi - s}, {}};
    }
    case SystemKind::shift: return {{}, x.prefix(m + 1).substr(1)};
  }
  return {};
}

inline SpacePoint map_point(const System& sys, const SpacePoint& x) {
  switch (sys.kind()) {
    case SystemKind::doubling:
      if (x.real().exact()) return SpacePoint::circle(2 * *x.real().exact());
      return SpacePoint::circle(Integer(2) * x.real());
    case SystemKind::rotation: return SpacePoint::circle(x.real() + sys.alpha());
    case SystemKind::shift: {
      auto src = x.bits();
      return SpacePoint::cantor_fill([src](std::size_t n) { return src->prefix(n + 1).substr(1); });
    }
  }
  return x;
}

// Input precision schedule for an orbit segment: x_k is needed to precision
// step(k); the enclosure of A_n is then within 2^-output.
struct PrecisionPlan {
  SystemKind kind;
  unsigned input = 0;
  unsigned output = 0;
  std::uint64_t steps = 0;
  unsigned step(std::uint64_t k) const {
    if (kind == SystemKind::doubling) return input > k ? static_cast<unsigned>(input - k) : 0u;
    return input;
  }
};

inline unsigned bits_of(std::uint64_t n) {
  unsigned b = 0;
  while (b < 64 && (std::uint64_t(1) << b) < n) ++b;
  return b;
}

inline PrecisionPlan plan_precision(const System& sys, const Concrete& f, std::uint64_t n, unsigned m) {
  PrecisionPlan plan{sys.kind(), 0, m, n};
  if (sys.kind() == SystemKind::shift) return plan;
  const Pl& g = std::get<Pl>(f);
  unsigned lip = static_cast<unsigned>(std::max(0L, ceil_log2(g.lipschitz() + 1)));
  std::uint64_t base = std::uint64_t(m) + 3 + lip;
  std::uint64_t q = sys.kind() == SystemKind::doubling ? base + n : base + bits_of(n + 1);
  if (q > limits().max_precision) fail(ErrorCode::budget_exceeded, "orbit precision " + std::to_string(q) + " above cap");
  plan.input = static_cast<unsigned>(q);
  return plan;
}

namespace detail {

inline Interval pl_over(const Pl& f, const Rational& c, const Rational& rho) {
  if (sgn(rho) == 0) return Interval::point(f(c));
  if (2 * rho >= 1) return {f.min_value(), f.max_value()};
  return f.range(c - rho, c + rho);
}

// Visits S_n (n = 1..N) as enclosures, using input precision q for circle points.
template <class Visit>
void orbit_sums(const System& sys, const Concrete& f, const SpacePoint& x, std::uint64_t N, unsigned q, Visit&& visit) {
  StepBudget budget;
  if (sys.kind() == SystemKind::shift) {
    const CylFn& g = std::get<CylFn>(f);
    std::size_t d = g.depth();
    if (N + d > limits().steps) fail(ErrorCode::budget_exceeded, "orbit length");
    Word w = x.prefix(static_cast<std::size_t>(N + d));
    std::size_t mask = (std::size_t(1) << d) - 1, z = CylFn::index_of(w.substr(0, d));
    Rational s = 0;
    for (std::uint64_t k = 0; k < N; ++k) {
      budget.charge(1, "orbit sum");
      s += g.value(z);
      if (!visit(k + 1, Interval::point(s))) return;
      z = ((z << 1) | (w[k + d] == '1' ? 1u : 0u)) & mask;
    }
    return;
  }
  const Pl& g = std::get<Pl>(f);
  Interval s = Interval::point(Rational(0));
  if (sys.kind() == SystemKind::doubling) {
    bool exact = x.real().exact().has_value();
    Rational c = exact ? frac(*x.real().exact()) : frac(x.real().approx(q));
    Rational rho = exact ? Rational(0) : pow2(-static_cast<long>(q));
    for (std::uint64_t k = 0; k < N; ++k) {
      budget.charge(1, "orbit sum");
      s = s + pl_over(g, c, rho);
      if (!visit(k + 1, s)) return;
      c = frac(2 * c);
      if (sgn(rho) != 0 && rho < 1) rho *= 2;
    }
    return;
  }
  bool exact = x.real().exact().has_value();
  Rational c = exact ? frac(*x.real().exact()) : frac(x.real().approx(q));
  Rational a = frac(sys.alpha().approx(q)), unit = pow2(-static_cast<long>(q));
  Rational rho = exact ? Rational(0) : unit;
  for (std::uint64_t k = 0; k < N; ++k) {
    budget.charge(1, "orbit sum");
    s = s + pl_over(g, c, rho);
    if (!visit(k + 1, s)) return;
    c = frac(c + a);
    rho += unit;
  }
}

}  // namespace detail

// Enclosures of A_n f(x) for n = 1..N, each of width <= 2^-m where the
// observable is continuous along the orbit.
inline std::vector<Interval> birkhoff_averages(const System& sys, const Observable& obs, const SpacePoint& x,
                                               std::uint64_t N, unsigned m) {
  require(N >= 1, "n must be at least 1");
  require(x.space() == sys.space(), "point from a different space");
  Concrete f = concretize(obs, sys);
  PrecisionPlan plan = plan_precision(sys, f, N, m);
  Rational target = pow2(-static_cast<long>(m));
  Rational last_width = -1;
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<Interval> out;
    out.reserve(static_cast<std::size_t>(N));
    Rational worst = 0;
    detail::orbit_sums(sys, f, x, N, plan.input, [&](std::uint64_t n, const Interval& s) {
      Interval a = s * Rational(1, n);
      worst = qmax(worst, a.width());
      out.push_back(a);
      return true;
    });
    if (worst <= target) return out;
    if (sgn(last_width) >= 0 && 2 * worst > last_width)
      fail(ErrorCode::precision_stall, "orbit meets a discontinuity of the observable; enclosure width stuck at " +
                                           to_decimal(worst, 12));
    last_width = worst;
    unsigned extra = 16 + plan.input / 2;
    if (plan.input + extra > limits().max_precision) break;
    plan.input += extra;
  }
  fail(ErrorCode::precision_stall, "enclosure did not reach 2^-" + std::to_string(m));
}

// One pass over n = 1..N at the planned precision; visit(n, enclosure of A_n)
// returns false to stop. Returns the widest enclosure seen.
template <class Visit>
Rational birkhoff_scan(const System& sys, const Observable& obs, const SpacePoint& x, std::uint64_t N, unsigned m,
                       Visit&& visit) {
  require(N >= 1, "n must be at least 1");
  require(x.space() == sys.space(), "point from a different space");
  Concrete f = concretize(obs, sys);
  PrecisionPlan plan = plan_precision(sys, f, N, m);
  Rational worst = 0;
  detail::orbit_sums(sys, f, x, N, plan.input, [&](std::uint64_t n, const Interval& s) {
    Interval a = s * Rational(1, n);
    worst = qmax(worst, a.width());
    return visit(n, a);
  });
  return worst;
}

inline Interval birkhoff_eval(const System& sys, const Observable& f, const SpacePoint& x, std::uint64_t n, unsigned m) {
  require(n >= 1, "n must be at least 1");
  Concrete g = concretize(f, sys);
  PrecisionPlan plan = plan_precision(sys, g, n, m);
  Rational target = pow2(-static_cast<long>(m)), last = -1;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Interval s;
    detail::orbit_sums(sys, g, x, n, plan.input, [&](std::uint64_t k, const Interval& v) {
      if (k == n) s = v;
      return true;
    });
    Interval a = s * Rational(1, n);
    if (a.width() <= target) return a;
    if (sgn(last) >= 0 && 2 * a.width() > last)
      fail(ErrorCode::precision_stall, "orbit meets a discontinuity of the observable");
    last = a.width();
    unsigned extra = 16 + plan.input / 2;
    if (plan.input + extra > limits().max_precision) break;
    plan.input += extra;
  }
  fail(ErrorCode::precision_stall, "enclosure did not reach 2^-" + std::to_string(m));
}

inline Rational integral(const System& sys, const Observable& f) {
  Concrete g = concretize(f, sys);
  if (auto* p = std::get_if<Pl>(&g)) return p->integral();
  return std::get<CylFn>(g).integral(sys.p());
}

// f - integral of f
inline Concrete centered(const System& sys, const Observable& f) {
  Concrete g = concretize(f, sys);
  Rational c = integral(sys, f);
  if (auto* p = std::get_if<Pl>(&g)) return p->plus(-c);
  return std::get<CylFn>(g).plus(-c);
}

}  // namespace ergodic
