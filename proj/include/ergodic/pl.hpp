#pragma once

#include <algorithm>
#include <vector>

#include "ergodic/sets.hpp"

namespace ergodic {

// Piecewise-linear function on the circle [0,1). Segment i covers
// [x[i], x[i+1]) with value l[i] at x[i] and limit r[i] at x[i+1]-.
// x.front() == 0, x.back() == 1.
class Pl {
 public:
  Pl() : Pl(Rational(0)) {}
  explicit Pl(const Rational& c) : x_{Rational(0), Rational(1)}, l_{c}, r_{c} {}

  Pl(std::vector<Rational> x, std::vector<Rational> l, std::vector<Rational> r)
      : x_(std::move(x)), l_(std::move(l)), r_(std::move(r)) {
    require(x_.size() >= 2 && l_.size() + 1 == x_.size() && r_.size() == l_.size(), "malformed piecewise-linear data");
    require(sgn(x_.front()) == 0 && x_.back() == 1, "breakpoints must span [0,1]");
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) require(x_[i] < x_[i + 1], "breakpoints must increase");
  }

  // nodes (b_i, v_i) with b sorted in [0,1); left_limits[i] is the limit of f at
  // b_i from the left (at b_0 that means the limit at the wraparound).
  static Pl from_nodes(const std::vector<Rational>& b, const std::vector<Rational>& v,
                       const std::vector<Rational>& left_limits) {
    require(!b.empty(), "breakpoints: need at least one");
    require(v.size() == b.size(), "values: one per breakpoint");
    require(left_limits.size() == b.size(), "left_limits: one per breakpoint");
    for (std::size_t i = 0; i < b.size(); ++i) {
      require(sgn(b[i]) >= 0 && b[i] < 1, "breakpoints: must lie in [0,1)");
      if (i) require(b[i - 1] < b[i], "breakpoints: must increase strictly");
    }
    std::size_t k = b.size();
    std::vector<Rational> x, l, r;
    // wrap segment from b_{k-1} to b_0 + 1
    const Rational& wa = b[k - 1];
    Rational wb = b[0] + 1;
    auto wrap_at = [&](const Rational& t) -> Rational { return v[k - 1] + (left_limits[0] - v[k - 1]) * (t - wa) / (wb - wa); };
    if (sgn(b[0]) > 0) {
      x.push_back(0);
      l.push_back(wrap_at(Rational(1)));
      r.push_back(left_limits[0]);
    }
    for (std::size_t i = 0; i < k; ++i) {
      x.push_back(b[i]);
      l.push_back(v[i]);
      r.push_back(i + 1 < k ? left_limits[i + 1] : (sgn(b[0]) > 0 ? wrap_at(Rational(1)) : left_limits[0]));
    }
    x.push_back(1);
    return Pl(std::move(x), std::move(l), std::move(r));
  }

  const std::vector<Rational>& xs() const { return x_; }
  const std::vector<Rational>& lefts() const { return l_; }
  const std::vector<Rational>& rights() const { return r_; }
  std::size_t pieces() const { return l_.size(); }

  // linear extension of segment i at t in [x_i, x_{i+1}]
  Rational at(std::size_t i, const Rational& t) const {
    if (t == x_[i]) return l_[i];
    if (t == x_[i + 1]) return r_[i];
    return l_[i] + (r_[i] - l_[i]) * (t - x_[i]) / (x_[i + 1] - x_[i]);
  }

  std::size_t segment_of(const Rational& t) const {  // x_i <= t < x_{i+1}
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
  }

  Rational operator()(const Rational& t0) const {
    Rational t = frac(t0);
    return at(segment_of(t), t);
  }

  // limit from the left; t in (0,1], with t = 0 read as 1
  Rational left_limit(const Rational& t0) const {
    Rational t = frac(t0);
    if (sgn(t) == 0) t = 1;
    auto it = std::lower_bound(x_.begin(), x_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    return at(i, t);
  }

  // enclosure of f over the closed arc [lo, hi], hi - lo < 1
  Interval range(const Rational& lo0, const Rational& hi0) const {
    Rational lo = frac(lo0), hi = lo + (hi0 - lo0);
    if (hi > 1) return hull(range_in(lo, Rational(1)), range_in(Rational(0), hi - 1));
    if (hi == 1) return hull(range_in(lo, hi), Interval::point(l_[0]));
    return range_in(lo, hi);
  }

  bool continuous() const {
    for (std::size_t i = 0; i < l_.size(); ++i)
      if (r_[i] != l_[(i + 1) % l_.size()]) return false;
    return true;
  }

  Rational integral() const {
    Rational s = 0;
    for (std::size_t i = 0; i < l_.size(); ++i) s += (l_[i] + r_[i]) * (x_[i + 1] - x_[i]);
    return s / 2;
  }

  Rational integral_abs() const {
    Rational s = 0;
    for (std::size_t i = 0; i < l_.size(); ++i) {
      const Rational &a = l_[i], &b = r_[i];
      Rational len = x_[i + 1] - x_[i];
      if (sgn(a) * sgn(b) >= 0) {
        s += qabs(a + b) * len / 2;
      } else {  // crosses zero: two triangles
        s += (a * a + b * b) / (qabs(a) + qabs(b)) * len / 2;
      }
    }
    return s;
  }

  Rational integral_sq() const {
    Rational s = 0;
    for (std::size_t i = 0; i < l_.size(); ++i)
      s += (l_[i] * l_[i] + l_[i] * r_[i] + r_[i] * r_[i]) * (x_[i + 1] - x_[i]);
    return s / 3;
  }

  Rational sup_abs() const {
    Rational m = 0;
    for (std::size_t i = 0; i < l_.size(); ++i) m = qmax(m, qmax(qabs(l_[i]), qabs(r_[i])));
    return m;
  }
  Rational max_value() const {
    Rational m = l_[0];
    for (std::size_t i = 0; i < l_.size(); ++i) m = qmax(m, qmax(l_[i], r_[i]));
    return m;
  }
  Rational min_value() const {
    Rational m = l_[0];
    for (std::size_t i = 0; i < l_.size(); ++i) m = qmin(m, qmin(l_[i], r_[i]));
    return m;
  }

  Rational lipschitz() const {
    Rational m = 0;
    for (std::size_t i = 0; i < l_.size(); ++i) m = qmax(m, qabs(r_[i] - l_[i]) / (x_[i + 1] - x_[i]));
    return m;
  }

  // sum of absolute jumps, wraparound included
  Rational jump_total() const {
    Rational s = 0;
    for (std::size_t i = 0; i < l_.size(); ++i) s += qabs(l_[(i + 1) % l_.size()] - r_[i]);
    return s;
  }

  // breakpoints carrying a jump
  std::vector<Rational> jump_points() const {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < l_.size(); ++i)
      if (l_[(i + 1) % l_.size()] != r_[i]) out.push_back(i + 1 < l_.size() ? x_[i + 1] : Rational(0));
    return out;
  }

  Rational total_variation() const {
    Rational s = jump_total();
    for (std::size_t i = 0; i < l_.size(); ++i) s += qabs(r_[i] - l_[i]);
    return s;
  }

  Pl operator-() const { return scaled(Rational(-1)); }

  Pl scaled(const Rational& c) const {
    Pl g = *this;
    for (auto& v : g.l_) v *= c;
    for (auto& v : g.r_) v *= c;
    return g;
  }

  Pl plus(const Rational& c) const {
    Pl g = *this;
    for (auto& v : g.l_) v += c;
    for (auto& v : g.r_) v += c;
    return g;
  }

  friend Pl operator+(const Pl& f, const Pl& g) {
    return combine(f, g, [](const Rational& a, const Rational& b) { return Rational(a + b); });
  }
  friend Pl operator-(const Pl& f, const Pl& g) {
    return combine(f, g, [](const Rational& a, const Rational& b) { return Rational(a - b); });
  }

  static Pl max(const Pl& f, const Pl& g) { return extremum(f, g, true); }
  static Pl min(const Pl& f, const Pl& g) { return extremum(f, g, false); }

  // min(f, M) where f >= 0 and max(f, -M) where f <= 0
  Pl truncated(const Rational& M) const { return min(max(*this, Pl(-M)), Pl(M)); }

  // x -> f(2x mod 1)
  Pl compose_doubling() const {
    std::size_t k = l_.size();
    std::vector<Rational> x, l, r;
    x.reserve(2 * k + 1);
    for (int half = 0; half < 2; ++half)
      for (std::size_t i = 0; i < k; ++i) {
        x.push_back((x_[i] + half) / 2);
        l.push_back(l_[i]);
        r.push_back(r_[i]);
      }
    x.push_back(1);
    return Pl(std::move(x), std::move(l), std::move(r));
  }

  // x -> f(x + beta mod 1)
  Pl compose_rotation(const Rational& beta0) const {
    Rational beta = frac(beta0);
    if (sgn(beta) == 0) return *this;
    std::vector<Rational> cuts;
    cuts.reserve(x_.size() + 1);
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) cuts.push_back(frac(x_[i] - beta));
    cuts.push_back(Rational(0));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(1);
    std::vector<Rational> l, r;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      Rational a = frac(cuts[j] + beta);
      std::size_t i = segment_of(a);
      l.push_back(at(i, a));
      r.push_back(at(i, a + (cuts[j + 1] - cuts[j])));
    }
    return Pl(std::move(cuts), std::move(l), std::move(r));
  }

  // y -> (f(y/2) + f((y+1)/2)) / 2, the transfer operator of the doubling map
  Pl transfer_doubling() const {
    std::vector<Rational> cuts;
    for (auto& t : x_) cuts.push_back(frac(2 * t));
    cuts.push_back(0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(1);
    std::vector<Rational> l, r;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      Rational a = cuts[j], b = cuts[j + 1];
      Rational s0 = 0, s1 = 0;
      for (int half = 0; half < 2; ++half) {
        Rational pa = (a + half) / 2, pb = (b + half) / 2;
        std::size_t i = segment_of(pa);
        s0 += at(i, pa);
        s1 += at(i, pb);
      }
      l.push_back(s0 / 2);
      r.push_back(s1 / 2);
    }
    return Pl(std::move(cuts), std::move(l), std::move(r));
  }

  friend Rational integral_product(const Pl& f, const Pl& g) {
    Rational s = 0;
    walk(f, g, [&](const Rational& a, const Rational& b, std::size_t i, std::size_t j) {
      Rational a0 = f.at(i, a), a1 = f.at(i, b) - a0;
      Rational b0 = g.at(j, a), b1 = g.at(j, b) - b0;
      s += (b - a) * (a0 * b0 + (a0 * b1 + a1 * b0) / 2 + a1 * b1 / 3);
    });
    return s;
  }

  // Interior of {x : lo < f(x) < hi} (strict) or of {x : lo <= f(x) <= hi}.
  ArcSet band(const Rational& lo, const Rational& hi, bool strict) const;

  bool operator==(const Pl& o) const { return x_ == o.x_ && l_ == o.l_ && r_ == o.r_; }

 private:
  Interval range_in(const Rational& a, const Rational& b) const {  // 0 <= a <= b <= 1
    std::size_t i = a == 1 ? l_.size() - 1 : segment_of(a);
    Interval out = Interval::point(at(i, a));
    for (; i < l_.size(); ++i) {
      const Rational& s = qmax(a, x_[i]);
      const Rational& e = qmin(b, x_[i + 1]);
      out = hull(out, hull(Interval::point(at(i, s)), Interval::point(at(i, e))));
      if (x_[i + 1] >= b) break;
    }
    if (b < 1) out = hull(out, Interval::point((*this)(b)));
    return out;
  }

  template <class F>
  static void walk(const Pl& f, const Pl& g, F&& visit) {
    std::size_t i = 0, j = 0;
    Rational a = 0;
    while (i < f.l_.size() && j < g.l_.size()) {
      const Rational& b = qmin(f.x_[i + 1], g.x_[j + 1]);
      visit(a, b, i, j);
      a = b;
      if (f.x_[i + 1] == b) ++i;
      if (g.x_[j + 1] == b) ++j;
    }
  }

  template <class Op>
  static Pl combine(const Pl& f, const Pl& g, Op op) {
    std::vector<Rational> x{Rational(0)}, l, r;
    x.reserve(f.x_.size() + g.x_.size());
    walk(f, g, [&](const Rational& a, const Rational& b, std::size_t i, std::size_t j) {
      l.push_back(op(f.at(i, a), g.at(j, a)));
      r.push_back(op(f.at(i, b), g.at(j, b)));
      x.push_back(b);
    });
    return Pl(std::move(x), std::move(l), std::move(r));
  }

  static Pl extremum(const Pl& f, const Pl& g, bool take_max) {
    std::vector<Rational> x{Rational(0)}, l, r;
    auto pick = [&](const Rational& u, const Rational& v) { return take_max ? qmax(u, v) : qmin(u, v); };
    walk(f, g, [&](const Rational& a, const Rational& b, std::size_t i, std::size_t j) {
      Rational fa = f.at(i, a), fb = f.at(i, b), ga = g.at(j, a), gb = g.at(j, b);
      Rational da = fa - ga, db = fb - gb;
      if (sgn(da) * sgn(db) < 0) {
        Rational c = a + (b - a) * da / (da - db);
        Rational vc = f.at(i, c);
        l.push_back(pick(fa, ga));
        r.push_back(vc);
        x.push_back(c);
        l.push_back(vc);
        r.push_back(pick(fb, gb));
        x.push_back(b);
      } else {
        l.push_back(pick(fa, ga));
        r.push_back(pick(fb, gb));
        x.push_back(b);
      }
    });
    return Pl(std::move(x), std::move(l), std::move(r));
  }

  std::vector<Rational> x_, l_, r_;
};

namespace detail {

// Solution of lo < g < hi (or <=) for g linear on [s0, s1] with g(s0)=a, g(s1)=b.
struct Piece {
  Rational s, e;
  bool s_in, e_in;
  bool empty;
};

inline Piece solve_band(const Rational& s0, const Rational& s1, const Rational& a, const Rational& b,
                        const Rational& lo, const Rational& hi, bool strict) {
  auto ok = [&](const Rational& v) { return strict ? (lo < v && v < hi) : (lo <= v && v <= hi); };
  auto g = [&](const Rational& t) -> Rational { return a + (b - a) * (t - s0) / (s1 - s0); };
  Piece p{s0, s1, false, false, true};
  if (a == b) {
    if (ok(a)) p = {s0, s1, true, true, false};
    return p;
  }
  // parameter where g hits a level
  auto hit = [&](const Rational& level) -> Rational { return s0 + (s1 - s0) * (level - a) / (b - a); };
  Rational t_lo = hit(lo), t_hi = hit(hi);
  Rational u = qmin(t_lo, t_hi), w = qmax(t_lo, t_hi);
  Rational s = qmax(u, s0), e = qmin(w, s1);
  if (e < s) return p;
  p.s = s;
  p.e = e;
  p.s_in = ok(g(s));
  p.e_in = ok(g(e));
  p.empty = (s == e) && !p.s_in;
  return p;
}

inline ArcSet arcs_from_pieces(const std::vector<Rational>& x, const std::vector<Piece>& pieces) {
  // Each nondegenerate piece contributes its open interval; a breakpoint joins two
  // neighbouring pieces when both contain it and are nondegenerate near it.
  std::vector<ArcSet::Span> spans;
  bool open_run = false;
  std::size_t k = pieces.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Piece& p = pieces[i];
    bool nondeg = !p.empty && p.s < p.e;
    if (!nondeg) {
      open_run = false;
      continue;
    }
    bool joins = open_run && p.s == x[i] && p.s_in && spans.back().b == x[i];
    if (joins) spans.back().b = p.e;
    else spans.push_back({p.s, p.e});
    open_run = (p.e == x[i + 1] && p.e_in);
  }
  bool wrap = false;
  if (!spans.empty() && sgn(spans.front().a) == 0 && spans.back().b == 1) {
    const Piece& first = pieces.front();
    const Piece& last = pieces.back();
    wrap = first.s_in && first.s == x[0] && last.e_in && last.e == x[k];
  }
  return ArcSet::from_spans(std::move(spans), wrap);
}

}  // namespace detail

inline ArcSet Pl::band(const Rational& lo, const Rational& hi, bool strict) const {
  std::vector<detail::Piece> pieces;
  pieces.reserve(l_.size());
  for (std::size_t i = 0; i < l_.size(); ++i)
    pieces.push_back(detail::solve_band(x_[i], x_[i + 1], l_[i], r_[i], lo, hi, strict));
  return detail::arcs_from_pieces(x_, pieces);
}

}  // namespace ergodic
