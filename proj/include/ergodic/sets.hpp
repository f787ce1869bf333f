#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "ergodic/space.hpp"

namespace ergodic {

// A finite union of open arcs of the circle, kept in a normal form: sorted,
// pairwise disjoint open intervals (a, b) with 0 <= a < b <= 1, plus a flag
// recording whether the point 0 = 1 belongs to the set (then the first
// interval starts at 0 and the last ends at 1, and the two join into one arc).
class ArcSet {
 public:
  struct Span {
    Rational a, b;
  };

  static ArcSet empty() { return {}; }
  static ArcSet whole() {
    ArcSet s;
    s.spans_.push_back({Rational(0), Rational(1)});
    s.wrap_ = true;
    return s;
  }

  // the open arc (lo, hi) of the real line projected to the circle
  static ArcSet lifted(const Rational& lo, const Rational& hi) {
    ArcSet s;
    if (!(lo < hi)) return s;
    if (hi - lo > 1) return whole();
    Rational l = frac(lo), h = l + (hi - lo);
    if (h <= 1) {
      s.spans_.push_back({l, h});
    } else {
      s.spans_.push_back({Rational(0), h - 1});
      s.spans_.push_back({l, Rational(1)});
      s.wrap_ = true;
    }
    return s;
  }

  // trusted normal-form constructor
  static ArcSet from_spans(std::vector<Span> spans, bool wrap) {
    ArcSet s;
    s.spans_ = std::move(spans);
    s.wrap_ = wrap && !s.spans_.empty();
    return s;
  }

  static ArcSet ball(const IdealBall& b) { return lifted(b.center.x - b.radius, b.center.x + b.radius); }

  const std::vector<Span>& spans() const { return spans_; }
  bool wraps() const { return wrap_; }
  bool is_empty() const { return spans_.empty(); }
  bool is_whole() const { return wrap_ && spans_.size() == 1; }

  Rational measure() const {
    Rational m = 0;
    for (auto& s : spans_) m += s.b - s.a;
    return m;
  }

  bool contains(const Rational& x0) const {
    Rational x = frac(x0);
    if (sgn(x) == 0 && wrap_) return true;
    auto it = std::upper_bound(spans_.begin(), spans_.end(), x,
                               [](const Rational& v, const Span& s) { return v < s.b; });
    return it != spans_.end() && it->a < x;
  }

  // maximal arcs as lifted open intervals (lo, hi), lo in [0,1)
  std::vector<Span> components() const {
    std::vector<Span> out;
    if (spans_.empty()) return out;
    if (!wrap_) return spans_;
    if (spans_.size() == 1) return {{Rational(0), Rational(2)}};  // whole circle marker
    for (std::size_t i = 1; i + 1 < spans_.size(); ++i) out.push_back(spans_[i]);
    out.push_back({spans_.back().a, spans_.front().b + 1});
    return out;
  }

  // is the closed arc [lo, hi] (lifted, hi - lo < 1) inside the set?
  bool contains_closed(const Rational& lo0, const Rational& hi0) const {
    if (is_whole()) return true;
    Rational lo = frac(lo0), hi = lo + (hi0 - lo0);
    for (auto& c : components()) {
      if (c.a < lo && hi < c.b) return true;
      if (c.a < lo + 1 && hi + 1 < c.b) return true;
    }
    return false;
  }

  bool contains_closed_ball(const IdealBall& b) const {
    return contains_closed(b.center.x - b.radius, b.center.x + b.radius);
  }

  std::vector<IdealBall> to_balls() const {
    std::vector<IdealBall> out;
    if (is_whole()) return {whole_space_ball(SpaceKind::circle)};
    for (auto& c : components())
      out.push_back({IdealPoint::circle(frac((c.a + c.b) / 2)), Rational((c.b - c.a) / 2)});
    return out;
  }

  friend ArcSet operator|(const ArcSet& x, const ArcSet& y) {
    std::vector<Span> all = x.spans_;
    all.insert(all.end(), y.spans_.begin(), y.spans_.end());
    std::sort(all.begin(), all.end(), [](const Span& p, const Span& q) { return p.a < q.a; });
    ArcSet s;
    for (auto& sp : all) {
      if (!s.spans_.empty() && sp.a < s.spans_.back().b) {
        if (s.spans_.back().b < sp.b) s.spans_.back().b = sp.b;
      } else {
        s.spans_.push_back(sp);
      }
    }
    s.wrap_ = x.wrap_ || y.wrap_;
    return s;
  }

  friend ArcSet operator&(const ArcSet& x, const ArcSet& y) {
    ArcSet s;
    std::size_t i = 0, j = 0;
    while (i < x.spans_.size() && j < y.spans_.size()) {
      const Span& p = x.spans_[i];
      const Span& q = y.spans_[j];
      const Rational& a = qmax(p.a, q.a);
      const Rational& b = qmin(p.b, q.b);
      if (a < b) s.spans_.push_back({a, b});
      if (p.b < q.b) ++i;
      else ++j;
    }
    s.wrap_ = x.wrap_ && y.wrap_;
    return s;
  }

  // {x : x + t in S}
  ArcSet translated_preimage(const Rational& t) const {
    if (is_whole() || is_empty()) return *this;
    ArcSet s;
    for (auto& c : components()) s = s | lifted(c.a - t, c.b - t);
    return s;
  }

  // {x : 2x mod 1 in S}
  ArcSet doubling_preimage() const {
    if (is_whole() || is_empty()) return *this;
    ArcSet s;
    for (auto& c : components())
      s = s | lifted(c.a / 2, c.b / 2) | lifted((c.a + 1) / 2, (c.b + 1) / 2);
    return s;
  }

  bool operator==(const ArcSet& o) const {
    if (wrap_ != o.wrap_ || spans_.size() != o.spans_.size()) return false;
    for (std::size_t i = 0; i < spans_.size(); ++i)
      if (spans_[i].a != o.spans_[i].a || spans_[i].b != o.spans_[i].b) return false;
    return true;
  }

 private:
  std::vector<Span> spans_;
  bool wrap_ = false;
};

inline Rational word_measure(const Word& w, const Rational& p) {
  Rational m = 1, q = 1 - p;
  for (char c : w) m *= (c == '1' ? p : q);
  return m;
}

// A finite union of cylinders as a sorted prefix-free list of words.
class CylinderSet {
 public:
  static CylinderSet empty() { return {}; }
  static CylinderSet whole() {
    CylinderSet s;
    s.words_.push_back("");
    return s;
  }
  static CylinderSet cylinder(const Word& w) {
    CylinderSet s;
    s.words_.push_back(w);
    return s;
  }
  static CylinderSet ball(const IdealBall& b) { return cylinder(cylinder_word(b)); }

  static CylinderSet from_words(std::vector<Word> ws) {
    std::sort(ws.begin(), ws.end());
    CylinderSet s;
    for (auto& w : ws) {
      if (!s.words_.empty() && w.compare(0, s.words_.back().size(), s.words_.back()) == 0) continue;
      s.words_.push_back(std::move(w));
    }
    s.compress();
    return s;
  }

  const std::vector<Word>& words() const { return words_; }
  bool is_empty() const { return words_.empty(); }
  bool is_whole() const { return words_.size() == 1 && words_[0].empty(); }

  Rational measure(const Rational& p) const {
    Rational m = 0;
    for (auto& w : words_) m += word_measure(w, p);
    return m;
  }

  // is the cylinder [v] inside the set?
  bool contains_cylinder(const Word& v) const {
    auto it = std::upper_bound(words_.begin(), words_.end(), v);
    if (it == words_.begin()) return false;
    --it;
    return v.compare(0, it->size(), *it) == 0;
  }

  // is the point (given by a long enough prefix) inside?
  std::optional<Word> witness(const Word& prefix) const {
    for (auto& w : words_)
      if (w.size() <= prefix.size() && prefix.compare(0, w.size(), w) == 0) return w;
    return std::nullopt;
  }

  std::vector<IdealBall> to_balls() const {
    std::vector<IdealBall> out;
    for (auto& w : words_) out.push_back({IdealPoint::cantor(w), canonical_cantor_radius(w.size())});
    return out;
  }

  friend CylinderSet operator|(const CylinderSet& x, const CylinderSet& y) {
    std::vector<Word> all = x.words_;
    all.insert(all.end(), y.words_.begin(), y.words_.end());
    return from_words(std::move(all));
  }

  friend CylinderSet operator&(const CylinderSet& x, const CylinderSet& y) {
    CylinderSet s;
    std::size_t i = 0, j = 0;
    while (i < x.words_.size() && j < y.words_.size()) {
      const Word& a = x.words_[i];
      const Word& b = y.words_[j];
      if (b.compare(0, a.size(), a) == 0) {
        s.words_.push_back(b);
        ++j;
      } else if (a.compare(0, b.size(), b) == 0) {
        s.words_.push_back(a);
        ++i;
      } else if (a < b) {
        ++i;
      } else {
        ++j;
      }
    }
    s.compress();
    return s;
  }

  // {x : shift(x) in S}
  CylinderSet shift_preimage() const {
    std::vector<Word> ws;
    for (auto& w : words_) {
      ws.push_back("0" + w);
      ws.push_back("1" + w);
    }
    return from_words(std::move(ws));
  }

  bool operator==(const CylinderSet&) const = default;

 private:
  // replace sibling pairs w0, w1 by w
  void compress() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<Word> out;
      for (std::size_t i = 0; i < words_.size(); ++i) {
        const Word& w = words_[i];
        if (i + 1 < words_.size() && !w.empty() && w.back() == '0') {
          const Word& v = words_[i + 1];
          if (v.size() == w.size() && v.back() == '1' && v.compare(0, w.size() - 1, w, 0, w.size() - 1) == 0) {
            out.push_back(w.substr(0, w.size() - 1));
            ++i;
            changed = true;
            continue;
          }
        }
        out.push_back(w);
      }
      words_ = std::move(out);
    }
  }

  std::vector<Word> words_;
};

// union of balls in one space, in normal form
using ExactSet = std::variant<ArcSet, CylinderSet>;

inline ExactSet exact_set_of(SpaceKind s, const std::vector<IdealBall>& balls) {
  if (s == SpaceKind::circle) {
    ArcSet a;
    for (auto& b : balls) a = a | ArcSet::ball(b);
    return a;
  }
  std::vector<Word> ws;
  for (auto& b : balls) ws.push_back(cylinder_word(b));
  return CylinderSet::from_words(std::move(ws));
}

inline ExactSet whole_set(SpaceKind s) {
  if (s == SpaceKind::circle) return ArcSet::whole();
  return CylinderSet::whole();
}

inline ExactSet intersect(const ExactSet& a, const ExactSet& b) {
  if (a.index() != b.index()) fail(ErrorCode::invalid_input, "sets from different spaces");
  if (a.index() == 0) return std::get<ArcSet>(a) & std::get<ArcSet>(b);
  return std::get<CylinderSet>(a) & std::get<CylinderSet>(b);
}

inline std::vector<IdealBall> balls_of(const ExactSet& s) {
  return std::visit([](auto& x) { return x.to_balls(); }, s);
}

}  // namespace ergodic
