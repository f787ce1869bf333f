#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ergodic/rational.hpp"

namespace ergodic {

struct Interval {
  Rational lo, hi;

  Interval() = default;
  Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (hi < lo) fail(ErrorCode::invalid_input, "interval with lo > hi");
  }
  static Interval point(const Rational& q) { return {q, q}; }
  static Interval around(const Rational& c, const Rational& r) { return {c - r, c + r}; }

  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
  bool contains(const Rational& q) const { return lo <= q && q <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool is_point() const { return lo == hi; }
  bool operator==(const Interval&) const = default;
};

inline Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator*(const Interval& a, const Interval& b) {
  Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  Rational lo = c[0], hi = c[0];
  for (auto& x : c) {
    if (x < lo) lo = x;
    if (hi < x) hi = x;
  }
  return {lo, hi};
}

inline Interval operator*(const Rational& s, const Interval& a) {
  return sgn(s) >= 0 ? Interval{s * a.lo, s * a.hi} : Interval{s * a.hi, s * a.lo};
}
inline Interval operator*(const Interval& a, const Rational& s) { return s * a; }

inline Interval abs(const Interval& a) {
  if (sgn(a.lo) >= 0) return a;
  if (sgn(a.hi) <= 0) return -a;
  return {Rational(0), qmax(-a.lo, a.hi)};
}

inline Interval min(const Interval& a, const Interval& b) { return {qmin(a.lo, b.lo), qmin(a.hi, b.hi)}; }
inline Interval max(const Interval& a, const Interval& b) { return {qmax(a.lo, b.lo), qmax(a.hi, b.hi)}; }
inline Interval hull(const Interval& a, const Interval& b) { return {qmin(a.lo, b.lo), qmax(a.hi, b.hi)}; }

// Expression trees over {+, -, *, |.|, min, max, constants, variables}.
class Expr {
 public:
  enum class Op { var, constant, add, sub, mul, neg, abs, min, max };

  static Expr var(std::size_t i) { return Expr(std::make_shared<Node>(Node{Op::var, i, {}, {}})); }
  static Expr constant(const Rational& q) {
    return Expr(std::make_shared<Node>(Node{Op::constant, 0, q, {}}));
  }

  friend Expr operator+(const Expr& a, const Expr& b) { return bin(Op::add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return bin(Op::sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return bin(Op::mul, a, b); }
  friend Expr operator-(const Expr& a) { return un(Op::neg, a); }
  friend Expr abs(const Expr& a) { return un(Op::abs, a); }
  friend Expr min(const Expr& a, const Expr& b) { return bin(Op::min, a, b); }
  friend Expr max(const Expr& a, const Expr& b) { return bin(Op::max, a, b); }

  template <class T, class Leaf>
  T eval(const Leaf& leaf) const {
    const Node& n = *node_;
    switch (n.op) {
      case Op::var:
      case Op::constant: return leaf(n);
      case Op::add: return n.kids[0].eval<T>(leaf) + n.kids[1].eval<T>(leaf);
      case Op::sub: return n.kids[0].eval<T>(leaf) - n.kids[1].eval<T>(leaf);
      case Op::mul: return n.kids[0].eval<T>(leaf) * n.kids[1].eval<T>(leaf);
      case Op::neg: return T(-n.kids[0].eval<T>(leaf));
      case Op::abs: return abs_of(n.kids[0].eval<T>(leaf));
      case Op::min: return min_of(n.kids[0].eval<T>(leaf), n.kids[1].eval<T>(leaf));
      case Op::max: return max_of(n.kids[0].eval<T>(leaf), n.kids[1].eval<T>(leaf));
    }
    return leaf(n);
  }

  struct Node {
    Op op;
    std::size_t index;
    Rational value;
    std::vector<Expr> kids;
  };

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr bin(Op op, const Expr& a, const Expr& b) {
    return Expr(std::make_shared<Node>(Node{op, 0, {}, {a, b}}));
  }
  static Expr un(Op op, const Expr& a) { return Expr(std::make_shared<Node>(Node{op, 0, {}, {a}})); }

  static Interval abs_of(const Interval& a) { return abs(a); }
  static Rational abs_of(const Rational& a) { return qabs(a); }
  static Interval min_of(const Interval& a, const Interval& b) { return min(a, b); }
  static Rational min_of(const Rational& a, const Rational& b) { return qmin(a, b); }
  static Interval max_of(const Interval& a, const Interval& b) { return max(a, b); }
  static Rational max_of(const Rational& a, const Rational& b) { return qmax(a, b); }

  std::shared_ptr<const Node> node_;
};

inline Interval interval_eval(const Expr& e, std::span<const Interval> args) {
  return e.eval<Interval>([&](const Expr::Node& n) {
    if (n.op == Expr::Op::constant) return Interval::point(n.value);
    if (n.index >= args.size()) fail(ErrorCode::invalid_input, "expression variable out of range");
    return args[n.index];
  });
}

inline Rational exact_eval(const Expr& e, std::span<const Rational> args) {
  return e.eval<Rational>([&](const Expr::Node& n) {
    if (n.op == Expr::Op::constant) return n.value;
    if (n.index >= args.size()) fail(ErrorCode::invalid_input, "expression variable out of range");
    return args[n.index];
  });
}

}  // namespace ergodic
