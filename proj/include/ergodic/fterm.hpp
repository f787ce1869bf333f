#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "ergodic/cylinder.hpp"
#include "ergodic/pl.hpp"

namespace ergodic {

// Terms over the generators g_{s,r,eps}(x) = max(1 - max(d(x,s) - r, 0)/eps, 0)
// and the constant 1, closed under max, min and rational linear combinations.
class FTerm {
 public:
  enum class Kind { one, gen, max, min, lin };

  struct Gen {
    IdealPoint s;
    Rational r, eps;
  };

  static FTerm one() { return FTerm(std::make_shared<Node>(Node{Kind::one, {}, {}, {}})); }
  static FTerm gen(const IdealPoint& s, const Rational& r, const Rational& eps) {
    require(sgn(r) > 0, "generator radius must be positive");
    require(sgn(eps) > 0, "generator eps must be positive");
    return FTerm(std::make_shared<Node>(Node{Kind::gen, Gen{s, r, eps}, {}, {}}));
  }
  static FTerm max(const FTerm& a, const FTerm& b) { return FTerm(std::make_shared<Node>(Node{Kind::max, {}, {a, b}, {}})); }
  static FTerm min(const FTerm& a, const FTerm& b) { return FTerm(std::make_shared<Node>(Node{Kind::min, {}, {a, b}, {}})); }
  static FTerm lin(std::vector<std::pair<Rational, FTerm>> terms) {
    require(!terms.empty(), "empty linear combination");
    Node n{Kind::lin, {}, {}, {}};
    for (auto& [c, t] : terms) {
      n.coef.push_back(c);
      n.kids.push_back(t);
    }
    return FTerm(std::make_shared<Node>(std::move(n)));
  }

  Kind kind() const { return node_->kind; }
  const Gen& generator() const { return node_->g; }
  const std::vector<FTerm>& kids() const { return node_->kids; }
  const std::vector<Rational>& coefs() const { return node_->coef; }

  // |term| <= bound, with generators bounded by 1
  Rational sup_bound() const {
    switch (kind()) {
      case Kind::one:
      case Kind::gen: return Rational(1);
      case Kind::max:
      case Kind::min: return qmax(kids()[0].sup_bound(), kids()[1].sup_bound());
      case Kind::lin: {
        Rational s = 0;
        for (std::size_t i = 0; i < kids().size(); ++i) s += qabs(coefs()[i]) * kids()[i].sup_bound();
        return s;
      }
    }
    return Rational(1);
  }

  Pl to_pl() const {
    switch (kind()) {
      case Kind::one: return Pl(Rational(1));
      case Kind::gen: return circle_generator(generator());
      case Kind::max: return Pl::max(kids()[0].to_pl(), kids()[1].to_pl());
      case Kind::min: return Pl::min(kids()[0].to_pl(), kids()[1].to_pl());
      case Kind::lin: {
        Pl s(Rational(0));
        for (std::size_t i = 0; i < kids().size(); ++i) s = s + kids()[i].to_pl().scaled(coefs()[i]);
        return s;
      }
    }
    return Pl(Rational(1));
  }

  CylFn to_cyl() const {
    switch (kind()) {
      case Kind::one: return CylFn(Rational(1));
      case Kind::gen: return cantor_generator(generator());
      case Kind::max: return CylFn::max(kids()[0].to_cyl(), kids()[1].to_cyl());
      case Kind::min: return CylFn::min(kids()[0].to_cyl(), kids()[1].to_cyl());
      case Kind::lin: {
        CylFn s(Rational(0));
        for (std::size_t i = 0; i < kids().size(); ++i) s = s + kids()[i].to_cyl().scaled(coefs()[i]);
        return s;
      }
    }
    return CylFn(Rational(1));
  }

  bool operator==(const FTerm& o) const {
    if (node_ == o.node_) return true;
    if (kind() != o.kind() || kids().size() != o.kids().size() || coefs() != o.coefs()) return false;
    if (kind() == Kind::gen) {
      const Gen &a = generator(), &b = o.generator();
      return a.s == b.s && a.r == b.r && a.eps == b.eps;
    }
    for (std::size_t i = 0; i < kids().size(); ++i)
      if (!(kids()[i] == o.kids()[i])) return false;
    return true;
  }

  static Rational profile(const Rational& d, const Rational& r, const Rational& eps) {
    Rational excess = qmax(Rational(d - r), Rational(0));
    return qmax(Rational(1 - excess / eps), Rational(0));
  }

  static Pl circle_generator(const Gen& g) {
    require(g.s.space == SpaceKind::circle, "generator center from the wrong space");
    Rational half(1, 2);
    const Rational& a = qmin(g.r, half);
    const Rational& b = qmin(Rational(g.r + g.eps), half);
    std::vector<Rational> t{Rational(0), a, b, half, Rational(1 - b), Rational(1 - a)};
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.back() == 1) t.pop_back();
    std::vector<Rational> v;
    for (auto& u : t) v.push_back(profile(qmin(u, Rational(1 - u)), g.r, g.eps));
    std::vector<Rational> left(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) left[i] = v[i];  // continuous
    Pl centered = Pl::from_nodes(t, v, left);
    return centered.compose_rotation(-g.s.x);
  }

  static CylFn cantor_generator(const Gen& g) {
    require(g.s.space == SpaceKind::cantor, "generator center from the wrong space");
    std::size_t k = cylinder_depth(g.r);
    if (k >= 62 || (std::size_t(1) << k) > limits().cylinders) fail(ErrorCode::budget_exceeded, "generator depth");
    std::vector<Rational> t(std::size_t(1) << k);
    for (std::size_t z = 0; z < t.size(); ++z) {
      Word w = CylFn::word_of(z, k);
      auto i = first_difference(w, g.s.w.substr(0, std::min(k, g.s.w.size())));
      t[z] = i ? profile(pow2(-static_cast<long>(*i)), g.r, g.eps) : Rational(1);
    }
    return CylFn(k, std::move(t));
  }

 private:
  struct Node {
    Kind kind;
    Gen g;
    std::vector<FTerm> kids;
    std::vector<Rational> coef;
  };
  explicit FTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

using Observable = std::variant<Pl, CylFn, FTerm>;
using Concrete = std::variant<Pl, CylFn>;

inline Concrete concretize(const Observable& f, SpaceKind s) {
  if (auto* t = std::get_if<FTerm>(&f)) {
    if (s == SpaceKind::circle) return t->to_pl();
    return t->to_cyl();
  }
  if (auto* p = std::get_if<Pl>(&f)) {
    if (s != SpaceKind::circle) fail(ErrorCode::unsupported_pair, "piecewise-linear observable on Cantor space");
    return *p;
  }
  if (s != SpaceKind::cantor) fail(ErrorCode::unsupported_pair, "cylinder observable on the circle");
  return std::get<CylFn>(f);
}

inline Rational sup_norm_bound(const Observable& f) {
  if (auto* p = std::get_if<Pl>(&f)) return p->sup_abs();
  if (auto* c = std::get_if<CylFn>(&f)) return c->sup_abs();
  return std::get<FTerm>(f).sup_bound();
}

inline Rational sup_norm(const Concrete& f) {
  return std::visit([](auto& g) { return g.sup_abs(); }, f);
}

inline Observable truncate(const Observable& f, const Rational& M) {
  require(sgn(M) > 0, "truncation level must be positive");
  if (auto* p = std::get_if<Pl>(&f)) return p->truncated(M);
  if (auto* c = std::get_if<CylFn>(&f)) return c->truncated(M);
  fail(ErrorCode::unsupported_pair, "truncate expects a piecewise-linear or cylinder observable");
}

namespace detail {

// rationals in (0,1) in ideal-point order
inline Rational unit_rational(const Integer& k) {
  Integer seen = -1;
  for (Integer z = 1;; ++z) {
    auto p = point_from_index(SpaceKind::circle, z);
    if (p && sgn(p->x) > 0 && ++seen == k) return p->x;
  }
}

inline IdealPoint nth_point(SpaceKind s, const Integer& k) {
  if (s == SpaceKind::cantor) return *point_from_index(s, k);
  Integer seen = -1;
  for (Integer z = 0;; ++z)
    if (auto p = point_from_index(s, z); p && ++seen == k) return *p;
}

// all rationals, signs alternating
inline Rational signed_rational(const Integer& k) {
  Integer mag = k / 2;
  auto [a, b] = cantor_unpair(mag);
  Rational q = rat(a, b + 1);
  return (k % 2 == 0) ? q : Rational(-q);
}

}  // namespace detail

// The n-th generator: s over ideal points, r over radii that give non-constant
// generators (rationals in (0,1/2) on the circle, canonical radii below the
// diameter on Cantor space), eps over all positive rationals.
inline FTerm nth_generator(SpaceKind s, const Integer& n) {
  auto [a, rest] = cantor_unpair(n);
  auto [b, c] = cantor_unpair(rest);
  IdealPoint pt = detail::nth_point(s, a);
  Rational r = s == SpaceKind::circle ? Rational(detail::unit_rational(b) / 2)
                                      : canonical_cantor_radius(to_u64(b, "radius index") + 1);
  Rational eps = *radius_from_index(SpaceKind::circle, [&] {
    Integer seen = -1;
    for (Integer z = 0;; ++z)
      if (radius_from_index(SpaceKind::circle, z) && ++seen == c) return z;
  }());
  return FTerm::gen(pt, r, eps);
}

// Position 0 is the constant 1; odd positions run through the generators;
// even positions 2z+2 decode z into an operation on two earlier positions
// (components of z never exceed z, so the operands always precede it).
inline std::vector<FTerm> enumerate_F(SpaceKind s, std::size_t G) {
  require(G >= 1, "count must be at least 1");
  std::vector<FTerm> out{FTerm::one()};
  for (std::size_t t = 1; t < G; ++t) {
    if (t % 2 == 1) {
      out.push_back(nth_generator(s, Integer(static_cast<unsigned long>((t - 1) / 2))));
      continue;
    }
    Integer z(static_cast<unsigned long>((t - 2) / 2));
    Integer op = z % 3, rest = z / 3;
    auto [i, r2] = cantor_unpair(rest);
    auto [j, coef] = cantor_unpair(r2);
    const FTerm& a = out[mpz_get_ui(i.get_mpz_t())];
    const FTerm& b = out[mpz_get_ui(j.get_mpz_t())];
    if (op == 0) out.push_back(FTerm::max(a, b));
    else if (op == 1) out.push_back(FTerm::min(a, b));
    else {
      auto [c1, c2] = cantor_unpair(coef);
      out.push_back(FTerm::lin({{detail::signed_rational(c1), a}, {detail::signed_rational(c2), b}}));
    }
  }
  return out;
}

}  // namespace ergodic
