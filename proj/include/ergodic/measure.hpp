#pragma once

#include <optional>
#include <vector>

#include "ergodic/point.hpp"

namespace ergodic {

struct Atom {
  IdealPoint point;
  Rational weight;
};

class IdealMeasure {
 public:
  IdealMeasure(SpaceKind s, std::vector<Atom> atoms) : space_(s), atoms_(std::move(atoms)) {
    Rational total = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      require(atoms_[i].point.space == s, "atom from a different space");
      require(sgn(atoms_[i].weight) > 0, "atom weights must be positive");
      for (std::size_t j = 0; j < i; ++j) require(!(atoms_[i].point == atoms_[j].point), "repeated atom point");
      total += atoms_[i].weight;
    }
    require(total == 1, "atom weights must sum to 1, got " + to_string(total));
  }

  static IdealMeasure dirac(const IdealPoint& p) { return IdealMeasure(p.space, {{p, Rational(1)}}); }

  SpaceKind space() const { return space_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  SpaceKind space_;
  std::vector<Atom> atoms_;
};

enum class MeasureTag { lebesgue, bernoulli };

// Instances with exact oracles: Lebesgue on the circle, Bernoulli(p) on Cantor
// space with p the probability of a 1.
class ComputableMeasure {
 public:
  static ComputableMeasure lebesgue() { return ComputableMeasure(MeasureTag::lebesgue, Rational(0)); }
  static ComputableMeasure bernoulli(const Rational& p) {
    require(sgn(p) >= 0 && p <= 1, "Bernoulli parameter outside [0,1]");
    return ComputableMeasure(MeasureTag::bernoulli, p);
  }

  MeasureTag tag() const { return tag_; }
  const Rational& p() const { return p_; }
  SpaceKind space() const { return tag_ == MeasureTag::lebesgue ? SpaceKind::circle : SpaceKind::cantor; }

  // an ideal measure within W1 distance 2^-m
  IdealMeasure oracle(unsigned m) const {
    std::uint64_t n = std::uint64_t(1) << std::min(m + 1, 62u);
    if (m + 1 > 62 || n > limits().cylinders) fail(ErrorCode::budget_exceeded, "measure oracle atom count");
    std::vector<Atom> atoms;
    if (tag_ == MeasureTag::lebesgue) {
      Rational w(1, n);
      for (std::uint64_t i = 0; i < n; ++i)
        atoms.push_back({IdealPoint::circle(Rational(2 * i + 1, 2 * n)), w});
      return IdealMeasure(SpaceKind::circle, std::move(atoms));
    }
    for (std::uint64_t i = 0; i < n; ++i) {
      Word w(m + 1, '0');
      for (unsigned b = 0; b <= m; ++b) w[b] = ((i >> (m - b)) & 1) ? '1' : '0';
      Rational wt = word_measure(w, p_);
      if (sgn(wt) > 0) atoms.push_back({IdealPoint::cantor(w), wt});
    }
    return IdealMeasure(SpaceKind::cantor, std::move(atoms));
  }

  Rational measure(const ExactSet& s) const {
    if (tag_ == MeasureTag::lebesgue) return std::get<ArcSet>(s).measure();
    return std::get<CylinderSet>(s).measure(p_);
  }

 private:
  ComputableMeasure(MeasureTag t, Rational p) : tag_(t), p_(std::move(p)) {}
  MeasureTag tag_;
  Rational p_;
};

inline Rational measure_of_finite_union(const std::optional<ComputableMeasure>& mu, const std::vector<IdealBall>& balls) {
  if (!mu) fail(ErrorCode::unsupported_instance, "no exact measure oracle for this instance");
  for (auto& b : balls) require(b.center.space == mu->space(), "ball from a different space");
  return mu->measure(exact_set_of(mu->space(), balls));
}

inline Rational open_measure_lower(const std::optional<ComputableMeasure>& mu, const EffectiveOpen& U, std::uint64_t k) {
  if (!mu) fail(ErrorCode::unsupported_instance, "no exact measure oracle for this instance");
  return measure_of_finite_union(mu, U.prefix(k));
}

inline LowerReal open_measure_lower_real(const ComputableMeasure& mu, const EffectiveOpen& U) {
  return LowerReal([mu, U](std::uint64_t k) { return open_measure_lower(mu, U, k); });
}

inline bool support_hit(const std::optional<ComputableMeasure>& mu, const IdealBall& b) {
  return sgn(measure_of_finite_union(mu, {b})) > 0;
}

}  // namespace ergodic
