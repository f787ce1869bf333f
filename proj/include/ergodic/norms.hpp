#pragma once

#include <map>

#include "ergodic/system.hpp"

namespace ergodic {

enum class Norm { l1, l2 };

inline const char* norm_name(Norm n) { return n == Norm::l1 ? "L1" : "L2"; }

// Norms of A_p h for a centered observable h. L1 values enclose ||A_p h||_1;
// L2 values enclose the square ||A_p h||_2^2, which stays rational. Point
// intervals are exact; wider ones come from rigorous bounds used where the
// exact computation exceeds its caps:
//   doubling  correlations C(k) = int (P^k h) h through the transfer operator P,
//             with the tail |C(k)| <= ||h||_1 TV(P^k h)/2 and TV(P h) <= TV(h)/2;
//             exact L1 from the piecewise-linear sum while it fits the cap
//   shift     exact correlations (C(k) = 0 from the observable depth on);
//             exact L1 from the distribution of the sum while it fits the cap
//   rotation  rational angle a' within 2^-96, error (L + J)(p - 1) 2^-96 / 2 in L1;
//             sup bound TV(h) * blocks(p) / p from the convergent denominators
class NormOracle {
 public:
  static constexpr std::size_t kCorrelations = 64;
  static constexpr std::uint64_t kExactPieces = std::uint64_t(1) << 16;
  static constexpr std::uint64_t kExactStates = std::uint64_t(1) << 20;
  static constexpr std::uint64_t kRotationPieces = std::uint64_t(1) << 11;
  static constexpr unsigned kRotationBits = 96;

  NormOracle(System sys, Concrete h) : sys_(std::move(sys)), h_(std::move(h)) {
    if (auto* p = std::get_if<Pl>(&h_)) {
      require(sys_.space() == SpaceKind::circle, "piecewise-linear observable needs a circle system");
      l1_f_ = p->integral_abs();
      l2_f_ = p->integral_sq();
      sup_ = p->sup_abs();
      tv_ = p->total_variation();
    } else {
      require(sys_.space() == SpaceKind::cantor, "cylinder observable needs the shift");
      const CylFn& c = std::get<CylFn>(h_);
      l1_f_ = c.integral_abs(sys_.p());
      l2_f_ = c.integral_sq(sys_.p());
      sup_ = c.sup_abs();
    }
  }

  static NormOracle of(const System& sys, const Observable& f) { return NormOracle(sys, centered(sys, f)); }

  const System& system() const { return sys_; }
  const Concrete& observable() const { return h_; }
  const Rational& l1_of_h() const { return l1_f_; }
  const Rational& l2sq_of_h() const { return l2_f_; }
  const Rational& sup_of_h() const { return sup_; }
  bool is_zero() const { return sgn(sup_) == 0; }

  Interval value(std::uint64_t p, Norm n) { return n == Norm::l1 ? l1(p) : l2sq(p); }

  Interval l1(std::uint64_t p) {
    require(p >= 1, "p must be at least 1");
    if (is_zero()) return Interval::point(Rational(0));
    if (p == 1) return Interval::point(l1_f_);
    if (sys_.kind() == SystemKind::rotation && std::get<Pl>(h_).pieces() * p > kRotationPieces)
      return {Rational(0), rotation_sup_bound(p)};
    auto it = memo_l1_.find(p);
    if (it != memo_l1_.end()) return it->second;
    Interval v = l1_uncached(p);
    if (memo_l1_.size() < kMemo) memo_l1_.emplace(p, v);
    return v;
  }

  Interval l2sq(std::uint64_t p) {
    require(p >= 1, "p must be at least 1");
    if (is_zero()) return Interval::point(Rational(0));
    if (p == 1) return Interval::point(l2_f_);
    auto it = memo_l2_.find(p);
    if (it != memo_l2_.end()) return it->second;
    Interval v = l2sq_uncached(p);
    if (memo_l2_.size() < kMemo) memo_l2_.emplace(p, v);
    return v;
  }

  // uniform bound on |A_p h| for the rotation
  Rational rotation_sup_bound(std::uint64_t p) const {
    Rational b = tv_ * rat(static_cast<long>(sys_.blocks(p)), static_cast<long>(p));
    return b < sup_ ? b : sup_;
  }

 private:
  static constexpr std::size_t kMemo = 1 << 12;

  Interval l1_uncached(std::uint64_t p) {
    switch (sys_.kind()) {
      case SystemKind::shift: {
        if (auto v = shift_l1(p)) return Interval::point(*v);
        return {Rational(0), sqrt_upper(l2sq(p).hi)};
      }
      case SystemKind::doubling: {
        if (auto v = doubling_l1(p)) return Interval::point(*v);
        return {Rational(0), sqrt_upper(l2sq(p).hi)};
      }
      case SystemKind::rotation: return rotation_norm(p, Norm::l1);
    }
    return {};
  }

  Interval l2sq_uncached(std::uint64_t p) {
    switch (sys_.kind()) {
      case SystemKind::shift: return Interval::point(shift_l2sq(p));
      case SystemKind::doubling: return doubling_l2sq(p);
      case SystemKind::rotation: return rotation_norm(p, Norm::l2);
    }
    return {};
  }

  // ---- shift -------------------------------------------------------------
  const std::vector<Rational>& shift_correlations() {
    if (!corr_.empty()) return corr_;
    const CylFn& h = std::get<CylFn>(h_);
    std::size_t d = h.depth();
    for (std::size_t k = 0; k < std::max<std::size_t>(d, 1); ++k) {
      // E[h(x_0..x_{d-1}) h(x_k..x_{k+d-1})] over words of length d + k
      std::size_t len = d + k;
      if (len >= 40 || (std::size_t(1) << len) > limits().cylinders)
        fail(ErrorCode::budget_exceeded, "correlation table size");
      Rational s = 0;
      std::size_t mask = (std::size_t(1) << d) - 1;
      for (std::size_t z = 0; z < (std::size_t(1) << len); ++z) {
        Rational w = word_measure(CylFn::word_of(z, len), sys_.p());
        s += w * h.value(z >> k) * h.value(z & mask);
      }
      corr_.push_back(s);
    }
    return corr_;
  }

  Rational shift_l2sq(std::uint64_t p) {
    const auto& c = shift_correlations();
    Rational P(Integer(static_cast<unsigned long>(p)));
    Rational s = P * c[0];
    for (std::size_t k = 1; k < c.size() && k < p; ++k) s += 2 * (P - Rational(static_cast<unsigned long>(k))) * c[k];
    return s / (P * P);
  }

  // distribution of S_p over (last depth-1 symbols, sum)
  std::optional<Rational> shift_l1(std::uint64_t p) {
    const CylFn& h = std::get<CylFn>(h_);
    std::size_t d = std::max<std::size_t>(h.depth(), 1);
    CylFn g = h.extended(d);
    using State = std::map<std::pair<std::size_t, Rational>, Rational>;
    if (dp_fail_ && p >= dp_fail_) return std::nullopt;
    if (dp_step_ == 0 || dp_step_ > p) {
      dp_.clear();
      dp_work_ = 0;
      std::size_t head = d - 1;
      for (std::size_t z = 0; z < (std::size_t(1) << head); ++z)
        dp_[{z, Rational(0)}] += word_measure(CylFn::word_of(z, head), sys_.p());
      dp_step_ = 0;
    }
    std::size_t keep = (std::size_t(1) << (d - 1)) - 1;
    Rational q1 = sys_.p(), q0 = 1 - sys_.p();
    while (dp_step_ < p) {
      dp_work_ += dp_.size();
      if (dp_work_ > kExactStates) {
        dp_fail_ = dp_step_ + 1;
        dp_step_ = 0;
        dp_.clear();
        return std::nullopt;
      }
      State next;
      for (auto& [key, pr] : dp_) {
        for (std::size_t b = 0; b < 2; ++b) {
          std::size_t full = (key.first << 1) | b;
          Rational s = key.second + g.value(full);
          next[{full & keep, s}] += pr * (b ? q1 : q0);
        }
      }
      dp_ = std::move(next);
      ++dp_step_;
    }
    Rational s = 0;
    for (auto& [key, pr] : dp_) s += pr * qabs(key.second);
    return s / Rational(Integer(static_cast<unsigned long>(p)));
  }

  // ---- doubling ----------------------------------------------------------
  void doubling_correlations(std::size_t upto) {
    const Pl& h = std::get<Pl>(h_);
    if (transfer_.empty()) transfer_.push_back(h);
    while (transfer_.size() <= upto) transfer_.push_back(transfer_.back().transfer_doubling());
    while (corr_.size() <= upto) {
      std::size_t k = corr_.size();
      corr_.push_back(integral_product(transfer_[k], h));
      Rational prev_s = corr_sum_.empty() ? Rational(0) : corr_sum_.back();
      Rational prev_w = corr_wsum_.empty() ? Rational(0) : corr_wsum_.back();
      corr_sum_.push_back(k ? prev_s + corr_.back() : Rational(0));
      corr_wsum_.push_back(k ? prev_w + Rational(static_cast<unsigned long>(k)) * corr_.back() : Rational(0));
    }
  }

  Interval doubling_l2sq(std::uint64_t p) {
    std::size_t K = static_cast<std::size_t>(std::min<std::uint64_t>(p - 1, kCorrelations));
    doubling_correlations(K);
    Rational P(Integer(static_cast<unsigned long>(p)));
    Rational core = P * corr_[0] + 2 * (P * corr_sum_[K] - corr_wsum_[K]);
    if (p - 1 <= kCorrelations) return Interval::point(core / (P * P));
    Rational tail = P * l1_f_ * transfer_[K].total_variation();
    return {qmax(Rational(0), Rational((core - tail) / (P * P))), (core + tail) / (P * P)};
  }

  std::optional<Rational> doubling_l1(std::uint64_t p) {
    const Pl& h = std::get<Pl>(h_);
    // pieces(S_p) <= pieces(h) * 2^p
    if (p >= 40 || h.pieces() * (std::uint64_t(1) << p) > std::min<std::uint64_t>(kExactPieces, limits().pieces))
      return std::nullopt;
    if (sum_step_ == 0 || sum_step_ > p) {
      sum_ = h;
      sum_step_ = 1;
    }
    while (sum_step_ < p) {
      sum_ = h + sum_.compose_doubling();
      ++sum_step_;
    }
    return sum_.integral_abs() / Rational(Integer(static_cast<unsigned long>(p)));
  }

  // ---- rotation ----------------------------------------------------------
  Interval rotation_norm(std::uint64_t p, Norm n) {
    const Pl& h = std::get<Pl>(h_);
    Rational sup = rotation_sup_bound(p);
    Interval bound{Rational(0), n == Norm::l1 ? sup : Rational(sup * sup)};
    if (h.pieces() * p > kRotationPieces) return bound;
    Rational a = frac(sys_.alpha().approx(kRotationBits)), delta = pow2(-static_cast<long>(kRotationBits));
    if (sum_step_ == 0 || sum_step_ > p) {
      sum_ = h;
      sum_step_ = 1;
    }
    while (sum_step_ < p) {
      sum_ = sum_ + h.compose_rotation(Rational(Rational(static_cast<unsigned long>(sum_step_)) * a));
      ++sum_step_;
    }
    Rational P(Integer(static_cast<unsigned long>(p)));
    Rational e1 = (h.lipschitz() + h.jump_total()) * (P - 1) * delta / 2;
    if (n == Norm::l1) {
      Rational v = sum_.integral_abs() / P;
      return {qmax(Rational(0), Rational(v - e1)), qmin(Rational(v + e1), bound.hi)};
    }
    Rational q2 = sum_.integral_sq() / (P * P);
    Rational e2 = sqrt_upper(2 * sup_ * e1);
    Rational lo = qmax(Rational(0), Rational(sqrt_lower(q2) - e2)), hi = sqrt_upper(q2) + e2;
    return {lo * lo, qmin(Rational(hi * hi), bound.hi)};
  }

  System sys_;
  Concrete h_;
  Rational l1_f_, l2_f_, sup_, tv_;
  std::vector<Rational> corr_, corr_sum_, corr_wsum_;
  std::vector<Pl> transfer_;
  Pl sum_;
  std::uint64_t sum_step_ = 0;
  std::map<std::pair<std::size_t, Rational>, Rational> dp_;
  std::uint64_t dp_step_ = 0, dp_work_ = 0, dp_fail_ = 0;
  std::map<std::uint64_t, Interval> memo_l1_, memo_l2_;
};

inline Interval l_norm_birkhoff(const System& sys, const Observable& f, std::uint64_t p, Norm n) {
  NormOracle o = NormOracle::of(sys, f);
  return o.value(p, n);
}

}  // namespace ergodic
