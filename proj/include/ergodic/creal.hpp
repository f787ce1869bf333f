#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "ergodic/interval.hpp"

namespace ergodic {

// A real number given by an oracle m -> q with |q - x| <= 2^-m.
// Answers are memoized so repeated queries are bit-identical.
class CReal {
 public:
  using Oracle = std::function<Rational(unsigned)>;

  CReal() : CReal(from_rational(Rational(0))) {}

  static CReal from_rational(const Rational& q) {
    auto impl = std::make_shared<Impl>();
    impl->exact = q;
    return CReal(std::move(impl));
  }

  static CReal from_oracle(Oracle f) {
    auto impl = std::make_shared<Impl>();
    impl->oracle = std::move(f);
    return CReal(std::move(impl));
  }

  Rational approx(unsigned m) const {
    if (impl_->exact) return *impl_->exact;
    if (m > limits().max_precision)
      fail(ErrorCode::budget_exceeded, "precision " + std::to_string(m) + " above cap");
    std::lock_guard<std::mutex> lock(impl_->mu);
    auto it = impl_->memo.find(m);
    if (it != impl_->memo.end()) return it->second;
    Rational q = impl_->oracle(m);
    impl_->memo.emplace(m, q);
    return q;
  }

  Interval enclosure(unsigned m) const {
    if (impl_->exact) return Interval::point(*impl_->exact);
    return Interval::around(approx(m), pow2(-static_cast<long>(m)));
  }

  const std::optional<Rational>& exact() const { return impl_->exact; }

  friend CReal operator+(const CReal& a, const CReal& b) {
    if (a.exact() && b.exact()) return from_rational(*a.exact() + *b.exact());
    return from_oracle([a, b](unsigned m) { return Rational(a.approx(m + 1) + b.approx(m + 1)); });
  }
  friend CReal operator-(const CReal& a) {
    if (a.exact()) return from_rational(-*a.exact());
    return from_oracle([a](unsigned m) { return Rational(-a.approx(m)); });
  }
  friend CReal operator-(const CReal& a, const CReal& b) { return a + (-b); }

  // integer multiple; needs log2|k| extra bits
  friend CReal operator*(const Integer& k, const CReal& a) {
    if (a.exact()) return from_rational(Rational(k) * *a.exact());
    unsigned extra = static_cast<unsigned>(mpz_sizeinbase(k.get_mpz_t(), 2));
    return from_oracle([k, a, extra](unsigned m) { return Rational(Rational(k) * a.approx(m + extra)); });
  }

 private:
  struct Impl {
    std::optional<Rational> exact;
    Oracle oracle;
    std::mutex mu;
    std::map<unsigned, Rational> memo;
  };
  explicit CReal(std::shared_ptr<Impl> p) : impl_(std::move(p)) {}
  std::shared_ptr<Impl> impl_;
};

inline CReal creal_from_rational(const Rational& q) { return CReal::from_rational(q); }
inline Rational creal_approx(const CReal& x, unsigned m) { return x.approx(m); }

// sqrt(q) for rational q >= 0 via integer square roots
inline CReal creal_sqrt(const Rational& q) {
  require(sgn(q) >= 0, "square root of a negative rational");
  return CReal::from_oracle([q](unsigned m) {
    // floor(sqrt(q * 4^(m+1))) / 2^(m+1) is within 2^-(m+1) of sqrt(q)
    Integer scale = pow2z(2 * (m + 1));
    Integer t = floor_q(q * Rational(scale));
    Integer s;
    mpz_sqrt(s.get_mpz_t(), t.get_mpz_t());
    return rat(s, pow2z(m + 1));
  });
}

inline CReal sqrt2_minus_1() { return creal_sqrt(Rational(2)) - creal_from_rational(Rational(1)); }

enum class Ordering3 { less, greater, indistinguishable };

inline Ordering3 creal_compare(const CReal& x, const CReal& y, unsigned m) {
  Interval a = x.enclosure(m), b = y.enclosure(m);
  if (a.hi < b.lo) return Ordering3::less;
  if (b.hi < a.lo) return Ordering3::greater;
  return Ordering3::indistinguishable;
}

// lower semicomputable real: nondecreasing rational sequence
class LowerReal {
 public:
  explicit LowerReal(std::function<Rational(std::uint64_t)> f) : f_(std::move(f)) {}
  Rational at(std::uint64_t k) const { return f_(k); }

 private:
  std::function<Rational(std::uint64_t)> f_;
};

}  // namespace ergodic
